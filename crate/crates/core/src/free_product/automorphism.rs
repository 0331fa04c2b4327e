use super::{Presentation, Syllable, Word};
use crate::error::{Diagnostic, Error, Result};

/// Image of one factor: `a ∈ G_i` goes to `w⁻¹ · φ(a) · w` with `φ(a) ∈ G_target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorImage {
    pub target: usize,
    pub map: Vec<usize>,
    pub conjugator: Word,
}

/// Images of all generators under one automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismData {
    pub factor_images: Vec<FactorImage>,
    pub free_images: Vec<Word>,
}

impl AutomorphismData {
    pub fn identity(p: &Presentation) -> Self {
        Self {
            factor_images: (0..p.factor_count())
                .map(|i| FactorImage {
                    target: i,
                    map: (0..p.factor(i).order()).collect(),
                    conjugator: Word::identity(),
                })
                .collect(),
            free_images: (0..p.free_rank())
                .map(|j| Word(vec![Syllable::free(j)]))
                .collect(),
        }
    }

    fn check_shape(&self, p: &Presentation, label: &str) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.factor_images.len() != p.factor_count() {
            out.push(Diagnostic::violation(
                "automorphism shape",
                format!(
                    "{label}: {} factor images for {} factors",
                    self.factor_images.len(),
                    p.factor_count()
                ),
            ));
        }
        if self.free_images.len() != p.free_rank() {
            out.push(Diagnostic::violation(
                "automorphism shape",
                format!(
                    "{label}: {} free images for rank {}",
                    self.free_images.len(),
                    p.free_rank()
                ),
            ));
        }
        if !out.is_empty() {
            return out;
        }
        let mut hit = vec![false; p.factor_count()];
        for (i, img) in self.factor_images.iter().enumerate() {
            let Some(target) = p.factors().get(img.target) else {
                out.push(Diagnostic::violation(
                    "factor permutation",
                    format!("{label}: factor {} maps to missing factor", i + 1),
                ));
                continue;
            };
            if std::mem::replace(&mut hit[img.target], true) {
                out.push(Diagnostic::violation(
                    "factor permutation",
                    format!("{label}: factor {} hit twice", img.target + 1),
                ));
            }
            if !p.factor(i).is_isomorphism_onto(target, &img.map) {
                out.push(Diagnostic::violation(
                    "factor isomorphism",
                    format!(
                        "{label}: map of factor {} is not an isomorphism onto factor {}",
                        i + 1,
                        img.target + 1
                    ),
                ));
            }
            if let Err(e) = img
                .conjugator
                .syllables()
                .iter()
                .try_for_each(|s| p.check_syllable(s))
            {
                out.push(Diagnostic::violation(
                    "bad word",
                    format!("{label}: conjugator of factor {}: {e}", i + 1),
                ));
            }
        }
        for (j, w) in self.free_images.iter().enumerate() {
            if let Err(e) = w.syllables().iter().try_for_each(|s| p.check_syllable(s)) {
                out.push(Diagnostic::violation(
                    "bad word",
                    format!("{label}: image of {}: {e}", p.free_names()[j]),
                ));
            }
        }
        out
    }
}

/// An automorphism of `G` preserving the free factor system, stored with an
/// explicit inverse. Acts on the right: `g ↦ gα`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    forward: AutomorphismData,
    inverse: AutomorphismData,
    // cached inverses of free images and conjugators, used by `apply`
    forward_cache: ApplyCache,
    inverse_cache: ApplyCache,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct ApplyCache {
    free_inverse_images: Vec<Word>,
    conjugator_inverses: Vec<Word>,
}

impl ApplyCache {
    fn build(p: &Presentation, data: &AutomorphismData) -> Self {
        Self {
            free_inverse_images: data.free_images.iter().map(|w| p.inverse(w)).collect(),
            conjugator_inverses: data
                .factor_images
                .iter()
                .map(|f| p.inverse(&f.conjugator))
                .collect(),
        }
    }
}

impl Automorphism {
    /// Validates both directions and checks that `inverse ∘ forward` is the identity on generators.
    pub fn new(
        p: &Presentation,
        forward: AutomorphismData,
        inverse: AutomorphismData,
    ) -> Result<Self> {
        let mut diags = forward.check_shape(p, "automorphism");
        diags.extend(inverse.check_shape(p, "declared inverse"));
        Error::check(diags)?;
        let normalize = |data: AutomorphismData| -> Result<AutomorphismData> {
            let free_images = data
                .free_images
                .iter()
                .map(|w| p.normal_form(w.syllables()))
                .collect::<Result<_>>()?;
            let factor_images = data
                .factor_images
                .into_iter()
                .map(|f| {
                    Ok(FactorImage {
                        conjugator: p.normal_form(f.conjugator.syllables())?,
                        ..f
                    })
                })
                .collect::<Result<_>>()?;
            Ok(AutomorphismData {
                factor_images,
                free_images,
            })
        };
        let forward = normalize(forward)?;
        let inverse = normalize(inverse)?;
        let aut = Self {
            forward_cache: ApplyCache::build(p, &forward),
            inverse_cache: ApplyCache::build(p, &inverse),
            forward,
            inverse,
        };
        Error::check(aut.inverse_diagnostics(p))?;
        Ok(aut)
    }

    pub fn identity(p: &Presentation) -> Self {
        let id = AutomorphismData::identity(p);
        Self::new(p, id.clone(), id).expect("identity automorphism is valid")
    }

    fn inverse_diagnostics(&self, p: &Presentation) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut check = |g: Word, label: String| {
            let there = self.apply(p, &g);
            if self.apply_inverse(p, &there) != g || self.apply(p, &self.apply_inverse(p, &g)) != g
            {
                out.push(Diagnostic::violation(
                    "inverse mismatch",
                    format!("declared inverse does not undo the automorphism on {label}"),
                ));
            }
        };
        for j in 0..p.free_rank() {
            check(Word(vec![Syllable::free(j)]), p.free_names()[j].clone());
        }
        for s in p.factor_letters() {
            check(Word(vec![s]), p.format_word(&Word(vec![s])));
        }
        out
    }

    pub fn forward(&self) -> &AutomorphismData {
        &self.forward
    }

    pub fn declared_inverse(&self) -> &AutomorphismData {
        &self.inverse
    }

    /// The inverse automorphism as a value.
    pub fn inverted(&self) -> Self {
        Self {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            forward_cache: self.inverse_cache.clone(),
            inverse_cache: self.forward_cache.clone(),
        }
    }

    /// Image of a single generator letter.
    pub fn letter_image(&self, p: &Presentation, s: Syllable) -> Word {
        let mut out = Vec::new();
        push_image(p, &self.forward, &self.forward_cache, &mut out, s);
        Word(out)
    }

    /// `g ↦ gα`.
    pub fn apply(&self, p: &Presentation, g: &Word) -> Word {
        apply_with(p, &self.forward, &self.forward_cache, g)
    }

    /// `g ↦ gα⁻¹`.
    pub fn apply_inverse(&self, p: &Presentation, g: &Word) -> Word {
        apply_with(p, &self.inverse, &self.inverse_cache, g)
    }

    /// `g α^k`.
    pub fn apply_power(&self, p: &Presentation, g: &Word, k: usize) -> Word {
        (0..k).fold(g.clone(), |w, _| self.apply(p, &w))
    }
}

fn apply_with(p: &Presentation, data: &AutomorphismData, cache: &ApplyCache, g: &Word) -> Word {
    let mut out = Vec::with_capacity(g.len() * 2);
    for &s in g.syllables() {
        push_image(p, data, cache, &mut out, s);
    }
    Word(out)
}

fn push_image(
    p: &Presentation,
    data: &AutomorphismData,
    cache: &ApplyCache,
    out: &mut Vec<Syllable>,
    s: Syllable,
) {
    match s {
        Syllable::Factor { factor, elem } => {
            let img = &data.factor_images[factor];
            p.extend_reduced(out, &cache.conjugator_inverses[factor]);
            p.push_letter(
                out,
                Syllable::Factor {
                    factor: img.target,
                    elem: img.map[elem],
                },
            );
            p.extend_reduced(out, &img.conjugator);
        }
        Syllable::Free { generator, inverse } => {
            let w = if inverse {
                &cache.free_inverse_images[generator]
            } else {
                &data.free_images[generator]
            };
            p.extend_reduced(out, w);
        }
    }
}
