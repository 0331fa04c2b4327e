//! Free products `G = G₁ ∗ … ∗ G_k ∗ F_r` of finite groups with a free group,
//! their normal forms, automorphisms and relative length functions.

mod automorphism;
mod group;
mod length;
mod word;

pub use automorphism::{Automorphism, AutomorphismData, FactorImage};
pub use group::FiniteGroup;
pub use length::{LengthFunctionDescriptor, LengthKind, DEFAULT_SEARCH_BUDGET};
pub use word::{Syllable, Word};

use crate::error::{Diagnostic, Error, Result};

/// A free product of finite factors with a free group of rank `free_rank`,
/// together with a finite relative generating set.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    factors: Vec<FiniteGroup>,
    factor_names: Vec<String>,
    free_names: Vec<String>,
    relative_generators: Vec<Word>,
    search_budget: usize,
}

impl Presentation {
    /// Presentation with the free basis as relative generating set.
    pub fn new(factors: Vec<FiniteGroup>, free_rank: usize) -> Result<Self> {
        let factor_names = (1..=factors.len()).map(|i| format!("G{i}")).collect();
        let free_names = (1..=free_rank).map(|j| format!("x{j}")).collect();
        Self::with_names(factors, factor_names, free_names)
    }

    pub fn with_names(
        factors: Vec<FiniteGroup>,
        factor_names: Vec<String>,
        free_names: Vec<String>,
    ) -> Result<Self> {
        if factors.is_empty() && free_names.is_empty() {
            return Err(Error::input(
                "presentation",
                "free product needs at least one factor or free generator",
            ));
        }
        if factor_names.len() != factors.len() {
            return Err(Error::input("presentation", "one name per factor required"));
        }
        let basis = (0..free_names.len())
            .map(|j| Word(vec![Syllable::free(j)]))
            .collect();
        Ok(Self {
            factors,
            factor_names,
            free_names,
            relative_generators: basis,
            search_budget: DEFAULT_SEARCH_BUDGET,
        })
    }

    /// Replaces the relative generating set `E`.
    pub fn with_relative_generators(mut self, generators: Vec<Word>) -> Result<Self> {
        for (i, w) in generators.iter().enumerate() {
            self.check_word(w)
                .map_err(|e| Error::input(format!("relative_generators[{i}]"), e.to_string()))?;
            if w.is_identity() {
                return Err(Error::input(
                    format!("relative_generators[{i}]"),
                    "relative generator is the identity",
                ));
            }
        }
        self.relative_generators = generators;
        Ok(self)
    }

    /// Word-length budget for the breadth-first search used with extended generating sets.
    pub fn with_search_budget(mut self, budget: usize) -> Self {
        self.search_budget = budget;
        self
    }

    pub fn factors(&self) -> &[FiniteGroup] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &FiniteGroup {
        &self.factors[i]
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn free_rank(&self) -> usize {
        self.free_names.len()
    }

    pub fn factor_names(&self) -> &[String] {
        &self.factor_names
    }

    pub fn free_names(&self) -> &[String] {
        &self.free_names
    }

    pub fn relative_generators(&self) -> &[Word] {
        &self.relative_generators
    }

    pub fn search_budget(&self) -> usize {
        self.search_budget
    }

    /// True when `E` is exactly the free basis (in any order).
    pub fn uses_free_basis(&self) -> bool {
        let mut gens: Vec<&Word> = self.relative_generators.iter().collect();
        gens.sort();
        gens.dedup();
        gens.len() == self.free_rank()
            && gens
                .iter()
                .all(|w| matches!(w.syllables(), [Syllable::Free { inverse: false, .. }]))
    }

    /// Structural diagnostics: degenerate decompositions and generation by `E ∪ Ĝ`.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let k = self.factor_count();
        let r = self.free_rank();
        if k == 1 && r == 0 {
            out.push(Diagnostic::note(
                "no hyperbolic elements",
                "a single factor with no free part has no hyperbolic elements",
            ));
        }
        for (i, g) in self.factors.iter().enumerate() {
            if g.order() == 1 {
                out.push(Diagnostic::note(
                    "trivial factor",
                    format!("factor {} is trivial", self.factor_names[i]),
                ));
            }
        }
        if !self.uses_free_basis() {
            for j in 0..r {
                let target = Word(vec![Syllable::free(j)]);
                if self.search_length(&target, false).is_err() {
                    out.push(Diagnostic::violation(
                        "not generating",
                        format!(
                            "free generator {} not reached from E within {} letters",
                            self.free_names[j], self.search_budget
                        ),
                    ));
                }
            }
        }
        out
    }

    pub(crate) fn check_syllable(&self, s: &Syllable) -> Result<()> {
        match *s {
            Syllable::Factor { factor, elem } => {
                let g = self.factors.get(factor).ok_or_else(|| {
                    Error::input(
                        "letter",
                        format!("factor index {} out of range", factor + 1),
                    )
                })?;
                if !g.contains(elem) {
                    return Err(Error::input(
                        "letter",
                        format!(
                            "element {elem} is not in factor {} of order {}",
                            self.factor_names[factor],
                            g.order()
                        ),
                    ));
                }
            }
            Syllable::Free { generator, .. } => {
                if generator >= self.free_rank() {
                    return Err(Error::input(
                        "letter",
                        format!("free generator index {} out of range", generator + 1),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        w.syllables()
            .iter()
            .try_for_each(|s| self.check_syllable(s))
    }

    /// Reduces an arbitrary letter sequence to its alternating normal form.
    pub fn normal_form(&self, letters: &[Syllable]) -> Result<Word> {
        letters.iter().try_for_each(|s| self.check_syllable(s))?;
        let mut out = Vec::with_capacity(letters.len());
        for &s in letters {
            self.push_letter(&mut out, s);
        }
        Ok(Word(out))
    }

    /// Appends one letter to a reduced stack, keeping it reduced.
    #[inline]
    pub(crate) fn push_letter(&self, stack: &mut Vec<Syllable>, s: Syllable) {
        match s {
            Syllable::Factor { factor, elem } => {
                if elem == 0 {
                    return;
                }
                if let Some(Syllable::Factor {
                    factor: top_factor,
                    elem: top_elem,
                }) = stack.last_mut()
                {
                    if *top_factor == factor {
                        let product = self.factors[factor].mul(*top_elem, elem);
                        if product == 0 {
                            stack.pop();
                        } else {
                            *top_elem = product;
                        }
                        return;
                    }
                }
                stack.push(s);
            }
            Syllable::Free { generator, inverse } => {
                if let Some(Syllable::Free {
                    generator: g,
                    inverse: i,
                }) = stack.last()
                {
                    if *g == generator && *i != inverse {
                        stack.pop();
                        return;
                    }
                }
                stack.push(s);
            }
        }
    }

    pub(crate) fn extend_reduced(&self, stack: &mut Vec<Syllable>, w: &Word) {
        for &s in w.syllables() {
            self.push_letter(stack, s);
        }
    }

    pub fn inverse_letter(&self, s: Syllable) -> Syllable {
        match s {
            Syllable::Factor { factor, elem } => Syllable::Factor {
                factor,
                elem: self.factors[factor].inv(elem),
            },
            Syllable::Free { generator, inverse } => Syllable::Free {
                generator,
                inverse: !inverse,
            },
        }
    }

    pub fn mul(&self, u: &Word, v: &Word) -> Word {
        let mut out = u.0.clone();
        self.extend_reduced(&mut out, v);
        Word(out)
    }

    pub fn product<'a>(&self, words: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut out = Vec::new();
        for w in words {
            self.extend_reduced(&mut out, w);
        }
        Word(out)
    }

    pub fn inverse(&self, w: &Word) -> Word {
        Word(
            w.syllables()
                .iter()
                .rev()
                .map(|&s| self.inverse_letter(s))
                .collect(),
        )
    }

    pub fn pow(&self, w: &Word, n: i64) -> Word {
        let base = if n < 0 { self.inverse(w) } else { w.clone() };
        let mut out = Vec::new();
        for _ in 0..n.unsigned_abs() {
            self.extend_reduced(&mut out, &base);
        }
        Word(out)
    }

    /// `h⁻¹ g h`.
    pub fn conjugate(&self, g: &Word, h: &Word) -> Word {
        self.product([&self.inverse(h), g, h])
    }

    /// Splits `g` as `c · core · c⁻¹` with `core` cyclically reduced.
    ///
    /// A cyclically reduced core of length one is a single factor letter
    /// (elliptic) or a single free letter.
    pub fn cyclic_reduction(&self, g: &Word) -> (Word, Word) {
        let s = g.syllables();
        let (mut lo, mut hi) = (0usize, s.len());
        let mut conj = Vec::new();
        let mut merged_last: Option<Syllable> = None;
        loop {
            if hi - lo < 2 {
                break;
            }
            let first = s[lo];
            let last = merged_last.unwrap_or(s[hi - 1]);
            match (first, last) {
                (
                    Syllable::Free {
                        generator: a,
                        inverse: ia,
                    },
                    Syllable::Free {
                        generator: b,
                        inverse: ib,
                    },
                ) if a == b && ia != ib => {
                    conj.push(first);
                    lo += 1;
                    hi -= 1;
                    merged_last = None;
                }
                (
                    Syllable::Factor {
                        factor: fa,
                        elem: a,
                    },
                    Syllable::Factor {
                        factor: fb,
                        elem: b,
                    },
                ) if fa == fb => {
                    // g = a·m·b is conjugate to m·(b·a)
                    conj.push(first);
                    lo += 1;
                    let ba = self.factors[fa].mul(b, a);
                    if ba == 0 {
                        hi -= 1;
                        merged_last = None;
                    } else {
                        merged_last = Some(Syllable::Factor {
                            factor: fa,
                            elem: ba,
                        });
                    }
                }
                _ => break,
            }
        }
        let mut core: Vec<Syllable> = s[lo..hi].to_vec();
        if let Some(m) = merged_last {
            if let Some(l) = core.last_mut() {
                *l = m;
            }
        }
        (Word(core), Word(conj))
    }

    /// Canonical representative of the conjugacy class of `g`.
    pub fn canonical_cyclic(&self, g: &Word) -> Word {
        let (core, _) = self.cyclic_reduction(g);
        match core.syllables() {
            [] => core,
            [Syllable::Factor { factor, elem }] => Word(vec![Syllable::Factor {
                factor: *factor,
                elem: self.factors[*factor].class_representative(*elem),
            }]),
            letters => {
                let k = word::least_rotation(letters);
                let mut rotated = letters[k..].to_vec();
                rotated.extend_from_slice(&letters[..k]);
                Word(rotated)
            }
        }
    }

    pub fn are_conjugate(&self, g: &Word, h: &Word) -> bool {
        self.canonical_cyclic(g) == self.canonical_cyclic(h)
    }

    /// Whether `g` is hyperbolic, i.e. not conjugate into a factor.
    pub fn is_hyperbolic(&self, g: &Word) -> bool {
        let (core, _) = self.cyclic_reduction(g);
        match core.syllables() {
            [] => false,
            [s] => !s.is_factor(),
            _ => true,
        }
    }

    /// Length of a shortest word in `E ∪ Ĝ` representing `g`.
    pub fn relative_length(&self, g: &Word) -> Result<usize> {
        if self.uses_free_basis() {
            return Ok(g.len());
        }
        self.search_length(g, false)
    }

    /// Minimal relative length over the conjugacy class of `g`.
    pub fn relative_conjugacy_length(&self, g: &Word) -> Result<usize> {
        if self.uses_free_basis() {
            return Ok(self.cyclic_reduction(g).0.len());
        }
        self.search_length(g, true)
    }

    fn search_length(&self, g: &Word, up_to_conjugacy: bool) -> Result<usize> {
        length::breadth_first_length(self, g, up_to_conjugacy)
    }

    /// All nontrivial factor elements, the set `Ĝ`.
    pub fn factor_letters(&self) -> impl Iterator<Item = Syllable> + '_ {
        self.factors
            .iter()
            .enumerate()
            .flat_map(|(i, g)| (1..g.order()).map(move |a| Syllable::Factor { factor: i, elem: a }))
    }

    /// Human-readable rendering using the presentation's generator names.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        w.syllables()
            .iter()
            .map(|s| match *s {
                Syllable::Factor { factor, elem } => format!("{}:{}", factor + 1, elem),
                Syllable::Free { generator, inverse } => format!(
                    "{}{}",
                    self.free_names[generator],
                    if inverse { "'" } else { "" }
                ),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}
