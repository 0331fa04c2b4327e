use std::collections::HashSet;

use serde::Serialize;

use super::{Presentation, Syllable, Word};
use crate::error::{Error, Result};

/// Default word-length budget for relative length searches over extended `E`.
pub const DEFAULT_SEARCH_BUDGET: usize = 12;

/// Hard cap on distinct group elements visited by one search.
const MAX_VISITED: usize = 2_000_000;

/// Shortest `E ∪ E⁻¹ ∪ Ĝ` word for `g` (or for some conjugate of `g`), by
/// breadth-first search over reduced words.
pub(super) fn breadth_first_length(
    p: &Presentation,
    g: &Word,
    up_to_conjugacy: bool,
) -> Result<usize> {
    let target = if up_to_conjugacy {
        p.canonical_cyclic(g)
    } else {
        g.clone()
    };
    let hit = |w: &Word| {
        if up_to_conjugacy {
            p.canonical_cyclic(w) == target
        } else {
            *w == target
        }
    };
    if hit(&Word::identity()) {
        return Ok(0);
    }

    let mut alphabet: Vec<Word> = Vec::new();
    for e in p.relative_generators() {
        alphabet.push(e.clone());
        alphabet.push(p.inverse(e));
    }
    alphabet.extend(p.factor_letters().map(|s| Word(vec![s])));
    alphabet.sort();
    alphabet.dedup();

    let mut seen: HashSet<Word> = HashSet::new();
    seen.insert(Word::identity());
    let mut frontier = vec![Word::identity()];
    for depth in 1..=p.search_budget() {
        let mut next = Vec::new();
        for w in &frontier {
            for letter in &alphabet {
                let v = p.mul(w, letter);
                if seen.contains(&v) {
                    continue;
                }
                if hit(&v) {
                    return Ok(depth);
                }
                seen.insert(v.clone());
                next.push(v);
                if seen.len() > MAX_VISITED {
                    return Err(non_convergence(p, g, up_to_conjugacy, "visited-set cap"));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Err(non_convergence(p, g, up_to_conjugacy, "word-length budget"))
}

fn non_convergence(p: &Presentation, g: &Word, conj: bool, which: &str) -> Error {
    // E ⊇ free basis gives the syllable count as an upper bound
    let has_basis = (0..p.free_rank()).all(|j| {
        p.relative_generators()
            .iter()
            .any(|w| w.syllables() == [Syllable::free(j)])
    });
    let bound = has_basis.then(|| {
        if conj {
            p.cyclic_reduction(g).0.len()
        } else {
            g.len()
        }
    });
    Error::NonConvergence {
        what: "relative length search".into(),
        detail: format!(
            "no word found for {} within the {which} (budget {})",
            p.format_word(g),
            p.search_budget()
        ),
        best_upper_bound: bound,
    }
}

/// Which conjugacy length function a growth computation evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthKind {
    RelativeConjugacy,
    Translation,
}

/// A length function together with its 𝒢-boundedness witnesses: elliptic
/// classes have length at most `elliptic_bound`, hyperbolic ones at least
/// `hyperbolic_floor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthFunctionDescriptor {
    pub kind: LengthKind,
    pub elliptic_bound: f64,
    pub hyperbolic_floor: f64,
}

impl LengthFunctionDescriptor {
    /// Relative conjugacy length: elliptic classes have length 1, hyperbolic ones at least 1.
    pub fn relative() -> Self {
        Self {
            kind: LengthKind::RelativeConjugacy,
            elliptic_bound: 1.0,
            hyperbolic_floor: 1.0,
        }
    }

    /// Translation length: elliptics are 0, hyperbolics cross at least one edge.
    pub fn translation(shortest_edge: f64) -> Self {
        Self {
            kind: LengthKind::Translation,
            elliptic_bound: 0.0,
            hyperbolic_floor: shortest_edge,
        }
    }
}
