use std::fmt;

use serde::Serialize;

/// A letter of a free-product word.
///
/// The derived ordering puts factor letters before free letters and is the
/// syllable order used for canonical cyclic representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Syllable {
    /// Element `elem` of factor `factor` (both zero-based in code).
    Factor { factor: usize, elem: usize },
    /// Free generator `generator`, inverted when `inverse` is set.
    Free { generator: usize, inverse: bool },
}

impl Syllable {
    pub fn factor(factor: usize, elem: usize) -> Self {
        Syllable::Factor { factor, elem }
    }

    pub fn free(generator: usize) -> Self {
        Syllable::Free {
            generator,
            inverse: false,
        }
    }

    pub fn free_inv(generator: usize) -> Self {
        Syllable::Free {
            generator,
            inverse: true,
        }
    }

    pub fn is_factor(&self) -> bool {
        matches!(self, Syllable::Factor { .. })
    }
}

/// An element of the free product in alternating reduced form.
///
/// Values are only produced by [`super::Presentation`] methods, which keep the
/// alternation and free-reduction invariants.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Word(pub(crate) Vec<Syllable>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match *s {
                Syllable::Factor { factor, elem } => write!(f, "{}:{}", factor + 1, elem)?,
                Syllable::Free { generator, inverse } => {
                    write!(f, "x{}{}", generator + 1, if inverse { "'" } else { "" })?
                }
            }
        }
        Ok(())
    }
}

/// Index of the lexicographically least rotation of `s` (Booth's algorithm).
pub(crate) fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| &s[i % n];
    let mut failure: Vec<isize> = vec![-1; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = failure[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = failure[i as usize];
        }
        if i == -1 && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            failure[j - k] = -1;
        } else {
            failure[j - k] = i + 1;
        }
    }
    k % n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_least_rotation(s: &[u8]) -> Vec<u8> {
        (0..s.len().max(1))
            .map(|r| {
                let mut v = s[r.min(s.len())..].to_vec();
                v.extend_from_slice(&s[..r.min(s.len())]);
                v
            })
            .min()
            .unwrap()
    }

    #[test]
    fn booth_matches_brute_force() {
        let cases: [&[u8]; 6] = [b"", b"a", b"ba", b"bbaab", b"abab", b"cabcab"];
        for s in cases {
            let k = least_rotation(s);
            let mut rot = s[k.min(s.len())..].to_vec();
            rot.extend_from_slice(&s[..k.min(s.len())]);
            assert_eq!(rot, brute_least_rotation(s), "{:?}", s);
        }
    }

    #[test]
    fn syllable_order_puts_factors_first() {
        assert!(Syllable::factor(5, 3) < Syllable::free(0));
        assert!(Syllable::factor(0, 2) < Syllable::factor(1, 1));
        assert!(Syllable::free(0) < Syllable::free_inv(0));
    }
}
