use crate::error::{Error, Result};

/// A finite group given by its multiplication table. Element `0` is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    product: Vec<usize>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from a full multiplication table, checking the group axioms exhaustively.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::input("table", "group table is empty"));
        }
        let mut product = Vec::with_capacity(order * order);
        for (a, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::input(
                    format!("table[{a}]"),
                    format!("row has {} entries, expected {order}", row.len()),
                ));
            }
            for (b, &c) in row.iter().enumerate() {
                if c >= order {
                    return Err(Error::input(
                        format!("table[{a}][{b}]"),
                        format!("entry {c} is not an element of a group of order {order}"),
                    ));
                }
                product.push(c);
            }
        }
        let mul = |a: usize, b: usize| product[a * order + b];

        for g in 0..order {
            if mul(0, g) != g || mul(g, 0) != g {
                return Err(Error::input(
                    "table",
                    format!("element 0 is not a two-sided identity (fails at {g})"),
                ));
            }
        }
        let mut inverse = vec![usize::MAX; order];
        for g in 0..order {
            match (0..order).find(|&h| mul(g, h) == 0) {
                Some(h) if mul(h, g) == 0 => inverse[g] = h,
                _ => {
                    return Err(Error::input(
                        "table",
                        format!("element {g} has no two-sided inverse"),
                    ))
                }
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(Error::input(
                            "table",
                            format!("associativity fails for ({a}, {b}, {c})"),
                        ));
                    }
                }
            }
        }
        Ok(Self {
            order,
            product,
            inverse,
        })
    }

    /// The cyclic group of order `n`, with element `i` standing for the `i`-th power of a generator.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input(
                "cyclic",
                "cyclic group order must be positive",
            ));
        }
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(table)
    }

    pub fn trivial() -> Self {
        Self {
            order: 1,
            product: vec![0],
            inverse: vec![0],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.product[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn contains(&self, a: usize) -> bool {
        a < self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.product
            .chunks(self.order)
            .map(<[usize]>::to_vec)
            .collect()
    }

    /// `c⁻¹ · a · c`.
    pub fn conjugate(&self, a: usize, c: usize) -> usize {
        self.mul(self.mul(self.inv(c), a), c)
    }

    /// Smallest element index in the conjugacy class of `a`.
    pub fn class_representative(&self, a: usize) -> usize {
        (0..self.order)
            .map(|c| self.conjugate(a, c))
            .min()
            .unwrap_or(a)
    }

    /// Whether the table `map` (indexed by elements of `self`) is an isomorphism onto `target`.
    pub fn is_isomorphism_onto(&self, target: &FiniteGroup, map: &[usize]) -> bool {
        if map.len() != self.order || target.order != self.order {
            return false;
        }
        let mut seen = vec![false; target.order];
        for &m in map {
            if m >= target.order || seen[m] {
                return false;
            }
            seen[m] = true;
        }
        (0..self.order)
            .all(|a| (0..self.order).all(|b| map[self.mul(a, b)] == target.mul(map[a], map[b])))
    }
}
