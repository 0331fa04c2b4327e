use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};

pub const PF_TOLERANCE: f64 = 1e-12;
pub const PF_ITERATION_CAP: usize = 1_000_000;

/// Square nonnegative integer matrix, row-major.
pub type Matrix = Vec<Vec<u64>>;

/// One diagonal block of the transition matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum {
    /// Geometric edges of `H_r`, ascending.
    pub edges: Vec<usize>,
    /// PF eigenvalue; `0` for zero strata.
    pub eigenvalue: f64,
    /// Row eigenvector indexed like `edges`, max entry 1; empty for zero strata.
    pub eigenvector: Vec<f64>,
}

impl Stratum {
    pub fn is_zero(&self) -> bool {
        self.eigenvector.is_empty()
    }

    /// Eigenvector entry of edge `e`, if `e ∈ H_r`.
    pub fn entry(&self, e: usize) -> Option<f64> {
        let pos = self.edges.binary_search(&e).ok()?;
        Some(self.eigenvector.get(pos).copied().unwrap_or(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrataDecomposition {
    pub matrix: Matrix,
    /// `H_1, …, H_n` bottom-up: images of edges of `H_j` only cross `H_i` with `i ≤ j`.
    pub strata: Vec<Stratum>,
    /// Zero-based stratum of each geometric edge.
    pub stratum_of: Vec<usize>,
    /// `μ_R`.
    pub mu_max: f64,
    /// Zero-based `R`: the highest stratum attaining `μ_R`.
    pub top: usize,
}

impl StrataDecomposition {
    /// Stratifies `m` and computes PF data for every nonzero block.
    pub fn new(m: Matrix) -> Result<Self> {
        let parts = stratify(&m);
        let n = m.len();
        let mut stratum_of = vec![0; n];
        let mut strata = Vec::with_capacity(parts.len());
        for (r, edges) in parts.into_iter().enumerate() {
            for &e in &edges {
                stratum_of[e] = r;
            }
            let block = sub_block(&m, &edges);
            let (eigenvalue, eigenvector) = if is_zero_block(&block) {
                (0.0, Vec::new())
            } else {
                pf_eigen(&block)?
            };
            strata.push(Stratum {
                edges,
                eigenvalue,
                eigenvector,
            });
        }
        let mu_max = strata.iter().map(|s| s.eigenvalue).fold(0.0, f64::max);
        let top = strata
            .iter()
            .rposition(|s| (s.eigenvalue - mu_max).abs() <= 1e-9 * mu_max.max(1.0))
            .unwrap_or(0);
        Ok(Self {
            matrix: m,
            strata,
            stratum_of,
            mu_max,
            top,
        })
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }
}

fn sub_block(m: &Matrix, edges: &[usize]) -> Matrix {
    edges
        .iter()
        .map(|&i| edges.iter().map(|&j| m[i][j]).collect())
        .collect()
}

fn is_zero_block(b: &Matrix) -> bool {
    b.iter().flatten().all(|&x| x == 0)
}

/// Partitions the indices of `m` into the strongly connected components of
/// the digraph `j → i` (`m_ij > 0`), ordered bottom-up so that `m_ij > 0`
/// implies `stratum(i) ≤ stratum(j)`. Among the admissible components, the
/// one with the smallest index is placed first.
pub fn stratify(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.len();
    let mut g = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x > 0 {
                g.add_edge(nodes[j], nodes[i], ());
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    comps.sort_by_key(|c| c[0]);
    let mut comp_of = vec![0; n];
    for (c, members) in comps.iter().enumerate() {
        for &e in members {
            comp_of[e] = c;
        }
    }
    // component c depends on d when some edge of c maps across d
    let mut pending: Vec<usize> = vec![0; comps.len()];
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let (lo, hi) = (comp_of[i], comp_of[j]);
            if x > 0 && lo != hi && !dependents[lo].contains(&hi) {
                dependents[lo].push(hi);
                pending[hi] += 1;
            }
        }
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..comps.len()).filter(|&c| pending[c] == 0).collect();
    let mut order = Vec::with_capacity(comps.len());
    while let Some(c) = ready.pop_first() {
        order.push(c);
        for &d in &dependents[c] {
            pending[d] -= 1;
            if pending[d] == 0 {
                ready.insert(d);
            }
        }
    }
    order.into_iter().map(|c| comps[c].clone()).collect()
}

/// Perron-Frobenius eigenvalue and row eigenvector (`v·B = μv`, max entry 1)
/// of an irreducible nonzero nonnegative matrix.
///
/// Power iteration on `B + I` from the all-ones vector; the shift makes the
/// dominant eigenvalue strictly dominant even for periodic blocks.
pub fn pf_eigen(b: &Matrix) -> Result<(f64, Vec<f64>)> {
    let n = b.len();
    if n == 1 {
        return Ok((b[0][0] as f64, vec![1.0]));
    }
    let bf: Vec<Vec<f64>> = b
        .iter()
        .map(|row| row.iter().map(|&x| x as f64).collect())
        .collect();
    let mut v = vec![1.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..PF_ITERATION_CAP {
        // w = v·(B + I)
        let mut w = v.clone();
        for (i, &vi) in v.iter().enumerate() {
            for (j, wj) in w.iter_mut().enumerate() {
                *wj += vi * bf[i][j];
            }
        }
        let top = w.iter().cloned().fold(0.0, f64::max);
        for x in &mut w {
            *x /= top;
        }
        let (mu, res) = rayleigh(&bf, &w);
        residual = res;
        v = w;
        if res <= PF_TOLERANCE {
            return Ok((mu, v));
        }
    }
    Err(Error::NonConvergence {
        what: "Perron-Frobenius eigenpair".into(),
        detail: format!("relative residual {residual:.3e} after {PF_ITERATION_CAP} iterations"),
        best_upper_bound: None,
    })
}

/// `μ = (v·B·vᵀ)/(v·vᵀ)` and the relative residual `‖vB − μv‖∞ / (μ‖v‖∞)`.
fn rayleigh(b: &[Vec<f64>], v: &[f64]) -> (f64, f64) {
    let n = v.len();
    let mut vb = vec![0.0; n];
    for (i, &vi) in v.iter().enumerate() {
        for (j, x) in vb.iter_mut().enumerate() {
            *x += vi * b[i][j];
        }
    }
    let num: f64 = vb.iter().zip(v).map(|(a, b)| a * b).sum();
    let den: f64 = v.iter().map(|x| x * x).sum();
    let mu = num / den;
    let err = vb
        .iter()
        .zip(v)
        .map(|(a, b)| (a - mu * b).abs())
        .fold(0.0, f64::max);
    let scale = v.iter().cloned().fold(0.0, f64::max) * mu.max(f64::MIN_POSITIVE);
    (mu, err / scale)
}

/// Whether the digraph `j → i` (`m_ij > 0`) is strongly connected.
pub fn is_irreducible(m: &Matrix) -> bool {
    stratify(m).len() == 1 && !is_zero_block(m)
}
