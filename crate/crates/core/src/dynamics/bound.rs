use serde::Serialize;

use super::{growth_sequence, LengthFunction};
use crate::error::{Error, Result};
use crate::free_product::Word;
use crate::graph_map::TopologicalRepresentative;
use crate::graph_of_groups::{DirEdge, GraphPath, MarkedMetricGraph};

/// `A(r,i) = max_{e ∈ H_i} L_r(f(e)) / ℓ(e)` (zero-based strata, `r ≤ i`).
pub fn coefficient_a(
    f: &TopologicalRepresentative,
    metric: &MarkedMetricGraph,
    r: usize,
    i: usize,
) -> f64 {
    f.strata().strata[i]
        .edges
        .iter()
        .map(|&e| {
            let d = DirEdge::forward(e);
            f.r_length(f.edge_image(d), r) / metric.length(d)
        })
        .fold(0.0, f64::max)
}

/// `|I_k[r,m]| = C(k+m−r, k)`: non-decreasing `k`-tuples in `{r, …, m}`.
pub fn index_count(k: usize, r: usize, m: usize) -> u128 {
    assert!(1 <= r && r <= m, "need 1 ≤ r ≤ m");
    binomial((k + m - r) as u128, k as u128)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStep {
    pub k: usize,
    /// `Σ_r |I_k[r,m]|`.
    pub index_total: u128,
    pub p: f64,
    pub bound: f64,
    pub observed: f64,
    pub holds: bool,
    /// `L_r(gα^k) ≤ Σ_{i≥r} A(r,i)·ℓ(gα^{k-1} ∩ H_i)` for every stratum.
    pub stratum_inequalities_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub element: String,
    /// `coefficients[r][i] = A(r,i)` for `r ≤ i`, zero below the diagonal.
    pub coefficients: Vec<Vec<f64>>,
    /// `𝒜 = Π_{r<i} max(1, A(r,i))`.
    pub script_a: f64,
    pub mu_max: f64,
    pub initial_length: f64,
    pub steps: Vec<BoundStep>,
    /// `P(k)` for `k = 1..=m+2`, used for the degree check.
    pub p_samples: Vec<f64>,
    /// Highest order with a nonzero finite difference of `P`.
    pub p_degree: usize,
    pub degree_ok: bool,
    pub holds: bool,
    pub relative_tolerance: f64,
}

const RELATIVE_TOLERANCE: f64 = 1e-9;

/// Checks `l_T(gα^k) ≤ P(k)·μ_R^k·l_T(g)` for `k = 1..=iterations` on the PF
/// metric, together with the per-stratum inequalities behind it.
pub fn bound_check(
    f: &TopologicalRepresentative,
    g: &Word,
    iterations: usize,
    word_guard: usize,
) -> Result<BoundReport> {
    let metric = f.pf_metric()?;
    let graph = f.graph();
    let p = graph.presentation();
    if !p.is_hyperbolic(g) {
        return Err(Error::input(
            "element",
            format!("{} is not hyperbolic", p.format_word(g)),
        ));
    }
    let m = f.strata().len();
    let coefficients: Vec<Vec<f64>> = (0..m)
        .map(|r| {
            (0..m)
                .map(|i| {
                    if i >= r {
                        coefficient_a(f, &metric, r, i)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let script_a: f64 = (0..m)
        .flat_map(|r| ((r + 1)..m).map(move |i| (r, i)))
        .map(|(r, i)| coefficients[r][i].max(1.0))
        .product();
    let poly = |k: usize| -> (u128, f64) {
        let total: u128 = (1..=m).map(|r| index_count(k, r, m)).sum();
        (total, script_a * total as f64)
    };

    let observed = growth_sequence(
        f.automorphism(),
        g,
        LengthFunction::Translation(&metric),
        iterations,
        word_guard,
    )?;
    let mu = f.strata().mu_max;
    let l0 = observed[0];

    // per-stratum inequality, one application of f at a time
    let mut w = p.cyclic_reduction(g).0;
    let mut core = cyclic_core(graph, &w);
    let mut steps = Vec::with_capacity(iterations);
    for k in 1..=iterations {
        let next = p.cyclic_reduction(&f.automorphism().apply(p, &w)).0;
        let next_core = cyclic_core(graph, &next);
        let stratum_ok = (0..m).all(|r| {
            let lhs = f.r_length(&next_core, r);
            let rhs: f64 = (r..m)
                .map(|i| coefficients[r][i] * stratum_length(f, &metric, &core, i))
                .sum();
            lhs <= rhs * (1.0 + RELATIVE_TOLERANCE) + RELATIVE_TOLERANCE
        });
        let (index_total, pk) = poly(k);
        let bound = pk * mu.powi(k as i32) * l0;
        steps.push(BoundStep {
            k,
            index_total,
            p: pk,
            bound,
            observed: observed[k],
            holds: observed[k] <= bound * (1.0 + RELATIVE_TOLERANCE),
            stratum_inequalities_hold: stratum_ok,
        });
        w = next;
        core = next_core;
    }

    let p_samples: Vec<f64> = (1..=m + 2).map(|k| poly(k).1).collect();
    let p_degree = polynomial_degree(&p_samples);
    let degree_ok = p_degree < m.max(1);
    let holds = degree_ok && steps.iter().all(|s| s.holds && s.stratum_inequalities_hold);
    Ok(BoundReport {
        element: p.format_word(g),
        coefficients,
        script_a,
        mu_max: mu,
        initial_length: l0,
        steps,
        p_samples,
        p_degree,
        degree_ok,
        holds,
        relative_tolerance: RELATIVE_TOLERANCE,
    })
}

fn cyclic_core(g: &MarkedMetricGraph, w: &Word) -> GraphPath {
    g.cyclically_reduce(&g.loop_of_element(w)).0
}

fn stratum_length(
    f: &TopologicalRepresentative,
    metric: &MarkedMetricGraph,
    p: &GraphPath,
    i: usize,
) -> f64 {
    let stratum_of = &f.strata().stratum_of;
    p.edges()
        .iter()
        .filter(|e| stratum_of[e.geometric()] == i)
        .map(|&e| metric.length(e))
        .sum()
}

/// Degree read off finite differences of equally spaced samples: the highest
/// order whose difference is not (relatively) zero.
fn polynomial_degree(samples: &[f64]) -> usize {
    let scale = samples.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let mut diffs = samples.to_vec();
    let mut degree = 0;
    for order in 1..samples.len() {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        if diffs.iter().any(|d| d.abs() > 1e-9 * scale) {
            degree = order;
        }
    }
    degree
}
