use rayon::prelude::*;
use serde::Serialize;

use super::{growth_report, GrowthReport, LengthFunction};
use crate::error::{Error, Result};
use crate::free_product::Word;
use crate::graph_map::TopologicalRepresentative;
use crate::graph_of_groups::ConjugacyLength;

pub const DEFAULT_N_GRID: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

/// `μ_R` and the zero-based index `R` of the highest stratum attaining it.
pub fn spectral_growth_rate(f: &TopologicalRepresentative) -> (f64, usize) {
    (f.strata().mu_max, f.strata().top)
}

/// `max l_S(g)/l_T(g)` over the hyperbolic elements of `sample`: a lower
/// bound for the right stretching factor from `T` to `S`.
pub fn stretch_lower_bound(
    t: &dyn ConjugacyLength,
    s: &dyn ConjugacyLength,
    sample: &[Word],
) -> Result<f64> {
    sample
        .iter()
        .filter_map(|g| {
            let lt = t.conjugacy_length(g);
            (lt > 0.0).then(|| s.conjugacy_length(g) / lt)
        })
        .reduce(f64::max)
        .ok_or_else(|| Error::input("sample", "sample contains no hyperbolic element"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub n: f64,
    pub lipschitz: f64,
    pub witness_edge: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplacementReport {
    pub grid: Vec<GridPoint>,
    /// `min_N Lip(f_N)`.
    pub upper: f64,
    /// Largest converged growth estimate over the sample, at least 1.
    pub lower: f64,
    pub mu_max: f64,
    pub top_stratum: usize,
    pub width: f64,
    pub upper_gap_to_mu: f64,
    /// Lip(f_N) never increases along the grid.
    pub monotone: bool,
    pub growth: Vec<GrowthReport>,
    pub iterations: usize,
    pub tolerance: f64,
}

/// Brackets the displacement `λ_α`: above by `Lip(f_N)` over the grid, below
/// by growth estimates of sampled hyperbolic elements (which never exceed `λ_α`).
pub fn displacement_bracket(
    f: &TopologicalRepresentative,
    grid: &[f64],
    iterations: usize,
    sample: &[Word],
    word_guard: usize,
    tolerance: f64,
) -> Result<DisplacementReport> {
    if grid.is_empty() {
        return Err(Error::input("n-grid", "empty grid"));
    }
    let g = f.graph();
    let points: Vec<GridPoint> = grid
        .par_iter()
        .map(|&n| {
            let metric = f.rescale_family(n)?;
            let lip = f.lipschitz_constant(&metric);
            Ok(GridPoint {
                n,
                lipschitz: lip.constant,
                witness_edge: g.edges()[lip.witness_edge].name.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let upper = points
        .iter()
        .map(|p| p.lipschitz)
        .fold(f64::INFINITY, f64::min);
    let monotone = points
        .windows(2)
        .all(|w| w[1].lipschitz <= w[0].lipschitz * (1.0 + 1e-12));

    let metric = f.pf_metric()?;
    let p = g.presentation();
    let hyperbolic: Vec<&Word> = sample.iter().filter(|w| p.is_hyperbolic(w)).collect();
    if hyperbolic.is_empty() {
        return Err(Error::input(
            "sample",
            "sample contains no hyperbolic element",
        ));
    }
    let growth: Vec<GrowthReport> = hyperbolic
        .par_iter()
        .map(|w| {
            growth_report(
                f.automorphism(),
                w,
                LengthFunction::Translation(&metric),
                iterations,
                word_guard,
                tolerance,
            )
        })
        .collect::<Result<_>>()?;
    let lower = growth
        .iter()
        .filter(|r| r.estimate.converged)
        .map(|r| r.estimate.estimate)
        .fold(1.0, f64::max);
    let (mu_max, top_stratum) = spectral_growth_rate(f);
    Ok(DisplacementReport {
        grid: points,
        upper,
        lower,
        mu_max,
        top_stratum,
        width: upper - lower,
        upper_gap_to_mu: upper - mu_max,
        monotone,
        growth,
        iterations,
        tolerance,
    })
}
