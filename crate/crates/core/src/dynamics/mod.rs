//! Growth sequences and rate estimates, Lipschitz displacement brackets along
//! the rescaled family `T_N`, and the polynomial growth bound.

mod bound;
mod displacement;

pub use bound::{bound_check, coefficient_a, index_count, BoundReport, BoundStep};
pub use displacement::{
    displacement_bracket, spectral_growth_rate, stretch_lower_bound, DisplacementReport, GridPoint,
    DEFAULT_N_GRID,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_product::{Automorphism, LengthFunctionDescriptor, Presentation, Word};
use crate::graph_of_groups::MarkedMetricGraph;

/// Syllable count at which iteration stops with a resource error.
pub const DEFAULT_WORD_GUARD: usize = 1_000_000;
pub const DEFAULT_ITERATIONS: usize = 20;
/// Agreement required between the root and tail-ratio estimates.
pub const DEFAULT_CONVERGENCE_TOLERANCE: f64 = 1e-2;
/// Successive ratios averaged by the tail estimate.
pub const TAIL_WINDOW: usize = 5;

/// A conjugacy length function on `G`.
#[derive(Debug, Clone, Copy)]
pub enum LengthFunction<'a> {
    /// `l_E`, the relative conjugacy length.
    Relative(&'a Presentation),
    /// `l_T`, translation length in a marked metric graph.
    Translation(&'a MarkedMetricGraph),
}

impl LengthFunction<'_> {
    pub fn descriptor(&self) -> LengthFunctionDescriptor {
        match self {
            LengthFunction::Relative(_) => LengthFunctionDescriptor::relative(),
            LengthFunction::Translation(t) => {
                LengthFunctionDescriptor::translation(t.shortest_edge())
            }
        }
    }

    pub fn presentation(&self) -> &Presentation {
        match self {
            LengthFunction::Relative(p) => p,
            LengthFunction::Translation(t) => t.presentation(),
        }
    }

    pub fn eval(&self, g: &Word) -> Result<f64> {
        match self {
            LengthFunction::Relative(p) => Ok(p.relative_conjugacy_length(g)? as f64),
            LengthFunction::Translation(t) => Ok(t.translation_length(g)),
        }
    }
}

/// `l(gα^k)` for `k = 0..=iterations`, with the words kept cyclically reduced
/// (every length involved is a conjugacy invariant).
pub fn growth_sequence(
    alpha: &Automorphism,
    g: &Word,
    length: LengthFunction<'_>,
    iterations: usize,
    word_guard: usize,
) -> Result<Vec<f64>> {
    let p = length.presentation();
    let mut w = p.cyclic_reduction(g).0;
    let mut out = Vec::with_capacity(iterations + 1);
    out.push(length.eval(&w)?);
    for _ in 0..iterations {
        w = p.cyclic_reduction(&alpha.apply(p, &w)).0;
        if w.len() > word_guard {
            return Err(Error::Resource {
                what: "iterated word".into(),
                limit: word_guard,
                partial: out,
            });
        }
        out.push(length.eval(&w)?);
    }
    Ok(out)
}

/// Numerical reading of `limsup l(gα^k)^{1/k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEstimate {
    /// `l(gα^k)^{1/k}` for `k = 1..=K`.
    pub root_estimates: Vec<f64>,
    /// `l(gα^k) / l(gα^{k-1})` for `k = 1..=K` (0 where undefined).
    pub ratios: Vec<f64>,
    /// `l(gα^K)^{1/K}`.
    pub root_estimate: f64,
    /// Geometric mean of the last `TAIL_WINDOW` ratios.
    pub tail_estimate: f64,
    /// Reported growth rate: the tail estimate.
    pub estimate: f64,
    /// The two estimates agree within `tolerance`, or the tail ratios have
    /// settled to within `tolerance / 10` of each other.
    pub converged: bool,
    pub tolerance: f64,
}

/// Root and tail-ratio estimates of the growth rate of `sequence`.
pub fn growth_rate_estimate(sequence: &[f64], tolerance: f64) -> GrowthEstimate {
    let k_max = sequence.len().saturating_sub(1);
    let root_estimates: Vec<f64> = (1..=k_max)
        .map(|k| sequence[k].powf(1.0 / k as f64))
        .collect();
    let ratios: Vec<f64> = sequence
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let root_estimate = root_estimates.last().copied().unwrap_or(1.0);
    let window = TAIL_WINDOW.min(k_max);
    let tail_estimate = match (window, sequence.last()) {
        (0, _) => 1.0,
        (_, Some(&last)) if last > 0.0 && sequence[k_max - window] > 0.0 => {
            (last / sequence[k_max - window]).powf(1.0 / window as f64)
        }
        _ => 0.0,
    };
    let tail = &ratios[ratios.len() - window..];
    let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let settled = window > 0 && spread <= tolerance / 10.0;
    GrowthEstimate {
        root_estimates,
        ratios,
        root_estimate,
        tail_estimate,
        estimate: tail_estimate,
        converged: (root_estimate - tail_estimate).abs() <= tolerance || settled,
        tolerance,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub element: String,
    pub descriptor: LengthFunctionDescriptor,
    pub iterations: usize,
    pub sequence: Vec<f64>,
    #[serde(flatten)]
    pub estimate: GrowthEstimate,
}

/// Sequence plus estimates for one element.
pub fn growth_report(
    alpha: &Automorphism,
    g: &Word,
    length: LengthFunction<'_>,
    iterations: usize,
    word_guard: usize,
    tolerance: f64,
) -> Result<GrowthReport> {
    let sequence = growth_sequence(alpha, g, length, iterations, word_guard)?;
    Ok(GrowthReport {
        element: length.presentation().format_word(g),
        descriptor: length.descriptor(),
        iterations,
        estimate: growth_rate_estimate(&sequence, tolerance),
        sequence,
    })
}
