use serde::Serialize;

use super::TopologicalRepresentative;
use crate::error::{Error, Result};
use crate::graph_of_groups::{DirEdge, GraphPath, MarkedMetricGraph};

/// `Lip(f) = max_e ℓ(f(e))/ℓ(e)` with the edge realizing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lipschitz {
    pub constant: f64,
    pub witness_edge: usize,
}

impl TopologicalRepresentative {
    /// `L_r(p)`: eigenvector-weighted count of the edges of `p` in `H_r` (zero-based `r`).
    pub fn r_length(&self, p: &GraphPath, r: usize) -> f64 {
        let s = &self.strata().strata[r];
        if s.is_zero() {
            return 0.0;
        }
        p.edges()
            .iter()
            .filter_map(|e| s.entry(e.geometric()))
            .sum()
    }

    /// `L_r` of the cyclically reduced form of a loop.
    pub fn r_length_of_loop(&self, lp: &GraphPath, r: usize) -> f64 {
        let (core, _) = self.graph().cyclically_reduce(lp);
        self.r_length(&core, r)
    }

    /// Edge in `H_r` gets `c_r ×` its eigenvector entry; edges of zero strata
    /// keep `c_r ×` their length in the domain graph.
    pub fn assign_pf_metric(&self, scales: &[f64]) -> Result<MarkedMetricGraph> {
        let strata = self.strata();
        if scales.len() != strata.len() {
            return Err(Error::input(
                "stratum scales",
                format!("{} scales for {} strata", scales.len(), strata.len()),
            ));
        }
        let g = self.graph();
        let mut lengths = vec![0.0; g.edge_count()];
        for (s, &c) in strata.strata.iter().zip(scales) {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::input(
                    "stratum scales",
                    format!("scale {c} is not positive"),
                ));
            }
            for (pos, &e) in s.edges.iter().enumerate() {
                let base = if s.is_zero() {
                    g.edges()[e].length
                } else {
                    s.eigenvector[pos]
                };
                if !(base.is_finite() && base > 0.0) {
                    return Err(Error::input(
                        format!("edge {}", g.edges()[e].name),
                        "zero-stratum edge needs a positive length",
                    ));
                }
                lengths[e] = c * base;
            }
        }
        Ok(g.with_lengths(&lengths))
    }

    /// The PF metric with every stratum scale 1.
    pub fn pf_metric(&self) -> Result<MarkedMetricGraph> {
        self.assign_pf_metric(&vec![1.0; self.strata().len()])
    }

    /// `T_N`: stratum `H_r` scaled by `N^r` (one-based `r`).
    pub fn rescale_family(&self, n: f64) -> Result<MarkedMetricGraph> {
        let scales: Vec<f64> = (1..=self.strata().len())
            .map(|r| n.powi(r as i32))
            .collect();
        self.assign_pf_metric(&scales)
    }

    /// `Lip(f)` measured in `metric`, which must share the combinatorics of the domain.
    pub fn lipschitz_constant(&self, metric: &MarkedMetricGraph) -> Lipschitz {
        let mut best = Lipschitz {
            constant: f64::NEG_INFINITY,
            witness_edge: 0,
        };
        for i in 0..metric.edge_count() {
            let e = DirEdge::forward(i);
            let ratio = metric.path_length(self.edge_image(e)) / metric.length(e);
            if ratio > best.constant {
                best = Lipschitz {
                    constant: ratio,
                    witness_edge: i,
                };
            }
        }
        best
    }
}
