//! Turns, the derivative map `Df`, legality, and train track / relative train
//! track verification.

mod rtt;

pub use rtt::{
    find_r_legal_hyperbolic, verify_rtt, ConnectingVerdict, LegalElement, RttReport, RttViolation,
    StratumVerdict,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph_map::TopologicalRepresentative;
use crate::graph_of_groups::{DirEdge, GraphPath, MarkedMetricGraph};

/// A direction at a vertex: the edge `twist · ẽ` leaving a lift of the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Direction {
    pub edge: DirEdge,
    pub twist: usize,
}

/// Unordered pair of directions at `vertex`, normalized under the left action
/// of the vertex group so that `first.twist == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Turn {
    pub vertex: usize,
    pub first: Direction,
    pub second: Direction,
}

impl Turn {
    pub fn new(g: &MarkedMetricGraph, a: Direction, b: Direction) -> Self {
        let vertex = g.origin(a.edge);
        debug_assert_eq!(vertex, g.origin(b.edge));
        let group = g.vertex_group(vertex);
        let shift = |x: Direction, y: Direction| {
            (
                Direction {
                    edge: x.edge,
                    twist: 0,
                },
                Direction {
                    edge: y.edge,
                    twist: group.mul(group.inv(x.twist), y.twist),
                },
            )
        };
        let (first, second) = shift(a, b).min(shift(b, a));
        Self {
            vertex,
            first,
            second,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.first == self.second
    }

    /// Both directions' edges, as geometric indices.
    pub fn geometric_edges(&self) -> [usize; 2] {
        [self.first.edge.geometric(), self.second.edge.geometric()]
    }

    pub fn format(&self, g: &MarkedMetricGraph) -> String {
        let d = |x: Direction| {
            if x.twist == 0 {
                g.edge_name(x.edge)
            } else {
                let f = g.vertices()[self.vertex].factor.map_or(0, |f| f + 1);
                format!("{f}:{}·{}", x.twist, g.edge_name(x.edge))
            }
        };
        format!("{{{}, {}}}", d(self.first), d(self.second))
    }
}

/// All turns of `g`, including degenerate ones.
pub fn enumerate_turns(g: &MarkedMetricGraph) -> BTreeSet<Turn> {
    let mut out = BTreeSet::new();
    for v in 0..g.vertex_count() {
        let dirs = g.outgoing(v);
        let order = g.vertex_group(v).order();
        for (i, &a) in dirs.iter().enumerate() {
            for &b in &dirs[i..] {
                for t in 0..order {
                    out.insert(Turn::new(
                        g,
                        Direction { edge: a, twist: 0 },
                        Direction { edge: b, twist: t },
                    ));
                }
            }
        }
    }
    out
}

/// `Df` on a single direction at `v`.
pub fn derivative_direction(f: &TopologicalRepresentative, d: Direction) -> Direction {
    let v = f.graph().origin(d.edge);
    let img = f.edge_image(d.edge);
    let group = f.graph().vertex_group(f.vertex_image(v));
    Direction {
        edge: img.edges()[0],
        twist: group.mul(f.twist(v, d.twist), img.first_elem()),
    }
}

pub fn derivative_turn(f: &TopologicalRepresentative, t: &Turn) -> Turn {
    Turn::new(
        f.graph(),
        derivative_direction(f, t.first),
        derivative_direction(f, t.second),
    )
}

/// Turns crossed by `p`, in order: `{(ē_i, 1), (e_{i+1}, g_i)}`.
pub fn path_turns(g: &MarkedMetricGraph, p: &GraphPath) -> Vec<Turn> {
    p.edges()
        .windows(2)
        .zip(&p.elems()[1..])
        .map(|(w, &x)| turn_between(g, w[0], x, w[1]))
        .collect()
}

/// Turns of a closed loop read cyclically, including the one at the seam.
pub fn loop_turns(g: &MarkedMetricGraph, lp: &GraphPath) -> Vec<Turn> {
    let mut out = path_turns(g, lp);
    if let (Some(&last), Some(&first)) = (lp.edges().last(), lp.edges().first()) {
        let v = g.origin(first);
        let seam = g.vertex_group(v).mul(lp.last_elem(), lp.first_elem());
        out.push(turn_between(g, last, seam, first));
    }
    out
}

fn turn_between(g: &MarkedMetricGraph, incoming: DirEdge, x: usize, outgoing: DirEdge) -> Turn {
    Turn::new(
        g,
        Direction {
            edge: incoming.rev(),
            twist: 0,
        },
        Direction {
            edge: outgoing,
            twist: x,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TurnClass {
    pub legal: bool,
    /// `t, Df(t), Df²(t), …` up to the first repeat or degenerate turn.
    pub orbit: Vec<Turn>,
    /// Iterates needed to reach a degenerate turn, for illegal turns.
    pub steps_to_degenerate: Option<usize>,
}

/// Classification of every turn of the domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegalityTable {
    pub turns: BTreeMap<Turn, TurnClass>,
}

impl LegalityTable {
    pub fn is_legal(&self, t: &Turn) -> bool {
        self.turns.get(t).is_some_and(|c| c.legal)
    }

    pub fn illegal_turns(&self) -> impl Iterator<Item = &Turn> {
        self.turns.iter().filter(|(_, c)| !c.legal).map(|(t, _)| t)
    }
}

/// Iterates `Df` from every turn until it repeats (legal) or degenerates (illegal).
pub fn classify_turns(f: &TopologicalRepresentative) -> &LegalityTable {
    f.legality_cell().get_or_init(|| {
        let turns = enumerate_turns(f.graph())
            .into_iter()
            .map(|t| {
                let mut orbit = vec![t];
                let mut seen = BTreeSet::from([t]);
                let mut cur = t;
                let steps = loop {
                    if cur.is_degenerate() {
                        break Some(orbit.len() - 1);
                    }
                    cur = derivative_turn(f, &cur);
                    if !seen.insert(cur) {
                        break None;
                    }
                    orbit.push(cur);
                };
                let class = TurnClass {
                    legal: steps.is_none(),
                    orbit,
                    steps_to_degenerate: steps,
                };
                (t, class)
            })
            .collect();
        LegalityTable { turns }
    })
}

/// No turn of `p` is illegal.
pub fn is_legal(f: &TopologicalRepresentative, p: &GraphPath) -> bool {
    let table = classify_turns(f);
    path_turns(f.graph(), p).iter().all(|t| table.is_legal(t))
}

/// No turn of `p` with both edges in `H_r` is illegal (zero-based `r`).
pub fn is_r_legal(f: &TopologicalRepresentative, p: &GraphPath, r: usize) -> bool {
    first_r_illegal(f, &path_turns(f.graph(), p), r).is_none()
}

pub(crate) fn first_r_illegal(
    f: &TopologicalRepresentative,
    turns: &[Turn],
    r: usize,
) -> Option<Turn> {
    let table = classify_turns(f);
    let stratum_of = &f.strata().stratum_of;
    turns
        .iter()
        .find(|t| t.geometric_edges().iter().all(|&e| stratum_of[e] == r) && !table.is_legal(t))
        .copied()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrainTrackVerdict {
    pub passes: bool,
    /// Offending edge and the illegal turn in its image.
    pub witness: Option<(usize, Turn)>,
}

/// Every edge image is a legal path.
pub fn verify_train_track(f: &TopologicalRepresentative) -> TrainTrackVerdict {
    let table = classify_turns(f);
    for i in 0..f.graph().edge_count() {
        let img = f.edge_image(DirEdge::forward(i));
        if let Some(t) = path_turns(f.graph(), img)
            .into_iter()
            .find(|t| !table.is_legal(t))
        {
            return TrainTrackVerdict {
                passes: false,
                witness: Some((i, t)),
            };
        }
    }
    TrainTrackVerdict {
        passes: true,
        witness: None,
    }
}
