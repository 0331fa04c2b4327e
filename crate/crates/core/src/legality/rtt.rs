use serde::Serialize;

use super::{classify_turns, derivative_turn, first_r_illegal, loop_turns, path_turns};
use crate::error::{Error, Result};
use crate::free_product::Word;
use crate::graph_map::TopologicalRepresentative;
use crate::graph_of_groups::{DirEdge, GraphPath};

/// Paths enumerated per stratum before the connecting-path check gives up on exhaustiveness.
const MAX_CONNECTING_PATHS: usize = 1_000_000;

/// Longest iterated image searched for a legal loop.
const MAX_SEARCH_EDGES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RttViolation {
    pub edge: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConnectingVerdict {
    /// No vertex joins `H_r` to the lower filtration.
    Vacuous,
    /// Every connecting path with at most `bound` edges has a nontrivial image.
    VerifiedUpTo {
        bound: usize,
        paths_checked: usize,
        exhaustive: bool,
    },
    Counterexample {
        path: String,
    },
}

/// The three relative train track properties for one stratum (zero-based index).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumVerdict {
    pub stratum: usize,
    pub zero: bool,
    /// Edges of `H_r` whose image starts or ends outside `H_r`.
    pub germs: Vec<RttViolation>,
    pub connecting: ConnectingVerdict,
    /// Edges of `H_r` whose image is not `r`-legal, and legal turns with illegal images.
    pub legality: Vec<RttViolation>,
}

impl StratumVerdict {
    pub fn passes(&self) -> bool {
        self.germs.is_empty()
            && self.legality.is_empty()
            && !matches!(self.connecting, ConnectingVerdict::Counterexample { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RttReport {
    pub bound: usize,
    pub strata: Vec<StratumVerdict>,
}

impl RttReport {
    pub fn passes(&self) -> bool {
        self.strata.iter().all(StratumVerdict::passes)
    }
}

/// Checks germ preservation and `r`-legality exactly and injectivity on
/// connecting paths up to `bound` edges, for every nonzero stratum.
pub fn verify_rtt(f: &TopologicalRepresentative, bound: usize) -> RttReport {
    let strata = (0..f.strata().len())
        .map(|r| {
            if f.strata().strata[r].is_zero() {
                StratumVerdict {
                    stratum: r,
                    zero: true,
                    germs: Vec::new(),
                    connecting: ConnectingVerdict::Vacuous,
                    legality: Vec::new(),
                }
            } else {
                StratumVerdict {
                    stratum: r,
                    zero: false,
                    germs: germs(f, r),
                    connecting: connecting(f, r, bound),
                    legality: legality(f, r),
                }
            }
        })
        .collect();
    RttReport { bound, strata }
}

fn germs(f: &TopologicalRepresentative, r: usize) -> Vec<RttViolation> {
    let g = f.graph();
    let stratum_of = &f.strata().stratum_of;
    f.strata().strata[r]
        .edges
        .iter()
        .filter_map(|&i| {
            let img = f.edge_image(DirEdge::forward(i));
            let first = img.edges()[0].geometric();
            let last = img.edges()[img.edge_count() - 1].geometric();
            (stratum_of[first] != r || stratum_of[last] != r).then(|| RttViolation {
                edge: i,
                detail: format!(
                    "f({}) = {} does not begin and end in the stratum",
                    g.edge_name(DirEdge::forward(i)),
                    g.format_path(img)
                ),
            })
        })
        .collect()
}

fn legality(f: &TopologicalRepresentative, r: usize) -> Vec<RttViolation> {
    let g = f.graph();
    let stratum_of = &f.strata().stratum_of;
    let mut out: Vec<RttViolation> = f.strata().strata[r]
        .edges
        .iter()
        .filter_map(|&i| {
            let img = f.edge_image(DirEdge::forward(i));
            first_r_illegal(f, &path_turns(g, img), r).map(|t| RttViolation {
                edge: i,
                detail: format!(
                    "f({}) = {} takes the illegal turn {}",
                    g.edge_name(DirEdge::forward(i)),
                    g.format_path(img),
                    t.format(g)
                ),
            })
        })
        .collect();
    let table = classify_turns(f);
    for (t, class) in &table.turns {
        let inside = t.geometric_edges().iter().all(|&e| stratum_of[e] == r);
        if inside && class.legal {
            let image = derivative_turn(f, t);
            if first_r_illegal(f, &[image], r).is_some() {
                out.push(RttViolation {
                    edge: t.first.edge.geometric(),
                    detail: format!(
                        "legal turn {} has illegal image {}",
                        t.format(g),
                        image.format(g)
                    ),
                });
            }
        }
    }
    out
}

fn connecting(f: &TopologicalRepresentative, r: usize, bound: usize) -> ConnectingVerdict {
    let g = f.graph();
    let stratum_of = &f.strata().stratum_of;
    let lower = |d: DirEdge| stratum_of[d.geometric()] < r;
    let touches = |v: usize, pred: &dyn Fn(DirEdge) -> bool| g.outgoing(v).into_iter().any(pred);
    let frontier: Vec<bool> = (0..g.vertex_count())
        .map(|v| touches(v, &|d| stratum_of[d.geometric()] == r) && touches(v, &lower))
        .collect();
    if !frontier.iter().any(|&b| b) {
        return ConnectingVerdict::Vacuous;
    }
    let mut checked = 0usize;
    let mut exhaustive = true;
    let mut stack: Vec<GraphPath> = frontier
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(v, _)| GraphPath::trivial(v))
        .collect();
    while let Some(p) = stack.pop() {
        let end = g.path_end(&p);
        if p.edge_count() > 0 && frontier[end] && p.last_elem() == 0 {
            checked += 1;
            if f.apply(&p).edge_count() == 0 {
                return ConnectingVerdict::Counterexample {
                    path: g.format_path(&p),
                };
            }
        }
        if p.edge_count() == bound {
            continue;
        }
        if checked + stack.len() >= MAX_CONNECTING_PATHS {
            exhaustive = false;
            break;
        }
        let order = if p.edge_count() == 0 {
            1
        } else {
            g.vertex_group(end).order()
        };
        for x in 0..order {
            for d in g.outgoing(end).into_iter().filter(|&d| lower(d)) {
                if x == 0 && p.edges().last() == Some(&d.rev()) {
                    continue;
                }
                let mut q = p.clone();
                *q.elems.last_mut().expect("nonempty") = x;
                q.edges.push(d);
                q.elems.push(0);
                stack.push(q);
            }
        }
    }
    ConnectingVerdict::VerifiedUpTo {
        bound,
        paths_checked: checked,
        exhaustive,
    }
}

/// A hyperbolic element whose cyclically reduced loop is `r`-legal and meets `H_r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegalElement {
    pub element: Word,
    /// Its cyclically reduced loop.
    pub core: GraphPath,
    /// Iterate `f^k(e)` in which the loop was found.
    pub iterate: usize,
}

/// Searches the iterated images of the edges of `H_r` (zero-based `r`) for a
/// closed subpath whose loop is hyperbolic, meets `H_r` and is cyclically `r`-legal.
pub fn find_r_legal_hyperbolic(
    f: &TopologicalRepresentative,
    r: usize,
    cap: usize,
) -> Result<LegalElement> {
    let stratum = f
        .strata()
        .strata
        .get(r)
        .ok_or_else(|| Error::input("stratum", format!("no stratum {}", r + 1)))?;
    if stratum.is_zero() {
        return Err(Error::input(
            "stratum",
            format!("stratum {} is a zero stratum", r + 1),
        ));
    }
    let g = f.graph();
    let p = g.presentation();
    let mut longest = 0usize;
    for &e in &stratum.edges {
        let mut path =
            GraphPath::from_edges(g.origin(DirEdge::forward(e)), vec![DirEdge::forward(e)]);
        for k in 0..=cap {
            longest = longest.max(path.edge_count());
            let n = path.edge_count();
            for len in 1..=n {
                for i in 0..=n - len {
                    let j = i + len;
                    if g.vertex_at(&path, i) != g.vertex_at(&path, j) {
                        continue;
                    }
                    let mut elems = path.elems()[i..=j].to_vec();
                    elems[0] = 0;
                    elems[len] = 0;
                    let sub = GraphPath::from_parts(
                        g.vertex_at(&path, i),
                        elems,
                        path.edges()[i..j].to_vec(),
                    );
                    let (core, _) = g.cyclically_reduce(&sub);
                    if core.edge_count() == 0
                        || !core
                            .edges()
                            .iter()
                            .any(|d| f.strata().stratum_of[d.geometric()] == r)
                        || first_r_illegal(f, &loop_turns(g, &core), r).is_some()
                    {
                        continue;
                    }
                    let element = g.element_of_loop(&core)?;
                    if p.is_hyperbolic(&element) {
                        return Ok(LegalElement {
                            element,
                            core,
                            iterate: k,
                        });
                    }
                }
            }
            if k < cap {
                path = f.apply(&path);
                if path.edge_count() > MAX_SEARCH_EDGES {
                    break;
                }
            }
        }
    }
    Err(Error::NonConvergence {
        what: format!("r-legal hyperbolic element in stratum {}", r + 1),
        detail: format!(
            "no legal loop within {cap} iterates; longest image searched had {longest} edges"
        ),
        best_upper_bound: None,
    })
}
