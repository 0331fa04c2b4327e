use std::collections::VecDeque;

use super::{DirEdge, GraphPath, MarkedMetricGraph};
use crate::error::Result;
use crate::free_product::{Syllable, Word};

const MAX_TREE_CANDIDATES: usize = 10_000;

/// Reads loops back as group elements.
///
/// Requires a maximal tree `𝒯` such that every factor path is the `𝒯`-geodesic
/// from the base and every free loop is `𝒯[x, ι(d)] · d · 𝒯[τ(d), x]` for a
/// distinct non-tree edge `d`. The standard rose and all bundled fixtures
/// have such markings.
#[derive(Debug, Clone)]
pub struct MarkingInverse {
    /// Per directed edge: the free letter it reads as, if it is a non-tree edge.
    letters: Vec<Option<Syllable>>,
    /// `𝒯`-geodesic from the base to each vertex.
    tree_paths: Vec<GraphPath>,
}

impl MarkingInverse {
    pub(super) fn compute(g: &MarkedMetricGraph) -> std::result::Result<Self, String> {
        let ne = g.edges.len();
        let m = &g.marking;
        let mut used_elsewhere = vec![0usize; ne];
        for p in m.factor_paths.iter().chain(&m.free_loops) {
            for e in &p.edges {
                used_elsewhere[e.geometric()] += 1;
            }
        }
        // candidate non-tree edges per free loop: crossed exactly once overall
        let candidates: Vec<Vec<DirEdge>> = m
            .free_loops
            .iter()
            .map(|lp| {
                lp.edges
                    .iter()
                    .copied()
                    .filter(|e| used_elsewhere[e.geometric()] == 1)
                    .collect()
            })
            .collect();
        if candidates.iter().any(Vec::is_empty) {
            return Err("marking is not standard for any maximal tree".into());
        }

        let mut choice = vec![0usize; candidates.len()];
        for _ in 0..MAX_TREE_CANDIDATES {
            let chosen: Vec<DirEdge> = choice
                .iter()
                .zip(&candidates)
                .map(|(&c, cands)| cands[c])
                .collect();
            if let Some(inv) = Self::try_tree(g, &chosen) {
                return Ok(inv);
            }
            // odometer over candidate choices
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Err("marking is not standard for any maximal tree".into());
                }
                choice[i] += 1;
                if choice[i] < candidates[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
        Err("too many candidate maximal trees".into())
    }

    fn try_tree(g: &MarkedMetricGraph, chosen: &[DirEdge]) -> Option<Self> {
        let nv = g.vertices.len();
        let ne = g.edges.len();
        let mut in_tree = vec![true; ne];
        for d in chosen {
            if !std::mem::replace(&mut in_tree[d.geometric()], false) {
                return None;
            }
        }
        if in_tree.iter().filter(|&&t| t).count() + 1 != nv {
            return None;
        }
        let mut tree_paths: Vec<Option<GraphPath>> = vec![None; nv];
        tree_paths[g.base] = Some(GraphPath::trivial(g.base));
        let mut queue = VecDeque::from([g.base]);
        while let Some(v) = queue.pop_front() {
            for d in g.outgoing(v) {
                if !in_tree[d.geometric()] {
                    continue;
                }
                let w = g.terminus(d);
                if tree_paths[w].is_none() {
                    let mut p = tree_paths[v].clone().expect("visited");
                    g.append_edge(&mut p, d);
                    tree_paths[w] = Some(p);
                    queue.push_back(w);
                }
            }
        }
        let tree_paths: Vec<GraphPath> = tree_paths.into_iter().collect::<Option<_>>()?;

        for (i, path) in g.marking.factor_paths.iter().enumerate() {
            let v = g.factor_vertex(i)?;
            if *path != tree_paths[v] {
                return None;
            }
        }
        let mut letters = vec![None; 2 * ne];
        for (j, (lp, &d)) in g.marking.free_loops.iter().zip(chosen).enumerate() {
            let mut expected = tree_paths[g.origin(d)].clone();
            g.append_edge(&mut expected, d);
            let back = g.reverse_path(&tree_paths[g.terminus(d)]);
            g.append_path(&mut expected, &back);
            if *lp != expected {
                return None;
            }
            letters[d.0] = Some(Syllable::free(j));
            letters[d.rev().0] = Some(Syllable::free_inv(j));
        }
        Some(Self {
            letters,
            tree_paths,
        })
    }

    /// Path in the maximal tree from the base to `v`.
    pub fn tree_path(&self, v: usize) -> &GraphPath {
        &self.tree_paths[v]
    }

    pub(super) fn read_loop(&self, g: &MarkedMetricGraph, lp: &GraphPath) -> Result<Word> {
        let v = lp.start;
        let closed = if v == g.base {
            lp.clone()
        } else {
            let mut p = self.tree_paths[v].clone();
            g.append_path(&mut p, lp);
            let back = g.reverse_path(&self.tree_paths[g.path_end(lp)]);
            g.append_path(&mut p, &back);
            p
        };
        let mut letters = Vec::new();
        for (i, &elem) in closed.elems.iter().enumerate() {
            if elem != 0 {
                let at = g.vertex_at(&closed, i);
                let factor = g.vertices[at]
                    .factor
                    .expect("nontrivial element sits at a grouped vertex");
                letters.push(Syllable::Factor { factor, elem });
            }
            if let Some(&e) = closed.edges.get(i) {
                if let Some(s) = self.letters[e.0] {
                    letters.push(s);
                }
            }
        }
        g.presentation().normal_form(&letters)
    }
}
