//! Simplicial topological representatives of automorphisms, their transition
//! matrices, strata, Perron-Frobenius data and the metrics built from them.

mod metric;
mod strata;

pub use metric::Lipschitz;
pub use strata::{
    is_irreducible, pf_eigen, stratify, Matrix, StrataDecomposition, Stratum, PF_ITERATION_CAP,
    PF_TOLERANCE,
};

use std::sync::OnceLock;

use crate::error::{Diagnostic, Error, Result};
use crate::free_product::{Automorphism, Syllable, Word};
use crate::graph_of_groups::{DirEdge, GraphPath, MarkedMetricGraph};
use crate::legality::LegalityTable;

/// How `f` acts on the group at one vertex: `g ↦ c⁻¹ · φ(g) · c` in the
/// group at the image vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexTwist {
    pub map: Vec<usize>,
    pub conjugator: usize,
}

impl VertexTwist {
    pub fn identity(order: usize) -> Self {
        Self {
            map: (0..order).collect(),
            conjugator: 0,
        }
    }
}

/// Unchecked description of a graph map `f: T → αT` on the quotient.
#[derive(Debug, Clone)]
pub struct MapData {
    pub graph: MarkedMetricGraph,
    pub automorphism: Automorphism,
    pub vertex_images: Vec<usize>,
    /// One per vertex; trivial vertices carry the identity of the trivial group.
    pub vertex_twists: Vec<VertexTwist>,
    /// Image of each geometric edge in its forward direction.
    pub edge_images: Vec<GraphPath>,
    /// Path from the base vertex to its image.
    pub tether: GraphPath,
}

impl MapData {
    /// Every structural and marking violation; empty (up to notes) means `f`
    /// represents the automorphism.
    pub fn verify(&self) -> Vec<Diagnostic> {
        let mut out: Vec<Diagnostic> = self
            .graph
            .validate()
            .into_iter()
            .filter(Diagnostic::is_violation)
            .collect();
        if !out.is_empty() {
            return out;
        }
        let g = &self.graph;
        let nv = g.vertex_count();
        let ne = g.edge_count();
        if self.vertex_images.len() != nv
            || self.vertex_twists.len() != nv
            || self.edge_images.len() != ne
        {
            out.push(Diagnostic::violation(
                "map shape",
                format!(
                    "{} vertex images, {} twists and {} edge images for {nv} vertices and {ne} edges",
                    self.vertex_images.len(),
                    self.vertex_twists.len(),
                    self.edge_images.len()
                ),
            ));
            return out;
        }
        for (v, &w) in self.vertex_images.iter().enumerate() {
            let name = &g.vertices()[v].name;
            if w >= nv {
                out.push(Diagnostic::violation(
                    "bad index",
                    format!("image of vertex {name} out of range"),
                ));
                continue;
            }
            let t = &self.vertex_twists[v];
            let (src, dst) = (g.vertex_group(v), g.vertex_group(w));
            if !src.is_isomorphism_onto(dst, &t.map) || !dst.contains(t.conjugator) {
                out.push(Diagnostic::violation(
                    "vertex twist",
                    format!(
                        "twist at vertex {name} is not an isomorphism onto the group at its image"
                    ),
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (i, img) in self.edge_images.iter().enumerate() {
            let e = DirEdge::forward(i);
            let name = g.edge_name(e);
            if let Err(msg) = g.check_path(img) {
                out.push(Diagnostic::violation(
                    "edge image",
                    format!("image of {name}: {msg}"),
                ));
                continue;
            }
            if img.edge_count() == 0 {
                out.push(Diagnostic::violation(
                    "collapsed edge",
                    format!("edge {name} maps to a point"),
                ));
            }
            if img.start() != self.vertex_images[g.origin(e)]
                || g.path_end(img) != self.vertex_images[g.terminus(e)]
            {
                out.push(Diagnostic::violation(
                    "endpoint mismatch",
                    format!("image of {name} does not join the images of its endpoints"),
                ));
            }
            if !g.is_reduced(img) {
                out.push(Diagnostic::violation(
                    "edge image",
                    format!("image of {name} is not reduced"),
                ));
            }
        }
        if let Err(msg) = g.check_path(&self.tether) {
            out.push(Diagnostic::violation("tether", msg));
        } else if self.tether.start() != g.base()
            || g.path_end(&self.tether) != self.vertex_images[g.base()]
        {
            out.push(Diagnostic::violation(
                "tether",
                "tether must run from the base vertex to its image",
            ));
        }
        if !out.is_empty() {
            return out;
        }

        let images = directed_images(g, &self.edge_images);
        let p = g.presentation();
        let mut generators: Vec<(String, Word)> = p
            .free_names()
            .iter()
            .enumerate()
            .map(|(j, n)| (n.clone(), Word(vec![Syllable::free(j)])))
            .collect();
        generators.extend(p.factor_letters().map(|s| {
            let w = Word(vec![s]);
            (p.format_word(&w), w)
        }));
        let back = g.reverse_path(&self.tether);
        for (name, s) in generators {
            let image = apply_map(
                g,
                &self.vertex_images,
                &self.vertex_twists,
                &images,
                &g.loop_of_element(&s),
            );
            let seen = g.concat(&g.concat(&self.tether, &image), &back);
            let expected = g.loop_of_element(&self.automorphism.apply(p, &s));
            if seen != expected {
                out.push(Diagnostic::violation(
                    "marking mismatch",
                    format!(
                        "marking mismatch at generator {name}: map gives {} but the automorphism needs {}",
                        g.format_path(&seen),
                        g.format_path(&expected)
                    ),
                ));
            }
        }
        out
    }
}

fn directed_images(g: &MarkedMetricGraph, forward: &[GraphPath]) -> Vec<GraphPath> {
    forward
        .iter()
        .flat_map(|p| [p.clone(), g.reverse_path(p)])
        .collect()
}

fn twist(
    g: &MarkedMetricGraph,
    images: &[usize],
    twists: &[VertexTwist],
    v: usize,
    x: usize,
) -> usize {
    let t = &twists[v];
    g.vertex_group(images[v]).conjugate(t.map[x], t.conjugator)
}

fn apply_map(
    g: &MarkedMetricGraph,
    vertex_images: &[usize],
    twists: &[VertexTwist],
    images: &[GraphPath],
    p: &GraphPath,
) -> GraphPath {
    let mut at = p.start();
    let mut out = GraphPath::element(
        vertex_images[at],
        twist(g, vertex_images, twists, at, p.first_elem()),
    );
    for (&e, &x) in p.edges().iter().zip(&p.elems()[1..]) {
        g.append_path(&mut out, &images[e.0]);
        at = g.terminus(e);
        g.append_elem(&mut out, twist(g, vertex_images, twists, at, x));
    }
    out
}

/// A verified topological representative with its strata and PF data.
#[derive(Debug)]
pub struct TopologicalRepresentative {
    data: MapData,
    images: Vec<GraphPath>,
    strata: StrataDecomposition,
    legality: OnceLock<LegalityTable>,
}

impl Clone for TopologicalRepresentative {
    fn clone(&self) -> Self {
        Self {
            data: self.data.clone(),
            images: self.images.clone(),
            strata: self.strata.clone(),
            legality: self.legality.clone(),
        }
    }
}

impl TopologicalRepresentative {
    /// Verifies `data` and computes the transition matrix, strata and PF data.
    pub fn new(data: MapData) -> Result<Self> {
        Error::check(data.verify())?;
        let images = directed_images(&data.graph, &data.edge_images);
        let strata = StrataDecomposition::new(transition_matrix(
            &data.edge_images,
            data.graph.edge_count(),
        ))?;
        Ok(Self {
            data,
            images,
            strata,
            legality: OnceLock::new(),
        })
    }

    /// The identity map on `graph`.
    pub fn identity(graph: MarkedMetricGraph) -> Result<Self> {
        let p = graph.presentation_arc().clone();
        let nv = graph.vertex_count();
        let data = MapData {
            automorphism: Automorphism::identity(&p),
            vertex_images: (0..nv).collect(),
            vertex_twists: (0..nv)
                .map(|v| VertexTwist::identity(graph.vertex_group(v).order()))
                .collect(),
            edge_images: (0..graph.edge_count())
                .map(|i| {
                    let e = DirEdge::forward(i);
                    GraphPath::from_edges(graph.origin(e), vec![e])
                })
                .collect(),
            tether: GraphPath::trivial(graph.base()),
            graph,
        };
        Self::new(data)
    }

    pub fn data(&self) -> &MapData {
        &self.data
    }

    pub fn graph(&self) -> &MarkedMetricGraph {
        &self.data.graph
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.data.automorphism
    }

    pub fn strata(&self) -> &StrataDecomposition {
        &self.strata
    }

    pub fn transition_matrix(&self) -> &Matrix {
        &self.strata.matrix
    }

    /// `f(d)` for a directed edge.
    pub fn edge_image(&self, d: DirEdge) -> &GraphPath {
        &self.images[d.0]
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.data.vertex_images[v]
    }

    /// `ψ_v(x)`: the image of `x ∈ G_v` in the group at `f(v)`.
    pub fn twist(&self, v: usize, x: usize) -> usize {
        twist(
            &self.data.graph,
            &self.data.vertex_images,
            &self.data.vertex_twists,
            v,
            x,
        )
    }

    /// The reduced image `[f(p)]`.
    pub fn apply(&self, p: &GraphPath) -> GraphPath {
        apply_map(
            &self.data.graph,
            &self.data.vertex_images,
            &self.data.vertex_twists,
            &self.images,
            p,
        )
    }

    /// `[f^k(p)]`.
    pub fn apply_power(&self, p: &GraphPath, k: usize) -> GraphPath {
        (0..k).fold(p.clone(), |q, _| self.apply(&q))
    }

    /// Image of `p` concatenated edge by edge, without any cancellation.
    pub fn apply_unreduced(&self, p: &GraphPath) -> GraphPath {
        let g = &self.data.graph;
        let mut elems = vec![self.twist(p.start(), p.first_elem())];
        let mut edges = Vec::new();
        let mut at = p.start();
        for (&e, &x) in p.edges().iter().zip(&p.elems()[1..]) {
            let img = &self.images[e.0];
            let last = elems.len() - 1;
            elems[last] = g
                .vertex_group(self.vertex_image(at))
                .mul(elems[last], img.first_elem());
            elems.extend_from_slice(&img.elems()[1..]);
            edges.extend_from_slice(img.edges());
            at = g.terminus(e);
            let last = elems.len() - 1;
            elems[last] = g
                .vertex_group(self.vertex_image(at))
                .mul(elems[last], self.twist(at, x));
        }
        GraphPath::from_parts(self.vertex_image(p.start()), elems, edges)
    }

    pub(crate) fn legality_cell(&self) -> &OnceLock<LegalityTable> {
        &self.legality
    }
}

/// `m_ij`: how often `f(e_j)` crosses geometric edge `i`, in either direction.
pub fn transition_matrix(edge_images: &[GraphPath], edge_count: usize) -> Matrix {
    let mut m = vec![vec![0u64; edge_count]; edge_count];
    for (j, img) in edge_images.iter().enumerate() {
        for e in img.edges() {
            m[e.geometric()][j] += 1;
        }
    }
    m
}
