//! Marked metric graphs of groups with trivial edge groups. All tree-level
//! quantities (axes, translation lengths) are computed on the finite quotient.

mod marking;
mod path;

pub use marking::MarkingInverse;
pub use path::{DirEdge, GraphPath};

use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Diagnostic, Error, Result};
use crate::free_product::{Automorphism, FiniteGroup, Presentation, Syllable, Word};

/// Absolute tolerance for metric comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vertex {
    pub name: String,
    /// Zero-based factor index of the vertex group, if nontrivial.
    pub factor: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub name: String,
    pub origin: usize,
    pub terminus: usize,
    pub length: f64,
}

/// Loops at the base vertex for the free generators and paths from the base
/// to the vertex carrying each factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Marking {
    pub free_loops: Vec<GraphPath>,
    pub factor_paths: Vec<GraphPath>,
}

/// Where an element acts on the tree: fixing a vertex, or translating along an axis.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    /// Conjugate into the vertex group at `vertex` (identity included).
    Elliptic { vertex: usize, element: usize },
    /// `core` is a cyclically reduced loop, a fundamental domain of the axis.
    Hyperbolic { core: GraphPath, length: f64 },
}

/// A point of outer space, represented by its quotient graph of groups.
#[derive(Debug, Clone)]
pub struct MarkedMetricGraph {
    presentation: Arc<Presentation>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    base: usize,
    marking: Marking,
    tolerance: f64,
    inverse: OnceLock<std::result::Result<MarkingInverse, String>>,
}

static TRIVIAL: OnceLock<FiniteGroup> = OnceLock::new();

impl MarkedMetricGraph {
    /// Assembles a graph without checking it; see [`Self::validate`] and [`Self::validated`].
    pub fn new(
        presentation: Arc<Presentation>,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        base: usize,
        marking: Marking,
    ) -> Self {
        Self {
            presentation,
            vertices,
            edges,
            base,
            marking,
            tolerance: DEFAULT_TOLERANCE,
            inverse: OnceLock::new(),
        }
    }

    /// Assembles and validates.
    pub fn validated(
        presentation: Arc<Presentation>,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        base: usize,
        marking: Marking,
    ) -> Result<Self> {
        let g = Self::new(presentation, vertices, edges, base, marking);
        Error::check(g.validate())?;
        Ok(g)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Same graph and marking, new edge lengths (one per geometric edge).
    pub fn with_lengths(&self, lengths: &[f64]) -> Self {
        assert_eq!(lengths.len(), self.edges.len());
        let mut out = self.clone();
        for (e, &l) in out.edges.iter_mut().zip(lengths) {
            e.length = l;
        }
        out
    }

    /// Uniformly rescaled copy.
    pub fn scaled(&self, factor: f64) -> Self {
        let lengths: Vec<f64> = self.edges.iter().map(|e| e.length * factor).collect();
        self.with_lengths(&lengths)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn presentation_arc(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn marking(&self) -> &Marking {
        &self.marking
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn shortest_edge(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.length)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn origin(&self, d: DirEdge) -> usize {
        let e = &self.edges[d.geometric()];
        if d.is_reversed() {
            e.terminus
        } else {
            e.origin
        }
    }

    pub fn terminus(&self, d: DirEdge) -> usize {
        self.origin(d.rev())
    }

    pub fn length(&self, d: DirEdge) -> f64 {
        self.edges[d.geometric()].length
    }

    /// Directed edges leaving `v`, in index order.
    pub fn outgoing(&self, v: usize) -> Vec<DirEdge> {
        (0..2 * self.edges.len())
            .map(DirEdge)
            .filter(|&d| self.origin(d) == v)
            .collect()
    }

    pub fn vertex_group(&self, v: usize) -> &FiniteGroup {
        match self.vertices[v].factor {
            Some(i) => self.presentation.factor(i),
            None => TRIVIAL.get_or_init(FiniteGroup::trivial),
        }
    }

    /// Vertex carrying factor `i`.
    pub fn factor_vertex(&self, i: usize) -> Option<usize> {
        self.vertices.iter().position(|v| v.factor == Some(i))
    }

    pub fn edge_name(&self, d: DirEdge) -> String {
        let base = &self.edges[d.geometric()].name;
        if d.is_reversed() {
            format!("{base}'")
        } else {
            base.clone()
        }
    }

    /// Rendering in the input-document token syntax.
    pub fn format_path(&self, p: &GraphPath) -> String {
        let mut tokens = Vec::new();
        for (i, &g) in p.elems.iter().enumerate() {
            if g != 0 {
                let v = self.vertex_at(p, i);
                match self.vertices[v].factor {
                    Some(f) => tokens.push(format!("{}:{}", f + 1, g)),
                    None => tokens.push(format!("?:{g}")),
                }
            }
            if let Some(&e) = p.edges.get(i) {
                tokens.push(self.edge_name(e));
            }
        }
        tokens.join(" ")
    }

    /// Vertex at position `i` (0 = start, `n` = end).
    pub fn vertex_at(&self, p: &GraphPath, i: usize) -> usize {
        if i == 0 {
            p.start
        } else {
            self.terminus(p.edges[i - 1])
        }
    }

    pub fn path_end(&self, p: &GraphPath) -> usize {
        self.vertex_at(p, p.edges.len())
    }

    /// Checks indices, element ranges and endpoint consistency.
    pub fn check_path(&self, p: &GraphPath) -> std::result::Result<(), String> {
        if p.start >= self.vertices.len() {
            return Err(format!("start vertex {} out of range", p.start));
        }
        if p.elems.len() != p.edges.len() + 1 {
            return Err("malformed path".into());
        }
        let mut at = p.start;
        for (i, &g) in p.elems.iter().enumerate() {
            if !self.vertex_group(at).contains(g) {
                return Err(format!(
                    "element {g} not in the group at vertex {}",
                    self.vertices[at].name
                ));
            }
            if let Some(&e) = p.edges.get(i) {
                if e.geometric() >= self.edges.len() {
                    return Err(format!("edge index {} out of range", e.geometric()));
                }
                if self.origin(e) != at {
                    return Err(format!(
                        "edge {} does not start at vertex {}",
                        self.edge_name(e),
                        self.vertices[at].name
                    ));
                }
                at = self.terminus(e);
            }
        }
        Ok(())
    }

    pub fn is_reduced(&self, p: &GraphPath) -> bool {
        p.edges
            .windows(2)
            .zip(&p.elems[1..])
            .all(|(w, &g)| !(w[1] == w[0].rev() && g == 0))
    }

    /// Multiplies `g` into the last element of `p`.
    pub fn append_elem(&self, p: &mut GraphPath, g: usize) {
        let v = self.path_end(p);
        let last = p.elems.last_mut().expect("nonempty");
        *last = self.vertex_group(v).mul(*last, g);
    }

    /// Appends an edge, cancelling `e·1·ē` against the end of `p`.
    pub fn append_edge(&self, p: &mut GraphPath, e: DirEdge) {
        debug_assert_eq!(self.origin(e), self.path_end(p));
        if let Some(&last) = p.edges.last() {
            if last == e.rev() && *p.elems.last().expect("nonempty") == 0 {
                p.edges.pop();
                p.elems.pop();
                return;
            }
        }
        p.edges.push(e);
        p.elems.push(0);
    }

    /// Appends `q` (which must start where `p` ends), reducing at the junction.
    pub fn append_path(&self, p: &mut GraphPath, q: &GraphPath) {
        debug_assert_eq!(q.start, self.path_end(p));
        self.append_elem(p, q.elems[0]);
        for (e, &g) in q.edges.iter().zip(&q.elems[1..]) {
            self.append_edge(p, *e);
            self.append_elem(p, g);
        }
    }

    pub fn concat(&self, p: &GraphPath, q: &GraphPath) -> GraphPath {
        let mut out = p.clone();
        self.append_path(&mut out, q);
        out
    }

    pub fn reverse_path(&self, p: &GraphPath) -> GraphPath {
        let end = self.path_end(p);
        let mut elems = Vec::with_capacity(p.elems.len());
        let mut at = end;
        for (i, &g) in p.elems.iter().enumerate().rev() {
            elems.push(self.vertex_group(at).inv(g));
            if i > 0 {
                at = self.origin(p.edges[i - 1]);
            }
        }
        GraphPath {
            start: end,
            elems,
            edges: p.edges.iter().rev().map(|e| e.rev()).collect(),
        }
    }

    /// Deletes every `e·1·ē`, merging the flanking vertex-group elements.
    pub fn reduce_path(&self, p: &GraphPath) -> GraphPath {
        let mut out = GraphPath::trivial(p.start);
        self.append_path(&mut out, p);
        out
    }

    /// Splits a reduced loop as `conj · core · conj⁻¹` with `core` cyclically
    /// reduced and starting with the identity element. An edge-free core means
    /// the loop is elliptic.
    pub fn cyclically_reduce(&self, lp: &GraphPath) -> (GraphPath, GraphPath) {
        debug_assert_eq!(self.path_end(lp), lp.start);
        let (mut lo, mut hi) = (0usize, lp.edges.len());
        let mut conj = GraphPath::trivial(lp.start);
        let mut first_elem = lp.elems[0];
        let mut last_elem = lp.elems[hi];
        while hi - lo >= 2 {
            let (e_first, e_last) = (lp.edges[lo], lp.edges[hi - 1]);
            let seam_group = self.vertex_group(self.origin(e_first));
            if e_last == e_first.rev() && seam_group.mul(last_elem, first_elem) == 0 {
                // loop = (g₀ e₁) · M · (g₀ e₁)⁻¹
                self.append_elem(&mut conj, first_elem);
                self.append_edge(&mut conj, e_first);
                lo += 1;
                hi -= 1;
                first_elem = lp.elems[lo];
                last_elem = lp.elems[hi];
            } else {
                break;
            }
        }
        let core_start = if lo < hi {
            self.origin(lp.edges[lo])
        } else {
            self.vertex_at(lp, lo)
        };
        let group = self.vertex_group(core_start);
        if lo == hi {
            // no edges left: the middle element is first_elem; for lo == hi the
            // first and last elements are the same position
            let elem = first_elem;
            return (GraphPath::element(core_start, elem), conj);
        }
        // conjugate by g₀ so that the seam element sits at the end
        self.append_elem(&mut conj, first_elem);
        let mut elems = lp.elems[lo..=hi].to_vec();
        elems[0] = 0;
        let last = elems.len() - 1;
        elems[last] = group.mul(last_elem, first_elem);
        let core = GraphPath {
            start: core_start,
            elems,
            edges: lp.edges[lo..hi].to_vec(),
        };
        (core, conj)
    }

    /// The reduced loop at the base representing `g` under the marking.
    pub fn loop_of_element(&self, g: &Word) -> GraphPath {
        let mut out = GraphPath::trivial(self.base);
        for &s in g.syllables() {
            match s {
                Syllable::Factor { factor, elem } => {
                    let p = &self.marking.factor_paths[factor];
                    self.append_path(&mut out, p);
                    self.append_elem(&mut out, elem);
                    let back = self.reverse_path(p);
                    self.append_path(&mut out, &back);
                }
                Syllable::Free { generator, inverse } => {
                    let lp = &self.marking.free_loops[generator];
                    if inverse {
                        let back = self.reverse_path(lp);
                        self.append_path(&mut out, &back);
                    } else {
                        self.append_path(&mut out, lp);
                    }
                }
            }
        }
        out
    }

    /// Metric length of the edges of `p`.
    pub fn path_length(&self, p: &GraphPath) -> f64 {
        p.edges.iter().map(|&e| self.length(e)).sum()
    }

    pub fn axis_of_loop(&self, lp: &GraphPath) -> Axis {
        let (core, _) = self.cyclically_reduce(lp);
        if core.edges.is_empty() {
            Axis::Elliptic {
                vertex: core.start,
                element: core.elems[0],
            }
        } else {
            let length = self.path_length(&core);
            Axis::Hyperbolic { core, length }
        }
    }

    pub fn axis(&self, g: &Word) -> Axis {
        self.axis_of_loop(&self.loop_of_element(g))
    }

    /// `l_T(g)`: zero for elliptic elements, otherwise the length of the cyclically reduced loop.
    pub fn translation_length(&self, g: &Word) -> f64 {
        match self.axis(g) {
            Axis::Elliptic { .. } => 0.0,
            Axis::Hyperbolic { length, .. } => length,
        }
    }

    /// Inverse of the marking, available when the marking is standard with
    /// respect to some maximal tree.
    pub fn marking_inverse(&self) -> Result<&MarkingInverse> {
        self.inverse
            .get_or_init(|| MarkingInverse::compute(self))
            .as_ref()
            .map_err(|m| Error::input("graph.marking", m.clone()))
    }

    /// The group element represented by a loop at any vertex (up to conjugacy
    /// when the loop is not based at the base vertex).
    pub fn element_of_loop(&self, lp: &GraphPath) -> Result<Word> {
        let inv = self.marking_inverse()?;
        inv.read_loop(self, lp)
    }

    /// All structural violations; an empty result (up to notes) means valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let p = &*self.presentation;
        let nv = self.vertices.len();
        if nv == 0 {
            out.push(Diagnostic::violation(
                "empty graph",
                "graph has no vertices",
            ));
            return out;
        }
        if self.base >= nv {
            out.push(Diagnostic::violation(
                "bad index",
                "base vertex out of range",
            ));
        }
        for e in &self.edges {
            if e.origin >= nv || e.terminus >= nv {
                out.push(Diagnostic::violation(
                    "bad index",
                    format!("edge {} has an endpoint out of range", e.name),
                ));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                out.push(Diagnostic::violation(
                    "non-metric edge",
                    format!("edge {} has non-positive length {}", e.name, e.length),
                ));
            }
        }
        for v in &self.vertices {
            if let Some(i) = v.factor {
                if i >= p.factor_count() {
                    out.push(Diagnostic::violation(
                        "bad index",
                        format!("vertex {} carries unknown factor {}", v.name, i + 1),
                    ));
                }
            }
        }
        if out.iter().any(|d| d.code == "bad index") {
            return out;
        }

        if !self.is_connected() {
            out.push(Diagnostic::violation(
                "disconnected",
                "graph is not connected",
            ));
        }
        let betti = self.edges.len() as isize - nv as isize + 1;
        if betti != p.free_rank() as isize {
            out.push(Diagnostic::violation(
                "rank mismatch",
                format!(
                    "first Betti number is {betti} but the free rank is {}",
                    p.free_rank()
                ),
            ));
        }
        for i in 0..p.factor_count() {
            let count = self.vertices.iter().filter(|v| v.factor == Some(i)).count();
            if count != 1 {
                out.push(Diagnostic::violation(
                    "factor assignment",
                    format!(
                        "factor {} is assigned to {count} vertices (expected 1)",
                        p.factor_names()[i]
                    ),
                ));
            }
        }

        let m = &self.marking;
        if m.free_loops.len() != p.free_rank() {
            out.push(Diagnostic::violation(
                "marking",
                format!(
                    "{} free loops for rank {}",
                    m.free_loops.len(),
                    p.free_rank()
                ),
            ));
        }
        if m.factor_paths.len() != p.factor_count() {
            out.push(Diagnostic::violation(
                "marking",
                format!(
                    "{} factor paths for {} factors",
                    m.factor_paths.len(),
                    p.factor_count()
                ),
            ));
        }
        for (j, lp) in m.free_loops.iter().enumerate() {
            let label = p.free_names().get(j).cloned().unwrap_or_default();
            if let Err(msg) = self.check_path(lp) {
                out.push(Diagnostic::violation(
                    "marking",
                    format!("loop {label}: {msg}"),
                ));
                continue;
            }
            if lp.start != self.base || self.path_end(lp) != self.base {
                out.push(Diagnostic::violation(
                    "marking",
                    format!("loop {label} is not based at the base vertex"),
                ));
            }
            if !self.is_reduced(lp) {
                out.push(Diagnostic::violation(
                    "marking",
                    format!("loop {label} is not reduced"),
                ));
            }
        }
        for (i, path) in m.factor_paths.iter().enumerate() {
            let label = p.factor_names().get(i).cloned().unwrap_or_default();
            if let Err(msg) = self.check_path(path) {
                out.push(Diagnostic::violation(
                    "marking",
                    format!("path to {label}: {msg}"),
                ));
                continue;
            }
            if path.start != self.base || Some(self.path_end(path)) != self.factor_vertex(i) {
                out.push(Diagnostic::violation(
                    "marking",
                    format!("path to {label} does not run from the base to its vertex"),
                ));
            }
            if !self.is_reduced(path) {
                out.push(Diagnostic::violation(
                    "marking",
                    format!("path to {label} is not reduced"),
                ));
            }
        }
        if out.is_empty() {
            out.push(Diagnostic::note(
                "certificate-level check",
                "marking verified by rank and factor-count certificate only",
            ));
        }
        out
    }

    fn is_connected(&self) -> bool {
        let nv = self.vertices.len();
        let mut seen = vec![false; nv];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                for (a, b) in [(e.origin, e.terminus), (e.terminus, e.origin)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The graph of groups with one central vertex, a unit petal per free
    /// generator and a half-length spoke to a vertex per factor.
    pub fn standard_rose(presentation: Arc<Presentation>) -> Self {
        let k = presentation.factor_count();
        let mut vertices = vec![Vertex {
            name: "c".into(),
            factor: None,
        }];
        vertices.extend((0..k).map(|i| Vertex {
            name: format!("v{}", i + 1),
            factor: Some(i),
        }));
        let mut edges: Vec<Edge> = presentation
            .free_names()
            .iter()
            .map(|name| Edge {
                name: name.clone(),
                origin: 0,
                terminus: 0,
                length: 1.0,
            })
            .collect();
        let r = edges.len();
        edges.extend((0..k).map(|i| Edge {
            name: format!("s{}", i + 1),
            origin: 0,
            terminus: i + 1,
            length: 0.5,
        }));
        let marking = Marking {
            free_loops: (0..r)
                .map(|j| GraphPath::from_edges(0, vec![DirEdge::forward(j)]))
                .collect(),
            factor_paths: (0..k)
                .map(|i| GraphPath::from_edges(0, vec![DirEdge::forward(r + i)]))
                .collect(),
        };
        Self::new(presentation, vertices, edges, 0, marking)
    }
}

/// Anything that assigns a length to conjugacy classes of `G`.
pub trait ConjugacyLength: Sync {
    fn conjugacy_length(&self, g: &Word) -> f64;
}

impl ConjugacyLength for MarkedMetricGraph {
    fn conjugacy_length(&self, g: &Word) -> f64 {
        self.translation_length(g)
    }
}

/// The tree `T·α`: same metric graph, marking precomposed with `α`, so that
/// `l_{Tα}(g) = l_T(gα)`.
pub struct Twisted<'a> {
    pub graph: &'a MarkedMetricGraph,
    pub automorphism: &'a Automorphism,
}

impl ConjugacyLength for Twisted<'_> {
    fn conjugacy_length(&self, g: &Word) -> f64 {
        let image = self.automorphism.apply(self.graph.presentation(), g);
        self.graph.translation_length(&image)
    }
}

#[cfg(test)]
mod tests;
