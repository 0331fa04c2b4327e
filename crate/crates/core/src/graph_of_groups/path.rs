use std::fmt;

use serde::Serialize;

/// A directed edge: geometric edge `index / 2`, reversed when the low bit is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct DirEdge(pub usize);

impl DirEdge {
    pub fn new(geometric: usize, reversed: bool) -> Self {
        DirEdge(2 * geometric + usize::from(reversed))
    }

    pub fn forward(geometric: usize) -> Self {
        Self::new(geometric, false)
    }

    pub fn geometric(self) -> usize {
        self.0 / 2
    }

    pub fn is_reversed(self) -> bool {
        self.0 % 2 == 1
    }

    /// `ē`.
    pub fn rev(self) -> Self {
        DirEdge(self.0 ^ 1)
    }
}

/// `g₀ e₁ g₁ … e_n g_n`: an edge path with a vertex-group element at every
/// vertex it visits (`0` is the identity, and the only element at vertices
/// with trivial group).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GraphPath {
    pub(crate) start: usize,
    pub(crate) elems: Vec<usize>,
    pub(crate) edges: Vec<DirEdge>,
}

impl GraphPath {
    /// The trivial path at `vertex`.
    pub fn trivial(vertex: usize) -> Self {
        Self {
            start: vertex,
            elems: vec![0],
            edges: Vec::new(),
        }
    }

    /// A path consisting of a single vertex-group element.
    pub fn element(vertex: usize, elem: usize) -> Self {
        Self {
            start: vertex,
            elems: vec![elem],
            edges: Vec::new(),
        }
    }

    /// Raw constructor; `elems.len()` must be `edges.len() + 1`.
    pub fn from_parts(start: usize, elems: Vec<usize>, edges: Vec<DirEdge>) -> Self {
        assert_eq!(
            elems.len(),
            edges.len() + 1,
            "one element per visited vertex"
        );
        Self {
            start,
            elems,
            edges,
        }
    }

    /// Edge path with identity elements throughout.
    pub fn from_edges(start: usize, edges: Vec<DirEdge>) -> Self {
        Self {
            start,
            elems: vec![0; edges.len() + 1],
            edges,
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn edges(&self) -> &[DirEdge] {
        &self.edges
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// No edges and only the identity element.
    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty() && self.elems[0] == 0
    }

    pub fn first_elem(&self) -> usize {
        self.elems[0]
    }

    pub fn last_elem(&self) -> usize {
        *self.elems.last().expect("paths carry at least one element")
    }
}

impl fmt::Display for GraphPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[v{}]", self.start)?;
        for (i, g) in self.elems.iter().enumerate() {
            if *g != 0 {
                write!(f, " <{g}>")?;
            }
            if let Some(e) = self.edges.get(i) {
                write!(
                    f,
                    " e{}{}",
                    e.geometric(),
                    if e.is_reversed() { "'" } else { "" }
                )?;
            }
        }
        Ok(())
    }
}
