//! Shared fixtures and strategies for unit tests.

use std::sync::Arc;

use proptest::prelude::*;

use crate::free_product::{
    Automorphism, AutomorphismData, FiniteGroup, Presentation, Syllable, Word,
};
use crate::graph_map::{MapData, TopologicalRepresentative, VertexTwist};
use crate::graph_of_groups::{DirEdge, GraphPath, MarkedMetricGraph};

/// `C₂ ∗ C₃ ∗ F₂`.
pub fn c2_c3_f2() -> Presentation {
    Presentation::new(
        vec![
            FiniteGroup::cyclic(2).unwrap(),
            FiniteGroup::cyclic(3).unwrap(),
        ],
        2,
    )
    .unwrap()
}

const LETTERS: [Syllable; 7] = [
    Syllable::Factor { factor: 0, elem: 1 },
    Syllable::Factor { factor: 1, elem: 1 },
    Syllable::Factor { factor: 1, elem: 2 },
    Syllable::Free {
        generator: 0,
        inverse: false,
    },
    Syllable::Free {
        generator: 0,
        inverse: true,
    },
    Syllable::Free {
        generator: 1,
        inverse: false,
    },
    Syllable::Free {
        generator: 1,
        inverse: true,
    },
];

/// Random normal-form words over `C₂ ∗ C₃ ∗ F₂` built from at most `max_len` letters.
pub fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..LETTERS.len(), 0..=max_len).prop_map(|idx| {
        let letters: Vec<Syllable> = idx.into_iter().map(|i| LETTERS[i]).collect();
        c2_c3_f2().normal_form(&letters).unwrap()
    })
}

/// `a ↦ b, b ↦ ab` on the last two free generators of `p` (free rank ≥ 2),
/// identity on everything else.
pub fn golden_automorphism(p: &Presentation) -> Automorphism {
    let r = p.free_rank();
    let (a, b) = (r - 2, r - 1);
    let w = |s: &[Syllable]| p.normal_form(s).unwrap();
    let mut fwd = AutomorphismData::identity(p);
    fwd.free_images[a] = w(&[Syllable::free(b)]);
    fwd.free_images[b] = w(&[Syllable::free(a), Syllable::free(b)]);
    let mut inv = AutomorphismData::identity(p);
    inv.free_images[a] = w(&[Syllable::free(b), Syllable::free_inv(a)]);
    inv.free_images[b] = w(&[Syllable::free(a)]);
    Automorphism::new(p, fwd, inv).unwrap()
}

/// `F₂` with generators named `a`, `b`.
pub fn f2_ab() -> Arc<Presentation> {
    Arc::new(Presentation::with_names(vec![], vec![], vec!["a".into(), "b".into()]).unwrap())
}

/// Parses space-separated free names (`'` for inverses) and `i:g` factor tokens.
pub fn word(p: &Presentation, s: &str) -> Word {
    let letters: Vec<Syllable> = s
        .split_whitespace()
        .map(|t| {
            if let Some((i, g)) = t.split_once(':') {
                Syllable::factor(i.parse::<usize>().unwrap() - 1, g.parse().unwrap())
            } else {
                let (name, inverse) = match t.strip_suffix('\'') {
                    Some(n) => (n, true),
                    None => (t, false),
                };
                let j = p.free_names().iter().position(|x| x == name).unwrap();
                if inverse {
                    Syllable::free_inv(j)
                } else {
                    Syllable::free(j)
                }
            }
        })
        .collect();
    p.normal_form(&letters).unwrap()
}

/// The map on the standard rose sending each petal to the loop of its image
/// word and fixing every spoke; factors are fixed by the automorphism.
pub fn rose_map(p: Arc<Presentation>, images: &[&str], inverse: &[&str]) -> MapData {
    let graph = MarkedMetricGraph::standard_rose(p.clone());
    let mut fwd = AutomorphismData::identity(&p);
    let mut inv = AutomorphismData::identity(&p);
    for j in 0..p.free_rank() {
        fwd.free_images[j] = word(&p, images[j]);
        inv.free_images[j] = word(&p, inverse[j]);
    }
    let automorphism = Automorphism::new(&p, fwd, inv).unwrap();
    let r = p.free_rank();
    let edge_images = (0..graph.edge_count())
        .map(|i| {
            if i < r {
                graph.loop_of_element(&automorphism.forward().free_images[i])
            } else {
                GraphPath::from_edges(0, vec![DirEdge::forward(i)])
            }
        })
        .collect();
    let nv = graph.vertex_count();
    MapData {
        automorphism,
        vertex_images: (0..nv).collect(),
        vertex_twists: (0..nv)
            .map(|v| VertexTwist::identity(graph.vertex_group(v).order()))
            .collect(),
        edge_images,
        tether: GraphPath::trivial(0),
        graph,
    }
}

pub fn golden_map() -> TopologicalRepresentative {
    TopologicalRepresentative::new(rose_map(f2_ab(), &["b", "a b"], &["b a'", "a"])).unwrap()
}

pub fn polynomial_map() -> TopologicalRepresentative {
    TopologicalRepresentative::new(rose_map(f2_ab(), &["a", "b a"], &["a", "b a'"])).unwrap()
}
