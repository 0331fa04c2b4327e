//! The input document: a TOML file with `presentation`, `graph`,
//! `automorphism` and `map` sections.
//!
//! Words are space-separated tokens: free generator names (with a trailing
//! `'` for inverses) and `i:g` for element `g` of factor `i` (one-based).
//! Paths use edge names instead of free generators, `i:g` for vertex-group
//! elements at the current vertex, and an optional leading `@vertex` when
//! the start cannot be inferred.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_product::{
    Automorphism, AutomorphismData, FactorImage, FiniteGroup, Presentation, Syllable, Word,
};
use crate::graph_map::{MapData, TopologicalRepresentative, VertexTwist};
use crate::graph_of_groups::{DirEdge, Edge, GraphPath, MarkedMetricGraph, Marking, Vertex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info: Option<InfoSection>,
    pub presentation: PresentationSection,
    /// Defaults to the standard rose.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSection>,
    pub automorphism: AutomorphismSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoSection {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Default sample of elements for growth and displacement.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sample: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<FactorSpec>,
    #[serde(default)]
    pub free: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_budget: Option<usize>,
}

/// A factor given by `cyclic = n` or an explicit multiplication `table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub base: String,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    /// Free generator name → loop at the base; factor name → path to its vertex.
    pub marking: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub name: String,
    pub from: String,
    pub to: String,
    #[serde(default = "unit")]
    pub length: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismSection {
    /// Free generator name → image word; omitted generators are fixed.
    #[serde(default)]
    pub free: BTreeMap<String, String>,
    /// Factor name → image; omitted factors are fixed.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub factors: BTreeMap<String, FactorImageSpec>,
    pub inverse: InverseSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseSection {
    #[serde(default)]
    pub free: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub factors: BTreeMap<String, FactorImageSpec>,
}

/// `a ↦ w⁻¹ · map(a) · w` with `map(a)` in the `target` factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorImageSpec {
    pub target: String,
    /// Defaults to the identity table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub conjugator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    /// Vertex → image vertex; omitted vertices are fixed.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vertices: BTreeMap<String, String>,
    /// Grouped vertex → twist; omitted twists are the identity.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub twists: BTreeMap<String, TwistSpec>,
    /// Edge name → image path.
    pub edges: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub tether: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub map: Vec<usize>,
    #[serde(default)]
    pub conjugator: usize,
}

/// Everything a document describes, built and validated.
#[derive(Debug, Clone)]
pub struct Model {
    pub info: Option<InfoSection>,
    pub presentation: Arc<Presentation>,
    pub graph: MarkedMetricGraph,
    pub automorphism: Automorphism,
    pub map: Option<TopologicalRepresentative>,
}

impl Model {
    /// The map, or an input error naming the missing section.
    pub fn representative(&self) -> Result<&TopologicalRepresentative> {
        self.map
            .as_ref()
            .ok_or_else(|| Error::input("map", "document has no map section"))
    }

    /// The `info.sample` words.
    pub fn sample(&self) -> Result<Vec<Word>> {
        self.info
            .iter()
            .flat_map(|i| i.sample.iter().enumerate())
            .map(|(j, s)| parse_word(&self.presentation, s, &format!("info.sample[{j}]")))
            .collect()
    }
}

/// Parses and builds a document.
pub fn parse_input(text: &str) -> Result<Model> {
    Document::parse(text)?.build()
}

impl Document {
    /// Schema-level parse; errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let location = match e.span() {
                Some(span) => {
                    let line = text[..span.start].matches('\n').count() + 1;
                    let col = span.start - text[..span.start].rfind('\n').map_or(0, |i| i + 1) + 1;
                    format!("line {line}, column {col}")
                }
                None => "document".to_string(),
            };
            Error::input(location, e.message().to_string())
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("documents always serialize")
    }

    /// Resolves every reference and validates each layer.
    pub fn build(&self) -> Result<Model> {
        let presentation = Arc::new(self.build_presentation()?);
        Error::check(presentation.diagnostics())?;
        let graph = match &self.graph {
            Some(g) => build_graph(&presentation, g)?,
            None => MarkedMetricGraph::standard_rose(presentation.clone()),
        };
        Error::check(graph.validate())?;
        let automorphism = self.build_automorphism(&presentation)?;
        let map = match &self.map {
            Some(m) => Some(TopologicalRepresentative::new(build_map(
                &graph,
                &automorphism,
                m,
            )?)?),
            None => None,
        };
        Ok(Model {
            info: self.info.clone(),
            presentation,
            graph,
            automorphism,
            map,
        })
    }

    fn build_presentation(&self) -> Result<Presentation> {
        let sec = &self.presentation;
        let mut factors = Vec::new();
        for (i, f) in sec.factors.iter().enumerate() {
            let loc = format!("presentation.factors[{i}]");
            let group = match (&f.cyclic, &f.table) {
                (Some(n), None) => FiniteGroup::cyclic(*n),
                (None, Some(t)) => FiniteGroup::from_table(t.clone()),
                _ => return Err(Error::input(loc, "give exactly one of `cyclic` or `table`")),
            }
            .map_err(|e| Error::input(&loc, e.to_string()))?;
            factors.push(group);
        }
        let factor_names: Vec<String> = sec.factors.iter().map(|f| f.name.clone()).collect();
        let mut seen = std::collections::BTreeSet::new();
        for name in factor_names.iter().chain(&sec.free) {
            check_name(name, "presentation")?;
            if !seen.insert(name) {
                return Err(Error::input(
                    "presentation",
                    format!("duplicate name `{name}`"),
                ));
            }
        }
        let mut p = Presentation::with_names(factors, factor_names, sec.free.clone())?;
        if let Some(budget) = sec.search_budget {
            p = p.with_search_budget(budget);
        }
        if let Some(gens) = &sec.relative_generators {
            let words = gens
                .iter()
                .enumerate()
                .map(|(i, s)| parse_word(&p, s, &format!("presentation.relative_generators[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            p = p.with_relative_generators(words)?;
        }
        Ok(p)
    }

    fn build_automorphism(&self, p: &Presentation) -> Result<Automorphism> {
        let sec = &self.automorphism;
        let forward = automorphism_data(p, &sec.free, &sec.factors, "automorphism")?;
        let inverse = automorphism_data(
            p,
            &sec.inverse.free,
            &sec.inverse.factors,
            "automorphism.inverse",
        )?;
        Automorphism::new(p, forward, inverse)
    }
}

fn check_name(name: &str, loc: &str) -> Result<()> {
    let bad = name.is_empty()
        || name.starts_with('@')
        || name
            .chars()
            .any(|c| c.is_whitespace() || c == '\'' || c == ':');
    if bad {
        return Err(Error::input(loc, format!("invalid name `{name}`")));
    }
    Ok(())
}

fn factor_index(p: &Presentation, name: &str, loc: &str) -> Result<usize> {
    p.factor_names()
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::input(loc, format!("unknown factor `{name}`")))
}

fn parse_factor_token(t: &str, loc: &str) -> Result<Option<(usize, usize)>> {
    let Some((i, g)) = t.split_once(':') else {
        return Ok(None);
    };
    let i: usize = i
        .parse()
        .map_err(|_| Error::input(loc, format!("bad factor token `{t}`")))?;
    let g: usize = g
        .parse()
        .map_err(|_| Error::input(loc, format!("bad factor token `{t}`")))?;
    if i == 0 {
        return Err(Error::input(
            loc,
            format!("factor indices are one-based in `{t}`"),
        ));
    }
    Ok(Some((i - 1, g)))
}

/// Parses a word; the empty string and `1` denote the identity.
pub fn parse_word(p: &Presentation, text: &str, loc: &str) -> Result<Word> {
    let mut letters = Vec::new();
    for t in text.split_whitespace() {
        if t == "1" {
            continue;
        }
        if let Some((factor, elem)) = parse_factor_token(t, loc)? {
            letters.push(Syllable::Factor { factor, elem });
            continue;
        }
        let (name, inverse) = match t.strip_suffix('\'') {
            Some(n) => (n, true),
            None => (t, false),
        };
        let j = p
            .free_names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::input(loc, format!("unknown generator `{name}`")))?;
        letters.push(if inverse {
            Syllable::free_inv(j)
        } else {
            Syllable::free(j)
        });
    }
    p.normal_form(&letters)
        .map_err(|e| Error::input(loc, e.to_string()))
}

fn automorphism_data(
    p: &Presentation,
    free: &BTreeMap<String, String>,
    factors: &BTreeMap<String, FactorImageSpec>,
    loc: &str,
) -> Result<AutomorphismData> {
    let mut data = AutomorphismData::identity(p);
    for (name, image) in free {
        let here = format!("{loc}.free.{name}");
        let j = p
            .free_names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::input(&here, format!("unknown generator `{name}`")))?;
        data.free_images[j] = parse_word(p, image, &here)?;
    }
    for (name, spec) in factors {
        let here = format!("{loc}.factors.{name}");
        let i = factor_index(p, name, &here)?;
        let target = factor_index(p, &spec.target, &here)?;
        data.factor_images[i] = FactorImage {
            target,
            map: spec
                .map
                .clone()
                .unwrap_or_else(|| (0..p.factor(i).order()).collect()),
            conjugator: parse_word(p, &spec.conjugator, &here)?,
        };
    }
    Ok(data)
}

fn build_graph(p: &Arc<Presentation>, sec: &GraphSection) -> Result<MarkedMetricGraph> {
    let mut vertices = Vec::new();
    for (i, v) in sec.vertices.iter().enumerate() {
        let loc = format!("graph.vertices[{i}]");
        check_name(&v.name, &loc)?;
        if sec.vertices[..i].iter().any(|w| w.name == v.name) {
            return Err(Error::input(loc, format!("duplicate vertex `{}`", v.name)));
        }
        let factor = v
            .factor
            .as_deref()
            .map(|f| factor_index(p, f, &loc))
            .transpose()?;
        vertices.push(Vertex {
            name: v.name.clone(),
            factor,
        });
    }
    let vertex = |name: &str, loc: &str| {
        vertices
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::input(loc, format!("unknown vertex `{name}`")))
    };
    let mut edges = Vec::new();
    for (i, e) in sec.edges.iter().enumerate() {
        let loc = format!("graph.edges[{i}]");
        check_name(&e.name, &loc)?;
        if sec.edges[..i].iter().any(|f| f.name == e.name) {
            return Err(Error::input(loc, format!("duplicate edge `{}`", e.name)));
        }
        if !(e.length.is_finite() && e.length > 0.0) {
            return Err(Error::input(
                loc,
                format!("edge `{}` has non-positive length {}", e.name, e.length),
            ));
        }
        edges.push(Edge {
            name: e.name.clone(),
            origin: vertex(&e.from, &loc)?,
            terminus: vertex(&e.to, &loc)?,
            length: e.length,
        });
    }
    let base = vertex(&sec.base, "graph.base")?;
    let skeleton = MarkedMetricGraph::new(
        p.clone(),
        vertices,
        edges,
        base,
        Marking {
            free_loops: vec![],
            factor_paths: vec![],
        },
    );
    let mut free_loops = Vec::new();
    for name in p.free_names() {
        let loc = format!("graph.marking.{name}");
        let text = sec
            .marking
            .get(name)
            .ok_or_else(|| Error::input(&loc, "missing marking loop"))?;
        free_loops.push(parse_path(&skeleton, text, base, &loc)?);
    }
    let mut factor_paths = Vec::new();
    for name in p.factor_names() {
        let loc = format!("graph.marking.{name}");
        let text = sec
            .marking
            .get(name)
            .ok_or_else(|| Error::input(&loc, "missing marking path"))?;
        factor_paths.push(parse_path(&skeleton, text, base, &loc)?);
    }
    if let Some(extra) = sec
        .marking
        .keys()
        .find(|k| !p.free_names().contains(k) && !p.factor_names().contains(k))
    {
        return Err(Error::input(
            format!("graph.marking.{extra}"),
            "not a generator or factor name",
        ));
    }
    Ok(MarkedMetricGraph::new(
        p.clone(),
        skeleton.vertices().to_vec(),
        skeleton.edges().to_vec(),
        base,
        Marking {
            free_loops,
            factor_paths,
        },
    ))
}

/// Parses a path; `default_start` is used when neither `@vertex` nor an edge fixes it.
pub fn parse_path(
    g: &MarkedMetricGraph,
    text: &str,
    default_start: usize,
    loc: &str,
) -> Result<GraphPath> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let edge_of = |t: &str| -> Option<DirEdge> {
        let (name, rev) = match t.strip_suffix('\'') {
            Some(n) => (n, true),
            None => (t, false),
        };
        g.edges()
            .iter()
            .position(|e| e.name == name)
            .map(|i| DirEdge::new(i, rev))
    };
    let mut rest = &tokens[..];
    let start = if let Some(name) = tokens.first().and_then(|t| t.strip_prefix('@')) {
        rest = &tokens[1..];
        g.vertices()
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::input(loc, format!("unknown vertex `{name}`")))?
    } else {
        match rest.iter().find_map(|t| edge_of(t)) {
            Some(e) => g.origin(e),
            None => default_start,
        }
    };
    let mut elems = vec![0usize];
    let mut edges = Vec::new();
    let mut at = start;
    for &t in rest {
        if let Some((factor, elem)) = parse_factor_token(t, loc)? {
            if g.vertices()[at].factor != Some(factor) {
                return Err(Error::input(
                    loc,
                    format!(
                        "`{t}` is not an element of the group at vertex `{}`",
                        g.vertices()[at].name
                    ),
                ));
            }
            let group = g.vertex_group(at);
            if !group.contains(elem) {
                return Err(Error::input(loc, format!("element `{t}` out of range")));
            }
            let last = elems.last_mut().expect("nonempty");
            *last = group.mul(*last, elem);
            continue;
        }
        let e = edge_of(t).ok_or_else(|| Error::input(loc, format!("unknown edge `{t}`")))?;
        if g.origin(e) != at {
            return Err(Error::input(
                loc,
                format!(
                    "edge `{t}` does not start at vertex `{}`",
                    g.vertices()[at].name
                ),
            ));
        }
        edges.push(e);
        elems.push(0);
        at = g.terminus(e);
    }
    Ok(GraphPath::from_parts(start, elems, edges))
}

fn build_map(
    g: &MarkedMetricGraph,
    automorphism: &Automorphism,
    sec: &MapSection,
) -> Result<MapData> {
    let vertex = |name: &str, loc: &str| {
        g.vertices()
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::input(loc, format!("unknown vertex `{name}`")))
    };
    let nv = g.vertex_count();
    let mut vertex_images: Vec<usize> = (0..nv).collect();
    for (from, to) in &sec.vertices {
        let loc = format!("map.vertices.{from}");
        vertex_images[vertex(from, &loc)?] = vertex(to, &loc)?;
    }
    let mut vertex_twists: Vec<VertexTwist> = (0..nv)
        .map(|v| VertexTwist::identity(g.vertex_group(v).order()))
        .collect();
    for (name, t) in &sec.twists {
        let loc = format!("map.twists.{name}");
        vertex_twists[vertex(name, &loc)?] = VertexTwist {
            map: t.map.clone(),
            conjugator: t.conjugator,
        };
    }
    let mut edge_images = Vec::with_capacity(g.edge_count());
    for (i, e) in g.edges().iter().enumerate() {
        let loc = format!("map.edges.{}", e.name);
        let text = sec
            .edges
            .get(&e.name)
            .ok_or_else(|| Error::input(&loc, "missing edge image"))?;
        let start = vertex_images[g.origin(DirEdge::forward(i))];
        edge_images.push(parse_path(g, text, start, &loc)?);
    }
    if let Some(extra) = sec
        .edges
        .keys()
        .find(|k| !g.edges().iter().any(|e| &e.name == *k))
    {
        return Err(Error::input(format!("map.edges.{extra}"), "unknown edge"));
    }
    let tether = parse_path(g, &sec.tether, g.base(), "map.tether")?;
    Ok(MapData {
        graph: g.clone(),
        automorphism: automorphism.clone(),
        vertex_images,
        vertex_twists,
        edge_images,
        tether,
    })
}
