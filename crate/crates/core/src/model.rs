//! Core graph and model-description types.
//!
//! Vertices are 1-based (`[n] = {1, ..., n}`); edges are stored as
//! `(min, max)` pairs and every list is kept sorted so that two graphs with
//! the same content compare (and serialize) identically.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex of `K_n`, numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(u32);

impl VertexId {
    /// Panics on `index == 0`.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "vertex ids are 1-based");
        VertexId(index)
    }

    pub fn from_zero_based(i: usize) -> Self {
        VertexId(i as u32 + 1)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Position in 0-based per-vertex arrays.
    pub fn idx(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Edge = (VertexId, VertexId);

fn ordered(u: VertexId, v: VertexId) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// One sampled community `G_i`: its vertex set plus the edges on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityInstance {
    members: Vec<VertexId>,
    edges: Vec<Edge>,
}

impl CommunityInstance {
    /// Canonicalizes `members` and `edges`, rejecting self-loops and edges
    /// with an endpoint outside `members`.
    pub fn new(members: Vec<VertexId>, edges: Vec<Edge>) -> Result<Self> {
        let members: Vec<VertexId> = members
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut canon = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidCommunity(format!("self-loop at vertex {u}")));
            }
            for w in [u, v] {
                if members.binary_search(&w).is_err() {
                    return Err(Error::InvalidCommunity(format!(
                        "edge endpoint {w} is not a member"
                    )));
                }
            }
            canon.push(ordered(u, v));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(CommunityInstance {
            members,
            edges: canon,
        })
    }

    /// Caller guarantees sorted members and canonical, sorted, duplicate-free edges.
    pub(crate) fn from_canonical(members: Vec<VertexId>, edges: Vec<Edge>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u < v));
        CommunityInstance { members, edges }
    }

    /// A community consisting of the single edge `{u, v}`.
    pub fn edge(u: u32, v: u32) -> Self {
        let (a, b) = ordered(VertexId::new(u), VertexId::new(v));
        assert!(a != b, "self-loop");
        CommunityInstance {
            members: vec![a, b],
            edges: vec![(a, b)],
        }
    }

    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Degrees `d_i(v)` inside this community, aligned with [`Self::members`].
    pub fn member_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.members.len()];
        for &(u, v) in &self.edges {
            // members are sorted, endpoints are guaranteed members
            deg[self.members.binary_search(&u).unwrap()] += 1;
            deg[self.members.binary_search(&v).unwrap()] += 1;
        }
        deg
    }

    /// The non-isolated vertex set (vertices with `d_i(v) >= 1`), sorted.
    pub fn non_isolated(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn relabel(&self, map: &[Option<VertexId>]) -> CommunityInstance {
        let members = self.members.iter().filter_map(|v| map[v.idx()]).collect();
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .filter_map(|&(u, v)| Some(ordered(map[u.idx()]?, map[v.idx()]?)))
            .collect();
        edges.sort_unstable();
        CommunityInstance { members, edges }
    }
}

/// The union `G_1 ∪ ... ∪ G_m` on `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionGraph {
    n: usize,
    adjacency: Vec<Vec<VertexId>>,
    communities: Vec<CommunityInstance>,
}

/// Union of the community edge sets, deduplicated; communities are kept
/// verbatim for later statistics.
pub fn build_union(n: usize, communities: Vec<CommunityInstance>) -> Result<UnionGraph> {
    for (ci, c) in communities.iter().enumerate() {
        if let Some(v) = c.members.iter().find(|v| v.idx() >= n) {
            return Err(Error::VertexOutOfRange {
                community: ci,
                vertex: v.get(),
                n,
            });
        }
    }
    let mut edges: Vec<Edge> = communities
        .iter()
        .flat_map(|c| c.edges.iter().copied())
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in &edges {
        adjacency[u.idx()].push(v);
        adjacency[v.idx()].push(u);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(UnionGraph {
        n,
        adjacency,
        communities,
    })
}

impl UnionGraph {
    /// Convenience constructor: one single-edge community per listed edge.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let communities = edges
            .iter()
            .map(|&(u, v)| {
                if u == v || u == 0 || v == 0 {
                    Err(Error::InvalidCommunity(format!("bad edge ({u}, {v})")))
                } else {
                    Ok(CommunityInstance::edge(u, v))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        build_union(n, communities)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 1..=n as u32 {
            for v in u + 1..=n as u32 {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, &edges).expect("valid complete graph")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let edges: Vec<(u32, u32)> = (1..=n as u32).map(|u| (u, u % n as u32 + 1)).collect();
        Self::from_edges(n, &edges).expect("valid cycle")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn communities(&self) -> &[CommunityInstance] {
        &self.communities
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.idx()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.idx()].len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n).map(VertexId::from_zero_based)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u.idx()].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Union edges in canonical `(min, max)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            let u = VertexId::from_zero_based(i);
            list.iter().filter(move |&&v| u < v).map(move |&v| (u, v))
        })
    }

    /// Induced subgraph on `[n] \ removed`, relabeled onto `1..=n-|removed|`.
    /// `map[j]` is the original id of new vertex `j + 1`.
    pub(crate) fn induced_without(&self, removed: &[bool]) -> (UnionGraph, Vec<VertexId>) {
        let mut forward = vec![None; self.n];
        let mut back = Vec::new();
        for (i, &gone) in removed.iter().enumerate() {
            if !gone {
                back.push(VertexId::from_zero_based(i));
                forward[i] = Some(VertexId::from_zero_based(back.len() - 1));
            }
        }
        let communities = self.communities.iter().map(|c| c.relabel(&forward)).collect();
        let g = build_union(back.len(), communities).expect("relabeling stays in range");
        (g, back)
    }

    /// Graphviz rendering of the union edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph union {\n");
        for v in self.vertices() {
            out.push_str(&format!("  {v};\n"));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// A fixed graph `F` used as a community template; vertices are `1..=vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphTemplate {
    pub vertices: usize,
    pub edges: Vec<[u32; 2]>,
}

impl GraphTemplate {
    pub fn k2() -> Self {
        GraphTemplate {
            vertices: 2,
            edges: vec![[1, 2]],
        }
    }

    /// The path 1–2–3 (an open triangle).
    pub fn cherry() -> Self {
        GraphTemplate {
            vertices: 3,
            edges: vec![[1, 2], [2, 3]],
        }
    }

    pub fn clique(k: usize) -> Self {
        let mut edges = Vec::new();
        for u in 1..=k as u32 {
            for v in u + 1..=k as u32 {
                edges.push([u, v]);
            }
        }
        GraphTemplate { vertices: k, edges }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices];
        for &[u, v] in &self.edges {
            deg[u as usize - 1] += 1;
            deg[v as usize - 1] += 1;
        }
        deg
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    /// Structural problems with the template itself, independent of `n`.
    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for &[u, v] in &self.edges {
            if u == 0 || v == 0 || u as usize > self.vertices || v as usize > self.vertices {
                out.push(format!("edge [{u}, {v}] outside 1..={}", self.vertices));
            } else if u == v {
                out.push(format!("self-loop at {u}"));
            } else if !seen.insert((u.min(v), u.max(v))) {
                out.push(format!("duplicate edge [{u}, {v}]"));
            }
        }
        if out.is_empty() && self.min_degree() == 0 {
            out.push("template has an isolated vertex (minimal degree must be >= 1)".into());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YqAtom {
    pub y: u64,
    pub q: f64,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YqLaw {
    pub support: Vec<YqAtom>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeAtom {
    pub size: u64,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeLaw {
    pub support: Vec<SizeAtom>,
}

impl SizeLaw {
    pub fn single(size: u64) -> Self {
        SizeLaw {
            support: vec![SizeAtom { size, w: 1.0 }],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Community `i` is a uniform random copy of template `i mod len`.
    FixedGraphs(Vec<GraphTemplate>),
    /// Bernoulli graph `G(min(Y, n), Q)` with `(Y, Q)` drawn from the law.
    BernoulliYq(YqLaw),
    /// A clique on `min(Y, n)` uniform vertices, `Y` drawn from the law.
    CliqueSizes(SizeLaw),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n: usize,
    pub m: usize,
    pub kind: ModelKind,
}

impl ModelSpec {
    pub fn fixed(n: usize, m: usize, templates: Vec<GraphTemplate>) -> Self {
        ModelSpec {
            n,
            m,
            kind: ModelKind::FixedGraphs(templates),
        }
    }

    pub fn cliques(n: usize, m: usize, law: SizeLaw) -> Self {
        ModelSpec {
            n,
            m,
            kind: ModelKind::CliqueSizes(law),
        }
    }

    pub fn bernoulli(n: usize, m: usize, support: Vec<(u64, f64, f64)>) -> Self {
        ModelSpec {
            n,
            m,
            kind: ModelKind::BernoulliYq(YqLaw {
                support: support
                    .into_iter()
                    .map(|(y, q, w)| YqAtom { y, q, w })
                    .collect(),
            }),
        }
    }

    /// Same model with a different community count.
    pub fn with_m(&self, m: usize) -> Self {
        ModelSpec {
            m,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub messages: Vec<String>,
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

fn check_weights(weights: impl Iterator<Item = f64>, out: &mut Vec<String>) {
    let mut sum = 0.0;
    let mut count = 0;
    for (i, w) in weights.enumerate() {
        count += 1;
        if !w.is_finite() || w < 0.0 {
            out.push(format!("weights: support[{i}].w = {w} is not a nonnegative number"));
        } else {
            sum += w;
        }
    }
    if count == 0 {
        out.push("weights: support is empty".into());
    } else if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        out.push(format!("weights: sum to {sum}, expected 1"));
    }
}

/// Checks every [`ModelSpec`] invariant and reports all violations.
pub fn validate_spec(spec: &ModelSpec) -> ValidationReport {
    let mut messages = Vec::new();
    if spec.n == 0 {
        messages.push("n: must be at least 1".into());
    }
    match &spec.kind {
        ModelKind::FixedGraphs(templates) => {
            if templates.is_empty() && spec.m > 0 {
                messages.push("fixed_graphs: template list is empty".into());
            }
            for (i, t) in templates.iter().enumerate() {
                for p in t.problems() {
                    messages.push(format!("fixed_graphs[{i}]: {p}"));
                }
                if t.vertices > spec.n {
                    messages.push(format!(
                        "fixed_graphs[{i}]: {} vertices exceed n = {}",
                        t.vertices, spec.n
                    ));
                }
            }
        }
        ModelKind::BernoulliYq(law) => {
            check_weights(law.support.iter().map(|a| a.w), &mut messages);
            for (i, a) in law.support.iter().enumerate() {
                if !(0.0..=1.0).contains(&a.q) {
                    messages.push(format!("bernoulli_yq: support[{i}].q = {} not in [0, 1]", a.q));
                }
            }
        }
        ModelKind::CliqueSizes(law) => {
            check_weights(law.support.iter().map(|a| a.w), &mut messages);
        }
    }
    ValidationReport {
        ok: messages.is_empty(),
        messages,
    }
}

/// `validate_spec` as a `Result`.
pub fn ensure_valid(spec: &ModelSpec) -> Result<()> {
    let report = validate_spec(spec);
    if report.ok {
        Ok(())
    } else {
        Err(Error::InvalidSpec(report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId::new(i)
    }

    #[test]
    fn union_of_two_edges() {
        let g = UnionGraph::from_edges(4, &[(1, 2), (2, 3)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(v(1), v(2)), (v(2), v(3))]);
        assert_eq!(g.degree(v(2)), 2);
        assert_eq!(g.degree(v(4)), 0);
    }

    #[test]
    fn duplicate_communities_dedup() {
        let g = UnionGraph::from_edges(3, &[(1, 2), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.communities().len(), 2);
    }

    #[test]
    fn empty_union() {
        let g = build_union(5, vec![]).unwrap();
        assert!(g.degrees().all(|d| d == 0));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn out_of_range_names_community() {
        let err = build_union(3, vec![CommunityInstance::edge(1, 2), CommunityInstance::edge(2, 4)])
            .unwrap_err();
        assert!(matches!(err, Error::VertexOutOfRange { community: 1, vertex: 4, n: 3 }));
    }

    #[test]
    fn community_rejects_foreign_endpoint() {
        assert!(CommunityInstance::new(vec![v(1), v(2)], vec![(v(1), v(3))]).is_err());
        assert!(CommunityInstance::new(vec![v(1)], vec![(v(1), v(1))]).is_err());
        let c = CommunityInstance::new(vec![v(3), v(1), v(2)], vec![(v(2), v(1)), (v(1), v(2))])
            .unwrap();
        assert_eq!(c.members(), &[v(1), v(2), v(3)]);
        assert_eq!(c.edges(), &[(v(1), v(2))]);
        assert_eq!(c.non_isolated(), vec![v(1), v(2)]);
    }

    #[test]
    fn validate_zero_weight_sum() {
        let spec = ModelSpec::cliques(
            10,
            5,
            SizeLaw {
                support: vec![SizeAtom { size: 3, w: 0.0 }],
            },
        );
        let r = validate_spec(&spec);
        assert!(!r.ok);
        assert!(r.messages.iter().any(|m| m.contains("weights")));
    }

    #[test]
    fn validate_isolated_template() {
        let t = GraphTemplate {
            vertices: 3,
            edges: vec![[1, 2]],
        };
        let r = validate_spec(&ModelSpec::fixed(5, 2, vec![t]));
        assert!(!r.ok);
        assert!(r.messages[0].contains("isolated"));
    }

    #[test]
    fn validate_good_clique_spec() {
        let r = validate_spec(&ModelSpec::cliques(10, 5, SizeLaw::single(3)));
        assert!(r.ok && r.messages.is_empty());
    }

    #[test]
    fn validate_collects_every_violation() {
        let spec = ModelSpec::bernoulli(0, 3, vec![(3, 1.5, 0.5), (2, 0.5, -0.1)]);
        let r = validate_spec(&spec);
        assert!(!r.ok);
        assert!(r.messages.len() >= 3, "{:?}", r.messages);
        let big = ModelSpec::fixed(2, 1, vec![GraphTemplate::clique(3)]);
        assert!(!validate_spec(&big).ok);
    }

    #[test]
    fn spec_json_schema_keys() {
        let json = r#"{"n":10,"m":3,"kind":{"fixed_graphs":[{"vertices":2,"edges":[[1,2]]}]}}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, ModelSpec::fixed(10, 3, vec![GraphTemplate::k2()]));
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);

        let json = r#"{"n":10,"m":3,"kind":{"bernoulli_yq":{"support":[{"y":3,"q":0.5,"w":1.0}]}}}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);

        let json = r#"{"n":10,"m":3,"kind":{"clique_sizes":{"support":[{"size":3,"w":1.0}]}}}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, ModelSpec::cliques(10, 3, SizeLaw::single(3)));

        assert!(serde_json::from_str::<ModelSpec>(r#"{"n":1,"m":1,"kind":{"other":[]}}"#).is_err());
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = UnionGraph::complete(4);
        let (h, map) = g.induced_without(&[true, false, false, false]);
        assert_eq!(h, UnionGraph::complete(3).with_communities_like(&h));
        assert_eq!(map, vec![v(2), v(3), v(4)]);
    }

    impl UnionGraph {
        fn with_communities_like(&self, other: &UnionGraph) -> UnionGraph {
            UnionGraph {
                communities: other.communities.clone(),
                ..self.clone()
            }
        }
    }
}
