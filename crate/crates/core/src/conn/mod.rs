//! Connected components and exact vertex connectivity.
//!
//! A graph is `k`-vertex-connected when it has at least `k + 1` vertices and
//! no set of at most `k - 1` vertices disconnects it; `K_n` therefore has
//! connectivity `n - 1`.

mod flow;

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{UnionGraph, VertexId};

use flow::SplitNetwork;

/// Largest graph the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_N: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentCensus {
    /// Component id per vertex, ids assigned in order of first vertex.
    pub labels: Vec<usize>,
    /// Component size -> number of components of that size (`η_k`).
    pub sizes_histogram: BTreeMap<usize, usize>,
}

impl ComponentCensus {
    pub fn component_count(&self) -> usize {
        self.sizes_histogram.values().sum()
    }

    /// `η_k`, the number of components with exactly `k` vertices.
    pub fn eta(&self, k: usize) -> usize {
        self.sizes_histogram.get(&k).copied().unwrap_or(0)
    }
}

pub fn component_census(g: &UnionGraph) -> ComponentCensus {
    let n = g.n();
    let mut labels = vec![usize::MAX; n];
    let mut sizes_histogram = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut next = 0;
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = next;
        queue.push_back(start);
        let mut size = 0;
        while let Some(x) = queue.pop_front() {
            size += 1;
            for &y in g.neighbors(VertexId::from_zero_based(x)) {
                if labels[y.idx()] == usize::MAX {
                    labels[y.idx()] = next;
                    queue.push_back(y.idx());
                }
            }
        }
        *sizes_histogram.entry(size).or_insert(0) += 1;
        next += 1;
    }
    ComponentCensus {
        labels,
        sizes_histogram,
    }
}

/// Single-vertex graphs are connected; the empty vertex set is not.
pub fn is_connected(g: &UnionGraph) -> bool {
    g.n() >= 1 && component_census(g).component_count() == 1
}

pub fn min_degree(g: &UnionGraph) -> Result<usize> {
    g.degrees()
        .min()
        .ok_or_else(|| Error::precondition("minimal degree of a graph with no vertices"))
}

fn zero_based_adjacency(g: &UnionGraph) -> Vec<Vec<u32>> {
    g.vertices()
        .map(|v| g.neighbors(v).iter().map(|u| u.idx() as u32).collect())
        .collect()
}

/// Smallest local connectivity `κ(v_i, w)` (capped at `cap`) over the first
/// sources `v_i` and every later non-neighbor `w`. With current minimum
/// `best`, sources `v_0..=v_best` are examined; the scan stops early once
/// the minimum falls below `stop_below`.
///
/// Any separator `S` with `|S| <= best` misses one of those sources `v_i`,
/// and a vertex `w` on another side of `S` is non-adjacent to it; the pair
/// is examined from whichever of the two comes first.
fn min_local_connectivity(g: &UnionGraph, cap: usize, stop_below: usize) -> usize {
    let adj = zero_based_adjacency(g);
    let n = adj.len();
    let mut net = SplitNetwork::new(&adj);
    let mut best = cap;
    let mut adjacent = vec![false; n];
    let mut s = 0;
    while s < n && s <= best {
        adj[s].iter().for_each(|&u| adjacent[u as usize] = true);
        for t in (s + 1..n).filter(|&t| !adjacent[t]) {
            best = best.min(net.local_connectivity(s, t, best));
            if best == 0 || best < stop_below {
                return best;
            }
        }
        adj[s].iter().for_each(|&u| adjacent[u as usize] = false);
        s += 1;
    }
    best
}

/// Menger-based test for `k`-vertex-connectivity.
pub fn is_k_vertex_connected(g: &UnionGraph, k: usize) -> Result<bool> {
    if k < 1 {
        return Err(Error::precondition("k-connectivity needs k >= 1"));
    }
    if g.n() < k + 1 {
        return Ok(false);
    }
    // Whitney: κ <= δ
    if min_degree(g)? < k {
        return Ok(false);
    }
    if k == 1 {
        return Ok(is_connected(g));
    }
    Ok(min_local_connectivity(g, k, k) >= k)
}

/// The largest `k` for which `g` is `k`-vertex-connected (0 if none).
pub fn vertex_connectivity(g: &UnionGraph) -> Result<usize> {
    let n = g.n();
    let delta = min_degree(g)?;
    if n == 1 || !is_connected(g) {
        return Ok(0);
    }
    Ok(min_local_connectivity(g, delta, 0))
}

fn connected_without(adj: &[u32], removed: u32) -> bool {
    let n = adj.len();
    let alive = !removed & low_mask(n);
    if alive == 0 {
        return false;
    }
    let start = alive.trailing_zeros();
    let mut seen = 1u32 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros();
        frontier &= frontier - 1;
        let fresh = adj[v as usize] & alive & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == alive
}

fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Exhaustive vertex connectivity: the smallest `|S| <= n - 2` whose
/// removal disconnects the graph, else `n - 1`.
pub fn brute_force_vertex_connectivity(g: &UnionGraph) -> Result<usize> {
    let n = g.n();
    if n == 0 {
        return Err(Error::precondition("connectivity of a graph with no vertices"));
    }
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let adj: Vec<u32> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, u| m | (1 << u.idx())))
        .collect();
    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for s in 0..(1u32 << n) {
        by_size[s.count_ones() as usize].push(s);
    }
    for (size, subsets) in by_size.iter().enumerate().take(n.saturating_sub(1)) {
        if subsets.iter().any(|&s| !connected_without(&adj, s)) {
            return Ok(size);
        }
    }
    Ok(n - 1)
}

/// Induced subgraph on `[n] \ s`, relabeled to `1..=n - |s|`, with the map
/// from new ids (position `j` holds the original id of vertex `j + 1`).
pub fn remove_vertices(g: &UnionGraph, s: &[VertexId]) -> Result<(UnionGraph, Vec<VertexId>)> {
    let mut removed = vec![false; g.n()];
    for v in s {
        if v.idx() >= g.n() {
            return Err(Error::precondition(format!("vertex {v} outside [1, {}]", g.n())));
        }
        removed[v.idx()] = true;
    }
    Ok(g.induced_without(&removed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(u32, u32)]) -> UnionGraph {
        UnionGraph::from_edges(n, edges).unwrap()
    }

    fn path3() -> UnionGraph {
        g(3, &[(1, 2), (2, 3)])
    }

    #[test]
    fn census_examples() {
        let c = component_census(&g(5, &[(1, 2), (1, 3)]));
        assert_eq!(c.sizes_histogram, BTreeMap::from([(1, 2), (3, 1)]));
        assert_eq!(c.eta(1), 2);
        assert_eq!(c.labels, vec![0, 0, 0, 1, 2]);
        assert_eq!(component_census(&g(4, &[])).sizes_histogram, BTreeMap::from([(1, 4)]));
        assert_eq!(
            component_census(&UnionGraph::complete(4)).sizes_histogram,
            BTreeMap::from([(4, 1)])
        );
    }

    #[test]
    fn connectedness_conventions() {
        assert!(is_connected(&g(2, &[(1, 2)])));
        assert!(!is_connected(&g(3, &[(1, 2)])));
        assert!(is_connected(&g(1, &[])));
        assert!(!is_connected(&g(0, &[])));
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(min_degree(&UnionGraph::complete(4)).unwrap(), 3);
        assert_eq!(min_degree(&path3()).unwrap(), 1);
        assert_eq!(min_degree(&g(5, &[(1, 2), (1, 3)])).unwrap(), 0);
        assert!(min_degree(&g(0, &[])).is_err());
    }

    #[test]
    fn k_connectivity_examples() {
        let c5 = UnionGraph::cycle(5);
        assert!(is_k_vertex_connected(&c5, 2).unwrap());
        assert!(!is_k_vertex_connected(&c5, 3).unwrap());
        let k4 = UnionGraph::complete(4);
        assert!(is_k_vertex_connected(&k4, 3).unwrap());
        assert!(!is_k_vertex_connected(&k4, 4).unwrap());
        assert!(is_k_vertex_connected(&k4, 0).is_err());
    }

    #[test]
    fn connectivity_examples() {
        assert_eq!(vertex_connectivity(&path3()).unwrap(), 1);
        assert_eq!(vertex_connectivity(&UnionGraph::complete(5)).unwrap(), 4);
        let bowtie = g(5, &[(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(vertex_connectivity(&bowtie).unwrap(), 1);
        assert_eq!(brute_force_vertex_connectivity(&bowtie).unwrap(), 1);
        assert_eq!(vertex_connectivity(&g(1, &[])).unwrap(), 0);
        assert_eq!(vertex_connectivity(&g(4, &[(1, 2)])).unwrap(), 0);
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_vertex_connectivity(&UnionGraph::cycle(5)).unwrap(), 2);
        let star = g(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]);
        assert_eq!(brute_force_vertex_connectivity(&star).unwrap(), 1);
        assert_eq!(brute_force_vertex_connectivity(&UnionGraph::complete(6)).unwrap(), 5);
        assert_eq!(brute_force_vertex_connectivity(&g(1, &[])).unwrap(), 0);
        assert!(matches!(
            brute_force_vertex_connectivity(&g(17, &[])),
            Err(Error::TooLarge { n: 17, .. })
        ));
    }

    #[test]
    fn removal_examples() {
        let k4 = UnionGraph::complete(4);
        let (same, map) = remove_vertices(&k4, &[]).unwrap();
        assert_eq!(same, k4);
        assert_eq!(map.len(), 4);
        let (k3, _) = remove_vertices(&k4, &[VertexId::new(1)]).unwrap();
        assert_eq!(k3.edge_count(), 3);
        assert_eq!(vertex_connectivity(&k3).unwrap(), 2);
        let (two, map) = remove_vertices(&path3(), &[VertexId::new(2)]).unwrap();
        assert_eq!(two.n(), 2);
        assert_eq!(two.edge_count(), 0);
        assert_eq!(map, vec![VertexId::new(1), VertexId::new(3)]);
        assert!(remove_vertices(&path3(), &[VertexId::new(4)]).is_err());
    }

    #[test]
    fn petersen_is_three_connected() {
        let edges = [
            (1, 2), (2, 3), (3, 4), (4, 5), (5, 1),
            (1, 6), (2, 7), (3, 8), (4, 9), (5, 10),
            (6, 8), (8, 10), (10, 7), (7, 9), (9, 6),
        ];
        let p = g(10, &edges);
        assert_eq!(vertex_connectivity(&p).unwrap(), 3);
        assert_eq!(brute_force_vertex_connectivity(&p).unwrap(), 3);
    }
}
