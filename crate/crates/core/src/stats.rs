//! Combinatorial statistics of a sampled union.
//!
//! Per-community degree profiles feed the membership counts `d'(v)`,
//! `d'_*(v)` and `d'(u, v)`. The `N` counters, blossom detection and the
//! event `𝒜` are all derived from those counts.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{CommunityInstance, UnionGraph, VertexId};

/// Communities with more non-isolated vertices than this make pair counting
/// quadratic enough to be worth a log line.
pub const PAIR_COUNT_WARN_THRESHOLD: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommunityProfile {
    /// `X_i`: non-isolated vertices.
    pub x: usize,
    /// `X_i(t)`: vertices with `d_i(v) = t`, for `t >= 1`.
    pub x_t: BTreeMap<usize, usize>,
}

pub fn community_profile(c: &CommunityInstance) -> CommunityProfile {
    let mut x_t = BTreeMap::new();
    for d in c.member_degrees().into_iter().filter(|&d| d > 0) {
        *x_t.entry(d).or_insert(0) += 1;
    }
    CommunityProfile {
        x: x_t.values().sum(),
        x_t,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipProfile {
    /// The degree `a` used for `d_prime_star`.
    pub a: usize,
    /// `d'(v)`, indexed by `v - 1`.
    pub d_prime: Vec<u32>,
    /// `d'_*(v)`: communities in which `d_i(v) = a`.
    pub d_prime_star: Vec<u32>,
    /// `d'(u, v)` for `u < v`, only pairs with a positive count.
    pub pair_counts: BTreeMap<(VertexId, VertexId), u32>,
}

impl MembershipProfile {
    pub fn pair_count(&self, u: VertexId, v: VertexId) -> u32 {
        let key = if u < v { (u, v) } else { (v, u) };
        self.pair_counts.get(&key).copied().unwrap_or(0)
    }

    pub fn n(&self) -> usize {
        self.d_prime.len()
    }
}

pub fn membership_profile(g: &UnionGraph, a: usize) -> MembershipProfile {
    assert!(a >= 1, "minimal positive degree a must be >= 1");
    let n = g.n();
    let mut d_prime = vec![0u32; n];
    let mut d_prime_star = vec![0u32; n];
    let mut pair_counts = BTreeMap::new();
    for (ci, c) in g.communities().iter().enumerate() {
        let degrees = c.member_degrees();
        let active: Vec<VertexId> = c
            .members()
            .iter()
            .zip(&degrees)
            .filter(|(_, &d)| d > 0)
            .map(|(&v, _)| v)
            .collect();
        for (&v, &d) in c.members().iter().zip(&degrees) {
            if d > 0 {
                d_prime[v.idx()] += 1;
            }
            if d == a {
                d_prime_star[v.idx()] += 1;
            }
        }
        if active.len() > PAIR_COUNT_WARN_THRESHOLD {
            log::warn!(
                "community {ci} has {} non-isolated vertices; pair counting is quadratic",
                active.len()
            );
        }
        for (i, &u) in active.iter().enumerate() {
            for &v in &active[i + 1..] {
                *pair_counts.entry((u, v)).or_insert(0) += 1;
            }
        }
    }
    MembershipProfile {
        a,
        d_prime,
        d_prime_star,
        pair_counts,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NCounters {
    /// `N_k`, nonzero entries only.
    pub n_k: BTreeMap<usize, usize>,
    /// `N_{*k}`, nonzero entries only.
    pub n_star_k: BTreeMap<usize, usize>,
    /// `N'_k` over ordered pairs, nonzero entries only.
    pub n_prime_k: BTreeMap<usize, usize>,
}

impl NCounters {
    pub fn n(&self, k: usize) -> usize {
        self.n_k.get(&k).copied().unwrap_or(0)
    }

    pub fn n_star(&self, k: usize) -> usize {
        self.n_star_k.get(&k).copied().unwrap_or(0)
    }

    pub fn n_prime(&self, k: usize) -> usize {
        self.n_prime_k.get(&k).copied().unwrap_or(0)
    }
}

pub fn n_counters(profile: &MembershipProfile) -> NCounters {
    let mut out = NCounters::default();
    for (&d, &ds) in profile.d_prime.iter().zip(&profile.d_prime_star) {
        *out.n_k.entry(d as usize).or_insert(0) += 1;
        if d == ds {
            *out.n_star_k.entry(d as usize).or_insert(0) += 1;
        }
    }
    // each unordered pair with d'(u, v) >= 2 contributes the ordered
    // incidences (u, v) and (v, u)
    for (&(u, v), &c) in &profile.pair_counts {
        if c >= 2 {
            for w in [u, v] {
                *out.n_prime_k
                    .entry(profile.d_prime[w.idx()] as usize)
                    .or_insert(0) += 1;
            }
        }
    }
    out
}

/// Whether the non-isolated sets of the communities where `v` is
/// non-isolated pairwise meet exactly in `{v}`. Vacuously true when `v`
/// belongs to no such community.
pub fn is_blossom_center(g: &UnionGraph, v: VertexId) -> bool {
    let mut seen = BTreeMap::new();
    for c in g.communities() {
        let petal = c.non_isolated();
        if petal.binary_search(&v).is_err() {
            continue;
        }
        for u in petal {
            if u != v && seen.insert(u, ()).is_some() {
                return false;
            }
        }
    }
    true
}

/// [`is_blossom_center`] for every vertex at once.
pub fn blossom_centers(g: &UnionGraph) -> Vec<bool> {
    let n = g.n();
    let petals: Vec<Vec<VertexId>> = g.communities().iter().map(|c| c.non_isolated()).collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, petal) in petals.iter().enumerate() {
        for v in petal {
            incident[v.idx()].push(ci);
        }
    }
    let mut mark = vec![usize::MAX; n];
    (0..n)
        .map(|vi| {
            for &ci in &incident[vi] {
                for u in &petals[ci] {
                    if u.idx() == vi {
                        continue;
                    }
                    if mark[u.idx()] == vi {
                        return false;
                    }
                    mark[u.idx()] = vi;
                }
            }
            true
        })
        .collect()
}

/// Event `𝒜`: some pair shares at least three communities.
pub fn detect_event_a(profile: &MembershipProfile) -> bool {
    profile.pair_counts.values().any(|&c| c >= 3)
}

/// Smallest positive within-community degree over all communities.
pub fn empirical_min_positive_degree(communities: &[CommunityInstance]) -> Option<usize> {
    communities
        .iter()
        .flat_map(|c| c.member_degrees())
        .filter(|&d| d > 0)
        .min()
}

/// Checks `2 d(w) >= Σ_{u ∈ adj(w)} d'(w, u)` for every vertex. The bound
/// relies on `d'(w, u) <= 2`, so it is only guaranteed off the event `𝒜`.
pub fn degree_sandwich_holds(g: &UnionGraph, profile: &MembershipProfile) -> bool {
    g.vertices().all(|w| {
        let total: u64 = g
            .neighbors(w)
            .iter()
            .map(|&u| profile.pair_count(w, u) as u64)
            .sum();
        2 * g.degree(w) as u64 >= total
    })
}
