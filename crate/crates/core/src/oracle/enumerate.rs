//! Exact joint law of small fixed-template unions by full enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::placements::{placement_count, placements};
use super::ExactDistribution;
use crate::error::{Error, Result};
use crate::model::GraphTemplate;

/// Largest `n` the enumerator accepts.
pub const ENUMERATION_MAX_N: usize = 8;
/// Default cap on the number of enumerated configurations.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// The statistics tracked per configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct UnionOutcome {
    pub connected: bool,
    /// Isolated vertices `η_1`.
    pub eta1: usize,
    /// `d'(1)`: communities containing vertex 1.
    pub d_prime_1: usize,
    /// Minimal degree `δ`.
    pub delta: usize,
}

/// Outcome statistics of a union given as per-vertex adjacency bitmasks.
/// `d_prime_1` is supplied by the caller.
pub(crate) fn outcome_from_masks(adj: &[u16], d_prime_1: usize) -> UnionOutcome {
    let n = adj.len();
    let all = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
    let mut seen = 1u16;
    let mut frontier = 1u16;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    UnionOutcome {
        connected: n >= 1 && seen == all,
        eta1: adj.iter().filter(|&&a| a == 0).count(),
        d_prime_1,
        delta: adj.iter().map(|a| a.count_ones() as usize).min().unwrap_or(0),
    }
}

/// Exact distribution of [`UnionOutcome`] for `m` independent uniform
/// copies of `templates` (community `i` uses `templates[i % len]`) in `K_n`.
pub fn enumerate_fixed_model(
    n: usize,
    m: usize,
    templates: &[GraphTemplate],
    budget: u128,
) -> Result<ExactDistribution<UnionOutcome>> {
    if n == 0 || n > ENUMERATION_MAX_N {
        return Err(Error::precondition(format!(
            "enumeration supports 1 <= n <= {ENUMERATION_MAX_N}, got {n}"
        )));
    }
    if templates.is_empty() && m > 0 {
        return Err(Error::precondition("no templates"));
    }
    let chosen: Vec<&GraphTemplate> = (0..m).map(|i| &templates[i % templates.len()]).collect();
    let mut needed: u128 = 1;
    for t in &chosen {
        if t.min_degree() == 0 {
            return Err(Error::precondition("templates must have minimal degree >= 1"));
        }
        needed = needed.saturating_mul(placement_count(t, n)?);
    }
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    // per community: (adjacency masks contributed, contains vertex 1)
    let tables: Vec<Vec<(Vec<u16>, bool)>> = chosen
        .iter()
        .map(|t| {
            Ok(placements(t, n)?
                .into_iter()
                .map(|p| {
                    let mut adj = vec![0u16; n];
                    for (u, v) in p.edges {
                        adj[u as usize] |= 1 << v;
                        adj[v as usize] |= 1 << u;
                    }
                    (adj, p.members & 1 == 1)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut counts = std::collections::BTreeMap::<UnionOutcome, u64>::new();
    let mut odometer = vec![0usize; m];
    let mut adj = vec![0u16; n];
    loop {
        adj.iter_mut().for_each(|a| *a = 0);
        let mut d1 = 0;
        for (table, &pick) in tables.iter().zip(&odometer) {
            let (masks, has_one) = &table[pick];
            for (a, b) in adj.iter_mut().zip(masks) {
                *a |= b;
            }
            d1 += *has_one as usize;
        }
        *counts.entry(outcome_from_masks(&adj, d1)).or_insert(0) += 1;

        let mut i = 0;
        loop {
            if i == m {
                let total = BigInt::from(needed);
                return Ok(ExactDistribution {
                    outcomes: counts
                        .into_iter()
                        .map(|(k, c)| (k, BigRational::new(BigInt::from(c), total.clone())))
                        .collect(),
                });
            }
            odometer[i] += 1;
            if odometer[i] < tables[i].len() {
                break;
            }
            odometer[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn forced_single_edge() {
        let d = enumerate_fixed_model(2, 1, &[GraphTemplate::k2()], DEFAULT_BUDGET).unwrap();
        assert_eq!(d.probability(|o| o.connected), BigRational::one());
    }

    #[test]
    fn single_edge_on_three_vertices() {
        let d = enumerate_fixed_model(3, 1, &[GraphTemplate::k2()], DEFAULT_BUDGET).unwrap();
        assert!(d.probability(|o| o.connected).is_zero());
        assert_eq!(d.probability(|o| o.eta1 == 1), BigRational::one());
        assert_eq!(d.probability(|o| o.d_prime_1 == 0), r(1, 3));
    }

    #[test]
    fn two_edges_on_three_vertices() {
        let d = enumerate_fixed_model(3, 2, &[GraphTemplate::k2()], DEFAULT_BUDGET).unwrap();
        assert_eq!(d.probability(|o| o.connected), r(2, 3));
        assert_eq!(d.total(), BigRational::one());
    }

    #[test]
    fn budget_guard() {
        let err = enumerate_fixed_model(8, 3, &[GraphTemplate::cherry()], DEFAULT_BUDGET).unwrap_err();
        match err {
            Error::BudgetExceeded { needed, .. } => assert_eq!(needed, 168u128.pow(3)),
            other => panic!("{other:?}"),
        }
        assert!(enumerate_fixed_model(9, 1, &[GraphTemplate::k2()], DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn zero_communities() {
        let d = enumerate_fixed_model(1, 0, &[], DEFAULT_BUDGET).unwrap();
        assert_eq!(
            d.probability(|o| o.connected && o.delta == 0 && o.eta1 == 1),
            BigRational::one()
        );
    }
}
