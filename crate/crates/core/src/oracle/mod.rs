//! Exact ground truth in rational arithmetic. Tiny fixed-template unions are
//! enumerated outright; crossing probabilities and the finite-n inequalities
//! behind the threshold results are compared as exact rationals.

mod crossing;
mod enumerate;
mod fact1;
mod negcorr;
mod placements;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

pub use crossing::{
    basic_lower_bound, basic_lower_bound_rational, check_basic_bound,
    crossing_probability_by_enumeration, exact_bound_sweep, p_cherry_connects, p_edge_connects,
    r_basic_lower_bound_rational, BasicBoundReport, BoundViolation,
};
pub use enumerate::{enumerate_fixed_model, UnionOutcome, DEFAULT_BUDGET, ENUMERATION_MAX_N};
pub use fact1::{fact1_check, fact1_random_sweep, Fact1Report};
pub use negcorr::{
    check_negative_correlation, joint_crossing_probabilities, negative_correlation_sweep,
    ClassRatio, InequalityCheck, NegCorrReport,
};
pub use placements::{placement_count, placements, Placement};

/// A finite law with exact rational probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution<L: Ord> {
    pub outcomes: BTreeMap<L, BigRational>,
}

impl<L: Ord> ExactDistribution<L> {
    pub fn probability(&self, mut event: impl FnMut(&L) -> bool) -> BigRational {
        self.outcomes
            .iter()
            .filter(|(l, _)| event(l))
            .fold(BigRational::zero(), |acc, (_, p)| acc + p)
    }

    pub fn total(&self) -> BigRational {
        self.probability(|_| true)
    }

    /// Pushes the law forward through `f`.
    pub fn marginal<K: Ord>(&self, mut f: impl FnMut(&L) -> K) -> ExactDistribution<K> {
        let mut outcomes = BTreeMap::new();
        for (l, p) in &self.outcomes {
            *outcomes.entry(f(l)).or_insert_with(BigRational::zero) += p;
        }
        ExactDistribution { outcomes }
    }
}
