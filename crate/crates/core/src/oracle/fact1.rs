//! The multinomial inequality
//! `b! e_b(a) = (Σa)^b - R` with `0 <= R <= ((b)_2 / 2) (Σa²) (Σa)^{b-2}`,
//! where `e_b` is the elementary symmetric polynomial of degree `b`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::RngStream;

#[derive(Clone, Debug, Serialize)]
pub struct Fact1Report {
    pub b: usize,
    /// `b! e_b(a)`.
    pub left: String,
    /// `(Σa)^b`.
    pub power: String,
    pub remainder: String,
    pub bound: String,
    pub holds: bool,
}

fn elementary_symmetric(a: &[BigRational], b: usize) -> BigRational {
    let mut e = vec![BigRational::zero(); b + 1];
    e[0] = BigRational::one();
    for x in a {
        for j in (1..=b).rev() {
            let add = &e[j - 1] * x;
            e[j] += add;
        }
    }
    e.swap_remove(b)
}

fn factorial(b: usize) -> BigRational {
    BigRational::from_integer((1..=b as u64).map(BigInt::from).product())
}

pub fn fact1_check(a: &[BigRational], b: usize) -> Result<Fact1Report> {
    if b < 2 {
        return Err(Error::precondition(format!("need b >= 2, got {b}")));
    }
    if a.iter().any(|x| x.is_negative()) {
        return Err(Error::precondition("entries must be nonnegative"));
    }
    let sum: BigRational = a.iter().sum();
    let sum_sq: BigRational = a.iter().map(|x| x * x).sum();
    let left = factorial(b) * elementary_symmetric(a, b);
    let power = num_traits::pow(sum.clone(), b);
    let remainder = &power - &left;
    let falling2 = BigRational::from_integer(BigInt::from(b * (b - 1)));
    let bound = falling2 / BigRational::from_integer(2.into())
        * sum_sq
        * num_traits::pow(sum, b - 2);
    Ok(Fact1Report {
        b,
        holds: !remainder.is_negative() && remainder <= bound,
        left: left.to_string(),
        power: power.to_string(),
        remainder: remainder.to_string(),
        bound: bound.to_string(),
    })
}

/// Checks `cases` random vectors of length `1..=8` with nonnegative rational
/// entries (numerators `0..=20`, denominators `1..=12`) and `b` in `2..=4`.
/// Returns the failing reports.
pub fn fact1_random_sweep(cases: usize, seed: u64) -> Result<Vec<Fact1Report>> {
    let mut rng = RngStream::new(seed, 0).rng();
    let mut failures = Vec::new();
    for _ in 0..cases {
        let len = rng.random_range(1..=8usize);
        let a: Vec<BigRational> = (0..len)
            .map(|_| {
                BigRational::new(
                    BigInt::from(rng.random_range(0..=20i64)),
                    BigInt::from(rng.random_range(1..=12i64)),
                )
            })
            .collect();
        let b = rng.random_range(2..=4usize);
        let rep = fact1_check(&a, b)?;
        if !rep.holds {
            failures.push(rep);
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn equality_edges() {
        let rep = fact1_check(&ints(&[1, 1, 1]), 2).unwrap();
        assert_eq!((rep.left.as_str(), rep.power.as_str()), ("6", "9"));
        assert_eq!((rep.remainder.as_str(), rep.bound.as_str()), ("3", "3"));
        assert!(rep.holds);

        let rep = fact1_check(&ints(&[2, 0, 0]), 2).unwrap();
        assert_eq!((rep.left.as_str(), rep.remainder.as_str(), rep.bound.as_str()), ("0", "4", "4"));
        assert!(rep.holds);
    }

    #[test]
    fn short_vector_and_scope() {
        let rep = fact1_check(&ints(&[3, 1]), 3).unwrap();
        assert_eq!(rep.left, "0");
        assert!(rep.holds);
        assert!(fact1_check(&ints(&[1, 2]), 1).is_err());
    }

    #[test]
    fn random_sweep() {
        assert!(fact1_random_sweep(1000, 5).unwrap().is_empty());
    }
}
