//! Probabilities that a random copy of a small graph has an edge between
//! `[r]` and `[n] \ [r]`, and the lower bounds built on them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::placements::placements;
use crate::error::{Error, Result};
use crate::gen::{embed_fixed_graph, RngStream, SubsetSampler};
use crate::model::GraphTemplate;

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn falling(a: i64, k: u32) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(a - i))
}

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn check_split(n: usize, r: usize) -> Result<()> {
    if r < 1 || r >= n {
        return Err(Error::precondition(format!("need 1 <= r <= n - 1, got n={n}, r={r}")));
    }
    Ok(())
}

/// `P{ℒ₁} = 2 r (n - r) / (n (n - 1))` for a uniform edge.
pub fn p_edge_connects(n: usize, r: usize) -> Result<BigRational> {
    check_split(n, r)?;
    let (n, r) = (n as i64, r as i64);
    Ok(ratio(2 * r * (n - r), n * (n - 1)))
}

/// `P{𝒯₁} = 1 - (r)_3/(n)_3 - (n - r)_3/(n)_3` for a uniform open triangle.
pub fn p_cherry_connects(n: usize, r: usize) -> Result<BigRational> {
    check_split(n, r)?;
    if n < 3 {
        return Err(Error::precondition("a cherry needs n >= 3"));
    }
    let (n, r) = (n as i64, r as i64);
    let total = falling(n, 3);
    Ok(BigRational::one() - BigRational::new(falling(r, 3), total.clone())
        - BigRational::new(falling(n - r, 3), total))
}

/// Crossing probability by listing every distinct copy of `template`.
pub fn crossing_probability_by_enumeration(
    template: &GraphTemplate,
    n: usize,
    r: usize,
) -> Result<BigRational> {
    check_split(n, r)?;
    let all = placements(template, n)?;
    let crossing = all
        .iter()
        .filter(|p| p.edges.iter().any(|&(u, v)| ((u as usize) < r) != ((v as usize) < r)))
        .count();
    Ok(ratio(crossing as u64, all.len() as u64))
}

fn check_bound_scope(n: usize, r: usize, x: usize) -> Result<()> {
    if r < 1 || 10 * r > n {
        return Err(Error::precondition(format!(
            "bound requires 1 <= r <= n/10, got n={n}, r={r}"
        )));
    }
    if x < 2 || x > n {
        return Err(Error::precondition(format!("bound requires 2 <= x <= n, got x={x}")));
    }
    Ok(())
}

/// `(r/n)(1 - r/n) x - ½ (r/n)² x²`, exactly.
pub fn basic_lower_bound_rational(n: usize, r: usize, x: usize) -> Result<BigRational> {
    check_bound_scope(n, r, x)?;
    let p = ratio(r as u64, n as u64);
    let x = int(x as u64);
    Ok(&p * (BigRational::one() - &p) * &x - &p * &p * &x * &x / int(2))
}

pub fn basic_lower_bound(n: usize, r: usize, x: usize) -> Result<f64> {
    Ok(basic_lower_bound_rational(n, r, x)?.to_f64().unwrap_or(f64::NAN))
}

/// `(r/n) E X - (r/n) E(X min{1, (3/2)(r/n) X})` for a law of `X` given as
/// `(x, weight)` atoms.
pub fn r_basic_lower_bound_rational(
    n: usize,
    r: usize,
    x_law: &[(usize, BigRational)],
) -> Result<BigRational> {
    if r < 1 || 10 * r > n {
        return Err(Error::precondition(format!(
            "bound requires 1 <= r <= n/10, got n={n}, r={r}"
        )));
    }
    let p = ratio(r as u64, n as u64);
    let three_halves = ratio(3, 2);
    let mut mean = BigRational::zero();
    let mut damped = BigRational::zero();
    for (x, w) in x_law {
        let xr = int(*x as u64);
        let cap = (&three_halves * &p * &xr).min(BigRational::one());
        mean += w * &xr;
        damped += w * &xr * cap;
    }
    Ok(&p * mean - &p * damped)
}

#[derive(Clone, Debug, Serialize)]
pub struct BasicBoundReport {
    pub n: usize,
    pub r: usize,
    pub x: usize,
    pub trials: usize,
    pub estimate: f64,
    pub sigma: f64,
    pub bound: f64,
    /// `estimate - 4 sigma > bound`.
    pub passed: bool,
}

/// Monte Carlo estimate of the crossing probability of `template` checked
/// against the lower bound with a one-sided 4σ allowance.
pub fn check_basic_bound(
    template: &GraphTemplate,
    n: usize,
    r: usize,
    trials: usize,
    seed: u64,
) -> Result<BasicBoundReport> {
    if template.min_degree() < 1 {
        return Err(Error::precondition("template must have minimal degree >= 1"));
    }
    let x = template.vertices;
    let bound = basic_lower_bound(n, r, x)?;
    let mut rng = RngStream::new(seed, 0).rng();
    let mut sampler = SubsetSampler::new(n);
    let mut hits = 0usize;
    for _ in 0..trials {
        let c = embed_fixed_graph(template, &mut sampler, &mut rng)?;
        let split = r as u32;
        if c.edges().iter().any(|&(u, v)| (u.get() <= split) != (v.get() <= split)) {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    let sigma = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(BasicBoundReport {
        n,
        r,
        x,
        trials,
        estimate,
        sigma,
        bound,
        passed: estimate - 4.0 * sigma > bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundViolation {
    pub template: &'static str,
    pub n: usize,
    pub r: usize,
    pub exact: String,
    pub bound: String,
}

/// Exact comparison of the edge and cherry crossing probabilities against
/// both lower bounds for every `n <= n_max`, `1 <= r <= n/10`. Returns the
/// number of `(template, n, r)` cases checked and any violations.
pub fn exact_bound_sweep(n_max: usize) -> Result<(usize, Vec<BoundViolation>)> {
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in 10..=n_max {
        for r in 1..=n / 10 {
            let cases: [(&'static str, usize, BigRational); 2] = [
                ("K2", 2, p_edge_connects(n, r)?),
                ("cherry", 3, p_cherry_connects(n, r)?),
            ];
            for (name, x, exact) in cases {
                let law = [(x, BigRational::one())];
                for bound in [
                    basic_lower_bound_rational(n, r, x)?,
                    r_basic_lower_bound_rational(n, r, &law)?,
                ] {
                    checked += 1;
                    if exact < bound {
                        violations.push(BoundViolation {
                            template: name,
                            n,
                            r,
                            exact: exact.to_string(),
                            bound: bound.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok((checked, violations))
}
