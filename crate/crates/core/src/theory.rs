//! Closed-form model quantities and threshold predictors.
//!
//! Moments are computed exactly from the finite-support model description
//! rather than estimated from samples, so any gap between a predictor and a
//! simulation is due to the asymptotic approximation alone.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{Error, Result};
use crate::model::{ensure_valid, ModelKind, ModelSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelMoments {
    /// `P{X_{i*} > 0}`.
    pub alpha: f64,
    /// `E X_{i*}`.
    pub kappa: f64,
    /// `t -> E X_{i*}(t)`, positive entries only.
    pub kappa_t: BTreeMap<usize, f64>,
    /// `E X_{i*}(a)`, zero when `a` is undefined.
    pub kappa_a: f64,
    /// Minimal positive degree attained with positive probability.
    pub a: Option<usize>,
    /// `x_i = E X_i`, one entry per community.
    pub per_community_x: Vec<f64>,
    /// `z_i = E (X_i)_2 = E X_i (X_i - 1)`, one entry per community.
    pub per_community_z: Vec<f64>,
}

/// Moments of a single community law.
#[derive(Clone, Debug, Default)]
struct CommunityMoments {
    p_nonempty: f64,
    x: f64,
    z: f64,
    x_t: BTreeMap<usize, f64>,
}

impl CommunityMoments {
    fn add_scaled(&mut self, other: &CommunityMoments, w: f64) {
        self.p_nonempty += w * other.p_nonempty;
        self.x += w * other.x;
        self.z += w * other.z;
        for (&t, &v) in &other.x_t {
            *self.x_t.entry(t).or_insert(0.0) += w * v;
        }
    }
}

/// `h(k, q) = 1 - (1 - q)^{k - 1}`, the chance that a fixed vertex of
/// `G(k, q)` is non-isolated.
pub fn h(k: u64, q: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    1.0 - (1.0 - q).powf((k - 1) as f64)
}

/// Exact moments of `G(y, q)` on `y` vertices.
fn bernoulli_moments(y: u64, q: f64) -> CommunityMoments {
    let mut out = CommunityMoments::default();
    if y < 2 || q <= 0.0 {
        return out;
    }
    let pairs = (y * (y - 1) / 2) as f64;
    let yf = y as f64;
    out.p_nonempty = 1.0 - (1.0 - q).powf(pairs);
    out.x = yf * h(y, q);
    let p_iso = (1.0 - q).powf((y - 1) as f64);
    let p_both_iso = (1.0 - q).powf((2 * y - 3) as f64);
    out.z = yf * (yf - 1.0) * (1.0 - 2.0 * p_iso + p_both_iso);
    if q >= 1.0 {
        out.x_t.insert(y as usize - 1, yf);
        return out;
    }
    // vertex degree inside G(y, q) is Binomial(y - 1, q)
    let (lq, l1q) = (q.ln(), (1.0 - q).ln());
    for t in 1..y {
        let ln_p = ln_binomial(y - 1, t) + t as f64 * lq + (y - 1 - t) as f64 * l1q;
        let v = yf * ln_p.exp();
        if v > 0.0 {
            out.x_t.insert(t as usize, v);
        }
    }
    out
}

fn template_moments(degrees: &[usize]) -> CommunityMoments {
    let x = degrees.iter().filter(|&&d| d > 0).count() as f64;
    let mut x_t = BTreeMap::new();
    for &d in degrees.iter().filter(|&&d| d > 0) {
        *x_t.entry(d).or_insert(0.0) += 1.0;
    }
    CommunityMoments {
        p_nonempty: if x > 0.0 { 1.0 } else { 0.0 },
        x,
        z: x * (x - 1.0),
        x_t,
    }
}

/// Analytic moments of `spec`, truncating community sizes at `n`.
pub fn model_moments(spec: &ModelSpec) -> Result<ModelMoments> {
    ensure_valid(spec)?;
    let n = spec.n as u64;
    let m = spec.m;
    let per_index: Vec<CommunityMoments> = match &spec.kind {
        ModelKind::FixedGraphs(templates) => {
            let laws: Vec<CommunityMoments> = templates
                .iter()
                .map(|t| template_moments(&t.degrees()))
                .collect();
            (0..m).map(|i| laws[i % laws.len()].clone()).collect()
        }
        ModelKind::BernoulliYq(law) => {
            let mut mix = CommunityMoments::default();
            for atom in &law.support {
                mix.add_scaled(&bernoulli_moments(atom.y.min(n), atom.q), atom.w);
            }
            vec![mix; m]
        }
        ModelKind::CliqueSizes(law) => {
            let mut mix = CommunityMoments::default();
            for atom in &law.support {
                mix.add_scaled(&bernoulli_moments(atom.size.min(n), 1.0), atom.w);
            }
            vec![mix; m]
        }
    };
    let mf = m.max(1) as f64;
    let mut alpha = 0.0;
    let mut kappa_t: BTreeMap<usize, f64> = BTreeMap::new();
    for c in &per_index {
        alpha += c.p_nonempty / mf;
        for (&t, &v) in &c.x_t {
            *kappa_t.entry(t).or_insert(0.0) += v / mf;
        }
    }
    let per_community_x: Vec<f64> = per_index.iter().map(|c| c.x).collect();
    let per_community_z: Vec<f64> = per_index.iter().map(|c| c.z).collect();
    let kappa = per_community_x.iter().sum::<f64>() / mf;
    kappa_t.retain(|_, v| *v > 0.0);
    let a = kappa_t.keys().next().copied();
    let kappa_a = a.map(|a| kappa_t[&a]).unwrap_or(0.0);
    // X >= 2 whenever X > 0, hence κ >= 2α
    assert!(
        kappa + 1e-9 * kappa.abs().max(1.0) >= 2.0 * alpha,
        "kappa {kappa} < 2 alpha {alpha}"
    );
    Ok(ModelMoments {
        alpha,
        kappa,
        kappa_t,
        kappa_a,
        a,
        per_community_x,
        per_community_z,
    })
}

/// `λ(k) = ln n + k ln(m/n) - (m/n) κ`.
pub fn lambda_k(n: usize, m: usize, kappa: f64, k: usize) -> Result<f64> {
    if n < 2 || m < 1 {
        return Err(Error::precondition(format!("lambda needs n >= 2 and m >= 1 (n={n}, m={m})")));
    }
    if kappa.is_nan() || kappa <= 0.0 {
        return Err(Error::precondition(format!("lambda needs kappa > 0, got {kappa}")));
    }
    let ratio = m as f64 / n as f64;
    Ok((n as f64).ln() + k as f64 * ratio.ln() - ratio * kappa)
}

/// `m = round(n (ln n - λ0) / κ)`, the community count putting `λ(0)` at
/// `lambda0`. `None` when that count is below 1.
pub fn m_for_lambda0(n: usize, kappa: f64, lambda0: f64) -> Option<usize> {
    let m = (n as f64 * ((n as f64).ln() - lambda0) / kappa).round();
    (m >= 1.0).then_some(m as usize)
}

/// Limiting connection probability `exp(-exp(λ0))`.
pub fn predict_connect_prob(lambda0: f64) -> f64 {
    (-lambda0.exp()).exp()
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn product_of_factors(factors: impl Iterator<Item = f64>) -> Result<f64> {
    let mut logs = Vec::new();
    for f in factors {
        if f < 0.0 {
            return Err(Error::precondition(format!("negative factor {f} in product")));
        }
        if f == 0.0 {
            return Ok(0.0);
        }
        logs.push(f.ln());
    }
    Ok(neumaier_sum(logs.into_iter()).exp())
}

/// `T = Π_i (1 - x_i/n) = P{d'(1) = 0}`.
pub fn exact_t(per_community_x: &[f64], n: usize) -> Result<f64> {
    let nf = n as f64;
    product_of_factors(per_community_x.iter().map(|&x| 1.0 - x / nf))
}

/// `H = Π_i (1 - 2 x_i/n + z_i/(n)_2) = P{d'(1) = d'(2) = 0}`.
pub fn exact_h(per_community_x: &[f64], per_community_z: &[f64], n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::precondition("H needs n >= 2"));
    }
    let nf = n as f64;
    let n2 = nf * (nf - 1.0);
    product_of_factors(
        per_community_x
            .iter()
            .zip(per_community_z)
            .map(|(&x, &z)| 1.0 - 2.0 * x / nf + z / n2),
    )
}

fn checked_rational_product(
    factors: impl Iterator<Item = BigRational>,
) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for f in factors {
        if f.is_negative() {
            return Err(Error::precondition(format!("negative factor {f} in product")));
        }
        acc *= f;
    }
    Ok(acc)
}

/// [`exact_t`] in rational arithmetic.
pub fn exact_t_rational(per_community_x: &[BigRational], n: usize) -> Result<BigRational> {
    let nr = BigRational::from_integer(n.into());
    checked_rational_product(per_community_x.iter().map(|x| BigRational::one() - x / &nr))
}

/// [`exact_h`] in rational arithmetic.
pub fn exact_h_rational(
    per_community_x: &[BigRational],
    per_community_z: &[BigRational],
    n: usize,
) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::precondition("H needs n >= 2"));
    }
    let nr = BigRational::from_integer(n.into());
    let n2 = BigRational::from_integer((n * (n - 1)).into());
    let two = BigRational::from_integer(2.into());
    checked_rational_product(
        per_community_x
            .iter()
            .zip(per_community_z)
            .map(|(x, z)| BigRational::one() - &two * x / &nr + z / &n2),
    )
}

fn poisson_like_term(n: usize, m: usize, base: f64, kappa: f64, k: usize) -> f64 {
    let ratio = m as f64 / n as f64;
    if k > 0 && base == 0.0 {
        return 0.0;
    }
    let ln_term = if k == 0 {
        0.0
    } else {
        k as f64 * (base.ln() + ratio.ln()) - ln_factorial(k as u64)
    };
    (ln_term - kappa * ratio).exp()
}

/// Leading term `(κ^k / k!) (m/n)^k e^{-κ m/n}` of `P{d'(1) = k}`. Only
/// asymptotically accurate.
pub fn degree_prob_approx(n: usize, m: usize, kappa: f64, k: usize) -> f64 {
    poisson_like_term(n, m, kappa, kappa, k)
}

/// Leading term `(κ_a^k / k!) (m/n)^k e^{-κ m/n}` of
/// `P{d'_*(1) = d'(1) = k}`.
pub fn blossom_degree_prob_approx(n: usize, m: usize, kappa: f64, kappa_a: f64, k: usize) -> f64 {
    poisson_like_term(n, m, kappa_a, kappa, k)
}

pub fn expected_nk(n: usize, m: usize, kappa: f64, k: usize) -> f64 {
    n as f64 * degree_prob_approx(n, m, kappa, k)
}

pub fn expected_n_star_k(n: usize, m: usize, kappa: f64, kappa_a: f64, k: usize) -> f64 {
    n as f64 * blossom_degree_prob_approx(n, m, kappa, kappa_a, k)
}

/// The `n`-free constant `κ' = E[Y h(Y, Q)]`, without truncation at `n`.
pub fn example2_kappa_prime(law: &crate::model::YqLaw) -> f64 {
    law.support
        .iter()
        .map(|a| a.w * a.y as f64 * h(a.y, a.q))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowReport {
    pub k: usize,
    /// `ln n + k ln(m/n)`.
    pub lower: f64,
    /// `κ m/n`.
    pub middle: f64,
    /// `ln n + (k+1) ln(m/n)`.
    pub upper: f64,
    /// `(middle - lower, upper - middle)`.
    pub gaps: (f64, f64),
    pub lambda_k: f64,
    pub lambda_k1: f64,
    /// `λ(k) < 0 < λ(k+1)`.
    pub inside: bool,
    /// The window is empty (`m <= n`).
    pub degenerate: bool,
}

/// Where `κ m/n` sits relative to the window for minimal degree `(k+1) a`.
pub fn window_report(n: usize, m: usize, moments: &ModelMoments, k: usize) -> Result<WindowReport> {
    let lambda_k = lambda_k(n, m, moments.kappa, k)?;
    let lambda_k1 = self::lambda_k(n, m, moments.kappa, k + 1)?;
    let ratio = m as f64 / n as f64;
    let lower = (n as f64).ln() + k as f64 * ratio.ln();
    let upper = lower + ratio.ln();
    let middle = moments.kappa * ratio;
    Ok(WindowReport {
        k,
        lower,
        middle,
        upper,
        gaps: (middle - lower, upper - middle),
        lambda_k,
        lambda_k1,
        inside: lambda_k < 0.0 && 0.0 < lambda_k1,
        degenerate: upper <= lower,
    })
}

/// Smallest-error `m` with `λ(0) ≈ -½ ln(m/n)`, i.e. `κ m/n` at the midpoint
/// of the `k = 0` window, found by fixed-point iteration on `t = m/n`.
pub fn m_for_window_midpoint(n: usize, kappa: f64) -> usize {
    let ln_n = (n as f64).ln();
    let mut t = ln_n / kappa;
    for _ in 0..100 {
        let next = (ln_n + 0.5 * t.max(1e-300).ln()) / kappa;
        if (next - t).abs() < 1e-15 {
            t = next;
            break;
        }
        t = next;
    }
    let target = |m: usize| {
        let r = m as f64 / n as f64;
        (ln_n - kappa * r + 0.5 * r.ln()).abs()
    };
    let base = (t * n as f64).floor() as usize;
    [base.max(1), base + 1]
        .into_iter()
        .min_by(|&a, &b| target(a).total_cmp(&target(b)))
        .unwrap()
}

impl ModelMoments {
    /// `x_i` as exact rationals; only meaningful for deterministic `X_i`.
    pub fn per_community_x_rational(&self) -> Vec<BigRational> {
        self.per_community_x
            .iter()
            .map(|&x| BigRational::from_float(x).unwrap_or_else(BigRational::zero))
            .collect()
    }
}
