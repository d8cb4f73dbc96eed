//! Named verification suites. Each returns a [`SuiteReport`] whose checks
//! carry enough detail to diagnose a failure without rerunning.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Statistic, Sweep};
use super::output::{render_records_jsonl, render_summary_csv, render_sweep_csv};
use super::run::{in_pool, run_trials_with_threads, sweep_with_threads, threads_from_env, SweepOutput};
use crate::conn::{
    brute_force_vertex_connectivity, component_census, is_connected, is_k_vertex_connected,
    min_degree, vertex_connectivity,
};
use crate::error::{Error, Result};
use crate::gen::{derive_trial_seed, sample_union, RngStream};
use crate::model::{GraphTemplate, ModelSpec, SizeLaw, VertexId};
use crate::oracle::{
    crossing_probability_by_enumeration, enumerate_fixed_model, exact_bound_sweep,
    fact1_random_sweep, negative_correlation_sweep, p_cherry_connects, p_edge_connects,
    UnionOutcome, DEFAULT_BUDGET,
};
use crate::theory::{
    degree_prob_approx, exact_t_rational, m_for_window_midpoint, model_moments, predict_connect_prob,
    window_report,
};

pub const SUITES: [&str; 9] = [
    "formula-exact",
    "inequality-exact",
    "oracle-equivalence",
    "connectivity-oracle",
    "critical-window",
    "poisson",
    "degree-approx",
    "step-size-a",
    "determinism",
];

const SEED: u64 = 2026;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>, start: Instant) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            elapsed_secs: start.elapsed().as_secs_f64(),
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Runs suite `name`. `budget` overrides the Monte Carlo trial count of the
/// sampling suites and is ignored by the exact ones.
pub fn run_suite(name: &str, budget: Option<usize>) -> Result<SuiteReport> {
    match name {
        "formula-exact" => formula_exact(),
        "inequality-exact" => inequality_exact(),
        "oracle-equivalence" => oracle_equivalence(budget.unwrap_or(100_000)),
        "connectivity-oracle" => connectivity_oracle(budget.unwrap_or(1000)),
        "critical-window" => Ok(evaluate_critical_window(&critical_window_sweep(
            budget.unwrap_or(2000),
            &CRITICAL_LAMBDAS,
        )?)),
        "poisson" => Ok(evaluate_poisson(&critical_window_sweep(budget.unwrap_or(2000), &[0.0])?)),
        "degree-approx" => degree_approx(budget.unwrap_or(500)),
        "step-size-a" => step_size_a(budget.unwrap_or(300)),
        "determinism" => determinism(),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

/// Crossing formulas for edges and cherries against full enumeration,
/// `n <= 30`, `1 <= r < n`, plus `P{d'(1) = 0} = T` on small unions.
pub fn formula_exact() -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (name, template, n_min) in [("edge", GraphTemplate::k2(), 2), ("cherry", GraphTemplate::cherry(), 3)] {
        let mut cases = 0;
        let mut mismatches = Vec::new();
        for n in n_min..=30 {
            for r in 1..n {
                let closed = if n_min == 2 { p_edge_connects(n, r)? } else { p_cherry_connects(n, r)? };
                cases += 1;
                if crossing_probability_by_enumeration(&template, n, r)? != closed {
                    mismatches.push(format!("n={n} r={r}"));
                }
            }
        }
        checks.push(check(
            format!("{name} crossing probability = enumeration"),
            mismatches.is_empty(),
            format!("{cases} (n, r) cases, mismatches: {mismatches:?}"),
        ));
    }
    for (n, m, templates) in [
        (4, 2, vec![GraphTemplate::k2()]),
        (5, 2, vec![GraphTemplate::cherry()]),
        (6, 2, vec![GraphTemplate::k2(), GraphTemplate::cherry()]),
    ] {
        checks.push(t_marginal_check(n, m, &templates)?);
    }
    Ok(SuiteReport::new("formula-exact", checks, start))
}

fn t_marginal_check(n: usize, m: usize, templates: &[GraphTemplate]) -> Result<Check> {
    let dist = enumerate_fixed_model(n, m, templates, DEFAULT_BUDGET)?;
    let moments = model_moments(&ModelSpec::fixed(n, m, templates.to_vec()))?;
    let t = exact_t_rational(&moments.per_community_x_rational(), n)?;
    let p0 = dist.probability(|o| o.d_prime_1 == 0);
    Ok(check(
        format!("P{{d'(1)=0}} = T, n={n} m={m}"),
        p0 == t && dist.total() == BigRational::from_integer(1.into()),
        format!("enumeration {p0}, T {t}"),
    ))
}

/// Exact rational sweeps of the crossing lower bounds (`n <= 60`) and the
/// negative-correlation inequalities (`n <= 200`). The multinomial
/// inequality is checked on 1000 random rational vectors.
pub fn inequality_exact() -> Result<SuiteReport> {
    let start = Instant::now();
    let (cases, violations) = exact_bound_sweep(60)?;
    let mut checks = vec![check(
        "crossing probabilities dominate both lower bounds, n <= 60",
        violations.is_empty() && cases > 0,
        format!("{cases} comparisons, {} violations {:?}", violations.len(), violations.first()),
    )];
    let (cases, failures) = negative_correlation_sweep(4, 200)?;
    checks.push(check(
        "negative correlation of crossing events, n <= 200",
        failures.is_empty() && cases > 0,
        format!("{cases} inequalities, {} failing (n, r)", failures.len()),
    ));
    let failures = fact1_random_sweep(1000, SEED)?;
    checks.push(check(
        "multinomial remainder bound on 1000 random vectors",
        failures.is_empty(),
        format!("{} violations", failures.len()),
    ));
    Ok(SuiteReport::new("inequality-exact", checks, start))
}

/// Small fixed-template models inside the enumeration budget.
pub fn oracle_configurations() -> Vec<(usize, usize, Vec<GraphTemplate>)> {
    let (k2, cherry) = (GraphTemplate::k2(), GraphTemplate::cherry());
    vec![
        (3, 2, vec![k2.clone()]),
        (8, 3, vec![k2.clone()]),
        (6, 3, vec![cherry.clone()]),
        (8, 2, vec![cherry.clone()]),
        (7, 3, vec![k2, cherry.clone(), cherry]),
    ]
}

fn observed_outcome(spec: &ModelSpec, seed: u64) -> Result<UnionOutcome> {
    let g = sample_union(spec, seed)?;
    let one = VertexId::new(1);
    Ok(UnionOutcome {
        connected: is_connected(&g),
        eta1: component_census(&g).eta(1),
        d_prime_1: g
            .communities()
            .iter()
            .filter(|c| c.members().binary_search(&one).is_ok())
            .count(),
        delta: min_degree(&g)?,
    })
}

/// Exact joint law of `(connected, η₁, d'(1), δ)` against Monte Carlo,
/// cell by cell within 3σ, and `P{d'(1) = 0}` against `T`.
pub fn oracle_equivalence(trials: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let threads = threads_from_env()?;
    let mut checks = Vec::new();
    for (ci, (n, m, templates)) in oracle_configurations().into_iter().enumerate() {
        let label = format!("n={n} m={m} templates={}", template_names(&templates));
        let exact = enumerate_fixed_model(n, m, &templates, DEFAULT_BUDGET)?;
        let spec = ModelSpec::fixed(n, m, templates.clone());
        let seed = derive_trial_seed(SEED, ci as u64);
        let observed: Vec<UnionOutcome> = in_pool(threads, || {
            (0..trials as u64)
                .into_par_iter()
                .map(|t| observed_outcome(&spec, derive_trial_seed(seed, t)))
                .collect::<Result<Vec<_>>>()
        })?;
        let mut counts: BTreeMap<UnionOutcome, usize> = BTreeMap::new();
        for o in observed {
            *counts.entry(o).or_insert(0) += 1;
        }

        let mut cells = exact.outcomes.keys().copied().collect::<Vec<_>>();
        cells.extend(counts.keys().filter(|k| !exact.outcomes.contains_key(k)));
        let mut worst = 0.0f64;
        let mut bad = Vec::new();
        for cell in &cells {
            let p = exact.outcomes.get(cell).map_or(0.0, |q| q.to_f64().unwrap());
            let c = counts.get(cell).copied().unwrap_or(0);
            let p_hat = c as f64 / trials as f64;
            let ok = if p == 0.0 {
                c == 0
            } else {
                let sigma = (p * (1.0 - p) / trials as f64).sqrt();
                worst = worst.max((p_hat - p).abs() / sigma);
                (p_hat - p).abs() <= 3.0 * sigma
            };
            if !ok {
                bad.push(format!("{cell:?}: exact {p:.6}, observed {p_hat:.6}"));
            }
        }
        checks.push(check(
            format!("joint law within 3 sigma, {label}"),
            bad.is_empty(),
            format!(
                "{} cells, {trials} trials, max |z| {worst:.3}, failures {bad:?}",
                cells.len()
            ),
        ));
        checks.push(t_marginal_check(n, m, &templates)?);
        checks.push(check(
            format!("exact probabilities sum to 1, {label}"),
            exact.total() == BigRational::from_integer(1.into())
                && exact.outcomes.values().all(|p| *p >= BigRational::zero()),
            format!("{} outcomes", exact.outcomes.len()),
        ));
    }
    Ok(SuiteReport::new("oracle-equivalence", checks, start))
}

fn template_names(templates: &[GraphTemplate]) -> String {
    let names: Vec<&str> = templates
        .iter()
        .map(|t| match (t.vertices, t.edges.len()) {
            (2, 1) => "K2",
            (3, 2) => "cherry",
            _ => "other",
        })
        .collect();
    format!("[{}]", names.join(","))
}

/// A random small model of any kind on `2..=12` vertices.
fn random_small_spec<R: Rng>(rng: &mut R) -> ModelSpec {
    let n = rng.random_range(2..=12usize);
    let m = rng.random_range(1..=2 * n);
    match rng.random_range(0..3) {
        0 => {
            let pool: Vec<GraphTemplate> = [
                GraphTemplate::k2(),
                GraphTemplate::cherry(),
                GraphTemplate::clique(3),
                GraphTemplate::clique(4),
            ]
            .into_iter()
            .filter(|t| t.vertices <= n)
            .collect();
            let count = rng.random_range(1..=2);
            let templates = (0..count)
                .map(|_| pool[rng.random_range(0..pool.len())].clone())
                .collect();
            ModelSpec::fixed(n, m, templates)
        }
        1 => {
            let y = rng.random_range(2..=n as u64);
            let q = [0.3, 0.6, 0.9][rng.random_range(0..3)];
            ModelSpec::bernoulli(n, m, vec![(y, q, 1.0)])
        }
        _ => {
            let size = rng.random_range(2..=n.min(5) as u64);
            ModelSpec::cliques(n, m, SizeLaw::single(size))
        }
    }
}

/// Flow-based connectivity against exhaustive separator search on `samples`
/// seeded random unions with `n <= 12`.
pub fn connectivity_oracle(samples: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = RngStream::new(SEED, u64::MAX).rng();
    let specs: Vec<ModelSpec> = (0..samples).map(|_| random_small_spec(&mut rng)).collect();
    let threads = threads_from_env()?;
    let results: Vec<(usize, usize, usize, bool)> = in_pool(threads, || {
        specs
            .par_iter()
            .enumerate()
            .map(|(i, spec)| {
                let g = sample_union(spec, derive_trial_seed(SEED, i as u64))?;
                let flow = vertex_connectivity(&g)?;
                let brute = brute_force_vertex_connectivity(&g)?;
                let delta = min_degree(&g)?;
                let mut monotone = true;
                let mut previous = true;
                for k in 1..g.n() {
                    let kc = is_k_vertex_connected(&g, k)?;
                    monotone &= kc == (flow >= k) && (previous || !kc);
                    previous = kc;
                }
                Ok((flow, brute, delta, monotone))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let disagree = results.iter().filter(|r| r.0 != r.1).count();
    let whitney = results.iter().filter(|r| r.0 > r.2).count();
    let monotone = results.iter().filter(|r| !r.3).count();
    let mut spread: BTreeMap<usize, usize> = BTreeMap::new();
    for r in &results {
        *spread.entry(r.1).or_insert(0) += 1;
    }
    let checks = vec![
        check(
            "flow connectivity = brute force",
            disagree == 0 && samples > 0,
            format!("{samples} graphs, {disagree} disagreements, connectivity histogram {spread:?}"),
        ),
        check("connectivity <= minimal degree", whitney == 0, format!("{whitney} violations")),
        check(
            "k-connectivity monotone in k and consistent",
            monotone == 0,
            format!("{monotone} violations"),
        ),
    ];
    Ok(SuiteReport::new("connectivity-oracle", checks, start))
}

pub const CRITICAL_N: usize = 2000;
pub const CRITICAL_LAMBDAS: [f64; 5] = [-4.0, -2.0, 0.0, 2.0, 4.0];

/// `K₂` communities on 2000 vertices, `m` back-solved for each `λ0`.
pub fn critical_window_sweep(trials: usize, lambdas: &[f64]) -> Result<SweepOutput> {
    let config = ExperimentConfig::new(ModelSpec::fixed(CRITICAL_N, 1, vec![GraphTemplate::k2()]), trials, SEED)
        .with_statistics(vec![Statistic::Connected])
        .with_sweep(Sweep::Lambda0 {
            values: lambdas.to_vec(),
        });
    sweep_with_threads(&config, threads_from_env()?)
}

/// `|P̂{connected} - exp(-exp(λ0))| <= 0.05 + 3σ` at every sweep point, and
/// the estimates decrease in `λ0` up to 3σ.
pub fn evaluate_critical_window(sweep: &SweepOutput) -> SuiteReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut previous: Option<(f64, f64)> = None;
    let mut monotone = true;
    for p in &sweep.points {
        let Some(run) = &p.run else {
            checks.push(check(format!("lambda0={}", p.value), false, "row skipped"));
            continue;
        };
        let est = run.get("connected").expect("connected row");
        let target = predict_connect_prob(p.value);
        let n = est.trials as f64;
        let sigma = (target * (1.0 - target) / n).sqrt();
        let gap = (est.estimate - target).abs();
        checks.push(check(
            format!("lambda0={}", p.value),
            gap <= 0.05 + 3.0 * sigma,
            format!(
                "m={} P_hat={:.4} [{:.4}, {:.4}] target={target:.4} |gap|={gap:.4} allowed={:.4}",
                p.m.unwrap_or(0),
                est.estimate,
                est.lower,
                est.upper,
                0.05 + 3.0 * sigma
            ),
        ));
        let s_hat = (est.estimate * (1.0 - est.estimate) / n).sqrt();
        if let Some((prev, prev_s)) = previous {
            monotone &= est.estimate <= prev + 3.0 * (s_hat * s_hat + prev_s * prev_s).sqrt();
        }
        previous = Some((est.estimate, s_hat));
    }
    checks.push(check("P_hat decreasing in lambda0 (3 sigma slack)", monotone, ""));
    SuiteReport::new("critical-window", checks, start)
}

fn poisson_pmf(mean: f64, j: usize) -> f64 {
    let ln = j as f64 * mean.ln() - mean - statrs::function::factorial::ln_factorial(j as u64);
    ln.exp()
}

/// Total variation between the η₁ histogram at `λ0 = 0` and Poisson(1),
/// over counts `0..=6`.
pub fn evaluate_poisson(sweep: &SweepOutput) -> SuiteReport {
    let start = Instant::now();
    let point = sweep.points.iter().find(|p| p.value == 0.0 && p.run.is_some());
    let checks = match point {
        None => vec![check("eta1 ~ Poisson(1)", false, "no run at lambda0 = 0")],
        Some(p) => {
            let run = p.run.as_ref().unwrap();
            let trials = run.records.len() as f64;
            let mut hist = [0usize; 7];
            for r in &run.records {
                if r.eta1 <= 6 {
                    hist[r.eta1] += 1;
                }
            }
            let tv = 0.5
                * hist
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| (c as f64 / trials - poisson_pmf(1.0, j)).abs())
                    .sum::<f64>();
            vec![check(
                "eta1 ~ Poisson(1), total variation over 0..=6 <= 0.05",
                tv <= 0.05,
                format!("m={} TV={tv:.4} histogram={hist:?}", p.m.unwrap_or(0)),
            )]
        }
    };
    SuiteReport::new("poisson", checks, start)
}

/// Pooled `P{d'(v) = k}`, `k <= 4`, for `K₂` communities with `n = 500`,
/// `m = ⌈n ln n⌉`, against `(κ^k/k!)(m/n)^k e^{-κm/n}`.
pub fn degree_approx(trials: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let n = 500;
    let m = (n as f64 * (n as f64).ln()).ceil() as usize;
    let config = ExperimentConfig::new(ModelSpec::fixed(n, m, vec![GraphTemplate::k2()]), trials, SEED)
        .with_statistics(vec![Statistic::NCounters(1)]);
    let run = run_trials_with_threads(&config, threads_from_env()?)?;
    let pooled = (n * trials) as f64;
    let mut checks = Vec::new();
    for k in 0..=4 {
        let count: usize = run
            .records
            .iter()
            .map(|r| r.nk_summary.as_ref().map_or(0, |c| c.n(k)))
            .sum();
        let p = degree_prob_approx(n, m, 2.0, k);
        let p_hat = count as f64 / pooled;
        let tol = (0.15 * p).max(3.0 * (p * (1.0 - p) / pooled).sqrt());
        checks.push(check(
            format!("P{{d'=={k}}}"),
            (p_hat - p).abs() <= tol,
            format!("m={m} observed={p_hat:.6e} approx={p:.6e} tolerance={tol:.3e}"),
        ));
    }
    Ok(SuiteReport::new("degree-approx", checks, start))
}

/// Triangle communities on 500 vertices at the midpoint of the `k = 0`
/// window: the minimal degree and the vertex connectivity both sit at
/// `a = 2`, and `N'_k = 0` forces blossom centers.
pub fn step_size_a(trials: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let n = 500;
    let spec = ModelSpec::cliques(n, 1, SizeLaw::single(3));
    let moments = model_moments(&spec)?;
    let m = m_for_window_midpoint(n, moments.kappa);
    let window = window_report(n, m, &moments, 0)?;
    let config = ExperimentConfig::new(spec.with_m(m), trials, SEED).with_statistics(vec![
        Statistic::Delta,
        Statistic::Kconn(2),
        Statistic::Kconn(3),
        Statistic::Blossoms,
    ]);
    let run = run_trials_with_threads(&config, threads_from_env()?)?;
    let get = |s: &str| run.get(s).copied().unwrap_or(super::run::wilson(0, trials));
    let (delta2, k2, k3) = (get("delta_eq_2"), get("kconn_2"), get("kconn_3"));
    let bad_blossoms = run
        .records
        .iter()
        .filter(|r| !r.blossoms.as_ref().is_some_and(|b| b.implication_holds))
        .count();
    let delta_hist: Vec<String> = run
        .summary
        .iter()
        .filter(|r| r.statistic.starts_with("delta_eq_"))
        .map(|r| format!("{}={:.3}", r.statistic, r.estimate.estimate))
        .collect();
    let e_n0 = n as f64 * (-moments.kappa * m as f64 / n as f64).exp();
    let checks = vec![
        check(
            "m at window midpoint",
            window.inside,
            format!(
                "m={m} m/n={:.4} lambda(0)={:.4} lambda(1)={:.4} E N_0={e_n0:.3}",
                m as f64 / n as f64,
                window.lambda_k,
                window.lambda_k1
            ),
        ),
        check(
            "P_hat{delta=2} >= 0.8",
            delta2.estimate >= 0.8,
            format!("{:.4} [{:.4}, {:.4}] ({})", delta2.estimate, delta2.lower, delta2.upper, delta_hist.join(" ")),
        ),
        check(
            "P_hat{2-connected} >= 0.8",
            k2.estimate >= 0.8,
            format!("{:.4} [{:.4}, {:.4}]", k2.estimate, k2.lower, k2.upper),
        ),
        check(
            "P_hat{3-connected} <= 0.5",
            k3.estimate <= 0.5,
            format!("{:.4} [{:.4}, {:.4}]", k3.estimate, k3.lower, k3.upper),
        ),
        check(
            "N'_k = 0 implies blossom centers, every trial",
            bad_blossoms == 0,
            format!("{bad_blossoms} of {trials} trials violate"),
        ),
    ];
    Ok(SuiteReport::new("step-size-a", checks, start))
}

/// Renders runs and sweeps under several worker counts and compares bytes.
pub fn determinism() -> Result<SuiteReport> {
    let start = Instant::now();
    let run_config = ExperimentConfig::new(
        ModelSpec::bernoulli(60, 150, vec![(5, 0.5, 0.5), (8, 1.0, 0.5)]),
        200,
        SEED,
    )
    .with_statistics(vec![
        Statistic::Connected,
        Statistic::Kconn(1),
        Statistic::Kconn(2),
        Statistic::Delta,
        Statistic::EtaCensus,
        Statistic::NCounters(1),
        Statistic::Blossoms,
        Statistic::EventA,
    ]);
    let sweep_config = ExperimentConfig::new(ModelSpec::fixed(80, 1, vec![GraphTemplate::cherry()]), 100, SEED)
        .with_statistics(vec![Statistic::Connected, Statistic::Kconn(2)])
        .with_sweep(Sweep::Lambda0 {
            values: vec![-2.0, 0.0, 2.0],
        });

    let mut renders = Vec::new();
    for threads in [Some(1), Some(3), None] {
        let run = run_trials_with_threads(&run_config, threads)?;
        let sweep = sweep_with_threads(&sweep_config, threads)?;
        renders.push((
            render_summary_csv(&run),
            render_records_jsonl(&run)?,
            render_sweep_csv(&sweep),
        ));
    }
    let first = &renders[0];
    let same = |f: fn(&(String, String, String)) -> &String| renders.iter().all(|r| f(r) == f(first));
    let checks = vec![
        check("summary CSV identical across worker counts", same(|r| &r.0), format!("{} bytes", first.0.len())),
        check("trial JSON lines identical across worker counts", same(|r| &r.1), format!("{} bytes", first.1.len())),
        check("sweep CSV identical across worker counts", same(|r| &r.2), format!("{} bytes", first.2.len())),
    ];
    Ok(SuiteReport::new("determinism", checks, start))
}
