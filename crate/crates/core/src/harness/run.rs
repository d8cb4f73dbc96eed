use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Statistic, Sweep};
use crate::conn::{component_census, is_k_vertex_connected, min_degree};
use crate::error::{Error, Result};
use crate::gen::{derive_trial_seed, sample_union};
use crate::stats::{blossom_centers, detect_event_a, membership_profile, n_counters, NCounters};
use crate::theory::{lambda_k, m_for_lambda0, model_moments, predict_connect_prob};

/// Worker-count override; unset means all available cores.
pub const THREADS_ENV: &str = "GRAPH_UNION_LAB_THREADS";

const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlossomSummary {
    /// Vertices that are blossom centers.
    pub centers: usize,
    /// For every `k` with `N'_k = 0`, each vertex with `d'(v) = k` is a center.
    pub implication_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub derived_seed: u64,
    pub connected: bool,
    pub delta: usize,
    pub kconn_results: BTreeMap<usize, bool>,
    pub eta1: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_census: Option<BTreeMap<usize, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nk_summary: Option<NCounters>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blossoms: Option<BlossomSummary>,
    #[serde(rename = "event_A", skip_serializing_if = "Option::is_none")]
    pub event_a: Option<bool>,
    #[serde(skip)]
    pub wall_time_micros: u64,
}

/// Samples trial `trial_index` of `config` and records its statistics.
pub fn compute_trial(config: &ExperimentConfig, trial_index: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let derived_seed = derive_trial_seed(config.master_seed, trial_index);
    let g = sample_union(&config.spec, derived_seed)?;
    let census = component_census(&g);

    let mut kconn_results = BTreeMap::new();
    for k in config.kconn_levels() {
        kconn_results.insert(k, is_k_vertex_connected(&g, k)?);
    }

    let want_blossoms = config.wants(&Statistic::Blossoms);
    let want_profile =
        want_blossoms || config.wants(&Statistic::EventA) || config.n_counter_degree().is_some();
    let profile = want_profile.then(|| membership_profile(&g, config.n_counter_degree().unwrap_or(1)));
    let counters = profile.as_ref().map(n_counters);

    let blossoms = if want_blossoms {
        let profile = profile.as_ref().unwrap();
        let counters = counters.as_ref().unwrap();
        let centers = blossom_centers(&g);
        let implication_holds = profile
            .d_prime
            .iter()
            .zip(&centers)
            .all(|(&d, &c)| c || counters.n_prime(d as usize) != 0);
        Some(BlossomSummary {
            centers: centers.iter().filter(|&&c| c).count(),
            implication_holds,
        })
    } else {
        None
    };

    Ok(TrialRecord {
        trial_index,
        derived_seed,
        connected: census.component_count() == 1,
        delta: min_degree(&g)?,
        kconn_results,
        eta1: census.eta(1),
        eta_census: config
            .wants(&Statistic::EtaCensus)
            .then(|| census.sizes_histogram.clone()),
        nk_summary: config.n_counter_degree().and(counters),
        blossoms,
        event_a: config
            .wants(&Statistic::EventA)
            .then(|| detect_event_a(profile.as_ref().unwrap())),
        wall_time_micros: start.elapsed().as_micros() as u64,
    })
}

/// Empirical proportion with its Wilson 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: usize,
    pub trials: usize,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn wilson(successes: usize, trials: usize) -> Estimate {
    if trials == 0 {
        return Estimate {
            successes,
            trials,
            estimate: f64::NAN,
            lower: 0.0,
            upper: 1.0,
        };
    }
    let nt = trials as f64;
    let p = successes as f64 / nt;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / nt;
    let center = (p + z2 / (2.0 * nt)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)).sqrt() / denom;
    Estimate {
        successes,
        trials,
        estimate: p,
        lower: (center - half).max(0.0),
        upper: (center + half).min(1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub statistic: String,
    #[serde(flatten)]
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Vec<AggregateRow>,
}

impl RunOutput {
    pub fn get(&self, statistic: &str) -> Option<&Estimate> {
        self.summary
            .iter()
            .find(|r| r.statistic == statistic)
            .map(|r| &r.estimate)
    }
}

fn proportion(records: &[TrialRecord], event: impl Fn(&TrialRecord) -> bool) -> Estimate {
    wilson(records.iter().filter(|r| event(r)).count(), records.len())
}

/// Statistic names with one row per run regardless of the sampled values.
pub fn fixed_statistics(config: &ExperimentConfig) -> Vec<String> {
    let mut names = vec!["connected".to_string()];
    names.extend(config.kconn_levels().iter().map(|k| format!("kconn_{k}")));
    if config.wants(&Statistic::Blossoms) {
        names.push("blossom_implication".into());
    }
    if config.wants(&Statistic::EventA) {
        names.push("event_A".into());
    }
    names
}

/// Aggregate rows in a fixed order. The statistics of [`fixed_statistics`]
/// come first; value-indexed rows (`delta_eq_*` and the like) follow for
/// every value observed.
pub fn summarize(config: &ExperimentConfig, records: &[TrialRecord]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    let mut push = |statistic: String, estimate: Estimate| rows.push(AggregateRow { statistic, estimate });

    for name in fixed_statistics(config) {
        let est = match name.as_str() {
            "connected" => proportion(records, |r| r.connected),
            "blossom_implication" => proportion(records, |r| {
                r.blossoms.as_ref().is_some_and(|b| b.implication_holds)
            }),
            "event_A" => proportion(records, |r| r.event_a == Some(true)),
            other => {
                let k: usize = other["kconn_".len()..].parse().expect("kconn row");
                proportion(records, |r| r.kconn_results.get(&k) == Some(&true))
            }
        };
        push(name, est);
    }
    if config.wants(&Statistic::Delta) {
        let seen: BTreeSet<usize> = records.iter().map(|r| r.delta).collect();
        for d in seen {
            push(format!("delta_eq_{d}"), proportion(records, |r| r.delta == d));
        }
    }
    if config.wants(&Statistic::EtaCensus) {
        let seen: BTreeSet<usize> = records.iter().map(|r| r.eta1).collect();
        for j in seen {
            push(format!("eta1_eq_{j}"), proportion(records, |r| r.eta1 == j));
        }
    }
    if config.n_counter_degree().is_some() {
        type Pick = fn(&NCounters) -> &BTreeMap<usize, usize>;
        let families: [(&str, Pick); 3] = [
            ("n_k", |c| &c.n_k),
            ("n_star_k", |c| &c.n_star_k),
            ("n_prime_k", |c| &c.n_prime_k),
        ];
        for (label, pick) in families {
            let seen: BTreeSet<usize> = records
                .iter()
                .filter_map(|r| r.nk_summary.as_ref())
                .flat_map(|c| pick(c).keys().copied())
                .collect();
            for k in seen {
                push(
                    format!("{label}_positive_{k}"),
                    proportion(records, |r| {
                        r.nk_summary.as_ref().is_some_and(|c| pick(c).contains_key(&k))
                    }),
                );
            }
        }
    }
    rows
}

/// Reads [`THREADS_ENV`]; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(Some(t)),
            _ => Err(Error::config(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}

/// Runs `job` on a dedicated pool with `threads` workers (all cores when
/// `None`).
pub fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .expect("thread pool");
    pool.install(job)
}

/// [`run_trials_with_threads`] with the worker count taken from the
/// environment.
pub fn run_trials(config: &ExperimentConfig) -> Result<RunOutput> {
    run_trials_with_threads(config, threads_from_env()?)
}

/// Runs every trial of `config`; records come back ordered by trial index
/// whatever the worker count.
pub fn run_trials_with_threads(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutput> {
    config.validate()?;
    log::info!(
        "running {} trials of n={}, m={} on {} worker(s)",
        config.trials,
        config.spec.n,
        config.spec.m,
        threads.map_or_else(|| "all".to_string(), |t| t.to_string())
    );
    let records = in_pool(threads, || {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|t| compute_trial(config, t))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(config, &records);
    Ok(RunOutput {
        config: config.clone(),
        records,
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    /// The sweep value as given (`m` or `λ0`).
    pub value: f64,
    pub m: Option<usize>,
    /// `λ(0)` at the realised `m`.
    pub lambda0: Option<f64>,
    /// `λ(k)` for every requested `kconn(k)`.
    pub lambda_k: BTreeMap<usize, f64>,
    /// `exp(-exp(λ(0)))`.
    pub predicted: Option<f64>,
    pub note: Option<String>,
    #[serde(skip)]
    pub run: Option<RunOutput>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutput {
    pub config: ExperimentConfig,
    pub points: Vec<SweepPoint>,
}

pub fn sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    sweep_with_threads(config, threads_from_env()?)
}

/// One run per sweep value, each with the config's master seed.
pub fn sweep_with_threads(config: &ExperimentConfig, threads: Option<usize>) -> Result<SweepOutput> {
    config.validate()?;
    let Some(sw) = &config.sweep else {
        return Err(Error::config("sweep", "missing"));
    };
    let kappa = model_moments(&config.spec)?.kappa;
    let n = config.spec.n;
    let targets: Vec<(f64, Option<usize>)> = match sw {
        Sweep::M { values } => values.iter().map(|&m| (m as f64, Some(m))).collect(),
        Sweep::Lambda0 { values } => {
            if kappa.is_nan() || kappa <= 0.0 {
                return Err(Error::config("sweep", "lambda0 sweep needs kappa > 0"));
            }
            values.iter().map(|&l| (l, m_for_lambda0(n, kappa, l))).collect()
        }
    };

    let mut points = Vec::new();
    for (value, m) in targets {
        let Some(m) = m else {
            log::warn!("sweep value {value}: back-solved m < 1, row skipped");
            points.push(SweepPoint {
                value,
                m: None,
                lambda0: None,
                lambda_k: BTreeMap::new(),
                predicted: None,
                note: Some("back-solved m < 1".into()),
                run: None,
            });
            continue;
        };
        let lambda0 = lambda_k(n, m, kappa, 0).ok();
        let lambda_ks = config
            .kconn_levels()
            .into_iter()
            .filter_map(|k| lambda_k(n, m, kappa, k).ok().map(|l| (k, l)))
            .collect();
        let mut point_config = config.clone();
        point_config.spec = config.spec.with_m(m);
        point_config.sweep = None;
        let run = run_trials_with_threads(&point_config, threads)?;
        points.push(SweepPoint {
            value,
            m: Some(m),
            lambda0,
            lambda_k: lambda_ks,
            predicted: lambda0.map(predict_connect_prob),
            note: None,
            run: Some(run),
        });
    }
    Ok(SweepOutput {
        config: config.clone(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GraphTemplate, ModelSpec};

    #[test]
    fn wilson_matches_reference() {
        let e = wilson(50, 100);
        assert!((e.lower - 0.403_831_5).abs() < 1e-6);
        assert!((e.upper - 0.596_168_5).abs() < 1e-6);
        let e = wilson(0, 10);
        assert_eq!(e.lower, 0.0);
        assert!((e.upper - 0.277_532_8).abs() < 1e-6);
    }

    #[test]
    fn forced_connection() {
        let cfg = ExperimentConfig::new(ModelSpec::fixed(2, 1, vec![GraphTemplate::k2()]), 100, 3);
        let out = run_trials_with_threads(&cfg, Some(2)).unwrap();
        assert_eq!(out.get("connected").unwrap().estimate, 1.0);
        assert_eq!(out.records.len(), 100);
        assert!(out.records.iter().enumerate().all(|(i, r)| r.trial_index == i as u64));
    }

    #[test]
    fn records_are_reproducible_from_seed() {
        let cfg = ExperimentConfig::new(ModelSpec::fixed(12, 9, vec![GraphTemplate::cherry()]), 20, 11)
            .with_statistics(vec![
                Statistic::Connected,
                Statistic::Kconn(2),
                Statistic::Delta,
                Statistic::Blossoms,
                Statistic::NCounters(1),
                Statistic::EventA,
                Statistic::EtaCensus,
            ]);
        let out = run_trials_with_threads(&cfg, Some(3)).unwrap();
        for r in &out.records {
            let again = compute_trial(&cfg, r.trial_index).unwrap();
            assert_eq!(TrialRecord { wall_time_micros: 0, ..again }, TrialRecord { wall_time_micros: 0, ..r.clone() });
            assert_eq!(r.derived_seed, derive_trial_seed(11, r.trial_index));
        }
        let total: f64 = out
            .summary
            .iter()
            .filter(|row| row.statistic.starts_with("delta_eq_"))
            .map(|row| row.estimate.estimate)
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_sweep_skips_unreachable_m() {
        let cfg = ExperimentConfig::new(ModelSpec::fixed(20, 1, vec![GraphTemplate::k2()]), 5, 1)
            .with_sweep(Sweep::Lambda0 { values: vec![0.0, 50.0] });
        let out = sweep_with_threads(&cfg, Some(1)).unwrap();
        assert_eq!(out.points[0].m, Some(30));
        assert!(out.points[0].lambda0.unwrap().abs() < 0.01);
        assert!(out.points[1].m.is_none() && out.points[1].note.is_some());
    }
}
