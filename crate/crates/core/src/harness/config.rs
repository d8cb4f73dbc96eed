use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_spec, ModelSpec};

/// A statistic recorded per trial. Serialized with external tagging:
/// `"connected"`, `{"kconn": 2}`, `{"n_counters": 1}`, `"event_A"`, ...
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Connected,
    Kconn(usize),
    Delta,
    EtaCensus,
    NCounters(usize),
    Blossoms,
    #[serde(rename = "event_A")]
    EventA,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parameter", deny_unknown_fields)]
pub enum Sweep {
    #[serde(rename = "m")]
    M { values: Vec<usize> },
    /// `m` is back-solved as `round(n (ln n - λ0) / κ)`.
    #[serde(rename = "lambda0")]
    Lambda0 { values: Vec<f64> },
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::M { values } => values.len(),
            Sweep::Lambda0 { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: ModelSpec,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub statistics: Vec<Statistic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl ExperimentConfig {
    pub fn new(spec: ModelSpec, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            spec,
            trials,
            master_seed,
            statistics: vec![Statistic::Connected],
            sweep: None,
        }
    }

    pub fn with_statistics(mut self, statistics: Vec<Statistic>) -> Self {
        self.statistics = statistics;
        self
    }

    pub fn with_sweep(mut self, sweep: Sweep) -> Self {
        self.sweep = Some(sweep);
        self
    }

    pub fn wants(&self, s: &Statistic) -> bool {
        self.statistics.contains(s)
    }

    pub fn kconn_levels(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self
            .statistics
            .iter()
            .filter_map(|s| match s {
                Statistic::Kconn(k) => Some(*k),
                _ => None,
            })
            .collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    pub fn n_counter_degree(&self) -> Option<usize> {
        self.statistics.iter().find_map(|s| match s {
            Statistic::NCounters(a) => Some(*a),
            _ => None,
        })
    }

    /// Checks the config invariants, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        let report = validate_spec(&self.spec);
        if !report.ok {
            return Err(Error::config("spec", report.messages.join("; ")));
        }
        if self.trials < 1 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        for (i, s) in self.statistics.iter().enumerate() {
            match s {
                Statistic::Kconn(k) if *k < 1 => {
                    return Err(Error::config(format!("statistics[{i}].kconn"), "must be at least 1"));
                }
                Statistic::Kconn(k) if *k >= self.spec.n => {
                    return Err(Error::config(
                        format!("statistics[{i}].kconn"),
                        format!("k-connectivity needs n >= k + 1 (n={}, k={k})", self.spec.n),
                    ));
                }
                Statistic::NCounters(0) => {
                    return Err(Error::config(format!("statistics[{i}].n_counters"), "must be at least 1"));
                }
                _ => {}
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(Error::config("sweep.values", "must be nonempty"));
            }
            if let Sweep::Lambda0 { values } = sweep {
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::config(format!("sweep.values[{i}]"), "must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(
                if path == "." { origin.to_string() } else { path },
                e.into_inner().to_string(),
            )
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
