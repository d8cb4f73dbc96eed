//! Experiment orchestration. Seeded trial batches and threshold sweeps write
//! CSV aggregates plus JSON-lines records; `verify` runs the named suites.
//!
//! Trial `t` of a config samples its union from the seed
//! `derive_trial_seed(master_seed, t)`, so records are independent of the
//! worker count and of completion order.

mod config;
mod output;
mod run;
pub mod verify;

pub use config::{ExperimentConfig, Statistic, Sweep};
pub use output::{
    fmt_sig, render_records_jsonl, render_summary_csv, render_sweep_csv, write_run, write_sweep,
    RECORDS_FILE, SUMMARY_FILE, SWEEP_FILE,
};
pub use run::{
    compute_trial, fixed_statistics, in_pool, run_trials, run_trials_with_threads, summarize, sweep,
    sweep_with_threads, threads_from_env, wilson, AggregateRow, BlossomSummary, Estimate, RunOutput,
    SweepOutput, SweepPoint, TrialRecord, THREADS_ENV,
};
pub use verify::{run_suite, SuiteReport, SUITES};
