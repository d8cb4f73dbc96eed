use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use graph_union_lab::harness::{self, ExperimentConfig};
use graph_union_lab::theory::{model_moments, window_report};
use graph_union_lab::{gen, Error, ModelSpec};

#[derive(Parser)]
#[command(name = "graph-union-lab", version, about = "Random union graphs: sampling, threshold experiments and exact checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one union graph and print its edge list (or DOT).
    Sample {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        dot: bool,
    },
    /// Run a trial batch, writing summary.csv and trials.jsonl.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the config's sweep, writing sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite and print its JSON report.
    Verify {
        #[arg(long)]
        suite: String,
        /// Monte Carlo trial count override.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Print the analytic moments of a model spec.
    Moments {
        #[arg(long)]
        spec: PathBuf,
    },
}

fn load_spec(path: &PathBuf) -> Result<ModelSpec, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config { path: path.display().to_string(), message: e.to_string() })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

fn execute(command: Command) -> Result<bool, Error> {
    match command {
        Command::Sample { spec, seed, dot } => {
            let g = gen::sample_union(&load_spec(&spec)?, seed)?;
            if dot {
                print!("{}", g.to_dot());
            } else {
                println!("# n={} edges={}", g.n(), g.edge_count());
                for (u, v) in g.edges() {
                    println!("{} {}", u.get(), v.get());
                }
            }
            Ok(true)
        }
        Command::Run { config, out } => {
            let run = harness::run_trials(&ExperimentConfig::load(&config)?)?;
            for path in harness::write_run(&out, &run)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Sweep { config, out } => {
            let sweep = harness::sweep(&ExperimentConfig::load(&config)?)?;
            eprintln!("wrote {}", harness::write_sweep(&out, &sweep)?.display());
            Ok(true)
        }
        Command::Verify { suite, budget } => {
            let report = harness::run_suite(&suite, budget)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.passed)
        }
        Command::Moments { spec } => {
            let spec = load_spec(&spec)?;
            let moments = model_moments(&spec)?;
            let window = (spec.m >= 1 && spec.n >= 2 && moments.kappa > 0.0)
                .then(|| window_report(spec.n, spec.m, &moments, 0))
                .transpose()?;
            let value = serde_json::json!({ "moments": moments, "window_k0": window });
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Json(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
