use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ants_core::engine::{ring_coverage, CoverageConfig, RingSpec, DEFAULT_COVERAGE_PHI};
use ants_core::harness::{
    format_table, read_trials, run_experiment, summarize_trials, write_csv, ExperimentResult,
    ExperimentSpec, DEFAULT_CAP_MULTIPLIER,
};
use ants_core::verify::{verify, Suite};
use ants_core::PhiSpec;

/// Multi-agent treasure search simulator.
#[derive(Parser)]
#[command(name = "ants", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one (D, k) cell.
    Simulate {
        #[command(flatten)]
        alg: AlgorithmArgs,
        /// Treasure distance D.
        #[arg(long, short = 'd')]
        distance: u64,
        /// Number of agents k.
        #[arg(long, short = 'k')]
        agents: u64,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run every (D, k) cell of a TOML experiment file.
    Sweep {
        /// Experiment file.
        config: PathBuf,
        /// Overrides the seed in the file.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a self-check suite: spiral, advice, modes or rings.
    Verify { suite: String },
    /// Measure distinct ring nodes visited within a horizon.
    Coverage {
        #[command(flatten)]
        alg: AlgorithmArgs,
        /// Upper agent count K defining the rings.
        #[arg(long, default_value_t = 256)]
        k_upper: u64,
        /// Team size; must be 2^i for a ring index i.
        #[arg(long, short = 'k')]
        agents: u64,
        /// Φ used to derive the horizon T = Φ(k)·outer²/k.
        #[arg(long, default_value_t = DEFAULT_COVERAGE_PHI)]
        horizon_phi: PhiSpec,
        /// The run lasts this multiple of T.
        #[arg(long, default_value_t = 4)]
        horizon_factor: u64,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, env = "ANTS_SEED", default_value_t = 0)]
        seed: u64,
        /// CSV destination; standard output if omitted.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Re-summarize a per-trial CSV.
    Report {
        /// Per-trial CSV written by `--trials-output`.
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct AlgorithmArgs {
    /// known-k, rho-approx, uniform, log-k, psi or harmonic.
    #[arg(long, short = 'a', default_value = "known-k")]
    algorithm: String,
    /// Competitiveness function for `uniform`, e.g. polylog:1.5.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    psi_epsilon: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_CAP_MULTIPLIER)]
    cap_multiplier: f64,
    #[arg(long, env = "ANTS_SEED", default_value_t = 0)]
    seed: u64,
    /// step or phase.
    #[arg(long, default_value = "phase")]
    mode: String,
    /// random or fixed:x,y.
    #[arg(long, default_value = "random")]
    placement: String,
}

#[derive(Args)]
struct OutputArgs {
    /// Summary CSV destination; standard output if omitted.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Also write one CSV row per trial here.
    #[arg(long)]
    trials_output: Option<PathBuf>,
    /// Do not print the summary table on standard error.
    #[arg(long, short = 'q')]
    quiet: bool,
}

enum Outcome {
    Ok,
    ChecksFailed,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Simulate {
            alg,
            distance,
            agents,
            run,
            out,
        } => {
            let spec = ExperimentSpec {
                algorithm: alg.algorithm,
                phi: alg.phi,
                rho: alg.rho,
                delta: alg.delta,
                psi_epsilon: alg.psi_epsilon,
                distances: vec![distance],
                agents: vec![agents],
                trials: run.trials,
                cap_multiplier: run.cap_multiplier,
                seed: run.seed,
                mode: run.mode,
                placement: run.placement,
            };
            emit(&run_experiment(&spec)?, &out)?;
        }
        Command::Sweep { config, seed, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut spec = ExperimentSpec::from_toml(&text)?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            emit(&run_experiment(&spec)?, &out)?;
        }
        Command::Verify { suite } => {
            let report = verify(suite.parse::<Suite>()?);
            for check in &report.checks {
                println!("{check}");
            }
            if !report.passed() {
                return Ok(Outcome::ChecksFailed);
            }
        }
        Command::Coverage {
            alg,
            k_upper,
            agents,
            horizon_phi,
            horizon_factor,
            trials,
            seed,
            output,
        } => {
            let spec = ExperimentSpec {
                algorithm: alg.algorithm,
                phi: alg.phi,
                rho: alg.rho,
                delta: alg.delta,
                psi_epsilon: alg.psi_epsilon,
                distances: vec![1],
                agents: vec![agents],
                trials,
                cap_multiplier: DEFAULT_CAP_MULTIPLIER,
                seed,
                mode: "step".into(),
                placement: "random".into(),
            };
            let algorithm = spec.algorithm()?;
            let program = algorithm.program(&algorithm.advice(agents)?)?;
            let config = CoverageConfig {
                rings: RingSpec::new(k_upper)?,
                k: agents,
                phi: horizon_phi,
                horizon_factor,
                trials,
                seed,
            };
            let (target, stats) = ring_coverage(&program, &config)?;
            let mut w = open_output(output.as_deref())?;
            writeln!(w, "ring,inner,outer,size,target,k,horizon,trials,mean_visited,mean_fraction,min_visited,seed")?;
            for r in &stats.rings {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{:.3},{:.6},{},{}",
                    r.index,
                    r.inner,
                    r.outer,
                    r.size,
                    r.index == target,
                    stats.k,
                    stats.horizon,
                    stats.trials,
                    r.mean(),
                    r.mean_fraction(),
                    r.min(),
                    seed
                )?;
            }
            w.flush()?;
        }
        Command::Report { input, out } => {
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let trials = read_trials(file)?;
            let result = ExperimentResult {
                summaries: summarize_trials(&trials),
                trials,
            };
            emit(&result, &OutputArgs { trials_output: None, ..out })?;
        }
    }
    Ok(Outcome::Ok)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(result: &ExperimentResult, out: &OutputArgs) -> Result<()> {
    write_csv(open_output(out.output.as_deref())?, &result.summaries)?;
    if let Some(path) = &out.trials_output {
        write_csv(open_output(Some(path))?, &result.trials)?;
    }
    if !out.quiet {
        eprint!("{}", format_table(&result.summaries));
    }
    Ok(())
}
