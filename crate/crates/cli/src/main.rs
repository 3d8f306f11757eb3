use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ringburst::commands::{self, Overrides, SweepParam};
use ringburst::config::resolve_workers;
use ringburst::verify;

/// Bootstrap percolation on ring and torus hybrid random graphs.
#[derive(Parser)]
#[command(name = "ringburst", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct RunFlags {
    /// Worker threads (default: $RINGBURST_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `replicates` from the config.
    #[arg(long)]
    replicates: Option<usize>,
}

impl RunFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            master_seed: self.seed,
            replicates: self.replicates,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print thresholds for (n, p), or a table of activation probabilities.
    Analytics {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "gamma")]
        p: Option<f64>,
        /// Use p = n^-gamma.
        #[arg(long)]
        gamma: Option<f64>,
        /// Emit CSV rows for t0,t1,dt instead of the JSON profile.
        #[arg(long, value_name = "T0,T1,DT")]
        table: Option<String>,
    },
    /// Run an experiment config (or a manifest) and write report files.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Replay one replicate and print its phase trace as JSON.
    PhasesTrace {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        replicate: u64,
        /// Include |A_k(t)| for every step of every exploration phase.
        #[arg(long)]
        full_trajectory: bool,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a config once per value of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// One of gamma, p, n, alpha, y, count.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a named verification suite; exit 1 if any check fails.
    Verify {
        preset: String,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Analytics { n, p, gamma, table } => commands::analytics_cmd(n, p, gamma, table.as_deref(), &mut out)?,
        Command::Simulate { config, out: dir, run } => commands::simulate_cmd(&config, &dir, run.workers, &run.overrides())?,
        Command::PhasesTrace {
            config,
            replicate,
            full_trajectory,
            run,
        } => commands::phases_trace_cmd(&config, replicate, full_trajectory, &run.overrides(), &mut out)?,
        Command::Sweep {
            config,
            param,
            values,
            out: dir,
            run,
        } => {
            let values = commands::parse_values(&values)?;
            commands::sweep_cmd(&config, param, &values, &dir, run.workers, &run.overrides())?
        }
        Command::Verify { preset, workers } => {
            let workers = resolve_workers(workers)?;
            let checks = verify::run_preset(&preset, workers)?;
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            if checks.iter().any(|c| !c.pass) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
