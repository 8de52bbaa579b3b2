use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use wimarket::scenario::{compare_runs, read_run, run_sweep_reports, write_gains_csv, write_run, ScenarioSpec};

#[derive(Parser)]
#[command(name = "wimarket", version, about = "Wireless access market equilibria under demand sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a demand sweep and write sweep.csv plus one JSON per point.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides every seed of the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the number of sweep points.
        #[arg(long)]
        points: Option<usize>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print per-point differences of a variant run against a baseline run.
    Compare {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        variant: PathBuf,
        /// Write the table here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            points,
            jobs,
        } => {
            let mut spec = ScenarioSpec::load(&config).with_context(|| format!("loading {}", config.display()))?;
            if let Some(s) = seed {
                spec = spec.with_seed(s);
            }
            if let Some(p) = points {
                spec.sweep.points = p;
            }
            spec.validate()?;
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(j) = jobs {
                pool = pool.num_threads(j);
            }
            let reports = pool.build()?.install(|| run_sweep_reports(&spec))?;
            write_run(&out, &reports)?;
            std::fs::write(out.join("config.json"), serde_json::to_string_pretty(&spec)?)?;
            let failed = reports.iter().filter(|r| r.outcome.error.is_some()).count();
            eprintln!("wrote {} points to {} ({failed} errors)", reports.len(), out.display());
        }
        Command::Compare { baseline, variant, out } => {
            let b = read_run(&baseline).with_context(|| format!("reading {}", baseline.display()))?;
            let v = read_run(&variant).with_context(|| format!("reading {}", variant.display()))?;
            let rows = compare_runs(&b, &v)?;
            match out {
                Some(path) => write_gains_csv(std::fs::File::create(path)?, &rows)?,
                None => write_gains_csv(std::io::stdout().lock(), &rows)?,
            }
        }
        Command::Validate { config } => {
            let spec = ScenarioSpec::load(&config)?;
            println!(
                "ok: {} providers, {} groups, {} sweep points",
                spec.providers(),
                spec.groups,
                spec.sweep.points
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
