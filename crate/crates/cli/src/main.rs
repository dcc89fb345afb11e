use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use fairdiv::acceptance;
use fairdiv::harness::{self, ExperimentConfig, PlotMetric};
use fairdiv::{FamilyMixture, Instance, MixtureName, Mode};

/// Exit status for bad input of any kind.
const EXIT_INVALID: u8 = 1;
/// Exit status when some acceptance check fails.
const EXIT_ACCEPTANCE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "fairdiv",
    version,
    about = "Fair division of randomly valued items"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config, reusing cached trials.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the acceptance checks and print one line per check.
    Verify,
    /// Aggregate a config's trials into a CSV for plotting.
    Plotdata {
        #[arg(long)]
        config: PathBuf,
        /// worst_envy_ratio, fraction_envious, welfare_ratio, success_rate or social_welfare.
        #[arg(long)]
        metric: PlotMetric,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Generate one instance and write it as JSON.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "goods")]
        mode: Mode,
        #[arg(long, default_value = "beta_uniform")]
        mixture: MixtureName,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn jobs_or_default(jobs: Option<usize>) -> usize {
    jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run_config(path: &Path, jobs: Option<usize>) -> anyhow::Result<harness::RunReport> {
    let config = ExperimentConfig::from_json_file(path)?;
    let report = harness::run(&config, jobs_or_default(jobs))?;
    eprintln!(
        "{} trial results ({} allocator calls, {} cache hits) under {}",
        report.results.len(),
        report.allocator_calls,
        report.cache_hits,
        config.output_dir.display()
    );
    Ok(report)
}

fn execute(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run { config, jobs } => {
            run_config(&config, jobs)?;
        }
        Command::Verify => {
            let mut failed = 0;
            for check in acceptance::ALL {
                let result = check();
                println!("{result}");
                failed += usize::from(!result.passed);
            }
            println!(
                "{} of {} checks passed",
                acceptance::ALL.len() - failed,
                acceptance::ALL.len()
            );
            if failed > 0 {
                return Ok(ExitCode::from(EXIT_ACCEPTANCE));
            }
        }
        Command::Plotdata {
            config,
            metric,
            out,
            jobs,
        } => {
            let report = run_config(&config, jobs)?;
            harness::emit_plot_data(&report.results, metric, &out)?;
            eprintln!("wrote {}", out.display());
        }
        Command::Gen {
            n,
            m,
            mode,
            mixture,
            seed,
            out,
        } => {
            let instance = Instance::generate(n, m, mode, &FamilyMixture::new(mixture), seed)?;
            instance
                .write_json(&out)
                .with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
