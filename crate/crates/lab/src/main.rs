use std::path::PathBuf;
use std::process::ExitCode;

use blaschke_lab::config::ExperimentConfig;
use blaschke_lab::error::{LabError, LabResult};
use blaschke_lab::runners::{self, RunContext, RunOutcome};
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "blaschke-lab",
    version,
    about = "Weighted zero-sum experiments from a TOML config"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; `out` when omitted (selftest writes nothing without it).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N", env = "BLASCHKE_LAB_THREADS")]
    threads: Option<usize>,
    /// Overrides `run.tol`.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Sum reports and ratio traces over the family and epsilon ladder.
    Verify,
    /// Tabulate a conformal map on a grid.
    Map,
    /// Locate the zeros of one family member.
    Zeros,
    /// Run the built-in invariant suites.
    Selftest,
    /// Epsilon sweep with level sums and optional Monte-Carlo dominance check.
    Sweep,
}

fn setup_threads(threads: Option<usize>) -> LabResult<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(LabError::config("--threads must be at least 1"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LabError::config(format!("thread pool: {e}")))?;
    Ok(())
}

fn load(cli: &Cli) -> LabResult<Option<ExperimentConfig>> {
    let Some(path) = &cli.config else { return Ok(None) };
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.run.seed = Some(seed);
    }
    if let Some(tol) = cli.tol {
        cfg.run.tol = tol;
    }
    cfg.validate()?;
    Ok(Some(cfg))
}

fn run(cli: &Cli) -> LabResult<RunOutcome> {
    setup_threads(cli.threads)?;
    if let Command::Selftest = cli.command {
        return runners::run_selftest(cli.out.as_deref(), cli.seed);
    }
    let cfg = load(cli)?.ok_or_else(|| LabError::config("--config is required"))?;
    let ctx = RunContext::new(Some(cfg), cli.out.clone())?;
    match cli.command {
        Command::Verify => runners::run_verify(&ctx),
        Command::Map => runners::run_map(&ctx),
        Command::Zeros => runners::run_zeros(&ctx),
        Command::Sweep => runners::run_sweep(&ctx),
        Command::Selftest => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            for line in &out.lines {
                println!("{line}");
            }
            if let Some(m) = &out.manifest {
                for e in &m.experiments {
                    let detail = e.detail.as_deref().map(|d| format!("  {d}")).unwrap_or_default();
                    println!("{:<24} {:?}{detail}", e.name, e.status);
                }
            }
            println!("{}", if out.pass { "PASS" } else { "FAIL" });
            ExitCode::from(out.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
