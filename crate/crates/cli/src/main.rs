use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ethavg::adversarial::{counterexample_suite, CounterexampleOptions};
use ethavg_cli::output::{write_json_file, write_report};
use ethavg_cli::{parse_config, run_experiment, Diagnostic, ExperimentConfig};

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const DEFAULT_OUT: &str = "ethavg-out";

#[derive(Parser)]
#[command(name = "ethavg", about = "Bound checks for eigenstate thermalisation on average", version)]
struct Cli {
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Report schema and applicability problems without running.
    Validate { config: PathBuf },
    /// Run the eigenstate-basis counterexample suite for one dimension.
    Counterexample {
        #[arg(long)]
        dim: usize,
        /// Random band states per run.
        #[arg(long, default_value_t = 50)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = match cli.command {
        Command::Run { config } => run(&config, cli.out.as_deref()),
        Command::Validate { config } => Ok(validate(&config)),
        Command::Counterexample { dim, states, seed } => counterexample(dim, states, seed, cli.out.as_deref()),
        Command::Version => {
            println!("ethavg {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

fn load(path: &Path) -> (Option<ExperimentConfig>, Vec<Diagnostic>) {
    match fs::read_to_string(path) {
        Ok(text) => parse_config(&text),
        Err(e) => (
            None,
            vec![Diagnostic {
                severity: ethavg_cli::Severity::Error,
                path: String::new(),
                message: format!("cannot read {}: {e}", path.display()),
                applicability: false,
            }],
        ),
    }
}

fn validate(path: &Path) -> u8 {
    let (_, diags) = load(path);
    for d in &diags {
        println!("{d}");
    }
    if diags.iter().any(Diagnostic::is_error) {
        EXIT_CONFIG
    } else {
        0
    }
}

fn run(path: &Path, out: Option<&Path>) -> Result<u8> {
    let (config, diags) = load(path);
    let mut fatal = false;
    for d in &diags {
        if d.applicability {
            eprintln!("warning: {}: {} (recorded as inapplicable)", d.path, d.message);
        } else {
            fatal |= d.is_error();
            eprintln!("{d}");
        }
    }
    let Some(config) = config.filter(|_| !fatal) else {
        return Ok(EXIT_CONFIG);
    };
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let (report, timings) = run_experiment(&config)?;
    write_report(&dir, &report, &timings).context("writing report")?;

    for agg in &report.aggregate.checks {
        println!(
            "{:<16} passed {:>4}  failed {:>4}  inapplicable {:>4}",
            agg.name.as_str(),
            agg.passed,
            agg.failed,
            agg.inapplicable
        );
    }
    if report.aggregate.statistical_failures > 0 {
        eprintln!(
            "warning: {} statistical check(s) missed after re-running",
            report.aggregate.statistical_failures
        );
    }
    println!("report written to {}", dir.display());
    Ok(if report.theorem_failures() > 0 { EXIT_FAILED } else { 0 })
}

fn counterexample(dim: usize, states: usize, seed: u64, out: Option<&Path>) -> Result<u8> {
    let options = CounterexampleOptions {
        n_states: states,
        seed,
        ..CounterexampleOptions::default()
    };
    let report = counterexample_suite(dim, &options)?;
    println!(
        "d = {}: mean eigenstate distinguishability {} (expected {}), max closed-form error {:e}, min bound margin {:e}",
        report.d, report.eigenstate_mean, report.expected_eigenstate_value, report.max_closed_form_error, report.min_bound_margin
    );
    if let Some(dir) = out {
        write_json_file(dir, "counterexample.json", &report)?;
    }
    Ok(if report.passed { 0 } else { EXIT_FAILED })
}
