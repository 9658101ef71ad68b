mod args;
mod error;
mod experiments;
mod report;

use args::{Cli, Command, ExperimentConfig, Format};
use clap::Parser;
use error::CliError;
use prubench::MemoryBudget;
use report::{Report, ResolvedConfig, Sweep};
use std::io::Write;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_VIOLATION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Runs the command and writes its report; returns whether any property
/// check was violated.
fn run(cli: Cli) -> Result<bool, CliError> {
    let global = cli.global;
    let config = match cli.command {
        Command::Experiment(experiment) => ExperimentConfig {
            seed: global.seed,
            out: global.out,
            format: global.format,
            mem_budget: global.mem_budget,
            sweep: global.sweep,
            experiment,
        },
        Command::Run { config } => {
            let file: ExperimentConfig = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(&config)?))
                .map_err(|e| CliError::Usage(format!("{}: {e}", config.display())))?;
            ExperimentConfig {
                seed: global.seed.or(file.seed),
                out: global.out.or(file.out),
                format: global.format.or(file.format),
                mem_budget: global.mem_budget.or(file.mem_budget),
                sweep: global.sweep.or(file.sweep),
                experiment: file.experiment,
            }
        }
    };

    let mem_budget = config.mem_budget.unwrap_or(MemoryBudget::DEFAULT_BYTES);
    let budget = MemoryBudget::new(mem_budget);
    let sweep = config.sweep.as_deref().map(Sweep::parse).transpose()?;
    let experiments = match &sweep {
        Some(s) => s.expand(&config.experiment)?,
        None => vec![config.experiment.clone()],
    };

    let mut reports = Vec::with_capacity(experiments.len());
    for experiment in experiments {
        let outcome = experiments::execute(&experiment, config.seed, &budget)?;
        for w in &outcome.warnings {
            eprintln!("warning: {w}");
        }
        for v in &outcome.violations {
            eprintln!("violation: {v}");
        }
        reports.push(Report::new(ResolvedConfig { seed: config.seed, mem_budget, experiment }, outcome)?);
    }

    let mut bytes = match config.format.unwrap_or(Format::Json) {
        Format::Csv => report::to_csv(&reports, sweep.as_ref())?,
        Format::Json if sweep.is_some() => serde_json::to_vec_pretty(&reports)?,
        Format::Json => serde_json::to_vec_pretty(&reports[0])?,
    };
    if !bytes.ends_with(b"\n") {
        bytes.push(b'\n');
    }
    match &config.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(reports.iter().any(|r| !r.violations.is_empty()))
}
