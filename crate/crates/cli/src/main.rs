use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tulczyjew::check::{run_suite, Execution, Fault};
use tulczyjew::sim::{compare_reduction, simulate, write_trajectory, OutputFormat, SimConfig};
use tulczyjew::Error;

/// Tulczyjew triples on principal bundles and the sphere-body simulator.
#[derive(Parser, Debug)]
#[command(name = "tulczyjew", version)]
struct Cli {
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the sphere body and write its trajectory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the format given in the config.
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Overrides the output path given in the config; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomised property suite.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// corrupted-bracket or curvature-sign
        #[arg(long)]
        inject_fault: Option<Fault>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compare reduced and unreduced dynamics along a trajectory.
    CompareReduction {
        #[arg(long)]
        config: PathBuf,
    },
}

const PROPERTY_FAILURE: u8 = 1;
const BAD_CONFIG: u8 = 2;
const NUMERIC_ABORT: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NumericAbort { .. } | Error::NonFinite(_) => NUMERIC_ABORT,
        _ => BAD_CONFIG,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn io_error(e: io::Error) -> Error {
    Error::Config(format!("output: {e}"))
}

fn run_simulate(config: PathBuf, format: Option<OutputFormat>, out: Option<PathBuf>) -> Result<(), Error> {
    let cfg = SimConfig::load(&config)?;
    let format = format.unwrap_or(cfg.format);
    let rows = simulate(&cfg)?;
    match out.or_else(|| cfg.output.clone()) {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path).map_err(io_error)?);
            write_trajectory(&rows, format, &mut w)?;
            w.flush().map_err(io_error)?;
            log::info!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => write_trajectory(&rows, format, io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::Simulate { config, format, out } => match run_simulate(config, format, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Command::Check {
            seed,
            samples,
            inject_fault,
            json,
        } => match run_suite(seed, samples as usize, inject_fault, exec) {
            Ok(report) => {
                if json {
                    println!("{}", report.to_json());
                } else {
                    println!("{report}");
                }
                if report.all_passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(PROPERTY_FAILURE)
                }
            }
            Err(e) => fail(e),
        },
        Command::CompareReduction { config } => {
            match SimConfig::load(&config).and_then(|c| compare_reduction(&c, exec)) {
                Ok(report) => {
                    println!("{report}");
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(PROPERTY_FAILURE)
                    }
                }
                Err(e) => fail(e),
            }
        }
    }
}

