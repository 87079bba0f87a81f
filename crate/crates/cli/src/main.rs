//! `gsqg`: command-line front end for the active scalar laboratory.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use gsqg_core::dynamics::run;
use gsqg_core::gate::classify;
use gsqg_core::harness::{analyze, parse_config, sweep, worker_count, SweepSpec};
use gsqg_core::lp::{verify_multiplier_bounds, SequenceSpec};
use gsqg_core::symbols::{check_condition, DEFAULT_C0};
use gsqg_core::{Error, MultiplierSpec};

const EXIT_OK: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ABORT: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "gsqg",
    version,
    about = "Pseudo-spectral lab for dissipative active scalars"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and persist its diagnostics.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the cartesian product of a sweep spec.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a configuration against the theorem hypotheses.
    Gate {
        #[arg(long)]
        config: PathBuf,
        /// Besov regularity index, overriding the config.
        #[arg(long)]
        s: Option<f64>,
        /// Sequence A as `linear` or `power:<b>`, overriding the config.
        #[arg(long = "A", value_name = "FAMILY:B")]
        a: Option<String>,
    },
    /// Export CSV series and a summary for a finished run directory.
    Analyze {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Sampled check of the symbol smoothness conditions.
    CheckSymbol {
        /// `identity`, `power:1`, `log_power:2`, `power_times_log:0.4:1`, or JSON.
        #[arg(long = "P", value_name = "SYMBOL")]
        p: String,
        #[arg(long, default_value_t = 0)]
        j_min: i32,
        #[arg(long, default_value_t = 20)]
        j_max: i32,
        #[arg(long, default_value_t = 64)]
        eta_samples: usize,
        #[arg(long, default_value_t = DEFAULT_C0)]
        c0: f64,
    },
    /// Empirical ratios of the multiplier bounds on random fields.
    VerifyBounds {
        #[arg(long = "P", value_name = "SYMBOL")]
        p: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Domain(_) | Error::InvalidGrid(_) => EXIT_CONFIG,
        Error::Io { .. } | Error::Csv(_) | Error::EmptyDiagnostics(_) | Error::Snapshot(_) => {
            EXIT_IO
        }
        _ => EXIT_INTERNAL,
    }
}

fn print(value: &impl serde::Serialize) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(Error::io("<stdout>", e)),
        _ => Ok(()),
    }
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::Run { config, out } => {
            let config = parse_config(&config)?;
            let result = run(&config, Some(&out))?;
            print(&result.summary)?;
            Ok(if result.summary.status.is_abort() {
                EXIT_ABORT
            } else {
                EXIT_OK
            })
        }
        Command::Sweep { spec, out } => {
            let text = fs::read_to_string(&spec).map_err(|e| Error::io(&spec, e))?;
            let summary = sweep(&SweepSpec::from_json(&text)?, &out)?;
            print(&summary)?;
            Ok(EXIT_OK)
        }
        Command::Gate { config, s, a } => {
            let config = parse_config(&config)?;
            let mut idx = config.diagnostics.besov;
            if let Some(s) = s {
                idx.s = s;
            }
            if let Some(a) = a {
                idx.a = SequenceSpec::parse(&a)?;
            }
            print(&classify(&config, &idx)?)?;
            Ok(EXIT_OK)
        }
        Command::Analyze { dir } => {
            print(&analyze(&dir)?)?;
            Ok(EXIT_OK)
        }
        Command::CheckSymbol {
            p,
            j_min,
            j_max,
            eta_samples,
            c0,
        } => {
            let spec = MultiplierSpec::parse(&p)?;
            let report = check_condition(&spec, j_min..=j_max, eta_samples, c0)?;
            print(&json!({ "P": spec, "report": report }))?;
            Ok(EXIT_OK)
        }
        Command::VerifyBounds { p, trials, seed } => {
            let spec = MultiplierSpec::parse(&p)?;
            if trials == 0 {
                return Err(Error::config("trials", "must be >= 1"));
            }
            print(&verify_multiplier_bounds(&spec, trials, seed))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = worker_count(std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        log::warn!("thread pool setup failed: {e}");
    }
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
