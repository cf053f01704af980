//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvqkd::calibration::calibrate_snu;
use cvqkd::harness::{evaluate_key_rate, run_endtoend, sweep_csv, sweep_distance, sweep_distances, SystemConfig};
use cvqkd::io::read_waveform;
use cvqkd::selftest::run_selftest;
use cvqkd::tx::build_frame_schedule;
use cvqkd::Error;

#[derive(Parser)]
#[command(name = "cvqkd", version, about = "Simulate and analyze a real-LO CV-QKD link")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full link simulation and write report.json and timing.json.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        symbols_per_frame: Option<usize>,
    },
    /// Evaluate the key rate from configured parameters only.
    Keyrate {
        #[command(flatten)]
        common: Common,
    },
    /// Print the rate-versus-distance table as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Compute the SNU calibration from recorded waveform files.
    Calibrate {
        /// LO-off recording.
        #[arg(long)]
        elec: PathBuf,
        /// Gated recording with signal and calibration slots.
        #[arg(long)]
        gated: PathBuf,
        /// Calibration slot length in samples.
        #[arg(long)]
        calib_slot: usize,
        #[arg(long, default_value_t = 0.5)]
        overhead: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

/// Errors while reading user inputs are always validation failures.
fn invalid(e: Error) -> Failure {
    Failure::Invalid(e.to_string())
}

fn load(common: &Common) -> Result<SystemConfig, Failure> {
    let mut cfg = match &common.config {
        Some(p) => SystemConfig::load(p).map_err(invalid)?,
        None => SystemConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

fn write_or_print(out: Option<&PathBuf>, name: &str, text: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(Error::from)?;
            std::fs::write(dir.join(name), text).map_err(Error::from)?;
            eprintln!("wrote {}", dir.join(name).display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            common,
            frames,
            symbols_per_frame,
        } => {
            let mut cfg = load(&common)?;
            cfg.frames = frames.unwrap_or(cfg.frames);
            cfg.symbols_per_frame = symbols_per_frame.unwrap_or(cfg.symbols_per_frame);
            cfg.validate().map_err(invalid)?;
            let out = run_endtoend(&cfg)?;
            out.write(&cfg.output_dir)?;
            let r = &out.report;
            if let Some(k) = &r.key_rate {
                println!(
                    "T {:.5}  eps {:.4} SNU  K_asym {:.4} Mbps  K_finite {:.4} Mbps  ({} symbols)",
                    k.t_point,
                    k.eps_point,
                    k.k_asym / 1e6,
                    k.k_finite / 1e6,
                    r.total_symbols
                );
            }
            println!("report written to {}", cfg.output_dir);
            if !r.errors.is_empty() {
                let msgs: Vec<String> = r
                    .errors
                    .iter()
                    .map(|e| match e.frame {
                        Some(f) => format!("{} (frame {f}): {}", e.stage, e.message),
                        None => format!("{}: {}", e.stage, e.message),
                    })
                    .collect();
                return Err(Failure::Runtime(msgs.join("; ")));
            }
        }
        Command::Keyrate { common } => {
            let cfg = load(&common)?;
            cfg.validate().map_err(invalid)?;
            let s = evaluate_key_rate(&cfg)?;
            let text = serde_json::to_string_pretty(&s).map_err(Error::from)? + "\n";
            write_or_print(common.out.as_ref(), "keyrate.json", &text)?;
        }
        Command::Sweep { common, from, to, step } => {
            let mut cfg = load(&common)?;
            cfg.sweep.from_km = from.unwrap_or(cfg.sweep.from_km);
            cfg.sweep.to_km = to.unwrap_or(cfg.sweep.to_km);
            cfg.sweep.step_km = step.unwrap_or(cfg.sweep.step_km);
            cfg.validate().map_err(invalid)?;
            let d = sweep_distances(cfg.sweep.from_km, cfg.sweep.to_km, cfg.sweep.step_km).map_err(invalid)?;
            let rows = sweep_distance(&cfg, &d)?;
            write_or_print(common.out.as_ref(), "sweep.csv", &sweep_csv(&rows, &cfg.sweep.n_values))?;
        }
        Command::Calibrate {
            elec,
            gated,
            calib_slot,
            overhead,
            out,
        } => {
            let elec = read_waveform(&elec).map_err(invalid)?;
            let gated = read_waveform(&gated).map_err(invalid)?;
            let schedule = build_frame_schedule(gated.len(), overhead, calib_slot).map_err(invalid)?;
            let rec = calibrate_snu(&elec, &gated, &schedule)?;
            let text = serde_json::to_string_pretty(&rec).map_err(Error::from)? + "\n";
            write_or_print(out.as_ref(), "calibration.json", &text)?;
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::Runtime(format!("{failed} of {} checks failed", checks.len())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
