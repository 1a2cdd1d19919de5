//! Command-line front end. Exit codes: 0 success, 1 malformed input or
//! runtime error, 2 invalid cover, 3 failed check.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use branched_splines::pipeline::{self, RunConfig, RunOptions};
use branched_splines::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "branched", version, about = "Splines on branched covers of the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the cover and report its topology and basis census.
    Analyze {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build the surface and write it as OBJ.
    Build {
        #[command(flatten)]
        run: RunArgs,
        /// OBJ path; defaults to the config's output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimension of the conformality solution space against the closed forms.
    Confdim {
        /// Single case: number of forms, degree, smoothness.
        #[arg(num_args = 3, value_names = ["N", "DEGREE", "SMOOTHNESS"])]
        case: Option<Vec<u32>>,
        #[arg(long, default_value = "2..4", conflicts_with = "case")]
        forms: String,
        #[arg(long, default_value = "0..5", conflicts_with = "case")]
        degrees: String,
        #[arg(long, default_value = "0..3", conflicts_with = "case")]
        smoothness: String,
        /// CSV path; defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify partition of unity, continuity, welding and topology.
    Check {
        #[command(flatten)]
        run: RunArgs,
        /// C0 tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// B-spline degree, overriding the config.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    degree: Option<u8>,
    /// Samples per cell edge.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    density: Option<u16>,
    #[arg(long, hide = true)]
    inject_weld_fault: bool,
    #[arg(long, hide = true)]
    perturb_control_point: Option<usize>,
    #[arg(long, hide = true, default_value_t = 10.0)]
    perturb_amount: f64,
}

impl RunArgs {
    fn load(&self) -> branched_splines::Result<(RunConfig, RunOptions)> {
        let cfg = RunConfig::load(&self.config)?;
        let opts = RunOptions {
            degree: self.degree.map(usize::from),
            density: self.density.map(usize::from),
            tolerance: None,
            perturb: self.perturb_control_point.map(|i| (i, self.perturb_amount)),
            weld_fault: self.inject_weld_fault.then_some(1e-3),
        };
        Ok((cfg, opts))
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> branched_splines::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> branched_splines::Result<ExitCode> {
    match cli.command {
        Command::Analyze { config } => {
            let report = pipeline::run_analyze(&RunConfig::load(&config)?)?;
            print_json(&report)?;
        }
        Command::Build { run, out } => {
            let (cfg, opts) = run.load()?;
            let report = pipeline::run_build_to_file(&cfg, &opts, out.as_deref())?;
            print_json(&report)?;
        }
        Command::Confdim {
            case,
            forms,
            degrees,
            smoothness,
            out,
        } => {
            let (f, d, s) = match case.as_deref() {
                Some(&[n_forms, degree, smooth]) => (n_forms..=n_forms, degree..=degree, smooth..=smooth),
                _ => (
                    pipeline::parse_range(&forms)?,
                    pipeline::parse_range(&degrees)?,
                    pipeline::parse_range(&smoothness)?,
                ),
            };
            match out {
                Some(path) => {
                    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
                    pipeline::run_confdim(f, d, s, &mut file)?;
                    file.flush()?;
                }
                None => {
                    pipeline::run_confdim(f, d, s, std::io::stdout().lock())?;
                }
            }
        }
        Command::Check { run, tolerance } => {
            let (cfg, mut opts) = run.load()?;
            opts.tolerance = tolerance;
            let report = pipeline::run_check(&cfg, &opts)?;
            print_json(&report)?;
            if !report.pass {
                for item in report.items.iter().filter(|i| !i.pass) {
                    eprintln!("FAILED {}: {}", item.name, item.detail);
                }
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidCover(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
