//! Command-line front end: sweeps from a config file, figure presets,
//! one-shot QFI/precision evaluation and the self-verification suite.
//!
//! Exit codes: 0 on success, 1 on configuration or domain errors,
//! 2 on verification failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinstar_qfi::observables::{precision_finite, precision_thermodynamic, ObservableSpec};
use spinstar_qfi::qfi::{qfi_closed_form, qfi_thermodynamic, timescales};
use spinstar_qfi::spinstar::{sample_couplings, GaussianCouplingSpec, ModelPoint};
use spinstar_qfi::sweep::{render, run_preset, run_sweep, OutputFormat, Preset, SweepConfig};
use spinstar_qfi::verify::{self, VerifyScope};
use spinstar_qfi::Result;

#[derive(Parser)]
#[command(
    name = "spinstar-qfi",
    about = "Quantum Fisher information and measurement precision for environment fragments of the spin-star model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep described by a TOML config file.
    Sweep {
        /// Path to the sweep configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the output path from the config (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the output format from the config.
        #[arg(long)]
        format: Option<String>,
    },
    /// Regenerate the data behind one of the reference figures.
    Preset {
        /// One of: fig1b, fig2, fig3-heatmap, plateau.
        name: String,
        /// Master seed for the coupling realizations.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run the self-verification suite against the exact reference.
    Verify {
        /// fast (seconds) or full (extends the exact-reference matrix).
        #[arg(long, default_value = "fast")]
        scope: String,
        /// Emit the report as JSON instead of text lines.
        #[arg(long, default_value_t = false)]
        json: bool,
    },
    /// Evaluate the fragment QFI at a single model point.
    Qfi(PointArgs),
    /// Evaluate the A_q measurement precision at a single model point.
    Precision(PointArgs),
}

#[derive(Args)]
struct PointArgs {
    /// Encoding angle θ in radians.
    #[arg(long)]
    theta: f64,
    /// Interaction time t.
    #[arg(long)]
    time: f64,
    /// Environment size N.
    #[arg(long)]
    n_env: usize,
    /// Fragment size |F|.
    #[arg(long)]
    frag: usize,
    /// Ensemble mean coupling.
    #[arg(long, default_value_t = 0.5)]
    jmean: f64,
    /// Ensemble coupling standard deviation.
    #[arg(long, default_value_t = 0.5)]
    jstd: f64,
    /// Seed for the coupling realization.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Observable mixing weight q (precision only).
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Evaluate the thermodynamic limit instead of the finite realization.
    #[arg(long, default_value_t = false)]
    thermo: bool,
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(spinstar_qfi::Error::config(format!(
            "unknown format '{other}' (expected csv or json)"
        ))),
    }
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn cmd_sweep(config: &PathBuf, out: Option<PathBuf>, format: Option<String>) -> Result<()> {
    let text = fs::read_to_string(config)?;
    let cfg = SweepConfig::from_toml(&text)?;
    let rows = run_sweep(&cfg)?;
    let fmt = match format {
        Some(s) => parse_format(&s)?,
        None => cfg.output.format,
    };
    let target = out.or_else(|| cfg.output.path.clone());
    emit(&render(&rows, fmt)?, target.as_ref())
}

fn cmd_preset(name: &str, seed: u64, out: Option<PathBuf>, format: &str) -> Result<()> {
    let preset: Preset = name.parse()?;
    let rows = run_preset(preset, seed)?;
    emit(&render(&rows, parse_format(format)?)?, out.as_ref())
}

fn cmd_qfi(args: &PointArgs) -> Result<()> {
    let spec = GaussianCouplingSpec::new(args.jmean, args.jstd)?;
    let f = args.frag as f64 / args.n_env as f64;
    let j2 = spec.second_moment();
    let result = if args.thermo {
        qfi_thermodynamic(args.time, f, j2)?
    } else {
        let couplings = sample_couplings(&spec, args.n_env, args.seed)?;
        let point = ModelPoint::new(args.theta, args.time, &couplings, args.frag)?;
        qfi_closed_form(&point)
    };
    let ts = (args.frag > 0)
        .then(|| timescales(args.theta, f, args.jmean, j2))
        .transpose()?;
    let report = serde_json::json!({
        "theta": args.theta,
        "time": args.time,
        "n_env": args.n_env,
        "frag": args.frag,
        "seed": args.seed,
        "qfi": result.value,
        "method": result.method,
        "tau_d": ts.map(|t| t.tau_d),
        "tau_f": ts.map(|t| t.tau_f),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serialization")
    );
    Ok(())
}

fn cmd_precision(args: &PointArgs) -> Result<()> {
    let spec = GaussianCouplingSpec::new(args.jmean, args.jstd)?;
    let ospec = ObservableSpec::new(args.q)?;
    let f = args.frag as f64 / args.n_env as f64;
    let (result, method, qfi_bound) = if args.thermo {
        let r = precision_thermodynamic(args.theta, args.time, f, args.jmean, &ospec)?;
        let bound = qfi_thermodynamic(args.time, f, spec.second_moment())?.value;
        (r, "thermodynamic", bound)
    } else {
        let couplings = sample_couplings(&spec, args.n_env, args.seed)?;
        let point = ModelPoint::new(args.theta, args.time, &couplings, args.frag)?;
        let r = precision_finite(&point, &ospec);
        let bound = qfi_closed_form(&point).value;
        (r, "finite", bound)
    };
    let report = serde_json::json!({
        "theta": args.theta,
        "time": args.time,
        "n_env": args.n_env,
        "frag": args.frag,
        "q": args.q,
        "seed": args.seed,
        "method": method,
        "variance_theta": result.variance_theta,
        "precision": result.precision,
        "mean_a": result.mean_a,
        "var_a": result.var_a,
        "qfi_bound": qfi_bound,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serialization")
    );
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            config,
            out,
            format,
        } => {
            cmd_sweep(&config, out, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Preset {
            name,
            seed,
            out,
            format,
        } => {
            cmd_preset(&name, seed, out, &format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { scope, json } => {
            let scope: VerifyScope = scope.parse()?;
            let report = verify::run(scope);
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Qfi(args) => {
            cmd_qfi(&args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Precision(args) => {
            cmd_precision(&args)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
