//! A small disorder-averaged sweep assembled in code: grid over (t, f),
//! several coupling realizations, CSV on stdout.
//!
//! The same sweep can be run from the command line with a TOML config; see
//! examples/configs/demo_sweep.toml and the README.
//!
//! Run with: cargo run --example disorder_sweep

use spinstar_qfi::spinstar::GaussianCouplingSpec;
use spinstar_qfi::sweep::{
    render, run_sweep, AxisSpec, GridSpec, OutputFormat, OutputSpec, Quantity, SweepConfig,
};

fn main() {
    let config = SweepConfig {
        n_env: 25,
        realizations: 5,
        master_seed: 2024,
        ensemble: GaussianCouplingSpec {
            jmean: 0.5,
            jstd: 0.5,
        },
        grid: GridSpec {
            t: AxisSpec::Range {
                start: 0.0,
                stop: 4.0,
                points: 9,
            },
            f: Some(vec![0.2]),
            frag: None,
            theta: vec![std::f64::consts::FRAC_PI_4],
            q: vec![0.0],
        },
        quantities: vec![
            Quantity::QfiClosed,
            Quantity::QfiThermo,
            Quantity::PrecisionFinite,
            Quantity::Coherence,
        ],
        output: OutputSpec::default(),
    };

    let rows = run_sweep(&config).expect("sweep");
    let csv = render(&rows, OutputFormat::Csv).expect("render");
    print!("{}", String::from_utf8(csv).expect("utf-8"));

    eprintln!();
    eprintln!("# rows with realization >= 0 are single realizations (seed column");
    eprintln!("# reproduces each one); realization = -1 rows carry mean and std.");
}
