//! The redundancy plateau: information about the system saturates once an
//! observer's fragment passes a small fraction of the environment — the
//! operational signature of classical objectivity.
//!
//! A reduced-realization version of the plateau preset (the full 2000-sample
//! run is `spinstar-qfi preset plateau`).
//!
//! Run with: cargo run --example redundancy_plateau

use spinstar_qfi::spinstar::GaussianCouplingSpec;
use spinstar_qfi::sweep::{run_sweep, AxisSpec, GridSpec, OutputSpec, Quantity, SweepConfig};

fn main() {
    let config = SweepConfig {
        n_env: 30,
        realizations: 200,
        master_seed: 0,
        ensemble: GaussianCouplingSpec {
            jmean: 0.5,
            jstd: 0.5,
        },
        grid: GridSpec {
            t: AxisSpec::List(vec![3.0]),
            f: None,
            frag: Some((0..=30).step_by(2).collect()),
            theta: vec![std::f64::consts::FRAC_PI_4],
            q: vec![0.0],
        },
        quantities: vec![
            Quantity::QfiClosed,
            Quantity::QfiThermo,
            Quantity::PrecisionFinite,
            Quantity::PrecisionThermo,
        ],
        output: OutputSpec::default(),
    };

    let rows = run_sweep(&config).expect("sweep");
    println!("redundancy plateau: N = 30, t = 3, 200 realizations\n");
    println!(
        "{:>5} {:>4} {:>10} {:>8} {:>12} {:>10} {:>12}",
        "f", "|F|", "QFI mean", "std", "QFI thermo", "prec mean", "prec thermo"
    );
    for row in rows.iter().filter(|r| r.realization == -1) {
        println!(
            "{:>5.3} {:>4} {:>10.4} {:>8.4} {:>12.4} {:>10.4} {:>12.4}",
            row.f,
            row.frag,
            row.qfi_closed.unwrap(),
            row.qfi_closed_std.unwrap(),
            row.qfi_thermo.unwrap(),
            row.precision_finite.unwrap(),
            row.precision_thermo.unwrap(),
        );
    }

    println!("\nThe mean QFI saturates near its cap of 4 by f ~ 0.3: a third of the");
    println!("environment already carries essentially all accessible information,");
    println!("and every further observer reads out the same record.");
}
