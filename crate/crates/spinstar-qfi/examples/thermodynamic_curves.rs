//! Thermodynamic-limit comparison of optimal and static-local measurement:
//! QFI grows exponentially fast toward its cap while the S_y precision
//! closes in only algebraically, at a rate set by tau_Y/tau_F.
//!
//! Run with: cargo run --example thermodynamic_curves

use spinstar_qfi::sweep::fig1b_curves;

fn main() {
    let ratios = [1.0, 2.0, 5.0];
    let rows = fig1b_curves(&ratios).expect("curves");

    println!("thermodynamic limit, time in units of tau_F\n");
    println!(
        "{:>6} {:>10} {:>12} {:>12} {:>12}",
        "t", "QFI", "prec r=1", "prec r=2", "prec r=5"
    );
    // rows are grouped per ratio, 200 points each, on the same t grid
    for i in (0..200).step_by(20) {
        let t = rows[i].t;
        let qfi = rows[i].qfi_thermo.unwrap();
        let p: Vec<f64> = (0..3)
            .map(|r| rows[r * 200 + i].precision_thermo.unwrap())
            .collect();
        println!(
            "{t:>6.2} {qfi:>10.5} {:>12.5} {:>12.5} {:>12.5}",
            p[0], p[1], p[2]
        );
    }

    println!("\nPrecision follows 4/(1 + (tau_Y/t)^2): even the suboptimal static");
    println!("observable reaches the maximum precision eventually, just on the");
    println!("slower tau_Y clock. The CSV behind this table is");
    println!("`spinstar-qfi preset fig1b`.");
}
