//! How large must the frame's extended interval [-T, T] be?
//!
//! Sweeping T for a fixed hard target shows the stability transition:
//! below a threshold the restricted Legendre system cannot represent the
//! samples accurately (error stuck near O(1)); above it the error drops
//! to the truncation floor and stays there. More oversampling (γ = 3)
//! pays for itself by moving the threshold to much smaller T, i.e. a
//! far less redundant — cheaper — frame.
//!
//! Run with: cargo run --release --example extension_sweep

use llf::{run_sweep, SweepSpec, SweepVariable, TestFunction};

fn main() -> llf::Result<()> {
    let tone = TestFunction::sine(40.0)?;

    println!("sin(40x), K = 4, N = 150, target E_M ≤ 5e-13");
    // γ = 3 triples the sample count, so its transition sits well below
    // T = 2.4 and the sweep need not go further.
    for (gamma, t_max) in [(1.0f64, 6.0f64), (3.0, 2.4)] {
        let count = ((t_max - 1.0) / 0.2).round() as usize;
        let values: Vec<f64> = (0..=count).map(|i| 1.0 + 0.2 * i as f64).collect();
        let mut spec = SweepSpec::new(SweepVariable::Extension, values, tone.clone());
        spec.degree = 150;
        spec.subintervals = 4;
        spec.oversampling = gamma;
        spec.tolerance = 5e-13;
        let result = run_sweep(&spec)?;

        println!("γ = {gamma}:");
        println!("{:>6} {:>12}", "T", "E_M");
        for row in &result.rows {
            let mark = if row.error <= spec.tolerance {
                "  <- meets target"
            } else {
                ""
            };
            println!("{:>6.1} {:>12.2e}{mark}", row.value, row.error);
        }
        match result.first_pass {
            Some(t) => println!("smallest passing T at γ = {gamma}: {t:.1}\n"),
            None => println!("target never met at γ = {gamma}\n"),
        }
    }
    Ok(())
}
