//! Fixed-degree h-refinement: hold N and halve the subinterval width.
//!
//! For a smooth function the error drops at the fixed algebraic rate
//! O(h^{N+1}) until it hits the accuracy floor set by the truncation
//! tolerance, then sits flat — refining further buys nothing, which is
//! exactly the regularization trade: stability in exchange for a floor
//! near ε instead of machine epsilon itself.
//!
//! Writes the table as CSV next to the terminal output, the same format
//! the `llf converge` subcommand emits.
//!
//! Run with: cargo run --release --example convergence_study

use llf::{run_convergence, write_convergence_csv, FrameConfig, TestFunction};

fn main() -> llf::Result<()> {
    let f = TestFunction::by_id("f3")?;
    let config = FrameConfig::new(15, 6.0, 1.0, 1e-14)?;
    let ks = [2usize, 4, 8, 16, 32, 64, 128];

    let rows = run_convergence(&f, &config, &ks)?;

    println!("{} with N = 15:", f.description());
    println!(
        "{:>5} {:>7} {:>12} {:>8} {:>8}",
        "K", "M", "E_M", "rate", "C"
    );
    let mut prev: Option<f64> = None;
    for row in &rows {
        // Observed order: log2(E_prev/E) per halving of h.
        let rate = prev
            .map(|p| format!("{:.1}", (p / row.error).log2()))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>5} {:>7} {:>12.2e} {:>8} {:>8}",
            row.subintervals, row.total_nodes, row.error, rate, row.rank
        );
        prev = Some(row.error);
    }

    let path = std::env::temp_dir().join("llf-convergence-f3.csv");
    let mut out = std::fs::File::create(&path).map_err(llf::Error::from)?;
    write_convergence_csv(&rows, &mut out)?;
    println!("CSV written to {}", path.display());
    Ok(())
}
