//! Resolving cos(200x²) — about 64 periods on [-1, 1] — from equispaced
//! samples.
//!
//! Oscillation sets a resolution budget: a subinterval must see enough
//! samples per local wavelength before convergence can start. At N = 40
//! the early rows are garbage (under-resolved), then the error collapses
//! by many orders of magnitude within a few doublings of K once the
//! local frequency h·ω_max drops below the frame's capacity. The rank
//! column barely moves: the online cost per subinterval is flat.
//!
//! Run with: cargo run --release --example oscillatory

use llf::{run_convergence, FrameConfig, TestFunction};

fn main() -> llf::Result<()> {
    let f = TestFunction::by_id("f5")?;
    println!("{}:", f.description());

    for degree in [15usize, 40] {
        let config = FrameConfig::new(degree, 6.0, 1.0, 1e-14)?;
        let rows = run_convergence(&f, &config, &[8, 16, 32, 64, 128])?;
        println!(
            "N = {degree} (m = {} samples per subinterval):",
            config.sample_count()
        );
        println!("{:>5} {:>7} {:>12} {:>5}", "K", "M", "E_M", "C");
        for row in &rows {
            println!(
                "{:>5} {:>7} {:>12.2e} {:>5}",
                row.subintervals, row.total_nodes, row.error, row.rank
            );
        }
        println!();
    }
    println!("note how N = 15 needs far more total samples M than N = 40");
    println!("to reach the same accuracy: higher local degree wins once");
    println!("the function oscillates.");
    Ok(())
}
