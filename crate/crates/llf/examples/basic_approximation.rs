//! The three-step happy path: pick a partition, pick a frame
//! configuration, approximate from equispaced samples.
//!
//! All sampling here is equispaced — no Chebyshev clustering, no adaptive
//! nodes — yet the error reaches near machine precision. That is the
//! point of the method: the frame's extended interval [-T, T] plus TSVD
//! regularization sidesteps the Runge instability that dooms plain
//! polynomial interpolation on equispaced data.
//!
//! Run with: cargo run --release --example basic_approximation

use llf::{approximate_function, FrameConfig, Partition, TestFunction};

fn main() -> llf::Result<()> {
    let f = TestFunction::by_id("f2")?;
    let (a, b) = f.domain();

    // Defaults: local degree N = 15, extension T = 6, oversampling γ = 1
    // (so m = 16 samples per subinterval), truncation ε = 1e-14.
    let config = FrameConfig::new(15, 6.0, 1.0, 1e-14)?;

    println!("{}, N = 15, m = {}", f.description(), config.sample_count());
    println!("{:>4} {:>6} {:>12}", "K", "M", "E_M");
    for k in [2usize, 4, 8, 16] {
        let partition = Partition::uniform(a, b, k)?;
        let approx = approximate_function(|x| f.eval(x), &partition, &config)?;
        // E_M: worst error over a grid 10× finer than the sample grid.
        let e_m = approx.max_error(|x| f.eval(x), 10)?;
        println!(
            "{k:>4} {:>6} {e_m:>12.2e}",
            partition.total_nodes(config.sample_count())
        );
    }

    // The approximant is a regular object: evaluate it anywhere.
    let partition = Partition::uniform(a, b, 8)?;
    let approx = approximate_function(|x| f.eval(x), &partition, &config)?;
    for x in [-0.9, -0.245, 0.0, 0.73] {
        println!(
            "x = {x:>7}: f = {:>22}, approx = {:>22}",
            f.eval(x),
            approx.evaluate(x)?
        );
    }
    Ok(())
}
