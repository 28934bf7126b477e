//! Spending a fixed sample budget: few wide subintervals at high degree,
//! or many narrow ones at low degree?
//!
//! The total node count M = K(m-1)+1 is held (approximately) constant
//! while the split between K and N varies. For analytic functions the
//! high-degree end wins decisively — spectral accuracy per subinterval
//! beats algebraic h-refinement — until a function's oscillation forces
//! enough samples per wavelength, which caps how wide a subinterval may
//! be. The sweet spot is function-dependent; the defaults (N = 15) are a
//! robust middle ground.
//!
//! Run with: cargo run --release --example fixed_budget

use llf::{approximate_with, factorization_for, FrameConfig, Partition, TestFunction};

fn main() -> llf::Result<()> {
    // (K, N) pairs with K·(N+1) ≈ 512 shared samples at γ = 1.
    let splits: &[(usize, usize)] = &[(128, 3), (64, 7), (32, 15), (16, 31), (8, 63), (4, 127)];

    for id in ["f2", "f9", "f5"] {
        let f = TestFunction::by_id(id)?;
        let (a, b) = f.domain();
        println!("{}:", f.description());
        println!("{:>5} {:>5} {:>7} {:>12} {:>5}", "K", "N", "M", "E_M", "C");
        for &(k, degree) in splits {
            let config = FrameConfig::new(degree, 6.0, 1.0, 1e-14)?;
            let fact = factorization_for(&config)?;
            let partition = Partition::uniform(a, b, k)?;
            let m_total = partition.total_nodes(config.sample_count());
            let approx = approximate_with(&fact, &partition, |x| f.eval(x))?;
            let e_m = approx.max_error(|x| f.eval(x), 10)?;
            println!(
                "{k:>5} {degree:>5} {m_total:>7} {e_m:>12.2e} {:>5}",
                fact.retained_rank()
            );
        }
        println!();
    }
    Ok(())
}
