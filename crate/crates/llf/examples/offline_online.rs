//! The offline/online split that makes the method cheap in practice.
//!
//! Everything expensive — assembling the reference sampling matrix and
//! its SVD — depends only on (N, T, γ, ε), never on the function, the
//! domain, or the subinterval count. Factor once offline, then every
//! subinterval of every function reuses the same truncated factors; an
//! online solve is two small matrix-vector products.
//!
//! Run with: cargo run --release --example offline_online

use std::time::Instant;

use llf::{approximate_with, factorization_for, FrameConfig, Partition, TestFunction};

fn main() -> llf::Result<()> {
    let config = FrameConfig::new(15, 6.0, 1.0, 1e-14)?;

    let t0 = Instant::now();
    let fact = factorization_for(&config)?;
    let offline = t0.elapsed();
    println!(
        "offline: m = {}, retained rank C = {} of {} columns ({offline:.2?})",
        config.sample_count(),
        fact.retained_rank(),
        config.degree() + 1,
    );

    // The same factorization serves every function and every partition.
    let t1 = Instant::now();
    let mut solves = 0usize;
    for f in TestFunction::all() {
        if matches!(f.id(), "f4" | "f5" | "f6") {
            continue; // highly oscillatory: they need a larger N (see the oscillatory example)
        }
        let (a, b) = f.domain();
        for k in [4usize, 16, 64] {
            let partition = Partition::uniform(a, b, k)?;
            let approx = approximate_with(&fact, &partition, |x| f.eval(x))?;
            solves += k;
            if k == 64 {
                let e_m = approx.max_error(|x| f.eval(x), 10)?;
                println!("  {:<42} K = {k:>3}: E_M = {e_m:.2e}", f.description());
            }
        }
    }
    let online = t1.elapsed();
    println!("online: {solves} local solves plus error grids in {online:.2?}");

    // The factorization serializes; a later process can skip the SVD.
    let dir = std::env::temp_dir().join("llf-offline-online-example");
    std::fs::create_dir_all(&dir).map_err(llf::Error::from)?;
    let path = dir.join("reference.llf");
    fact.save(&path)?;
    let reloaded = llf::ReferenceFactorization::load(&path)?;
    assert_eq!(reloaded.retained_rank(), fact.retained_rank());
    println!("factorization round-tripped through {}", path.display());
    Ok(())
}
