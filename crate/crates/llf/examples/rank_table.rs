//! Retained numerical rank of the reference factorization across local
//! frequencies, at γ = 1 (so m = N + 1), T = 6, ε = 1e-14.
//!
//! The retained rank C is what the online stage actually pays for:
//! each subinterval solve costs O(C·m). The table shows C growing far
//! slower than m — the redundancy of the frame is concentrated in
//! singular modes the truncation discards. The cost indicator m·C/ω
//! stays within a moderate band once the local frequency ω is not tiny.
//!
//! Run with: cargo run --release --example rank_table

use llf::{factorization_for, FrameConfig};

fn main() -> llf::Result<()> {
    let cases: &[(f64, usize)] = &[
        (0.1, 9),
        (0.25, 11),
        (0.5, 13),
        (1.0, 15),
        (2.0, 26),
        (4.0, 39),
        (8.0, 65),
        (16.0, 116),
    ];
    println!("{:>8} {:>5} {:>5} {:>10}", "omega", "m", "C", "m*C/omega");
    for &(omega, m) in cases {
        let config = FrameConfig::new(m - 1, 6.0, 1.0, 1e-14)?;
        assert_eq!(config.sample_count(), m);
        let fact = factorization_for(&config)?;
        let c = fact.retained_rank();
        println!(
            "{:>8} {:>5} {:>5} {:>10}",
            omega,
            m,
            c,
            m as f64 * c as f64 / omega
        );
    }
    Ok(())
}
