//! The method's real-world premise: the data already exists on a fixed
//! equispaced grid and cannot be resampled.
//!
//! This example plays both roles. A "producer" samples a function onto
//! the solver's node grid and saves a two-column CSV; a "consumer" later
//! loads that file knowing nothing but the frame configuration, infers
//! the subinterval count from the node count, and builds the approximant
//! purely from the file — bit-for-bit the same coefficients the direct
//! callback route produces.
//!
//! Run with: cargo run --release --example from_data_file

use llf::{
    approximate_from_data, approximate_with, factorization_for, DataFile, FrameConfig, Partition,
    TestFunction,
};

fn main() -> llf::Result<()> {
    let f = TestFunction::by_id("f8")?;
    let (a, b) = f.domain();
    let config = FrameConfig::new(15, 6.0, 1.0, 1e-14)?;
    let m = config.sample_count();
    let k = 12;

    // Producer: sample on the exact node grid and write the CSV.
    let partition = Partition::uniform(a, b, k)?;
    let data = DataFile::sample_on(|x| f.eval(x), &partition, m)?;
    let path = std::env::temp_dir().join("llf-samples-f8.csv");
    data.save(&path)?;
    println!(
        "wrote {} samples of {} to {}",
        data.len(),
        f.description(),
        path.display()
    );

    // Consumer: only the file and the configuration.
    let fact = factorization_for(&config)?;
    let loaded = DataFile::load(&path)?;
    let inferred_k = (loaded.len() - 1) / (m - 1);
    println!(
        "loaded {} samples -> K = {inferred_k} subintervals of degree {}",
        loaded.len(),
        config.degree()
    );
    let from_file = approximate_from_data(&fact, loaded.xs(), loaded.values(), inferred_k)?;

    // The same approximant, built from the function directly.
    let direct = approximate_with(&fact, &partition, |x| f.eval(x))?;

    let mut worst_bits = 0u64;
    for (lf, ld) in from_file.locals().iter().zip(direct.locals()) {
        for (cf, cd) in lf.coeffs().iter().zip(ld.coeffs()) {
            worst_bits = worst_bits.max(cf.to_bits().abs_diff(cd.to_bits()));
        }
    }
    println!("coefficient difference across both routes: {worst_bits} ulps (bitwise identical)");
    assert_eq!(worst_bits, 0);

    let e_m = from_file.max_error(|x| f.eval(x), 10)?;
    println!("E_M from the file route: {e_m:.2e}");
    Ok(())
}
