//! The ingestion invariant: sampling a function to a CSV file and
//! approximating from that file must match the direct callback path
//! bit-for-bit — shortest round-trip float formatting makes the file a
//! lossless transport.

use llf::{
    approximate_from_data, approximate_with, factorization_for, DataFile, FrameConfig, Partition,
    TestFunction,
};

#[test]
fn file_path_matches_callback_path_bitwise() {
    let f = TestFunction::by_id("f1").unwrap();
    let config = FrameConfig::new(15, 6.0, 1.0, 1e-14).unwrap();
    let fact = factorization_for(&config).unwrap();
    let (a, b) = f.domain();
    let k = 8;
    let partition = Partition::uniform(a, b, k).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f1.csv");
    DataFile::sample_on(|x| f.eval(x), &partition, config.sample_count())
        .unwrap()
        .save(&path)
        .unwrap();

    let loaded = DataFile::load(&path).unwrap();
    let from_file = approximate_from_data(&fact, loaded.xs(), loaded.values(), k).unwrap();
    let direct = approximate_with(&fact, &partition, |x| f.eval(x)).unwrap();

    for (k_idx, (lf, ld)) in from_file.locals().iter().zip(direct.locals()).enumerate() {
        for (j, (cf, cd)) in lf.coeffs().iter().zip(ld.coeffs()).enumerate() {
            assert_eq!(
                cf.to_bits(),
                cd.to_bits(),
                "coefficient [{k_idx}][{j}] differs between file and callback paths"
            );
        }
    }
    for i in 0..=200 {
        let x = a + (b - a) * i as f64 / 200.0;
        assert_eq!(
            from_file.evaluate(x).unwrap().to_bits(),
            direct.evaluate(x).unwrap().to_bits(),
            "evaluation at {x}"
        );
    }
}

#[test]
fn save_load_save_is_a_fixed_point() {
    let f = TestFunction::by_id("f8").unwrap();
    let partition = Partition::uniform(-1.0, 1.0, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("one.csv");
    let p2 = dir.path().join("two.csv");
    DataFile::sample_on(|x| f.eval(x), &partition, 16)
        .unwrap()
        .save(&p1)
        .unwrap();
    DataFile::load(&p1).unwrap().save(&p2).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn plain_uniform_grids_are_accepted_within_tolerance() {
    // A grid produced by the naive a + (b−a)i/(n−1) formula differs from
    // the partition's nodes by final-digit round-off only; ingestion must
    // accept it (the values then differ from the callback path by the
    // same round-off, so bit-exactness is not promised on this route).
    let f = TestFunction::by_id("f2").unwrap();
    let config = FrameConfig::new(15, 6.0, 1.0, 1e-14).unwrap();
    let fact = factorization_for(&config).unwrap();
    let k = 4;
    let count = k * 15 + 1;
    let file = DataFile::sample(|x| f.eval(x), -1.0, 1.0, count).unwrap();
    let approx = approximate_from_data(&fact, file.xs(), file.values(), k).unwrap();
    assert!(approx.max_error(|x| f.eval(x), 10).unwrap() < 1e-11);
}
