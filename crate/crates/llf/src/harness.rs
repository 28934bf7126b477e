//! Parameter studies: convergence tables, extension-parameter sweeps,
//! rank tables, and the end-to-end piecewise pipeline, with CSV/JSON
//! emission.
//!
//! Study points are independent jobs and run on a small worker pool;
//! tables always come back in input order, so outputs are byte-stable
//! regardless of scheduling.

use std::env;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use crate::datafile::GRID_TOL;
use crate::error::{Error, Result};
use crate::legendre::FrameConfig;
use crate::offline::{factorization_for, ReferenceFactorization};
use crate::partition::{Partition, ReferenceNodes};
use crate::singularity::{
    correct, detect, localize_all, CorrectedApproximant, FactorizationCache, SingularityReport,
};
use crate::solver::{approximate_from_samples, approximate_with, PiecewiseApproximant};
use crate::testfn::{piecewise_value, TestFunction};

/// Refined-grid density used for every study error metric.
pub const GRID_FACTOR: usize = 10;

/// Target accuracy for threshold detection in sweeps.
pub const DEFAULT_TOLERANCE: f64 = 5e-13;

/// The rank-table study cases: local frequency ω paired with the sample
/// count m tuned for it (γ = 1, so the local degree is m − 1).
pub const RANK_TABLE_CASES: &[(f64, usize)] = &[
    (0.1, 9),
    (0.25, 11),
    (0.5, 13),
    (1.0, 15),
    (2.0, 26),
    (4.0, 39),
    (8.0, 65),
    (16.0, 116),
];

/// Maps `f` over `items` on a bounded worker pool; results come back in
/// input order no matter which worker finishes first.
fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let n = items.len();
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(n.max(1));
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                if tx.send((i, f(&items[i]))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        while let Ok((i, r)) = rx.recv() {
            slots[i] = Some(r);
        }
    });
    slots.into_iter().map(|s| s.expect("worker died")).collect()
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Subinterval count.
    pub subintervals: usize,
    /// Total distinct sample count M = K(m−1)+1.
    pub total_nodes: usize,
    /// Max error over the refined grid.
    pub error: f64,
    /// Retained rank of the shared factorization.
    pub rank: usize,
}

/// Sweeps the subinterval count for one function and configuration. The
/// factorization is built once; the K jobs run concurrently.
pub fn run_convergence(
    function: &TestFunction,
    config: &FrameConfig,
    k_values: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    if k_values.is_empty() {
        return Err(Error::InvalidArgument("no K values given".into()));
    }
    if k_values.contains(&0) {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let fact = factorization_for(config)?;
    let (a, b) = function.domain();
    let m = config.sample_count();
    let rank = fact.retained_rank();
    let rows = parallel_map(k_values, |&k| -> Result<ConvergenceRow> {
        let partition = Partition::uniform(a, b, k)?;
        let approx = approximate_with(&fact, &partition, |x| function.eval(x))?;
        Ok(ConvergenceRow {
            subintervals: k,
            total_nodes: partition.total_nodes(m),
            error: approx.max_error(|x| function.eval(x), GRID_FACTOR)?,
            rank,
        })
    });
    rows.into_iter().collect()
}

/// Writes `K,M,E_M,C_delta` rows.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], w: &mut W) -> Result<()> {
    writeln!(w, "K,M,E_M,C_delta")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.subintervals, r.total_nodes, r.error, r.rank
        )?;
    }
    Ok(())
}

/// True when the error column decreases monotonically up to the
/// round-off plateau: each step may rise by at most `uptick` over the
/// larger of the previous error and the plateau `floor`.
pub fn convergence_is_monotone(rows: &[ConvergenceRow], floor: f64, uptick: f64) -> bool {
    rows.windows(2)
        .all(|p| p[1].error <= uptick * p[0].error.max(floor))
}

/// Which configuration parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Extension half-width T.
    Extension,
    /// Local degree N.
    Degree,
    /// Subinterval count K.
    Subintervals,
    /// Oversampling ratio γ.
    Oversampling,
}

impl SweepVariable {
    /// CSV column name of the swept value.
    pub fn column(&self) -> &'static str {
        match self {
            SweepVariable::Extension => "T",
            SweepVariable::Degree => "N",
            SweepVariable::Subintervals => "K",
            SweepVariable::Oversampling => "gamma",
        }
    }
}

/// A parameter sweep: one variable over a value list, everything else
/// fixed.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// Strictly increasing values of the swept variable.
    pub values: Vec<f64>,
    pub function: TestFunction,
    /// Fixed local degree (ignored when sweeping Degree).
    pub degree: usize,
    /// Fixed subinterval count (ignored when sweeping Subintervals).
    pub subintervals: usize,
    /// Fixed extension (ignored when sweeping Extension).
    pub extension: f64,
    /// Fixed oversampling ratio (ignored when sweeping Oversampling).
    pub oversampling: f64,
    pub truncation: f64,
    /// Target accuracy for threshold detection.
    pub tolerance: f64,
}

impl SweepSpec {
    /// A sweep with the default fixed parameters (N = 15, K = 8, T = 6,
    /// γ = 1, ε = 1e-14, tolerance 5e-13); override fields as needed.
    pub fn new(variable: SweepVariable, values: Vec<f64>, function: TestFunction) -> Self {
        SweepSpec {
            variable,
            values,
            function,
            degree: 15,
            subintervals: 8,
            extension: 6.0,
            oversampling: 1.0,
            truncation: 1e-14,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("sweep has no values".into()));
        }
        if self.values.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidArgument(
                "sweep values must be strictly increasing".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    fn config_at(&self, value: f64) -> Result<(FrameConfig, usize)> {
        let integral = |v: f64, what: &str| -> Result<usize> {
            let r = v.round();
            if !(r >= 1.0) || (v - r).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "{what} must be a positive integer, got {v}"
                )));
            }
            Ok(r as usize)
        };
        let (degree, k, t, gamma) = match self.variable {
            SweepVariable::Extension => (self.degree, self.subintervals, value, self.oversampling),
            SweepVariable::Degree => (
                integral(value, "degree")?,
                self.subintervals,
                self.extension,
                self.oversampling,
            ),
            SweepVariable::Subintervals => (
                self.degree,
                integral(value, "subinterval count")?,
                self.extension,
                self.oversampling,
            ),
            SweepVariable::Oversampling => (self.degree, self.subintervals, self.extension, value),
        };
        Ok((FrameConfig::new(degree, t, gamma, self.truncation)?, k))
    }
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub error: f64,
    pub rank: usize,
}

/// Sweep table plus detected stability thresholds.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// First swept value meeting the tolerance, if any.
    pub first_pass: Option<f64>,
    /// Last swept value meeting the tolerance, if any.
    pub last_pass: Option<f64>,
}

/// Runs any single-variable sweep; points execute concurrently.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let (a, b) = spec.function.domain();
    let rows: Result<Vec<SweepRow>> = parallel_map(&spec.values, |&v| -> Result<SweepRow> {
        let (config, k) = spec.config_at(v)?;
        let fact = factorization_for(&config)?;
        let partition = Partition::uniform(a, b, k)?;
        let approx = approximate_with(&fact, &partition, |x| spec.function.eval(x))?;
        Ok(SweepRow {
            value: v,
            error: approx.max_error(|x| spec.function.eval(x), GRID_FACTOR)?,
            rank: fact.retained_rank(),
        })
    })
    .into_iter()
    .collect();
    let rows = rows?;
    let first_pass = rows
        .iter()
        .find(|r| r.error <= spec.tolerance)
        .map(|r| r.value);
    let last_pass = rows
        .iter()
        .rev()
        .find(|r| r.error <= spec.tolerance)
        .map(|r| r.value);
    Ok(SweepResult {
        rows,
        first_pass,
        last_pass,
    })
}

/// Extension-parameter sweep: the swept variable must be T. The result's
/// `first_pass`/`last_pass` are the stability interval edges `[T₁, T₂]`
/// on the sweep grid.
pub fn run_t_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.variable != SweepVariable::Extension {
        return Err(Error::InvalidArgument(
            "extension sweep requires variable T".into(),
        ));
    }
    run_sweep(spec)
}

/// Writes `<variable>,E_M` rows.
pub fn write_sweep_csv<W: Write>(
    variable: SweepVariable,
    rows: &[SweepRow],
    w: &mut W,
) -> Result<()> {
    writeln!(w, "{},E_M", variable.column())?;
    for r in rows {
        writeln!(w, "{},{}", r.value, r.error)?;
    }
    Ok(())
}

/// One rank-table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankRow {
    pub omega: f64,
    pub sample_count: usize,
    pub rank: usize,
    /// Online cost indicator m·C_Δ/ω.
    pub cost_indicator: f64,
}

/// Factorizes each (ω, m) case at γ = 1 (local degree m − 1) and tabulates
/// the retained rank with the online cost indicator.
pub fn run_rank_table(
    cases: &[(f64, usize)],
    extension: f64,
    epsilon: f64,
) -> Result<Vec<RankRow>> {
    if cases.is_empty() {
        return Err(Error::InvalidArgument("no rank-table cases".into()));
    }
    let rows = parallel_map(cases, |&(omega, m)| -> Result<RankRow> {
        if !(omega > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "local frequency must be positive, got {omega}"
            )));
        }
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "sample count must be at least 2, got {m}"
            )));
        }
        let config = FrameConfig::new(m - 1, extension, 1.0, epsilon)?;
        let fact = factorization_for(&config)?;
        let rank = fact.retained_rank();
        Ok(RankRow {
            omega,
            sample_count: m,
            rank,
            cost_indicator: m as f64 * rank as f64 / omega,
        })
    });
    rows.into_iter().collect()
}

/// Writes `omega,m,C_delta,m_C_delta_over_omega` rows.
pub fn write_rank_csv<W: Write>(rows: &[RankRow], w: &mut W) -> Result<()> {
    writeln!(w, "omega,m,C_delta,m_C_delta_over_omega")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.omega, r.sample_count, r.rank, r.cost_indicator
        )?;
    }
    Ok(())
}

/// Outcome of the approximate → detect → localize → correct pipeline on
/// the piecewise-smooth test family.
#[derive(Debug)]
pub struct PipelineReport {
    pub report: SingularityReport,
    pub approximant: PiecewiseApproximant,
    /// Present when at least one window was localized and corrected.
    pub corrected: Option<CorrectedApproximant>,
    pub uncorrected_error: f64,
    pub corrected_error: Option<f64>,
    /// Per-patch |left − right| at the split points.
    pub interface_mismatch: Vec<f64>,
}

impl PipelineReport {
    /// Error reduction factor achieved by correction.
    pub fn improvement(&self) -> Option<f64> {
        self.corrected_error.map(|c| self.uncorrected_error / c)
    }

    /// JSON summary: detection, localization, and pre/post errors.
    pub fn to_json(&self) -> String {
        let windows: Vec<serde_json::Value> = self
            .report
            .windows()
            .iter()
            .map(|w| serde_json::json!({ "first": w.first(), "last": w.last() }))
            .collect();
        serde_json::json!({
            "version": 1u32,
            "degenerate": self.report.degenerate(),
            "etas": self.report.etas(),
            "median_eta": self.report.median_eta(),
            "flagged": self.report.flagged(),
            "windows": windows,
            "localized_points": self.report.localized_points(),
            "uncorrected_error": self.uncorrected_error,
            "corrected_error": self.corrected_error,
            "improvement": self.improvement().filter(|v| v.is_finite()),
            "interface_mismatch": self.interface_mismatch,
        })
        .to_string()
    }
}

/// Runs the full singularity pipeline on the piecewise family with
/// break locations ξ, ζ. Detection that finds nothing (the aligned
/// case) reports the uncorrected error and no correction.
pub fn run_piecewise_pipeline(
    xi: f64,
    zeta: f64,
    partition: &Partition,
    config: &FrameConfig,
    tau: f64,
) -> Result<PipelineReport> {
    let (a, b) = partition.domain();
    if !(a < xi && xi < zeta && zeta < b) {
        return Err(Error::InvalidArgument(format!(
            "break points must satisfy {a} < xi < zeta < {b}, got xi = {xi}, zeta = {zeta}"
        )));
    }
    let f = |x: f64| piecewise_value(xi, zeta, x);
    let fact = factorization_for(config)?;
    let reference = ReferenceNodes::new(config.sample_count())?;
    let samples: Vec<f64> = partition
        .sample_nodes(&reference)
        .into_iter()
        .map(f)
        .collect();
    let approx = approximate_from_samples(&fact, partition, &samples)?;
    let uncorrected_error = approx.max_error(f, GRID_FACTOR)?;

    let mut report = detect(&approx, tau)?;
    if report.windows().is_empty() {
        return Ok(PipelineReport {
            report,
            approximant: approx,
            corrected: None,
            corrected_error: None,
            uncorrected_error,
            interface_mismatch: Vec::new(),
        });
    }

    let cache = FactorizationCache::new(*config);
    localize_all(&mut report, &approx, &samples, &cache)?;
    let corrected = correct(&approx, &report, &samples, &cache)?;
    let corrected_error = corrected.max_error(f, GRID_FACTOR)?;
    let interface_mismatch = corrected.interface_mismatch()?;
    Ok(PipelineReport {
        report,
        approximant: approx,
        corrected: Some(corrected),
        corrected_error: Some(corrected_error),
        uncorrected_error,
        interface_mismatch,
    })
}

/// Directory for persisted offline factorizations: `LLF_CACHE_DIR` or
/// `llf-cache` under the system temp directory.
pub fn cache_dir() -> PathBuf {
    match env::var_os("LLF_CACHE_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => env::temp_dir().join("llf-cache"),
    }
}

/// File name a configuration's factorization is cached under.
pub fn cache_file_name(config: &FrameConfig) -> String {
    format!(
        "fact-N{}-T{:e}-g{:e}-eps{:e}.llf",
        config.degree(),
        config.extension(),
        config.oversampling(),
        config.truncation()
    )
}

/// Loads the cached factorization for `config`, or builds and caches
/// it. A cache entry that fails validation or was built for different
/// parameters is rebuilt and overwritten.
pub fn cached_factorization(config: &FrameConfig) -> Result<ReferenceFactorization> {
    let dir = cache_dir();
    let path = dir.join(cache_file_name(config));
    if path.exists() {
        if let Ok(fact) = ReferenceFactorization::load(&path) {
            if fact.config() == config {
                return Ok(fact);
            }
        }
    }
    let fact = factorization_for(config)?;
    std::fs::create_dir_all(&dir)?;
    fact.save(&path)?;
    Ok(fact)
}

/// Approximates from an equispaced data file: the grid must tile into
/// `k` subintervals of `m` samples sharing their endpoints, i.e. hold
/// exactly K(m−1)+1 points.
pub fn approximate_from_data(
    fact: &ReferenceFactorization,
    xs: &[f64],
    values: &[f64],
    k: usize,
) -> Result<PiecewiseApproximant> {
    let m = fact.config().sample_count();
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let expected = k * (m - 1) + 1;
    if xs.len() != expected {
        return Err(Error::InvalidData(format!(
            "data has {} samples; K = {k} subintervals of m = {m} need K(m-1)+1 = {expected}",
            xs.len()
        )));
    }
    let partition = Partition::uniform(xs[0], xs[xs.len() - 1], k)?;
    // The file's grid must coincide with the partition's sampling nodes.
    let reference = ReferenceNodes::new(m)?;
    let nodes = partition.sample_nodes(&reference);
    let span = xs[xs.len() - 1] - xs[0];
    for (x, node) in xs.iter().zip(&nodes) {
        if (x - node).abs() > GRID_TOL * span {
            return Err(Error::InvalidData(format!(
                "data grid point {x} does not lie on the sampling grid (expected {node})"
            )));
        }
    }
    approximate_from_samples(fact, &partition, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> FrameConfig {
        FrameConfig::new(15, 6.0, 1.0, 1e-14).unwrap()
    }

    #[test]
    fn convergence_rows_keep_input_order_and_metadata() {
        let f2 = TestFunction::by_id("f2").unwrap();
        let rows = run_convergence(&f2, &defaults(), &[2, 4, 8]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].subintervals, 2);
        assert_eq!(rows[2].subintervals, 8);
        assert_eq!(rows[1].total_nodes, 4 * 15 + 1);
        assert!(rows.iter().all(|r| r.rank == rows[0].rank));
        assert!(convergence_is_monotone(&rows, 5e-13, 10.0));
    }

    #[test]
    fn convergence_rejects_empty_and_zero_k() {
        let f2 = TestFunction::by_id("f2").unwrap();
        assert!(run_convergence(&f2, &defaults(), &[]).is_err());
        assert!(run_convergence(&f2, &defaults(), &[2, 0]).is_err());
    }

    #[test]
    fn convergence_csv_is_stable() {
        let f2 = TestFunction::by_id("f2").unwrap();
        let rows = run_convergence(&f2, &defaults(), &[2, 4]).unwrap();
        let mut a = Vec::new();
        write_convergence_csv(&rows, &mut a).unwrap();
        let rows2 = run_convergence(&f2, &defaults(), &[2, 4]).unwrap();
        let mut b = Vec::new();
        write_convergence_csv(&rows2, &mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a)
            .unwrap()
            .starts_with("K,M,E_M,C_delta\n2,31,"));
    }

    #[test]
    fn monotonicity_allows_plateau_noise_only() {
        let mk = |errors: &[f64]| -> Vec<ConvergenceRow> {
            errors
                .iter()
                .map(|&e| ConvergenceRow {
                    subintervals: 1,
                    total_nodes: 1,
                    error: e,
                    rank: 1,
                })
                .collect()
        };
        assert!(convergence_is_monotone(
            &mk(&[1e-3, 1e-6, 1e-12]),
            5e-13,
            10.0
        ));
        // Uptick at the floor is noise.
        assert!(convergence_is_monotone(
            &mk(&[1e-6, 1e-13, 8e-13]),
            5e-13,
            10.0
        ));
        // Uptick above the floor is a regression.
        assert!(!convergence_is_monotone(
            &mk(&[1e-3, 1e-6, 1e-4]),
            5e-13,
            10.0
        ));
    }

    #[test]
    fn sweep_validates_its_values() {
        let f2 = TestFunction::by_id("f2").unwrap();
        let spec = SweepSpec::new(SweepVariable::Extension, vec![], f2.clone());
        assert!(run_sweep(&spec).is_err());
        let spec = SweepSpec::new(SweepVariable::Extension, vec![2.0, 2.0], f2.clone());
        assert!(run_sweep(&spec).is_err());
        let spec = SweepSpec::new(SweepVariable::Degree, vec![2.5], f2);
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn subinterval_sweep_matches_convergence_run() {
        let f2 = TestFunction::by_id("f2").unwrap();
        let mut spec = SweepSpec::new(SweepVariable::Subintervals, vec![2.0, 4.0], f2.clone());
        spec.degree = 15;
        let sweep = run_sweep(&spec).unwrap();
        let conv = run_convergence(&f2, &defaults(), &[2, 4]).unwrap();
        assert_eq!(sweep.rows[0].error.to_bits(), conv[0].error.to_bits());
        assert_eq!(sweep.rows[1].error.to_bits(), conv[1].error.to_bits());
    }

    #[test]
    fn threshold_detection_finds_first_and_last_pass() {
        let f2 = TestFunction::by_id("f2").unwrap();
        let mut spec = SweepSpec::new(SweepVariable::Extension, vec![2.0, 4.0, 6.0], f2);
        spec.subintervals = 8;
        spec.tolerance = 5e-13;
        let result = run_t_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 3);
        // f2 with K=8, N=15 is accurate at every one of these T.
        assert_eq!(result.first_pass, Some(2.0));
        assert_eq!(result.last_pass, Some(6.0));
    }

    #[test]
    fn t_sweep_requires_the_extension_variable() {
        let f2 = TestFunction::by_id("f2").unwrap();
        let spec = SweepSpec::new(SweepVariable::Degree, vec![10.0, 15.0], f2);
        assert!(run_t_sweep(&spec).is_err());
    }

    #[test]
    fn rank_table_reproduces_the_reference_counts() {
        let rows = run_rank_table(RANK_TABLE_CASES, 6.0, 1e-14).unwrap();
        let expected = [13usize, 17, 20, 26, 35];
        for (row, want) in rows[3..].iter().zip(expected) {
            assert!(
                row.rank.abs_diff(want) <= 1,
                "m = {}: rank {} vs expected {want} ± 1",
                row.sample_count,
                row.rank
            );
        }
        let r15 = &rows[3];
        assert_eq!(r15.sample_count, 15);
        assert!((r15.cost_indicator - 15.0 * r15.rank as f64).abs() < 1e-12);
    }

    #[test]
    fn pipeline_report_serializes_with_version() {
        let partition = Partition::uniform(0.0, 1.0, 20).unwrap();
        let report = run_piecewise_pipeline(0.225, 0.775, &partition, &defaults(), 10.0).unwrap();
        let json = report.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["version"], 1);
        assert_eq!(parsed["flagged"].as_array().unwrap().len(), 2);
        assert_eq!(parsed["localized_points"].as_array().unwrap().len(), 2);
        assert!(parsed["improvement"].as_f64().unwrap() >= 1e3);
    }

    #[test]
    fn pipeline_validates_break_placement() {
        let partition = Partition::uniform(0.0, 1.0, 20).unwrap();
        assert!(run_piecewise_pipeline(0.8, 0.2, &partition, &defaults(), 10.0).is_err());
        assert!(run_piecewise_pipeline(0.0, 0.5, &partition, &defaults(), 10.0).is_err());
    }

    #[test]
    fn aligned_case_reports_no_correction() {
        let partition = Partition::uniform(0.0, 1.0, 20).unwrap();
        let report = run_piecewise_pipeline(0.2, 0.75, &partition, &defaults(), 10.0).unwrap();
        assert!(report.report.flagged().is_empty());
        assert!(report.corrected.is_none());
        assert!(report.uncorrected_error <= 5e-12);
        assert_eq!(report.improvement(), None);
    }

    #[test]
    fn data_grid_must_match_the_sampling_grid() {
        let config = defaults();
        let fact = factorization_for(&config).unwrap();
        let m = config.sample_count();
        let k = 4;
        let count = k * (m - 1) + 1;
        let xs: Vec<f64> = (0..count).map(|i| i as f64 / (count - 1) as f64).collect();
        let values: Vec<f64> = xs.iter().map(|&x| x * x).collect();
        let approx = approximate_from_data(&fact, &xs, &values, k).unwrap();
        assert!(approx.max_error(|x| x * x, 10).unwrap() < 1e-10);

        // Wrong count for this K.
        assert!(approximate_from_data(&fact, &xs[..count - 1], &values[..count - 1], k).is_err());
    }

    #[test]
    fn cache_round_trip_reuses_the_saved_factorization() {
        let dir = tempfile::tempdir().unwrap();
        // Env var is process-global: serialize against other tests via a lock.
        static ENV_LOCK: std::sync::Mutex<()> = std::sync::Mutex::new(());
        let _guard = ENV_LOCK.lock().unwrap();
        std::env::set_var("LLF_CACHE_DIR", dir.path());
        let config = defaults();
        let first = cached_factorization(&config).unwrap();
        let path = cache_dir().join(cache_file_name(&config));
        assert!(path.exists());
        let second = cached_factorization(&config).unwrap();
        std::env::remove_var("LLF_CACHE_DIR");
        assert_eq!(first.singular_values(), second.singular_values());
        assert_eq!(first.retained_rank(), second.retained_rank());
    }
}
