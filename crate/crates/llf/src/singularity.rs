//! Detect–localize–correct workflow for derivative singularities.
//!
//! A continuous function with a kink (jump in f′) or curvature break
//! (jump in f″) inside a subinterval forces the frame fit there to spend
//! enormous coefficient energy, so the per-subinterval energy
//! `η_k = ‖c_k‖₂` spikes by orders of magnitude against the smooth
//! background. Detection thresholds η against the median; localization
//! replays one-sided fits inside a window around each flagged
//! subinterval, watching where the left-anchored and right-anchored
//! energies jump; correction replaces the window with two one-sided fits
//! that each see only smooth data.
//!
//! One-sided fits reuse the global extension and truncation parameters
//! but need their own factorizations, one per sample count; those small
//! SVDs are built lazily and cached.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::legendre::{frame_dot, FrameConfig};
use crate::offline::{factorization_for, ReferenceFactorization};
use crate::partition::ReferenceNodes;
use crate::solver::{solve_local, LocalCoefficients, PiecewiseApproximant};

/// Default spike threshold: η must exceed this multiple of the median
/// energy. Observed spikes are 5–7 orders of magnitude; smooth
/// fluctuation stays within one.
pub const DEFAULT_TAU: f64 = 10.0;

/// Smallest sample count a one-sided fit accepts.
const MIN_SIDE_SAMPLES: usize = 4;

/// Relative slack when checking that window nodes are equispaced.
const SPACING_TOL: f64 = 1e-10;

/// An inclusive range of subinterval indices scheduled for localization:
/// a run of flagged subintervals plus one unflagged neighbor on each
/// side (clamped at the partition ends).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    first: usize,
    last: usize,
}

impl Window {
    pub fn first(&self) -> usize {
        self.first
    }

    pub fn last(&self) -> usize {
        self.last
    }
}

/// Result of localizing one window: the estimated singular point, the
/// one-sided energy traces that produced it, and the window's nodes.
#[derive(Debug, Clone)]
pub struct WindowLocalization {
    nodes: Vec<f64>,
    split: f64,
    exact_node: Option<usize>,
    eta_left: Vec<Option<f64>>,
    eta_right: Vec<Option<f64>>,
}

impl WindowLocalization {
    /// Estimated singular location ξ̂, in domain coordinates.
    pub fn split(&self) -> f64 {
        self.split
    }

    /// In-window node index when the jumps coincide on a sampling node.
    pub fn exact_node(&self) -> Option<usize> {
        self.exact_node
    }

    /// The window's sampling nodes, in domain coordinates.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// η_{L,i} per candidate index; `None` where fewer than four samples
    /// lie left of the candidate.
    pub fn eta_left(&self) -> &[Option<f64>] {
        &self.eta_left
    }

    /// η_{R,i} per candidate index; `None` where fewer than four samples
    /// lie right of the candidate.
    pub fn eta_right(&self) -> &[Option<f64>] {
        &self.eta_right
    }
}

/// Detection (and, once filled in, localization) results for one
/// approximant.
#[derive(Debug, Clone)]
pub struct SingularityReport {
    etas: Vec<f64>,
    median_eta: f64,
    tau: f64,
    flagged: Vec<usize>,
    windows: Vec<Window>,
    degenerate: bool,
    localizations: Vec<WindowLocalization>,
}

impl SingularityReport {
    /// Per-subinterval coefficient energies of the source approximant.
    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn median_eta(&self) -> f64 {
        self.median_eta
    }

    /// Threshold factor the detection ran with.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Flagged subinterval indices, ascending.
    pub fn flagged(&self) -> &[usize] {
        &self.flagged
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    /// True when the partition was too small (K < 3) for a meaningful
    /// median, in which case nothing was flagged.
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// One localization per window, in window order; empty until
    /// [`localize_all`] runs.
    pub fn localizations(&self) -> &[WindowLocalization] {
        &self.localizations
    }

    /// Estimated singular points, one per localized window.
    pub fn localized_points(&self) -> Vec<f64> {
        self.localizations.iter().map(|l| l.split).collect()
    }

    /// Writes `k,eta,flagged` rows, one per subinterval.
    pub fn write_eta_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "k,eta,flagged")?;
        for (k, eta) in self.etas.iter().enumerate() {
            let flag = self.flagged.binary_search(&k).is_ok();
            writeln!(w, "{k},{eta},{}", flag as u8)?;
        }
        Ok(())
    }

    /// Writes `i,node,eta_left,eta_right` rows for one localized window;
    /// sides without enough samples leave their field empty.
    pub fn write_side_indicator_csv<W: Write>(&self, window: usize, w: &mut W) -> Result<()> {
        let loc = self
            .localizations
            .get(window)
            .ok_or(Error::IndexOutOfRange {
                index: window,
                count: self.localizations.len(),
            })?;
        writeln!(w, "i,node,eta_left,eta_right")?;
        for (i, node) in loc.nodes.iter().enumerate() {
            let left = loc.eta_left[i].map(|v| v.to_string()).unwrap_or_default();
            let right = loc.eta_right[i].map(|v| v.to_string()).unwrap_or_default();
            writeln!(w, "{i},{node},{left},{right}")?;
        }
        Ok(())
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Flags subintervals whose coefficient energy spikes above
/// `tau * median(η)` and builds the localization windows. Partitions
/// with K < 3 have no meaningful median; they come back empty with the
/// `degenerate` marker set instead of an error.
pub fn detect(approx: &PiecewiseApproximant, tau: f64) -> Result<SingularityReport> {
    if !(tau > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "spike threshold must exceed 1, got {tau}"
        )));
    }
    let etas = approx.etas();
    let k_total = etas.len();
    if k_total < 3 {
        return Ok(SingularityReport {
            etas,
            median_eta: 0.0,
            tau,
            flagged: Vec::new(),
            windows: Vec::new(),
            degenerate: true,
            localizations: Vec::new(),
        });
    }

    let med = median(&etas);
    let flagged: Vec<usize> = (0..k_total).filter(|&k| etas[k] > tau * med).collect();

    // Runs of adjacent flags expand by one neighbor each side; expanded
    // ranges that overlap collapse into one window.
    let mut windows: Vec<Window> = Vec::new();
    let mut i = 0;
    while i < flagged.len() {
        let mut j = i;
        while j + 1 < flagged.len() && flagged[j + 1] == flagged[j] + 1 {
            j += 1;
        }
        let first = flagged[i].saturating_sub(1);
        let last = (flagged[j] + 1).min(k_total - 1);
        match windows.last_mut() {
            Some(prev) if first <= prev.last => prev.last = last,
            _ => windows.push(Window { first, last }),
        }
        i = j + 1;
    }

    Ok(SingularityReport {
        etas,
        median_eta: med,
        tau,
        flagged,
        windows,
        degenerate: false,
        localizations: Vec::new(),
    })
}

/// Lazily built factorizations for one-sided fits, keyed by sample
/// count. Every entry shares the base configuration's extension,
/// oversampling, and truncation; only the count (hence degree) varies.
#[derive(Debug)]
pub struct FactorizationCache {
    base: FrameConfig,
    map: Mutex<HashMap<usize, Arc<ReferenceFactorization>>>,
}

impl FactorizationCache {
    pub fn new(base: FrameConfig) -> Self {
        FactorizationCache {
            base,
            map: Mutex::new(HashMap::new()),
        }
    }

    pub fn base(&self) -> &FrameConfig {
        &self.base
    }

    /// Factorization whose sample count is exactly `count`.
    fn for_count(&self, count: usize) -> Result<Arc<ReferenceFactorization>> {
        let mut map = self.map.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(f) = map.get(&count) {
            return Ok(Arc::clone(f));
        }
        let config = FrameConfig::for_sample_count(
            count,
            self.base.extension(),
            self.base.oversampling(),
            self.base.truncation(),
        )?;
        let fact = Arc::new(factorization_for(&config)?);
        map.insert(count, Arc::clone(&fact));
        Ok(fact)
    }

    /// Fitting setup for `n` equispaced samples: the factorization and
    /// the stride selecting its reference nodes out of the n samples.
    /// Stride 1 whenever a count-n configuration exists (always at
    /// γ = 1); otherwise the largest aligned subgrid.
    pub(crate) fn setup(&self, n: usize) -> Result<(Arc<ReferenceFactorization>, usize)> {
        for stride in 1..n {
            if !(n - 1).is_multiple_of(stride) {
                continue;
            }
            let g = (n - 1) / stride + 1;
            if g < MIN_SIDE_SAMPLES {
                break;
            }
            let candidate = FrameConfig::for_sample_count(
                g,
                self.base.extension(),
                self.base.oversampling(),
                self.base.truncation(),
            );
            match candidate {
                Ok(c) if c.sample_count() == g => return Ok((self.for_count(g)?, stride)),
                _ => continue,
            }
        }
        Err(Error::WindowTooNarrow {
            side: "one-sided fit",
            count: n,
            min: MIN_SIDE_SAMPLES,
        })
    }
}

/// Coefficient energy of a one-sided fit over `samples` (equispaced,
/// fitted on their own span).
fn one_sided_eta(cache: &FactorizationCache, samples: &[f64]) -> Result<f64> {
    let (fact, stride) = cache.setup(samples.len())?;
    let g = fact.config().sample_count();
    let seg: Vec<f64> = (0..g).map(|q| samples[q * stride]).collect();
    Ok(solve_local(&fact, &seg)?.eta())
}

/// Scans a trace for its largest successive ratio `trace[i+1]/trace[i]`
/// over consecutive defined entries; returns (left index, ratio).
fn largest_up_jump(trace: &[Option<f64>]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for i in 0..trace.len().saturating_sub(1) {
        if let (Some(a), Some(b)) = (trace[i], trace[i + 1]) {
            let ratio = if a == 0.0 {
                if b == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                b / a
            };
            if best.is_none_or(|(_, r)| ratio > r) {
                best = Some((i, ratio));
            }
        }
    }
    best
}

/// Localizes the singular point inside one window of equispaced samples.
///
/// For each candidate node `i`, the energy of a fit on samples
/// `[0 ..= i]` (left-anchored, η_L) and on `[i ..]` (right-anchored,
/// η_R). η_L stays on a smooth plateau while the fitted span is free of
/// the singularity and jumps the first time the span swallows it, so the
/// largest successive ratio marks the last smooth candidate; η_R
/// mirrors this from the right. Coinciding transitions name a sampling
/// node; transitions offset by one bracket the interior of a cell, whose
/// midpoint is returned.
pub fn localize_window(
    nodes: &[f64],
    samples: &[f64],
    cache: &FactorizationCache,
    tau: f64,
) -> Result<WindowLocalization> {
    if !(tau > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "spike threshold must exceed 1, got {tau}"
        )));
    }
    if nodes.len() != samples.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            actual: samples.len(),
        });
    }
    let len = nodes.len();
    let needed = 2 * cache.base().sample_count();
    if len < needed {
        return Err(Error::WindowTooNarrow {
            side: "window",
            count: len,
            min: needed,
        });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData(
            "window samples contain a non-finite value".into(),
        ));
    }
    let spacing = (nodes[len - 1] - nodes[0]) / (len - 1) as f64;
    if !(spacing > 0.0) {
        return Err(Error::InvalidData(
            "window nodes must be strictly increasing".into(),
        ));
    }
    for i in 0..len - 1 {
        if ((nodes[i + 1] - nodes[i]) / spacing - 1.0).abs() > SPACING_TOL {
            return Err(Error::InvalidData(format!(
                "window nodes are not equispaced near index {i}"
            )));
        }
    }

    let mut eta_left: Vec<Option<f64>> = vec![None; len];
    let mut eta_right: Vec<Option<f64>> = vec![None; len];
    for i in MIN_SIDE_SAMPLES - 1..len {
        eta_left[i] = Some(one_sided_eta(cache, &samples[..=i])?);
    }
    for i in 0..=len - MIN_SIDE_SAMPLES {
        eta_right[i] = Some(one_sided_eta(cache, &samples[i..])?);
    }

    // Left trace jumps upward past the singularity; the right trace
    // drops to its plateau, so scan it reversed to reuse the up-jump.
    let up_l = largest_up_jump(&eta_left);
    let reversed: Vec<Option<f64>> = eta_right.iter().rev().copied().collect();
    let up_r = largest_up_jump(&reversed).map(|(i_rev, r)| (len - 1 - i_rev, r));

    let jump_l = up_l.filter(|&(_, r)| r > tau);
    // In reversed orientation the jump index is the plateau side; the
    // original-orientation first smooth index is that same node.
    let jump_r = up_r.filter(|&(_, r)| r > tau);

    let (split, exact_node) = match (jump_l, jump_r) {
        (Some((il, _)), Some((ir, _))) if ir == il => (nodes[il], Some(il)),
        (Some((il, _)), Some((ir, _))) if ir == il + 1 => (0.5 * (nodes[il] + nodes[il + 1]), None),
        // Disagreeing sides: trust the sharper transition's cell.
        (Some((il, rl)), Some((ir, rr))) => {
            if rl >= rr {
                (0.5 * (nodes[il] + nodes[il + 1]), None)
            } else {
                (0.5 * (nodes[ir - 1] + nodes[ir]), None)
            }
        }
        (Some((il, _)), None) => (0.5 * (nodes[il] + nodes[il + 1]), None),
        (None, Some((ir, _))) if ir > 0 => (0.5 * (nodes[ir - 1] + nodes[ir]), None),
        _ => {
            return Err(Error::LocalizationFailed(format!(
                "no successive energy ratio exceeds {tau}"
            )))
        }
    };

    if !(nodes[0] < split && split < nodes[len - 1]) {
        return Err(Error::LocalizationFailed(format!(
            "estimated point {split} is not interior to the window"
        )));
    }

    Ok(WindowLocalization {
        nodes: nodes.to_vec(),
        split,
        exact_node,
        eta_left,
        eta_right,
    })
}

/// Extracts each window's nodes and samples from the global vectors and
/// localizes them all, filling `report.localizations` in window order.
pub fn localize_all(
    report: &mut SingularityReport,
    approx: &PiecewiseApproximant,
    samples: &[f64],
    cache: &FactorizationCache,
) -> Result<()> {
    check_cache_matches(approx, cache)?;
    let m = approx.config().sample_count();
    let expected = approx.partition().total_nodes(m);
    if samples.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: samples.len(),
        });
    }
    let reference = ReferenceNodes::new(m)?;
    let nodes = approx.partition().sample_nodes(&reference);
    let mut localizations = Vec::with_capacity(report.windows.len());
    for w in &report.windows {
        let lo = w.first * (m - 1);
        let hi = (w.last + 1) * (m - 1);
        localizations.push(localize_window(
            &nodes[lo..=hi],
            &samples[lo..=hi],
            cache,
            report.tau,
        )?);
    }
    report.localizations = localizations;
    Ok(())
}

fn check_cache_matches(approx: &PiecewiseApproximant, cache: &FactorizationCache) -> Result<()> {
    if cache.base() != approx.config() {
        return Err(Error::InvalidArgument(
            "factorization cache was built for a different configuration".into(),
        ));
    }
    Ok(())
}

/// One corrected window: two one-sided fits meeting at the split.
#[derive(Debug, Clone)]
pub struct Patch {
    window: Window,
    x_lo: f64,
    x_hi: f64,
    split: f64,
    left: PatchSide,
    right: PatchSide,
}

#[derive(Debug, Clone)]
struct PatchSide {
    center: f64,
    half: f64,
    local: LocalCoefficients,
}

impl Patch {
    pub fn window(&self) -> Window {
        self.window
    }

    /// Physical extent [x_lo, x_hi] the patch overrides.
    pub fn span(&self) -> (f64, f64) {
        (self.x_lo, self.x_hi)
    }

    pub fn split(&self) -> f64 {
        self.split
    }

    fn side(&self, x: f64) -> &PatchSide {
        if x <= self.split {
            &self.left
        } else {
            &self.right
        }
    }
}

/// The base approximant with flagged windows replaced by one-sided
/// patch pairs. Evaluation outside every patch is bit-identical to the
/// base.
#[derive(Debug, Clone)]
pub struct CorrectedApproximant {
    base: PiecewiseApproximant,
    patches: Vec<Patch>,
    extension: f64,
}

/// Rebuilds each localized window from two one-sided fits: the left
/// patch fits the window samples at nodes ≤ ξ̂, the right patch the
/// nodes ≥ ξ̂ (a node coinciding with ξ̂ serves both sides). No
/// interface constraint ties the sides together; their mismatch at ξ̂
/// is observable through [`CorrectedApproximant::interface_mismatch`].
///
/// A report with no localized windows corrects to the identity.
pub fn correct(
    approx: &PiecewiseApproximant,
    report: &SingularityReport,
    samples: &[f64],
    cache: &FactorizationCache,
) -> Result<CorrectedApproximant> {
    check_cache_matches(approx, cache)?;
    if report.localizations.len() != report.windows.len() {
        return Err(Error::InvalidArgument(format!(
            "report localizes {} of {} windows; run localize_all first",
            report.localizations.len(),
            report.windows.len()
        )));
    }
    let m = approx.config().sample_count();
    let expected = approx.partition().total_nodes(m);
    if samples.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: samples.len(),
        });
    }

    let breakpoints = approx.partition().breakpoints();
    let mut patches = Vec::with_capacity(report.windows.len());
    for (w, loc) in report.windows.iter().zip(&report.localizations) {
        let lo = w.first * (m - 1);
        let hi = (w.last + 1) * (m - 1);
        let window_samples = &samples[lo..=hi];
        let nodes = &loc.nodes;

        let left_count = nodes.iter().take_while(|&&x| x <= loc.split).count();
        let right_start = nodes.iter().take_while(|&&x| x < loc.split).count();
        let left = fit_side(
            cache,
            &nodes[..left_count],
            &window_samples[..left_count],
            "left",
        )?;
        let right = fit_side(
            cache,
            &nodes[right_start..],
            &window_samples[right_start..],
            "right",
        )?;

        patches.push(Patch {
            window: *w,
            x_lo: breakpoints[w.first],
            x_hi: breakpoints[w.last + 1],
            split: loc.split,
            left,
            right,
        });
    }

    Ok(CorrectedApproximant {
        base: approx.clone(),
        patches,
        extension: approx.config().extension(),
    })
}

fn fit_side(
    cache: &FactorizationCache,
    nodes: &[f64],
    samples: &[f64],
    side: &'static str,
) -> Result<PatchSide> {
    if nodes.len() < MIN_SIDE_SAMPLES {
        return Err(Error::WindowTooNarrow {
            side,
            count: nodes.len(),
            min: MIN_SIDE_SAMPLES,
        });
    }
    let (fact, stride) = cache.setup(samples.len())?;
    let g = fact.config().sample_count();
    let seg: Vec<f64> = (0..g).map(|q| samples[q * stride]).collect();
    let local = solve_local(&fact, &seg)?;
    let (lo, hi) = (nodes[0], nodes[nodes.len() - 1]);
    Ok(PatchSide {
        center: 0.5 * (lo + hi),
        half: 0.5 * (hi - lo),
        local,
    })
}

impl CorrectedApproximant {
    pub fn base(&self) -> &PiecewiseApproximant {
        &self.base
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    /// Evaluates with patches taking precedence inside their windows.
    /// The patch polynomial extends past its fitted node span by up to
    /// half a sampling cell to reach the split and window edges.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        for p in &self.patches {
            if p.x_lo <= x && x <= p.x_hi {
                let side = p.side(x);
                let t = (x - side.center) / side.half;
                return frame_dot(self.extension, t, side.local.coeffs());
            }
        }
        self.base.evaluate(x)
    }

    pub fn evaluate_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }

    /// Maximum absolute deviation from `f` over the base's refined grid.
    pub fn max_error(&self, f: impl Fn(f64) -> f64, grid_factor: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in self.base.error_grid(grid_factor) {
            worst = worst.max((f(x) - self.evaluate(x)?).abs());
        }
        Ok(worst)
    }

    /// Writes `x,f,approx,error` rows over the base's refined grid.
    pub fn write_error_csv<W: Write>(
        &self,
        w: &mut W,
        f: impl Fn(f64) -> f64,
        grid_factor: usize,
    ) -> Result<()> {
        writeln!(w, "x,f,approx,error")?;
        for x in self.base.error_grid(grid_factor) {
            let fx = f(x);
            let qx = self.evaluate(x)?;
            writeln!(w, "{x},{fx},{qx},{}", (fx - qx).abs())?;
        }
        Ok(())
    }

    /// Per-patch |left(ξ̂) − right(ξ̂)|: the interface mismatch left by
    /// fitting the sides independently.
    pub fn interface_mismatch(&self) -> Result<Vec<f64>> {
        self.patches
            .iter()
            .map(|p| {
                let l = frame_dot(
                    self.extension,
                    (p.split - p.left.center) / p.left.half,
                    p.left.local.coeffs(),
                )?;
                let r = frame_dot(
                    self.extension,
                    (p.split - p.right.center) / p.right.half,
                    p.right.local.coeffs(),
                )?;
                Ok((l - r).abs())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;
    use crate::solver::{approximate_with, PiecewiseApproximant};
    use crate::testfn::{piecewise_value, TestFunction};

    fn default_config() -> FrameConfig {
        FrameConfig::new(15, 6.0, 1.0, 1e-14).unwrap()
    }

    fn build(
        f: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        k: usize,
    ) -> (PiecewiseApproximant, Vec<f64>, FactorizationCache) {
        let config = default_config();
        let fact = factorization_for(&config).unwrap();
        let partition = Partition::uniform(a, b, k).unwrap();
        let reference = ReferenceNodes::new(config.sample_count()).unwrap();
        let samples: Vec<f64> = partition
            .sample_nodes(&reference)
            .into_iter()
            .map(&f)
            .collect();
        let approx = approximate_with(&fact, &partition, &f).unwrap();
        (approx, samples, FactorizationCache::new(config))
    }

    #[test]
    fn smooth_runge_function_produces_no_flags() {
        let f7 = TestFunction::by_id("f7").unwrap();
        let (approx, _, _) = build(|x| f7.eval(x), -1.0, 1.0, 20);
        let report = detect(&approx, DEFAULT_TAU).unwrap();
        assert!(report.flagged().is_empty());
        assert!(report.windows().is_empty());
        assert!(!report.degenerate());
        let max = report.etas().iter().cloned().fold(0.0, f64::max);
        assert!(max <= DEFAULT_TAU * report.median_eta());
    }

    #[test]
    fn detection_is_scale_invariant() {
        let (approx, _, _) = build(|x| piecewise_value(0.225, 0.775, x), 0.0, 1.0, 20);
        let (scaled, _, _) = build(|x| 137.0 * piecewise_value(0.225, 0.775, x), 0.0, 1.0, 20);
        let a = detect(&approx, DEFAULT_TAU).unwrap();
        let b = detect(&scaled, DEFAULT_TAU).unwrap();
        assert_eq!(a.flagged(), b.flagged());
        assert!(!a.flagged().is_empty());
    }

    #[test]
    fn tiny_partitions_decline_to_detect() {
        let (approx, _, _) = build(|x| piecewise_value(0.3, 0.6, x), 0.0, 1.0, 2);
        let report = detect(&approx, DEFAULT_TAU).unwrap();
        assert!(report.degenerate());
        assert!(report.flagged().is_empty());
    }

    #[test]
    fn interior_singularities_flag_their_cells_and_windows() {
        let (approx, _, _) = build(|x| piecewise_value(0.225, 0.775, x), 0.0, 1.0, 20);
        let report = detect(&approx, DEFAULT_TAU).unwrap();
        assert_eq!(report.flagged(), &[4, 15]);
        assert_eq!(
            report.windows(),
            &[
                Window { first: 3, last: 5 },
                Window {
                    first: 14,
                    last: 16
                }
            ]
        );
    }

    #[test]
    fn adjacent_flags_merge_into_one_window() {
        // A second-derivative break plus a kink in neighboring cells.
        let f = |x: f64| piecewise_value(0.41, 0.48, x);
        let (approx, _, _) = build(f, 0.0, 1.0, 20);
        let report = detect(&approx, DEFAULT_TAU).unwrap();
        assert_eq!(report.flagged(), &[8, 9]);
        assert_eq!(report.windows(), &[Window { first: 7, last: 10 }]);
    }

    #[test]
    fn kink_between_nodes_localizes_to_the_cell_midpoint() {
        let f = |x: f64| piecewise_value(0.225, 0.775, x);
        let (approx, samples, cache) = build(f, 0.0, 1.0, 20);
        let mut report = detect(&approx, DEFAULT_TAU).unwrap();
        localize_all(&mut report, &approx, &samples, &cache).unwrap();
        let points = report.localized_points();
        assert_eq!(points.len(), 2);
        // 0.225 and 0.775 sit in cell interiors — exactly at midpoints.
        assert!((points[0] - 0.225).abs() < 1e-12, "xi_hat = {}", points[0]);
        assert!(
            (points[1] - 0.775).abs() < 1e-12,
            "zeta_hat = {}",
            points[1]
        );
        assert!(report.localizations()[0].exact_node().is_none());
    }

    #[test]
    fn kink_on_a_sampling_node_is_named_exactly() {
        // 0.48 = 36/75 is a sampling node of K=5, m=16 on [0, 1].
        let f = |x: f64| (x - 0.48).abs();
        let (approx, samples, cache) = build(f, 0.0, 1.0, 5);
        let mut report = detect(&approx, DEFAULT_TAU).unwrap();
        assert_eq!(report.flagged(), &[2]);
        localize_all(&mut report, &approx, &samples, &cache).unwrap();
        let loc = &report.localizations()[0];
        assert!(loc.exact_node().is_some());
        assert!(
            (loc.split() - 0.48).abs() < 1e-12,
            "split = {}",
            loc.split()
        );
    }

    #[test]
    fn smooth_window_data_fails_localization() {
        let config = default_config();
        let cache = FactorizationCache::new(config);
        let n = 46;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let samples: Vec<f64> = nodes.iter().map(|&x| (2.0 * x).sin()).collect();
        let err = localize_window(&nodes, &samples, &cache, DEFAULT_TAU).unwrap_err();
        assert!(matches!(err, Error::LocalizationFailed(_)));
    }

    #[test]
    fn narrow_windows_are_rejected() {
        let config = default_config();
        let cache = FactorizationCache::new(config);
        let n = 2 * config.sample_count() - 1;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let samples = vec![1.0; n];
        let err = localize_window(&nodes, &samples, &cache, DEFAULT_TAU).unwrap_err();
        assert!(matches!(err, Error::WindowTooNarrow { .. }));
        assert!(matches!(
            cache.setup(3).unwrap_err(),
            Error::WindowTooNarrow { .. }
        ));
    }

    #[test]
    fn jittered_window_nodes_are_rejected() {
        let config = default_config();
        let cache = FactorizationCache::new(config);
        let n = 40;
        let mut nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        nodes[7] += 1e-4;
        let samples = vec![1.0; n];
        let err = localize_window(&nodes, &samples, &cache, DEFAULT_TAU).unwrap_err();
        assert!(matches!(err, Error::InvalidData(_)));
    }

    #[test]
    fn correction_rebuilds_the_windows_and_leaves_the_rest_bit_identical() {
        let f = |x: f64| piecewise_value(0.225, 0.775, x);
        let (approx, samples, cache) = build(f, 0.0, 1.0, 20);
        let mut report = detect(&approx, DEFAULT_TAU).unwrap();
        localize_all(&mut report, &approx, &samples, &cache).unwrap();
        let corrected = correct(&approx, &report, &samples, &cache).unwrap();

        let before = approx.max_error(f, 10).unwrap();
        let after = corrected.max_error(f, 10).unwrap();
        assert!(
            after <= before / 1e3,
            "correction factor only {:.1}",
            before / after
        );

        // Outside the windows ([0.15,0.30] and [0.70,0.85]) nothing moves.
        for &x in &[0.0, 0.07, 0.149, 0.31, 0.5, 0.68, 0.86, 0.99, 1.0] {
            let b = approx.evaluate(x).unwrap();
            let c = corrected.evaluate(x).unwrap();
            assert!(b.to_bits() == c.to_bits(), "moved at x = {x}");
        }

        let mismatch = corrected.interface_mismatch().unwrap();
        assert_eq!(mismatch.len(), 2);
        assert!(mismatch.iter().all(|d| d.is_finite() && *d < 1e-6));
    }

    #[test]
    fn empty_report_corrects_to_the_identity() {
        let f7 = TestFunction::by_id("f7").unwrap();
        let (approx, samples, cache) = build(|x| f7.eval(x), -1.0, 1.0, 20);
        let report = detect(&approx, DEFAULT_TAU).unwrap();
        let corrected = correct(&approx, &report, &samples, &cache).unwrap();
        assert!(corrected.patches().is_empty());
        for i in 0..=50 {
            let x = -1.0 + i as f64 / 25.0;
            assert_eq!(
                approx.evaluate(x).unwrap().to_bits(),
                corrected.evaluate(x).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn eta_csv_lists_every_subinterval() {
        let f = |x: f64| piecewise_value(0.225, 0.775, x);
        let (approx, _, _) = build(f, 0.0, 1.0, 20);
        let report = detect(&approx, DEFAULT_TAU).unwrap();
        let mut buf = Vec::new();
        report.write_eta_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,eta,flagged");
        assert_eq!(lines.len(), 21);
        assert!(lines[5].starts_with("4,") && lines[5].ends_with(",1"));
        assert!(lines[1].ends_with(",0"));
    }

    #[test]
    fn side_indicator_csv_has_one_row_per_node() {
        let f = |x: f64| piecewise_value(0.225, 0.775, x);
        let (approx, samples, cache) = build(f, 0.0, 1.0, 20);
        let mut report = detect(&approx, DEFAULT_TAU).unwrap();
        localize_all(&mut report, &approx, &samples, &cache).unwrap();
        let mut buf = Vec::new();
        report.write_side_indicator_csv(0, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i,node,eta_left,eta_right");
        assert_eq!(lines.len(), 1 + 46);
        // First candidates lack a left fit: empty third field.
        assert!(lines[1].ends_with(",,") || lines[1].contains(",,"));
        assert!(report.write_side_indicator_csv(5, &mut Vec::new()).is_err());
    }
}
