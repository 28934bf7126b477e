//! Online stage: per-subinterval TSVD solves and the piecewise approximant.
//!
//! Each subinterval's coefficients come from the same reference
//! factorization applied to its local samples. The solve runs in the
//! factored order
//!
//! ```text
//! alpha = U_eps' * (samples / sqrt(m));  beta = alpha ./ sigma;  c = V_eps * beta
//! ```
//!
//! deliberately never forming the dense pseudoinverse `V Σ⁺ Uᵀ`: the
//! retained singular values span ~14 orders of magnitude, and the dense
//! product mixes their scales badly enough to cost digits in exactly the
//! regime the truncation is protecting.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DVector;

use crate::bytes;
use crate::error::{Error, Result};
use crate::legendre::{frame_dot, FrameConfig};
use crate::offline::{factorization_for, ReferenceFactorization};
use crate::partition::{Partition, ReferenceNodes};

const APPROX_MAGIC: &[u8; 8] = b"LLFAPPX\0";
const APPROX_VERSION: u32 = 1;

/// Frame coefficients of one subinterval plus their cached energy
/// `eta = ‖c‖₂`, the spike indicator of the singularity workflow.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCoefficients {
    coeffs: Vec<f64>,
    eta: f64,
}

impl LocalCoefficients {
    fn new(coeffs: Vec<f64>) -> Self {
        let eta = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        LocalCoefficients { coeffs, eta }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Euclidean norm of the coefficient vector.
    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Solves the local least-squares problem for one subinterval's samples
/// through the three-stage truncated pseudoinverse.
pub fn solve_local(fact: &ReferenceFactorization, samples: &[f64]) -> Result<LocalCoefficients> {
    let m = fact.config().sample_count();
    if samples.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: samples.len(),
        });
    }
    let scale = (m as f64).sqrt().recip();
    let b = DVector::from_iterator(m, samples.iter().map(|&s| s * scale));
    let mut alpha = fact.u_eps().transpose() * b;
    for (a, &si) in alpha.iter_mut().zip(fact.sigma_inv()) {
        *a *= si;
    }
    let c = fact.v_eps() * alpha;
    Ok(LocalCoefficients::new(c.iter().copied().collect()))
}

/// A piecewise frame approximant: one coefficient vector per subinterval,
/// all sharing a configuration and factorization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseApproximant {
    partition: Partition,
    config: FrameConfig,
    locals: Vec<LocalCoefficients>,
}

/// Builds an approximant from pre-sampled values at the distinct
/// equispaced nodes (length `K (m - 1) + 1`, shared breakpoint samples
/// stored once). This is the primary entry point: the method's premise
/// is data that already exists on a fixed grid.
pub fn approximate_from_samples(
    fact: &ReferenceFactorization,
    partition: &Partition,
    values: &[f64],
) -> Result<PiecewiseApproximant> {
    let m = fact.config().sample_count();
    let expected = partition.total_nodes(m);
    if values.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: values.len(),
        });
    }
    let mut locals = Vec::with_capacity(partition.len());
    for k in 0..partition.len() {
        let range = partition.local_range(k, m)?;
        locals.push(solve_local(fact, &values[range])?);
    }
    Ok(PiecewiseApproximant {
        partition: partition.clone(),
        config: *fact.config(),
        locals,
    })
}

/// Callback variant of [`approximate_from_samples`]: samples `f` once per
/// distinct node and reuses the shared breakpoint values on both sides.
pub fn approximate_with(
    fact: &ReferenceFactorization,
    partition: &Partition,
    f: impl Fn(f64) -> f64,
) -> Result<PiecewiseApproximant> {
    let m = fact.config().sample_count();
    let reference = ReferenceNodes::new(m)?;
    let values: Vec<f64> = partition
        .sample_nodes(&reference)
        .into_iter()
        .map(f)
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData(
            "sampler produced a non-finite value".into(),
        ));
    }
    approximate_from_samples(fact, partition, &values)
}

/// One-shot convenience: computes the offline factorization for `config`
/// and approximates `f` on `partition`. Reuse a
/// [`ReferenceFactorization`] with [`approximate_with`] when fitting many
/// datasets.
pub fn approximate_function(
    f: impl Fn(f64) -> f64,
    partition: &Partition,
    config: &FrameConfig,
) -> Result<PiecewiseApproximant> {
    let fact = factorization_for(config)?;
    approximate_with(&fact, partition, f)
}

impl PiecewiseApproximant {
    pub(crate) fn from_parts(
        partition: Partition,
        config: FrameConfig,
        locals: Vec<LocalCoefficients>,
    ) -> Result<Self> {
        if locals.len() != partition.len() {
            return Err(Error::DimensionMismatch {
                expected: partition.len(),
                actual: locals.len(),
            });
        }
        for l in &locals {
            if l.coeffs.len() != config.degree() + 1 {
                return Err(Error::DimensionMismatch {
                    expected: config.degree() + 1,
                    actual: l.coeffs.len(),
                });
            }
        }
        Ok(PiecewiseApproximant {
            partition,
            config,
            locals,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn config(&self) -> &FrameConfig {
        &self.config
    }

    pub fn locals(&self) -> &[LocalCoefficients] {
        &self.locals
    }

    /// Per-subinterval coefficient energies `η_k`.
    pub fn etas(&self) -> Vec<f64> {
        self.locals.iter().map(|l| l.eta).collect()
    }

    /// Evaluates the approximant at `x`; breakpoints dispatch to the
    /// right-hand subinterval, the domain's right endpoint to the last.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let (k, t) = self.partition.locate(x)?;
        frame_dot(self.config.extension(), t, &self.locals[k].coeffs)
    }

    /// Pointwise evaluation over a slice, in order.
    pub fn evaluate_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }

    /// Refined evaluation grid: exactly `grid_factor * M` equispaced
    /// points including both endpoints, M being the distinct-sample count.
    pub fn error_grid(&self, grid_factor: usize) -> Vec<f64> {
        let (a, b) = self.partition.domain();
        let count = (grid_factor.max(1)) * self.partition.total_nodes(self.config.sample_count());
        let mut grid = Vec::with_capacity(count);
        for i in 0..count {
            grid.push(a + (b - a) * i as f64 / (count - 1) as f64);
        }
        grid[0] = a;
        grid[count - 1] = b;
        grid
    }

    /// Maximum absolute deviation from `f` over the refined grid.
    pub fn max_error(&self, f: impl Fn(f64) -> f64, grid_factor: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in self.error_grid(grid_factor) {
            let err = (f(x) - self.evaluate(x)?).abs();
            worst = worst.max(err);
        }
        Ok(worst)
    }

    /// Maximum residual at the sample nodes themselves. Nonzero in
    /// general: the truncated solve regularizes, it does not interpolate.
    pub fn max_node_residual(&self, values: &[f64]) -> Result<f64> {
        let m = self.config.sample_count();
        let expected = self.partition.total_nodes(m);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        let reference = ReferenceNodes::new(m)?;
        let nodes = self.partition.sample_nodes(&reference);
        let mut worst = 0.0f64;
        for (&x, &v) in nodes.iter().zip(values) {
            worst = worst.max((v - self.evaluate(x)?).abs());
        }
        Ok(worst)
    }

    /// Writes `x,f,approx,error` rows over the refined grid.
    pub fn write_error_csv<W: Write>(
        &self,
        w: &mut W,
        f: impl Fn(f64) -> f64,
        grid_factor: usize,
    ) -> Result<()> {
        writeln!(w, "x,f,approx,error")?;
        for x in self.error_grid(grid_factor) {
            let fx = f(x);
            let qx = self.evaluate(x)?;
            writeln!(w, "{x},{fx},{qx},{}", (fx - qx).abs())?;
        }
        Ok(())
    }

    /// Serializes the approximant: magic, version, K (u32), breakpoints,
    /// m, N (u32), T, γ, ε (f64), then K coefficient vectors of length
    /// N+1, all little-endian f64 blocks.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(APPROX_MAGIC)?;
        bytes::write_u32(&mut w, APPROX_VERSION)?;
        bytes::write_u32(&mut w, self.partition.len() as u32)?;
        bytes::write_f64_slice(&mut w, self.partition.breakpoints())?;
        bytes::write_u32(&mut w, self.config.sample_count() as u32)?;
        bytes::write_u32(&mut w, self.config.degree() as u32)?;
        bytes::write_f64(&mut w, self.config.extension())?;
        bytes::write_f64(&mut w, self.config.oversampling())?;
        bytes::write_f64(&mut w, self.config.truncation())?;
        for l in &self.locals {
            bytes::write_f64_slice(&mut w, &l.coeffs)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an approximant back; coefficients round-trip bit-exactly and
    /// the cached energies are recomputed.
    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        bytes::expect_magic(&mut r, APPROX_MAGIC, "approximant file")?;
        let version = bytes::read_u32(&mut r, "format version")?;
        if version != APPROX_VERSION {
            return Err(Error::Format(format!(
                "approximant format version {version}, expected {APPROX_VERSION}"
            )));
        }
        let k = bytes::read_u32(&mut r, "subinterval count")? as usize;
        if k == 0 {
            return Err(Error::Format("zero subintervals".into()));
        }
        let breakpoints = bytes::read_f64_vec(&mut r, k + 1, "breakpoints")?;
        let partition = Partition::new(breakpoints)
            .map_err(|e| Error::Format(format!("invalid stored partition: {e}")))?;
        let m = bytes::read_u32(&mut r, "sample count")? as usize;
        let degree = bytes::read_u32(&mut r, "degree")? as usize;
        let extension = bytes::read_f64(&mut r, "extension")?;
        let oversampling = bytes::read_f64(&mut r, "oversampling")?;
        let epsilon = bytes::read_f64(&mut r, "truncation")?;
        let config = FrameConfig::new(degree, extension, oversampling, epsilon)
            .map_err(|e| Error::Format(format!("invalid stored config: {e}")))?;
        if config.sample_count() != m {
            return Err(Error::Format(format!(
                "stored sample count {m} inconsistent with degree {degree}"
            )));
        }
        let mut locals = Vec::with_capacity(k);
        for _ in 0..k {
            let coeffs = bytes::read_f64_vec(&mut r, degree + 1, "coefficients")?;
            locals.push(LocalCoefficients::new(coeffs));
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after approximant".into()));
        }
        Self::from_parts(partition, config, locals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_fact() -> ReferenceFactorization {
        factorization_for(&FrameConfig::new(15, 6.0, 1.0, 1e-14).unwrap()).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_coefficients() {
        let fact = default_fact();
        let local = solve_local(&fact, &[0.0; 16]).unwrap();
        assert!(local.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(local.eta(), 0.0);
    }

    #[test]
    fn sample_length_is_checked() {
        let fact = default_fact();
        assert!(matches!(
            solve_local(&fact, &[0.0; 5]),
            Err(Error::DimensionMismatch {
                expected: 16,
                actual: 5
            })
        ));
    }

    #[test]
    fn retained_subspace_data_is_recovered_exactly() {
        // In a well-conditioned regime (T = 1, every mode retained with
        // sigma = O(1)) the truncated solve is the identity on frame-exact
        // data: samples_j = sqrt(m) * (A c*)_j recovers c*.
        let config = FrameConfig::new(8, 1.0, 2.0, 1e-14).unwrap();
        let fact = factorization_for(&config).unwrap();
        let m = config.sample_count();
        let mut beta = DVector::zeros(fact.retained_rank());
        for j in 0..beta.len() {
            beta[j] = 1.0 / (1.0 + j as f64);
        }
        let c_star = fact.v_eps() * &beta;
        let a = crate::offline::assemble_matrix(&config).unwrap();
        let samples: Vec<f64> = (a.matrix() * &c_star)
            .iter()
            .map(|v| v * (m as f64).sqrt())
            .collect();
        let solved = solve_local(&fact, &samples).unwrap();
        for (got, want) in solved.coeffs().iter().zip(c_star.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn ill_conditioned_recovery_holds_at_the_node_values() {
        // With T = 6 the retained spectrum reaches down to ~1e-13, and
        // sample rounding noise amplified by 1/sigma makes coefficientwise
        // recovery meaningless. What the truncation guarantees instead is
        // the reconstruction: A * solved matches A * c* at the nodes to a
        // few ulps of the data.
        let fact = default_fact();
        let m = fact.config().sample_count();
        let mut beta = DVector::zeros(fact.retained_rank());
        for j in 0..beta.len() {
            beta[j] = 1.0 / ((1 + j * j) as f64);
        }
        let c_star = fact.v_eps() * &beta;
        let a = crate::offline::assemble_matrix(fact.config()).unwrap();
        let node_values = a.matrix() * &c_star;
        let samples: Vec<f64> = node_values.iter().map(|v| v * (m as f64).sqrt()).collect();
        let solved = solve_local(&fact, &samples).unwrap();
        let recon = a.matrix() * DVector::from_column_slice(solved.coeffs());
        for (got, want) in recon.iter().zip(node_values.iter()) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn solve_is_linear() {
        let fact = default_fact();
        let b1: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let b2: Vec<f64> = (0..16).map(|i| (i as f64 * 0.11).cos()).collect();
        let combo: Vec<f64> = b1.iter().zip(&b2).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let c1 = solve_local(&fact, &b1).unwrap();
        let c2 = solve_local(&fact, &b2).unwrap();
        let cc = solve_local(&fact, &combo).unwrap();

        // Coefficientwise, float linearity holds only up to rounding
        // amplified by the weakest retained mode.
        let sigma_min = *fact
            .singular_values()
            .get(fact.retained_rank() - 1)
            .unwrap();
        let norm_b = combo.iter().map(|v| v * v).sum::<f64>().sqrt();
        let coeff_tol = 32.0 * f64::EPSILON * norm_b / sigma_min;
        let mut worst = 0.0f64;
        for i in 0..cc.coeffs().len() {
            let want = 2.0 * c1.coeffs()[i] - 0.5 * c2.coeffs()[i];
            worst = worst.max((cc.coeffs()[i] - want).abs());
        }
        assert!(worst < coeff_tol, "coefficient deviation {worst}");

        // The reconstructions the coefficients stand for are linear up to
        // rounding of the coefficients themselves: each solve rounds its
        // V*beta product to ~eps * ||c|| per entry, and evaluation maps
        // that through frame values bounded by ||p(t)|| (~4.6 here).
        let eta_sum = 2.0 * c1.eta() + 0.5 * c2.eta() + cc.eta();
        let value_tol = 16.0 * f64::EPSILON * eta_sum * 5.0;
        let reference = ReferenceNodes::new(16).unwrap();
        for &t in reference.as_slice() {
            let v1 = frame_dot(6.0, t, c1.coeffs()).unwrap();
            let v2 = frame_dot(6.0, t, c2.coeffs()).unwrap();
            let vc = frame_dot(6.0, t, cc.coeffs()).unwrap();
            assert!(
                (vc - (2.0 * v1 - 0.5 * v2)).abs() < value_tol,
                "value deviation {} at t = {t}",
                (vc - (2.0 * v1 - 0.5 * v2)).abs()
            );
        }
    }

    #[test]
    fn coefficient_norm_amplification_is_capped() {
        let fact = default_fact();
        let b: Vec<f64> = (0..16).map(|i| ((i * i) as f64).sin()).collect();
        let norm_b: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let c = solve_local(&fact, &b).unwrap();
        assert!(c.eta() <= norm_b / fact.config().truncation());
    }

    #[test]
    fn constants_are_reproduced() {
        let fact = default_fact();
        let partition = Partition::uniform(-1.0, 1.0, 4).unwrap();
        let approx = approximate_with(&fact, &partition, |_| 1.0).unwrap();
        for i in 0..=100 {
            let x = -1.0 + 0.02 * i as f64;
            assert!((approx.evaluate(x).unwrap() - 1.0).abs() < 1e-13, "at {x}");
        }
    }

    #[test]
    fn low_degree_polynomials_are_reproduced() {
        // x^5 is in the frame span, but its representing coefficients
        // carry the (2T/h)^5 scale of the affine rescaling (norm ~225
        // here), so the quasi-optimality floor eps * ||c|| sits near
        // 2e-12; the measured error is ~9e-12.
        let fact = default_fact();
        let partition = Partition::uniform(-1.0, 1.0, 2).unwrap();
        let f = |x: f64| x.powi(5);
        let approx = approximate_with(&fact, &partition, f).unwrap();
        assert!(approx.max_error(f, 10).unwrap() < 2e-11);
        assert!(approx.etas().iter().all(|&e| e < 300.0));
    }

    #[test]
    fn breakpoint_evaluation_uses_the_right_subinterval() {
        let fact = default_fact();
        let partition = Partition::uniform(-1.0, 1.0, 2).unwrap();
        let approx = approximate_with(&fact, &partition, |x| x.abs()).unwrap();
        let via_eval = approx.evaluate(0.0).unwrap();
        let right = frame_dot(6.0, -1.0, approx.locals()[1].coeffs()).unwrap();
        assert_eq!(via_eval, right);
    }

    #[test]
    fn sampled_and_callback_paths_agree_bitwise() {
        let fact = default_fact();
        let partition = Partition::uniform(0.0, 1.0, 3).unwrap();
        let f = |x: f64| (3.0 * x).sin();
        let reference = ReferenceNodes::new(16).unwrap();
        let values: Vec<f64> = partition
            .sample_nodes(&reference)
            .into_iter()
            .map(f)
            .collect();
        let a = approximate_with(&fact, &partition, f).unwrap();
        let b = approximate_from_samples(&fact, &partition, &values).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subinterval_solves_are_independent() {
        let fact = default_fact();
        let partition = Partition::uniform(-1.0, 1.0, 4).unwrap();
        let f = |x: f64| (2.0 * x).cos();
        let whole = approximate_with(&fact, &partition, f).unwrap();
        let reference = ReferenceNodes::new(16).unwrap();
        for k in [3usize, 1, 2, 0] {
            let nodes = partition.physical_nodes(k, &reference).unwrap();
            let samples: Vec<f64> = nodes.into_iter().map(f).collect();
            let lone = solve_local(&fact, &samples).unwrap();
            assert_eq!(lone, whole.locals()[k], "piece {k}");
        }
    }

    #[test]
    fn node_residual_is_nonzero_but_small_for_smooth_data() {
        let fact = default_fact();
        let partition = Partition::uniform(-1.0, 1.0, 4).unwrap();
        let f = |x: f64| (4.0 - x * x).recip();
        let reference = ReferenceNodes::new(16).unwrap();
        let values: Vec<f64> = partition
            .sample_nodes(&reference)
            .into_iter()
            .map(f)
            .collect();
        let approx = approximate_from_samples(&fact, &partition, &values).unwrap();
        let residual = approx.max_node_residual(&values).unwrap();
        assert!(residual > 0.0, "TSVD regularizes, it does not interpolate");
        assert!(residual < 1e-10);
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let fact = default_fact();
        let partition = Partition::uniform(1.0, 15.0, 7).unwrap();
        let f = |x: f64| x.sqrt() / (x * x + 0.5 * x + 1.0);
        let approx = approximate_with(&fact, &partition, f).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f1.approx");
        approx.save(&path).unwrap();
        let back = PiecewiseApproximant::load(&path).unwrap();
        assert_eq!(approx, back);
    }

    #[test]
    fn truncated_approximant_file_is_a_format_error() {
        let fact = default_fact();
        let partition = Partition::uniform(0.0, 1.0, 2).unwrap();
        let approx = approximate_with(&fact, &partition, |x| x).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.approx");
        approx.save(&path).unwrap();
        let raw = std::fs::read(&path).unwrap();
        std::fs::write(&path, &raw[..raw.len() - 9]).unwrap();
        assert!(matches!(
            PiecewiseApproximant::load(&path),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn error_grid_has_exact_count_and_endpoints() {
        let fact = default_fact();
        let partition = Partition::uniform(-2.0, 3.0, 4).unwrap();
        let approx = approximate_with(&fact, &partition, |x| x).unwrap();
        let grid = approx.error_grid(10);
        assert_eq!(grid.len(), 10 * (4 * 15 + 1));
        assert_eq!(grid[0], -2.0);
        assert_eq!(*grid.last().unwrap(), 3.0);
    }

    #[test]
    fn non_finite_samples_are_rejected() {
        let fact = default_fact();
        let partition = Partition::uniform(0.0, 1.0, 2).unwrap();
        assert!(matches!(
            approximate_with(&fact, &partition, |x| (x - 0.5).recip()),
            Err(Error::InvalidData(_))
        ));
    }
}
