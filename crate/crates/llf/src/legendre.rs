//! Orthonormal Legendre polynomials and the scaled frame system.
//!
//! `p_0, p_1, ...` are the Legendre polynomials normalized so that
//! `∫_{-1}^{1} p_i p_j dy = δ_{ij}`. The frame functions are the same
//! system orthonormalized on a wider interval `[-T, T]`,
//!
//! ```text
//! P_l(t) = p_l(t / T) / sqrt(T),
//! ```
//!
//! and then restricted to `[-1, 1]`, where they form a redundant
//! (non-orthogonal) spanning system. All evaluation runs a single
//! three-term recurrence directly on the normalized polynomials;
//! intermediate values stay O(1) at any degree.

use crate::error::{Error, Result};

/// Slack accepted past the ends of `[-1, 1]` before an argument is
/// rejected. Affine maps and node formulas can land at `1 + O(ulp)`.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// Local discretization parameters shared by every subinterval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    degree: usize,
    extension: f64,
    oversampling: f64,
    sample_count: usize,
    truncation: f64,
}

impl FrameConfig {
    /// Builds a configuration with local degree `degree` (N), extension
    /// parameter `extension` (T ≥ 1), oversampling ratio `oversampling`
    /// (γ ≥ 1) and truncation threshold `truncation` (ε). The per-interval
    /// sample count is derived as `m = ceil(γ (N + 1))`.
    pub fn new(degree: usize, extension: f64, oversampling: f64, truncation: f64) -> Result<Self> {
        let m = (oversampling * (degree as f64 + 1.0)).ceil();
        if !m.is_finite() || m < 2.0 {
            return Err(Error::InvalidArgument(format!(
                "derived sample count {m} is not a usable node count"
            )));
        }
        Self::with_sample_count(degree, extension, oversampling, m as usize, truncation)
    }

    /// Builds a configuration for a prescribed sample count, keeping the
    /// oversampling relation by fitting the largest degree with
    /// `γ (N + 1) ≤ m`. Used for the per-length factorizations of the
    /// one-sided solves, where the node count comes from the data.
    pub fn for_sample_count(
        sample_count: usize,
        extension: f64,
        oversampling: f64,
        truncation: f64,
    ) -> Result<Self> {
        if oversampling < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "oversampling ratio must be >= 1, got {oversampling}"
            )));
        }
        let dof = (sample_count as f64 / oversampling).floor() as usize;
        if dof == 0 {
            return Err(Error::InvalidArgument(format!(
                "sample count {sample_count} leaves no degrees of freedom at oversampling {oversampling}"
            )));
        }
        Self::with_sample_count(dof - 1, extension, oversampling, sample_count, truncation)
    }

    fn with_sample_count(
        degree: usize,
        extension: f64,
        oversampling: f64,
        sample_count: usize,
        truncation: f64,
    ) -> Result<Self> {
        if !(extension >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "extension parameter must be >= 1, got {extension}"
            )));
        }
        if !(oversampling >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "oversampling ratio must be >= 1, got {oversampling}"
            )));
        }
        if sample_count < 2 {
            return Err(Error::InvalidArgument(format!(
                "sample count must be >= 2, got {sample_count}"
            )));
        }
        if sample_count < degree + 1 {
            return Err(Error::InvalidArgument(format!(
                "sample count {sample_count} is below the {} degrees of freedom",
                degree + 1
            )));
        }
        if !(truncation > 0.0 && truncation < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "truncation threshold must lie in (0, 1), got {truncation}"
            )));
        }
        Ok(FrameConfig {
            degree,
            extension,
            oversampling,
            sample_count,
            truncation,
        })
    }

    /// Local polynomial degree N.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Extension parameter T (half-width of the orthogonality interval).
    pub fn extension(&self) -> f64 {
        self.extension
    }

    /// Oversampling ratio γ.
    pub fn oversampling(&self) -> f64 {
        self.oversampling
    }

    /// Equispaced samples per subinterval, m.
    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// TSVD truncation threshold ε.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Same discretization with a different truncation threshold.
    pub fn with_truncation(&self, truncation: f64) -> Result<Self> {
        Self::with_sample_count(
            self.degree,
            self.extension,
            self.oversampling,
            self.sample_count,
            truncation,
        )
    }
}

fn check_unit(value: f64) -> Result<f64> {
    if value.abs() > 1.0 + ENDPOINT_TOL || value.is_nan() {
        return Err(Error::OutOfDomain {
            value,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(value.clamp(-1.0, 1.0))
}

/// Runs the normalized three-term recurrence at `y`, filling `out[l]`
/// with `p_l(y)`. `y` must already be inside `[-1, 1]`.
fn recurrence_into(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = std::f64::consts::FRAC_1_SQRT_2;
    if out.len() == 1 {
        return;
    }
    out[1] = (1.5f64).sqrt() * y;
    for l in 1..out.len() - 1 {
        let lf = l as f64;
        let a = ((2.0 * lf + 1.0) * (2.0 * lf + 3.0)).sqrt() / (lf + 1.0);
        let b = lf / (lf + 1.0) * ((2.0 * lf + 3.0) / (2.0 * lf - 1.0)).sqrt();
        out[l + 1] = a * y * out[l] - b * out[l - 1];
    }
}

/// Same recurrence, accumulating `Σ_l coeffs[l] p_l(y)` without storing
/// the value vector.
fn recurrence_dot(y: f64, coeffs: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut prev = std::f64::consts::FRAC_1_SQRT_2;
    if let Some(&c0) = coeffs.first() {
        acc += c0 * prev;
    } else {
        return 0.0;
    }
    if coeffs.len() == 1 {
        return acc;
    }
    let mut curr = (1.5f64).sqrt() * y;
    acc += coeffs[1] * curr;
    for l in 1..coeffs.len() - 1 {
        let lf = l as f64;
        let a = ((2.0 * lf + 1.0) * (2.0 * lf + 3.0)).sqrt() / (lf + 1.0);
        let b = lf / (lf + 1.0) * ((2.0 * lf + 3.0) / (2.0 * lf - 1.0)).sqrt();
        let next = a * y * curr - b * prev;
        acc += coeffs[l + 1] * next;
        prev = curr;
        curr = next;
    }
    acc
}

/// Evaluates the orthonormal Legendre polynomials `p_0(y), ..., p_lmax(y)`.
///
/// Endpoint round-off up to [`ENDPOINT_TOL`] is clamped; anything farther
/// outside `[-1, 1]` is a domain error.
pub fn legendre_orthonormal(ell_max: usize, y: f64) -> Result<Vec<f64>> {
    let y = check_unit(y)?;
    let mut out = vec![0.0; ell_max + 1];
    recurrence_into(y, &mut out);
    Ok(out)
}

/// Evaluates the scaled frame functions `P_0(t), ..., P_N(t)` on the
/// reference interval, `P_l(t) = p_l(t / T) / sqrt(T)`.
pub fn scaled_frame_eval(config: &FrameConfig, t: f64) -> Result<Vec<f64>> {
    let t = check_unit(t)?;
    let scale = config.extension.sqrt().recip();
    let mut out = vec![0.0; config.degree + 1];
    recurrence_into(t / config.extension, &mut out);
    for v in &mut out {
        *v *= scale;
    }
    Ok(out)
}

/// Evaluates `Σ_l coeffs[l] P_l(t)` in one recurrence pass.
///
/// Unlike [`scaled_frame_eval`] this accepts any `t` with `|t| ≤ T`: the
/// frame functions are defined on the whole extended interval, and the
/// one-sided correction patches evaluate slightly past their fit range.
pub(crate) fn frame_dot(extension: f64, t: f64, coeffs: &[f64]) -> Result<f64> {
    let y = t / extension;
    let y = if y.abs() > 1.0 + ENDPOINT_TOL || y.is_nan() {
        return Err(Error::OutOfDomain {
            value: t,
            lo: -extension,
            hi: extension,
        });
    } else {
        y.clamp(-1.0, 1.0)
    };
    Ok(recurrence_dot(y, coeffs) * extension.sqrt().recip())
}
