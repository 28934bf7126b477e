//! Equispaced piecewise Lagrange interpolation and its error bound.
//!
//! Classical comparison tool: degree-n interpolation at the n+1
//! equispaced reference nodes on each subinterval. For `f ∈ C^{n+1}`
//! with `‖f^{(n+1)}‖_∞ ≤ C_f`, the piecewise interpolant obeys
//!
//! ```text
//! |f(x) − L_n f(x)| ≤ h_I^{n+1} / n^{n+1} · C_f,
//! ```
//!
//! `h_I` the longest subinterval. This module exists to make that bound
//! checkable against a real interpolation, not to compete with the frame
//! solver; the low degrees involved keep equispaced interpolation benign.

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Right-hand side of the piecewise interpolation bound,
/// `h_I^{n+1}/n^{n+1} · C_f`, evaluated in log space so large `n` cannot
/// overflow the power.
pub fn lagrange_interp_bound(n: usize, h_max: f64, c_f: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "interpolation degree must be at least 1".into(),
        ));
    }
    if !(h_max > 0.0) || c_f < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need h_max > 0 and C_f >= 0, got {h_max} and {c_f}"
        )));
    }
    if c_f == 0.0 {
        return Ok(0.0);
    }
    let log = (n as f64 + 1.0) * (h_max.ln() - (n as f64).ln()) + c_f.ln();
    Ok(log.exp())
}

/// Piecewise degree-n Lagrange interpolant of `f` at equispaced nodes on
/// each subinterval of `partition`.
#[derive(Debug, Clone)]
pub struct PiecewiseLagrange {
    partition: Partition,
    degree: usize,
    // Per subinterval: values at the n+1 local nodes.
    values: Vec<Vec<f64>>,
    // Barycentric weights for equispaced nodes, shared by every piece.
    weights: Vec<f64>,
}

impl PiecewiseLagrange {
    pub fn new(f: impl Fn(f64) -> f64, partition: &Partition, degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidArgument(
                "interpolation degree must be at least 1".into(),
            ));
        }
        let n = degree;
        let mut values = Vec::with_capacity(partition.len());
        for k in 0..partition.len() {
            let (center, half) = partition.affine(k)?;
            let mut local = Vec::with_capacity(n + 1);
            for j in 0..=n {
                let t = -1.0 + 2.0 * j as f64 / n as f64;
                local.push(f(center + half * t));
            }
            values.push(local);
        }
        // Equispaced barycentric weights are (-1)^j C(n, j) up to a
        // common factor, which the barycentric ratio cancels.
        let mut weights = vec![0.0; n + 1];
        let mut binom = 1.0f64;
        for (j, w) in weights.iter_mut().enumerate() {
            *w = if j % 2 == 0 { binom } else { -binom };
            binom *= (n - j) as f64 / (j + 1) as f64;
        }
        Ok(PiecewiseLagrange {
            partition: partition.clone(),
            degree,
            values,
            weights,
        })
    }

    /// Evaluates the interpolant; exact at the interpolation nodes.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let (k, t) = self.partition.locate(x)?;
        let n = self.degree;
        let vals = &self.values[k];
        // Barycentric second form; node hits are returned exactly.
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&val, &weight)) in vals.iter().zip(&self.weights).enumerate() {
            let tj = -1.0 + 2.0 * j as f64 / n as f64;
            let diff = t - tj;
            if diff == 0.0 {
                return Ok(val);
            }
            let w = weight / diff;
            num += w * val;
            den += w;
        }
        Ok(num / den)
    }

    /// Maximum deviation from `f` over `count` equispaced probe points.
    pub fn max_error(&self, f: impl Fn(f64) -> f64, count: usize) -> Result<f64> {
        let (a, b) = self.partition.domain();
        let count = count.max(2);
        let mut worst = 0.0f64;
        for i in 0..count {
            let x = a + (b - a) * i as f64 / (count - 1) as f64;
            worst = worst.max((f(x) - self.evaluate(x)?).abs());
        }
        Ok(worst)
    }
}
