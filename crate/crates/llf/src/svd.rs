//! One-sided Jacobi singular value decomposition.
//!
//! The reference sampling matrices have singular values spanning ~16
//! orders of magnitude, and the truncation logic reads the spectrum right
//! down at the 1e-14 threshold. Bidiagonalization-based SVDs can lose
//! many digits of backward accuracy on such graded matrices (measured
//! reconstruction residuals up to 1e-6·σ₀ at m = 116 with a
//! general-purpose routine); one-sided Jacobi instead applies exact
//! plane rotations until the columns are mutually orthogonal, which keeps
//! the backward error at a few ulps regardless of grading.
//!
//! The matrix must be tall or square (m ≥ n). Cost is O(m·n²) per sweep;
//! the sizes here (n ≤ ~160) converge in a handful of sweeps.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Maximum full sweeps before declaring non-convergence.
const MAX_SWEEPS: usize = 64;

/// Thin SVD `A = U diag(σ) Vᵀ` with `U` m×n, `σ` length n descending,
/// `V` n×n. Columns of `U` for exactly-zero singular values are zero.
pub(crate) fn jacobi_svd(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let m = a.nrows();
    let n = a.ncols();
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "one-sided Jacobi needs a tall or square matrix, got {m}x{n}"
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix contains non-finite entries".into(),
        ));
    }

    let mut u = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    // Orthogonality is relative to the column norms, so tiny columns are
    // resolved as accurately as large ones.
    let tol = (m as f64).sqrt() * f64::EPSILON;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for r in 0..m {
                    let x = u[(r, p)];
                    let y = u[(r, q)];
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                if apq.abs() <= tol * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = (1.0 + t * t).sqrt().recip();
                let s = c * t;
                for r in 0..m {
                    let x = u[(r, p)];
                    let y = u[(r, q)];
                    u[(r, p)] = c * x - s * y;
                    u[(r, q)] = s * x + c * y;
                }
                for r in 0..n {
                    let x = v[(r, p)];
                    let y = v[(r, q)];
                    v[(r, p)] = c * x - s * y;
                    v[(r, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdFailed(format!(
            "one-sided Jacobi did not converge within {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| u.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u_out = DMatrix::zeros(m, n);
    let mut v_out = DMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > 0.0 {
            for r in 0..m {
                u_out[(r, dst)] = u[(r, src)] / s;
            }
        }
        for r in 0..n {
            v_out[(r, dst)] = v[(r, src)];
        }
    }
    Ok((u_out, sigma, v_out))
}
