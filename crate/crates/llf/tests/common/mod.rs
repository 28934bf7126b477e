//! Oracles shared by the integration suite, independent of the library's
//! own numerics: Legendre polynomials in exact rational arithmetic (both
//! point values and coefficient vectors), an exact rational least-squares
//! solver via normal equations, and a Maclaurin-series erf reference.

#![allow(dead_code)] // each test binary uses its own subset

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub fn big_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn big_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational image of an f64 (every finite f64 is rational).
pub fn big(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

pub fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().expect("rational in f64 range")
}

/// Values `P_0(y), ..., P_lmax(y)` of the classical (unnormalized)
/// Legendre polynomials by the three-term recurrence
/// `(l+1) P_{l+1} = (2l+1) y P_l - l P_{l-1}`, in exact arithmetic.
pub fn legendre_values_exact(ell_max: usize, y: &BigRational) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(ell_max + 1);
    out.push(BigRational::one());
    if ell_max == 0 {
        return out;
    }
    out.push(y.clone());
    for l in 1..ell_max {
        let next = (big_int(2 * l as i64 + 1) * y * &out[l] - big_int(l as i64) * &out[l - 1])
            / big_int(l as i64 + 1);
        out.push(next);
    }
    out
}

/// Coefficient vectors (index = power of y) of `P_0, ..., P_lmax`, from
/// the same recurrence applied to polynomials.
pub fn legendre_coeffs_exact(ell_max: usize) -> Vec<Vec<BigRational>> {
    let mut polys: Vec<Vec<BigRational>> = Vec::with_capacity(ell_max + 1);
    polys.push(vec![BigRational::one()]);
    if ell_max == 0 {
        return polys;
    }
    polys.push(vec![BigRational::zero(), BigRational::one()]);
    for l in 1..ell_max {
        let mut next = vec![BigRational::zero(); l + 2];
        // (2l+1) y P_l spreads each power up by one.
        for (k, c) in polys[l].iter().enumerate() {
            next[k + 1] += big_int(2 * l as i64 + 1) * c;
        }
        for (k, c) in polys[l - 1].iter().enumerate() {
            next[k] -= big_int(l as i64) * c;
        }
        for c in &mut next {
            *c /= big_int(l as i64 + 1);
        }
        polys.push(next);
    }
    polys
}

/// Exact `∫_{-1}^{1} p(y) dy` for a coefficient vector (index = power).
pub fn integrate_unit_exact(poly: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (k, c) in poly.iter().enumerate() {
        if k % 2 == 0 {
            acc += c * big_ratio(2, k as i64 + 1);
        }
    }
    acc
}

/// Exact polynomial product.
pub fn poly_mul_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Exact least-squares solution of `min ‖A u − b‖₂` through the normal
/// equations `AᵀA u = Aᵀb`, solved by fraction-exact Gaussian
/// elimination. Requires full column rank (the normal matrix is then
/// positive definite, so elimination cannot hit a zero pivot chain).
pub fn least_squares_exact(a: &[Vec<BigRational>], b: &[BigRational]) -> Vec<BigRational> {
    let m = a.len();
    assert!(m > 0 && b.len() == m, "shape mismatch");
    let n = a[0].len();
    assert!(a.iter().all(|row| row.len() == n), "ragged matrix");
    // Augmented system [AᵀA | Aᵀb].
    let mut g = vec![vec![BigRational::zero(); n + 1]; n];
    for i in 0..n {
        for j in i..n {
            let mut s = BigRational::zero();
            for row in a {
                s += &row[i] * &row[j];
            }
            g[i][j] = s.clone();
            g[j][i] = s;
        }
        let mut s = BigRational::zero();
        for (row, bi) in a.iter().zip(b) {
            s += &row[i] * bi;
        }
        g[i][n] = s;
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !g[r][col].is_zero())
            .expect("rank-deficient normal equations");
        g.swap(col, pivot_row);
        for row in col + 1..n {
            if g[row][col].is_zero() {
                continue;
            }
            let factor = &g[row][col] / &g[col][col];
            let pivot: Vec<BigRational> = g[col][col..=n].to_vec();
            for (cell, p) in g[row][col..=n].iter_mut().zip(&pivot) {
                *cell -= &factor * p;
            }
        }
    }
    let mut u = vec![BigRational::zero(); n];
    for row in (0..n).rev() {
        let mut s = g[row][n].clone();
        for k in row + 1..n {
            s -= &g[row][k] * &u[k];
        }
        u[row] = s / &g[row][row];
    }
    u
}

/// Sanity guard for the rational helpers themselves.
pub fn assert_exact_helpers_agree() {
    // P_4(1/2) = (35 y^4 - 30 y^2 + 3)/8 at y = 1/2 → -37/128.
    let y = big_ratio(1, 2);
    let vals = legendre_values_exact(4, &y);
    assert_eq!(vals[4], big_ratio(-37, 128));
    let coeffs = legendre_coeffs_exact(4);
    let mut horner = BigRational::zero();
    for c in coeffs[4].iter().rev() {
        horner = horner * &y + c;
    }
    assert_eq!(horner, big_ratio(-37, 128));
    // min ‖[1;1] u − [1;3]‖ → u = 2.
    let a = vec![vec![BigRational::one()], vec![BigRational::one()]];
    let b = vec![big_int(1), big_int(3)];
    assert_eq!(least_squares_exact(&a, &b), vec![big_int(2)]);
}

/// erf by its Maclaurin series, `2/√π Σ (−1)^k x^{2k+1}/(k!(2k+1))`;
/// 30 terms give ~1e-15 absolute accuracy for `|x| ≤ 2`.
pub fn erf_maclaurin(x: f64) -> f64 {
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    let x2 = x * x;
    let mut term = x; // x^{2k+1}/k! at k = 0
    let mut acc = 0.0;
    for k in 0..30u32 {
        let signed = if k % 2 == 0 { term } else { -term };
        acc += signed / (2.0 * k as f64 + 1.0);
        term *= x2 / (k as f64 + 1.0);
    }
    two_over_sqrt_pi * acc
}

/// |a − b| measured against max(1, |b|): absolute for small magnitudes,
/// relative for large ones.
pub fn mixed_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Deviation of each rational from the closest f64 must stay within
/// `tol` in the mixed sense.
pub fn assert_close_to_exact(got: &[f64], want: &[BigRational], tol: f64, label: &str) {
    assert_eq!(got.len(), want.len(), "{label}: length");
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        let w = to_f64(w);
        assert!(
            mixed_error(*g, w) <= tol,
            "{label}[{i}]: got {g}, exact {w}, mixed error {}",
            mixed_error(*g, w)
        );
    }
}

/// Euclidean norm helper for f64 slices.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Signed check used by quasi-optimality style inequalities.
pub fn rational_is_nonneg(v: &BigRational) -> bool {
    !v.is_negative()
}
