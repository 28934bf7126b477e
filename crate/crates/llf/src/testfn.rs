//! Benchmark function registry.
//!
//! Nine named functions spanning three regimes — relatively smooth (f1,
//! f2, f3), highly oscillatory (f4, f5, f6), and moderately oscillatory
//! fixed-budget comparisons (f7, f8, f9) — plus a parameterized
//! continuous piecewise-smooth family with a first-derivative kink at ξ
//! and a second-derivative break at ζ. f6 is a second chirp: the
//! conventional Airy benchmark needs a special-function stack orthogonal
//! to everything tested here, and tabulated Airy data can still enter
//! through the data-file path.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::special::erf;

type Sampler = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A named benchmark: deterministic sampler plus its natural domain.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    description: String,
    domain: (f64, f64),
    sampler: Sampler,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("description", &self.description)
            .field("domain", &self.domain)
            .finish()
    }
}

impl TestFunction {
    fn new(
        id: &str,
        description: &str,
        domain: (f64, f64),
        sampler: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            id: id.to_string(),
            description: description.to_string(),
            domain,
            sampler: Arc::new(sampler),
        }
    }

    /// Looks up one of the built-in benchmarks `f1`..`f9`.
    pub fn by_id(id: &str) -> Result<Self> {
        Self::all().into_iter().find(|f| f.id == id).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown test function {id:?}; expected one of f1..f9"
            ))
        })
    }

    /// Every built-in benchmark, in id order.
    pub fn all() -> Vec<Self> {
        vec![
            Self::new(
                "f1",
                "sqrt(x)/(x^2 + x/2 + 1) on [1, 15]",
                (1.0, 15.0),
                |x| x.sqrt() / (x * x + 0.5 * x + 1.0),
            ),
            Self::new("f2", "1/(4 - x^2) on [-1, 1]", (-1.0, 1.0), |x| {
                (4.0 - x * x).recip()
            }),
            Self::new("f3", "erf(x/3) on [-4, 4]", (-4.0, 4.0), |x| erf(x / 3.0)),
            Self::new("f4", "cos(100/(1 + 25x^2)) on [-1, 1]", (-1.0, 1.0), |x| {
                (100.0 / (1.0 + 25.0 * x * x)).cos()
            }),
            Self::new("f5", "cos(200 x^2) on [-1, 1]", (-1.0, 1.0), |x| {
                (200.0 * x * x).cos()
            }),
            Self::new(
                "f6",
                "cos(150 x^2 + 10 x) on [-1, 1] (chirp)",
                (-1.0, 1.0),
                |x| (150.0 * x * x + 10.0 * x).cos(),
            ),
            Self::new("f7", "1/(1 + 25 x^2) on [-1, 1]", (-1.0, 1.0), |x| {
                (1.0 + 25.0 * x * x).recip()
            }),
            Self::new(
                "f8",
                "exp(sin(2.7 pi x) + cos(pi x)) on [-1, 1]",
                (-1.0, 1.0),
                |x| {
                    ((2.7 * std::f64::consts::PI * x).sin() + (std::f64::consts::PI * x).cos())
                        .exp()
                },
            ),
            Self::new("f9", "x^2 sin(20 x) on [-1, 1]", (-1.0, 1.0), |x| {
                x * x * (20.0 * x).sin()
            }),
        ]
    }

    /// A pure tone `sin(ωx)` on [-1, 1].
    pub fn sine(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "frequency must be finite, got {omega}"
            )));
        }
        Ok(Self::new(
            &format!("sin:{omega}"),
            &format!("sin({omega} x) on [-1, 1]"),
            (-1.0, 1.0),
            move |x| (omega * x).sin(),
        ))
    }

    /// Resolves a function spec: `f1`..`f9`, `sin:<omega>`, or
    /// `piecewise:<xi>:<zeta>`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(omega) = spec.strip_prefix("sin:") {
            let omega: f64 = omega
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad frequency in {spec:?}")))?;
            return Self::sine(omega);
        }
        if let Some(rest) = spec.strip_prefix("piecewise:") {
            let (xi, zeta) = rest.split_once(':').ok_or_else(|| {
                Error::InvalidArgument(format!("expected piecewise:<xi>:<zeta>, got {spec:?}"))
            })?;
            let parse = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad break point {s:?} in {spec:?}"))
                })
            };
            return Self::piecewise(parse(xi)?, parse(zeta)?);
        }
        Self::by_id(spec).map_err(|_| {
            Error::InvalidArgument(format!(
                "unknown function {spec:?}; expected f1..f9, sin:<omega>, or piecewise:<xi>:<zeta>"
            ))
        })
    }

    /// The continuous piecewise-smooth family on [0, 1]: smooth base,
    /// slope kink `+(x - xi)` past ξ, curvature break `+(x - zeta)²`
    /// past ζ. Requires `0 < xi < zeta < 1`.
    pub fn piecewise(xi: f64, zeta: f64) -> Result<Self> {
        if !(0.0 < xi && xi < zeta && zeta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < xi < zeta < 1, got xi = {xi}, zeta = {zeta}"
            )));
        }
        Ok(Self::new(
            "piecewise",
            "exp(x)cos(5x) + x/(1+x^2) with kink at xi, curvature break at zeta, on [0, 1]",
            (0.0, 1.0),
            move |x| piecewise_value(xi, zeta, x),
        ))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Natural domain `[a, b]`.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.sampler)(x)
    }

    /// Clonable sampler handle for callers that need a plain closure.
    pub fn sampler(&self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let s = Arc::clone(&self.sampler);
        move |x| s(x)
    }
}

/// Smooth base of the piecewise family.
pub fn piecewise_base(x: f64) -> f64 {
    x.exp() * (5.0 * x).cos() + x / (1.0 + x * x)
}

/// Value of the piecewise family: base below ξ, kink added on [ξ, ζ),
/// kink plus quadratic from ζ on. Continuous; first derivative jumps at
/// ξ, second derivative at ζ.
pub fn piecewise_value(xi: f64, zeta: f64, x: f64) -> f64 {
    let mut v = piecewise_base(x);
    if x >= xi {
        v += x - xi;
    }
    if x >= zeta {
        v += (x - zeta) * (x - zeta);
    }
    v
}
