//! Domain partitions and equispaced sampling grids.
//!
//! A [`Partition`] splits `[a, b]` into `K` subintervals
//! `I_k = [a_{k-1}, a_k]` connected to the reference interval `[-1, 1]`
//! by the affine map `x = c_k + s_k t`. Membership is half-open at
//! interior breakpoints — a breakpoint belongs to the subinterval on its
//! right — and the final subinterval is closed.
//!
//! Adjacent subintervals share their breakpoint node, so a K-piece grid
//! with m nodes per piece has `K (m - 1) + 1` distinct samples; the
//! shared value is reused by both sides.

use crate::error::{Error, Result};
use crate::legendre::ENDPOINT_TOL;

/// Equispaced nodes `t_j = -1 + 2 j / (m - 1)` on the reference interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceNodes {
    nodes: Vec<f64>,
}

impl ReferenceNodes {
    /// Builds the m-point reference grid. The two endpoints are exactly
    /// `-1.0` and `1.0`.
    pub fn new(sample_count: usize) -> Result<Self> {
        if sample_count < 2 {
            return Err(Error::InvalidArgument(format!(
                "reference grid needs at least 2 nodes, got {sample_count}"
            )));
        }
        let m = sample_count;
        let mut nodes = Vec::with_capacity(m);
        for j in 0..m {
            nodes.push(-1.0 + 2.0 * j as f64 / (m - 1) as f64);
        }
        nodes[0] = -1.0;
        nodes[m - 1] = 1.0;
        Ok(ReferenceNodes { nodes })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A partition of `[a, b]` into subintervals with affine reference maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breakpoints: Vec<f64>,
}

impl Partition {
    /// Uniform partition of `[a, b]` into `count` equal subintervals.
    pub fn uniform(a: f64, b: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument(
                "partition needs at least one subinterval".into(),
            ));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid domain [{a}, {b}]")));
        }
        let mut breakpoints = Vec::with_capacity(count + 1);
        for k in 0..=count {
            breakpoints.push(a + (b - a) * k as f64 / count as f64);
        }
        breakpoints[0] = a;
        breakpoints[count] = b;
        Ok(Partition { breakpoints })
    }

    /// Partition from explicit breakpoints `a = a_0 < a_1 < ... < a_K = b`.
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidArgument(
                "partition needs at least two breakpoints".into(),
            ));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("breakpoints must be finite".into()));
        }
        for pair in breakpoints.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::InvalidArgument(format!(
                    "breakpoints must strictly increase, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Partition { breakpoints })
    }

    /// Number of subintervals K.
    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Domain endpoints `(a, b)`.
    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Longest subinterval length.
    pub fn max_length(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(0.0, f64::max)
    }

    /// Subinterval `[a_k, a_{k+1}]` for 0-based index `k`.
    pub fn interval(&self, k: usize) -> Result<(f64, f64)> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                count: self.len(),
            });
        }
        Ok((self.breakpoints[k], self.breakpoints[k + 1]))
    }

    /// Center `c_k` and half-width `s_k` of subinterval `k`, so that the
    /// affine map is `x = c_k + s_k t`.
    pub fn affine(&self, k: usize) -> Result<(f64, f64)> {
        let (lo, hi) = self.interval(k)?;
        Ok((0.5 * (lo + hi), 0.5 * (hi - lo)))
    }

    /// Maps `x` in subinterval `k` to the reference coordinate `t`
    /// (unclamped).
    pub fn to_reference(&self, k: usize, x: f64) -> Result<f64> {
        let (center, half) = self.affine(k)?;
        Ok((x - center) / half)
    }

    /// Subinterval containing `x` and the local coordinate `t ∈ [-1, 1]`.
    ///
    /// Interior breakpoints round to the right subinterval; `b` belongs to
    /// the last one. Points within an endpoint-tolerance outside `[a, b]`
    /// resolve to the boundary.
    pub fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let k = self.locate_index(x)?;
        let t = self.to_reference(k, x)?.clamp(-1.0, 1.0);
        Ok((k, t))
    }

    /// Index half of [`Partition::locate`].
    pub fn locate_index(&self, x: f64) -> Result<usize> {
        let (a, b) = self.domain();
        let span = b - a;
        if x.is_nan() || x < a - span * ENDPOINT_TOL || x > b + span * ENDPOINT_TOL {
            return Err(Error::OutOfDomain {
                value: x,
                lo: a,
                hi: b,
            });
        }
        if x >= b {
            return Ok(self.len() - 1);
        }
        let x = x.max(a);
        // First breakpoint strictly above x, minus one: half-open cells.
        let upper = self.breakpoints.partition_point(|&p| p <= x);
        Ok(upper.saturating_sub(1).min(self.len() - 1))
    }

    /// Physical sampling nodes of subinterval `k`: the reference grid
    /// mapped through the affine map, with endpoints snapped to the exact
    /// breakpoints.
    pub fn physical_nodes(&self, k: usize, reference: &ReferenceNodes) -> Result<Vec<f64>> {
        let (lo, hi) = self.interval(k)?;
        let (center, half) = self.affine(k)?;
        let mut nodes: Vec<f64> = reference
            .as_slice()
            .iter()
            .map(|&t| center + half * t)
            .collect();
        nodes[0] = lo;
        *nodes.last_mut().unwrap() = hi;
        Ok(nodes)
    }

    /// All distinct physical nodes in increasing order. Each subinterval
    /// contributes its first `m - 1` nodes; the right domain endpoint
    /// closes the grid. Length is [`Partition::total_nodes`].
    pub fn sample_nodes(&self, reference: &ReferenceNodes) -> Vec<f64> {
        let m = reference.len();
        let mut out = Vec::with_capacity(self.total_nodes(m));
        for k in 0..self.len() {
            let nodes = self.physical_nodes(k, reference).unwrap();
            out.extend_from_slice(&nodes[..m - 1]);
        }
        out.push(self.domain().1);
        out
    }

    /// Count of distinct nodes, `K (m - 1) + 1`.
    pub fn total_nodes(&self, sample_count: usize) -> usize {
        self.len() * (sample_count - 1) + 1
    }

    /// Index range of subinterval `k`'s samples inside the
    /// [`Partition::sample_nodes`] vector. Adjacent ranges overlap by one.
    pub fn local_range(&self, k: usize, sample_count: usize) -> Result<std::ops::Range<usize>> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                count: self.len(),
            });
        }
        let start = k * (sample_count - 1);
        Ok(start..start + sample_count)
    }
}
