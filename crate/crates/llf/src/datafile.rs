//! Equispaced sample files: CSV with header `x,f`.
//!
//! The method's premise is equispaced data, so ingestion refuses
//! jittered grids instead of silently accepting them: spacing must be
//! uniform to 1e-10 relative. Floats are written in shortest
//! round-trip form, which makes a sample-to-file-to-approximant path
//! bit-identical to the direct callback path.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::partition::{Partition, ReferenceNodes};

/// Relative spacing slack below which a grid counts as equispaced.
pub const GRID_TOL: f64 = 1e-10;

/// An equispaced dataset: strictly increasing uniform `x` with one
/// sample per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl DataFile {
    /// Validates and wraps sample vectors: equal lengths (≥ 2), finite
    /// values, strictly increasing x, uniform spacing within
    /// [`GRID_TOL`] relative.
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                actual: values.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidData(
                "need at least two samples to define a grid".into(),
            ));
        }
        if xs.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite entry in data".into()));
        }
        let spacing = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        if !(spacing > 0.0) {
            return Err(Error::InvalidData("x must be strictly increasing".into()));
        }
        for i in 0..xs.len() - 1 {
            let d = xs[i + 1] - xs[i];
            if !(d > 0.0) {
                return Err(Error::InvalidData(format!(
                    "x must be strictly increasing (violated at row {})",
                    i + 1
                )));
            }
            if (d / spacing - 1.0).abs() > GRID_TOL {
                return Err(Error::InvalidData(format!(
                    "grid is not equispaced: spacing at row {} deviates by {:.2e} relative",
                    i + 1,
                    (d / spacing - 1.0).abs()
                )));
            }
        }
        Ok(DataFile { xs, values })
    }

    /// Samples `f` on the closed equispaced grid of `count` points over
    /// `[a, b]`.
    pub fn sample(f: impl Fn(f64) -> f64, a: f64, b: f64, count: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid domain [{a}, {b}]")));
        }
        if count < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least two samples, got {count}"
            )));
        }
        let mut xs = Vec::with_capacity(count);
        for i in 0..count {
            xs.push(a + (b - a) * i as f64 / (count - 1) as f64);
        }
        xs[0] = a;
        xs[count - 1] = b;
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values)
    }

    /// Samples `f` at exactly the sampling nodes a solve on `partition`
    /// with `sample_count` points per subinterval would use. A file
    /// written from this grid reproduces the direct callback path
    /// bit-for-bit; [`DataFile::sample`]'s plain grid can drift from the
    /// solver's nodes by final-digit round-off.
    pub fn sample_on(
        f: impl Fn(f64) -> f64,
        partition: &Partition,
        sample_count: usize,
    ) -> Result<Self> {
        let reference = ReferenceNodes::new(sample_count)?;
        let xs = partition.sample_nodes(&reference);
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    /// Never true: construction requires at least two samples.
    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid extent `[a, b]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Parses `x,f` CSV text.
    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidData("empty data file".into()))??;
        if header.trim() != "x,f" {
            return Err(Error::InvalidData(format!(
                "expected header 'x,f', found {header:?}"
            )));
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let row = line.trim();
            if row.is_empty() {
                continue;
            }
            let (xs_str, f_str) = row.split_once(',').ok_or_else(|| {
                Error::InvalidData(format!("row {} has no comma: {row:?}", i + 2))
            })?;
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidData(format!("row {}: bad number {s:?}", i + 2)))
            };
            xs.push(parse(xs_str)?);
            values.push(parse(f_str)?);
        }
        Self::new(xs, values)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(BufReader::new(File::open(path)?))
    }

    /// Writes `x,f` CSV with shortest round-trip float formatting.
    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "x,f")?;
        for (x, v) in self.xs.iter().zip(&self.values) {
            writeln!(w, "{x},{v}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)
    }
}
