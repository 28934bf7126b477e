//! Local Legendre frame (LLF) approximation from equispaced samples.
//!
//! Polynomial interpolation at equispaced nodes is exponentially unstable
//! as the degree grows (the Runge phenomenon), yet equispaced data is what
//! measurements usually provide. This crate implements a stable
//! alternative: split the domain into subintervals, map each to the
//! reference interval `[-1, 1]`, and fit the data in a *frame* — Legendre
//! polynomials orthonormalized on a wider interval `[-T, T]` and
//! restricted back. The redundancy that makes the frame ill-conditioned
//! is tamed by a truncated-SVD least-squares solve, giving near
//! machine-precision accuracy with provable stability.
//!
//! The pipeline splits into an *offline* stage — assemble the reference
//! sampling matrix, factorize it once, optionally persist it — and an
//! *online* stage that reuses the factorization for every subinterval of
//! every dataset with the same local parameters. On top of the smooth
//! pipeline sits a detect–localize–correct workflow for continuous
//! functions with derivative singularities.
//!
//! # Quick start
//!
//! ```
//! use llf::{approximate_function, FrameConfig, Partition};
//!
//! let config = FrameConfig::new(15, 6.0, 1.0, 1e-14)?;
//! let partition = Partition::uniform(-1.0, 1.0, 8)?;
//! let approx = approximate_function(|x| (4.0 - x * x).recip(), &partition, &config)?;
//! let err = (approx.evaluate(0.3)? - (4.0 - 0.09f64).recip()).abs();
//! assert!(err < 1e-12);
//! # Ok::<(), llf::Error>(())
//! ```
//!
//! The `examples/` directory walks through each capability: basic
//! approximation, the offline/online split, convergence and parameter
//! studies, and the singularity workflow.

// Validation throughout uses `!(x > bound)` instead of `x <= bound` on
// purpose: the negated form also rejects NaN, the plain form lets it
// through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod bytes;
mod datafile;
mod error;
mod harness;
mod lagrange;
mod legendre;
mod offline;
mod partition;
mod singularity;
mod solver;
mod special;
mod svd;
mod testfn;

pub use datafile::{DataFile, GRID_TOL};
pub use error::{Error, Result};
pub use harness::{
    approximate_from_data, cache_dir, cache_file_name, cached_factorization,
    convergence_is_monotone, run_convergence, run_piecewise_pipeline, run_rank_table, run_sweep,
    run_t_sweep, write_convergence_csv, write_rank_csv, write_sweep_csv, ConvergenceRow,
    PipelineReport, RankRow, SweepResult, SweepRow, SweepSpec, SweepVariable, DEFAULT_TOLERANCE,
    GRID_FACTOR, RANK_TABLE_CASES,
};
pub use lagrange::{lagrange_interp_bound, PiecewiseLagrange};
pub use legendre::{legendre_orthonormal, scaled_frame_eval, FrameConfig, ENDPOINT_TOL};
pub use offline::{
    assemble_matrix, factorization_for, factorize, ReferenceFactorization, SamplingMatrix,
};
pub use partition::{Partition, ReferenceNodes};
pub use singularity::{
    correct, detect, localize_all, localize_window, CorrectedApproximant, FactorizationCache,
    Patch, SingularityReport, Window, WindowLocalization, DEFAULT_TAU,
};
pub use solver::{
    approximate_from_samples, approximate_function, approximate_with, solve_local,
    LocalCoefficients, PiecewiseApproximant,
};
pub use special::erf;
pub use testfn::{piecewise_base, piecewise_value, TestFunction};
