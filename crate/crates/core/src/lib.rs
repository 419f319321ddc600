//! Exact corrections between grouped and raw moments.
//!
//! Grouping data into classes of width `h` biases its moments. This crate
//! converts moments of grouped data into raw moments of the parent
//! distribution and back. It covers continuous and lattice (discrete)
//! parents in one or several dimensions. All correction coefficients are
//! exact rationals built from Bernoulli numbers. Float moment data is
//! supported by converting the exact coefficients at the end.
//!
//! - [`umbral`]: Bernoulli kernel and moment-sequence algebra.
//! - [`univariate`]: the four univariate transforms and their matrices.
//! - [`multivariate`]: axiswise transforms of moment tensors.
//! - [`grouping`]: moments from data, plus brute-force oracles.
//! - [`io`]: JSON and CSV file formats.
//! - [`verify`]: named invariant suites used by the CLI.

pub mod error;
pub mod exec;
pub mod scalar;
pub mod grouping;
pub mod io;
pub mod multivariate;
pub mod umbral;
pub mod univariate;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use scalar::{Rational, Scalar};
pub use umbral::{MomentSeq, Polynomial};
pub use univariate::{CorrectionMatrix, Direction, GroupingMode, GroupingSpec};
pub use multivariate::{AxisSpecs, MomentTensor, MultiIndex};
