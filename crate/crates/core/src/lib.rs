//! Zeros, poles and Poincaré indices of harmonic mappings
//! `f(z) = h(z) - conj(z)`.
//!
//! Indices are computed two independent ways: numerically, by tracking the
//! continuous argument of `f` along shrinking circles ([`winding`]), and
//! symbolically, from the leading Taylor coefficients of `h` at the point
//! ([`classifier`]). The [`verifier`] checks both against the global winding
//! through the argument principle, and [`portrait`] renders phase portraits.

pub mod classifier;
pub mod error;
pub mod function;
pub mod poly;
pub mod portrait;
pub mod verifier;
pub mod winding;
pub mod zeros;

/// Complex numbers in double precision.
pub type Complex = num_complex::Complex64;

pub use error::{Error, Result};
pub use function::{parse_function, AnalyticFunction, HarmonicMapping, TruncatedSeries};
