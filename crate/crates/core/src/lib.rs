//! Norm-bounded factorizations, Gaussian hyperplane rounding and protocol
//! trees for low-rank sign matrices.
//!
//! The crate takes a dense +/-1 matrix, produces an inner-product
//! factorization whose vectors are rescaled (through a minimum-volume
//! enclosing ellipsoid) to have norm at most rank^(1/4), and then rounds
//! random Gaussian hyperplanes against the rescaled vectors to find large
//! almost-monochromatic rectangles. On top of that sit a deterministic
//! protocol-tree builder, rectangle discrepancy lower-bound witnesses, and
//! brute-force oracles that cross-check every guarantee at small scale.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the default `f64` instantiation.

pub mod discrepancy;
pub mod error;
pub mod factorize;
pub mod generators;
pub mod john;
pub mod linalg;
pub mod matrix;
pub mod protocol;
pub mod rectangle;
pub mod rng;
pub mod rounding;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::{EntryClass, EntryMeasure, Rectangle, Sign, SignMatrix};
pub use scalar::Scalar;

/// Default `f64` instantiations of the generic types.
pub type EntryMeasure64 = matrix::EntryMeasure<f64>;
pub type Factorization64 = factorize::Factorization<f64>;
pub type EllipsoidForm64 = john::EllipsoidForm<f64>;
pub type RoundingConfig64 = rounding::RoundingConfig<f64>;
pub type RoundingOutcome64 = rounding::RoundingOutcome<f64>;
