//! Exact combinatorics of Kato fans: affine monoids, rational cones,
//! fans glued from monoid spectra, extended cone complexes and
//! tropicalization of monomial and power-series points.

pub mod error;
pub mod cli;
pub mod complex;
pub mod cone;
pub mod fan;
pub mod lattice;
pub mod monoid;
pub mod trop;

pub use error::{Error, Result};
