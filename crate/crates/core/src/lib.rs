//! Exact enumeration of `N` non-intersecting directed walks ("vicious
//! walkers") in a strip of odd width, by four independent routes:
//!
//! - [`paths`]: brute-force sum over every admissible path family,
//! - [`transfer`]: sparse exact transfer-matrix recurrence,
//! - [`spectral`] and [`bethe`]: one-walk eigensystem, N-walk Bethe vectors
//!   and the spectral sum (floating point),
//! - [`gv`]: determinant of single-walk generating functions, plus the
//!   one-wall limit.

pub mod bethe;
pub mod error;
pub mod exact;
pub mod gv;
pub mod lattice;
pub mod paths;
pub mod spectral;
pub mod transfer;
pub mod weights;

pub use error::{Error, Result};
pub use exact::Rational;
pub use lattice::{OccupationVector, Parity, StripGeometry};
pub use weights::{WeightConfig, WeightSystem};
