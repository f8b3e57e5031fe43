//! Forward and inverse computations for planar conductivity inclusions.
//!
//! The forward side turns a boundary curve into generalized polarization
//! tensors (GPTs) by a Nyström discretization of the Neumann–Poincaré
//! operator, or, for shapes given by an exterior conformal map, into Faber
//! polynomial polarization tensors (FPTs) through the Grunsky matrix.
//!
//! The inverse side recovers a shape from GPTs with three non-iterative
//! methods:
//!
//! * perturbed disk ([`recover::recover_disk`]),
//! * conformal-map coefficients ([`recover::recover_conformal`]),
//! * perturbed equivalent ellipse ([`recover::recover_ellipse_perturbation`]).
//!
//! Complex numbers identify points of the plane (`x + iy`). Matrix entries
//! are stored zero-based; accessors documented as one-based take the
//! mathematical indices `m, n >= 1`.

pub mod conformal;
pub mod error;
pub mod potential;
pub mod recover;
pub mod tensors;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;
