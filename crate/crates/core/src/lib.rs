//! Pointwise algebra of double forms, Gauss–Bonnet curvatures and
//! Einstein–Lovelock tensors, with a finite-difference lattice harness that
//! checks their variational and divergence properties numerically.

pub mod curvature;
pub mod discrete;
pub mod double_form;
pub mod error;
pub mod models;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod verify;

pub use double_form::{DoubleForm, MultiIndex};
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 12;
