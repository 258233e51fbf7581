//! Finite-difference Riemannian geometry on periodic lattices.
//!
//! First derivatives are 4th-order central differences with periodic wrap;
//! second derivatives are compositions of first-derivative stencils, so that
//! summation by parts holds exactly on the lattice. Double-form quantities
//! are expressed in the orthonormal frame `E = L^{-T}` of the Cholesky
//! factorization `g = L Lᵀ` (Gram–Schmidt applied to `∂₀, ∂₁, …`).
//!
//! Per-point work runs on a worker pool capped by `GBCURV_THREADS`; all
//! reductions are compensated sums in lattice order, so results do not
//! depend on the worker count.

mod field;
mod geometry;
mod grid;
mod parallel;
mod variational;

pub use field::{
    random_component_terms, ComponentTerm, MetricField, MetricFieldSpec, MetricSource, ScalarField,
    TensorField2, TrigTerm, MIN_EIGENVALUE,
};
pub use geometry::{
    christoffel, divergence, ell_2k, hessian, integrate, lovelock_divergence_defect, riemann_at,
    selfadjointness_check, selfadjointness_terms, total_gauss_bonnet, Christoffel, Connection,
};
pub use grid::{Grid, MIN_POINTS};
pub use parallel::{compensated_sum, THREADS_ENV};
pub use variational::{
    extrapolate_to_zero, fitted_order, lovelock_divergence_study, variational_check, DivergenceStudy,
    VariationalReport, DEFECT_FLOOR,
};
