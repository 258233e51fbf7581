//! Pointwise curvature invariants built from a curvature tensor and, for the
//! extrinsic ones, a scalar second fundamental form.
//!
//! Normalization: constant sectional curvature `λ` is `R = (λ/2) g²`, so the
//! unit sphere in Euclidean space has `R = ½B²` with `B = g`. Under this
//! convention `h₂ = ½ scal` and `T₂ = ½ scal·g − Ric` is the Einstein tensor.

mod einstein;
mod hypersurface;
mod invariants;
mod thorpe;

use serde::{Deserialize, Serialize};

use crate::double_form::DoubleForm;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use einstein::{einstein_pq_defect, h4k_positivity_check, PositivityCheck, EINSTEIN_TOL};
pub use hypersurface::{
    elementary_symmetric, even_intrinsic_identity, gauss_bonnet_odd, gauss_equation,
    mean_curvature_s, minimality_defect,
};
pub use invariants::{
    as_operator, einstein_lovelock, gauss_bonnet_even, generalized_ricci, lovelock_lagrangian,
    sectional_2p, weitzenbock_form,
};
pub use thorpe::{thorpe_oracle, thorpe_sum, THORPE_MAX_P};

/// Absolute/relative tolerance for the symmetry checks in float mode.
pub const FLOAT_SYMMETRY_TOL: f64 = 1e-10;

fn within_tol<S: Scalar>(defect: f64, scale: f64) -> bool {
    if S::EXACT {
        defect == 0.0
    } else {
        defect <= FLOAT_SYMMETRY_TOL * scale.max(1.0)
    }
}

/// A symmetric (2,2) double form satisfying the first Bianchi identity.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor<S = f64> {
    form: DoubleForm<S>,
}

impl<S: Scalar> CurvatureTensor<S> {
    /// Validates bidegree, block symmetry and the first Bianchi identity
    /// (exactly in rational mode, to `1e-10` relative in float mode).
    pub fn new(form: DoubleForm<S>) -> Result<Self> {
        if form.bidegree() != (2, 2) {
            return Err(Error::NotCurvature(format!(
                "bidegree ({},{})",
                form.p(),
                form.q()
            )));
        }
        let scale = form.norm();
        let asym = form.try_sub(&form.transpose())?.norm();
        if !within_tol::<S>(asym, scale) {
            return Err(Error::NotCurvature(format!("not symmetric (defect {asym:e})")));
        }
        let bianchi = form.bianchi_defect()?;
        if !within_tol::<S>(bianchi, scale) {
            return Err(Error::NotCurvature(format!(
                "first Bianchi identity fails (defect {bianchi:e})"
            )));
        }
        Ok(CurvatureTensor { form })
    }

    /// Wraps a (2,2) form without checking the symmetries; used for
    /// finite-difference curvature whose symmetries hold only to truncation
    /// error.
    pub fn new_unchecked(form: DoubleForm<S>) -> Self {
        debug_assert_eq!(form.bidegree(), (2, 2));
        CurvatureTensor { form }
    }

    /// The flat tensor; `n = 1` is allowed (its (2,2) forms are all zero).
    pub fn zero(n: usize) -> Result<Self> {
        crate::double_form::check_dim(n)?;
        Ok(CurvatureTensor {
            form: DoubleForm::zeros_unchecked(n, 2, 2),
        })
    }

    pub fn form(&self) -> &DoubleForm<S> {
        &self.form
    }

    pub fn into_form(self) -> DoubleForm<S> {
        self.form
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    /// Ricci tensor `cR`.
    pub fn ricci(&self) -> DoubleForm<S> {
        self.form.contract().expect("(2,2) form")
    }

    /// Scalar curvature `c²R`.
    pub fn scalar_curvature(&self) -> S {
        self.form.contract_iter(2).and_then(|f| f.value()).expect("(2,2) form")
    }

    pub fn convert<T: Scalar>(&self) -> CurvatureTensor<T> {
        CurvatureTensor {
            form: self.form.convert(),
        }
    }
}

/// Scalar second fundamental form `B_N` of a hypersurface, optionally with its
/// principal curvatures when `B` is diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeOperatorData<S = f64> {
    b: DoubleForm<S>,
    kappa: Option<Vec<S>>,
}

impl<S: Scalar> ShapeOperatorData<S> {
    pub fn new(b: DoubleForm<S>) -> Result<Self> {
        if b.bidegree() != (1, 1) {
            return Err(Error::BidegreeMismatch(b.p(), b.q(), 1, 1));
        }
        let asym = b.try_sub(&b.transpose())?.norm();
        if !within_tol::<S>(asym, b.norm()) {
            return Err(Error::InvalidArgument(format!(
                "second fundamental form is not symmetric (defect {asym:e})"
            )));
        }
        Ok(ShapeOperatorData { b, kappa: None })
    }

    /// `B = diag(κ)`.
    pub fn from_kappa(kappa: &[S]) -> Result<Self> {
        Ok(ShapeOperatorData {
            b: DoubleForm::diagonal(kappa)?,
            kappa: Some(kappa.to_vec()),
        })
    }

    pub fn b(&self) -> &DoubleForm<S> {
        &self.b
    }

    pub fn kappa(&self) -> Option<&[S]> {
        self.kappa.as_deref()
    }

    pub fn n(&self) -> usize {
        self.b.n()
    }
}

/// Lovelock coefficients `c₀, c₂, …, c₂ₘ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LovelockCoefficients<S = f64>(pub Vec<S>);

impl<S: Scalar> LovelockCoefficients<S> {
    /// Highest order `m`.
    pub fn order(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}
