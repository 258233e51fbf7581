use super::{gauss_bonnet_even, CurvatureTensor};
use crate::double_form::DoubleForm;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Residual threshold (relative to `‖cᵖR^q‖`, floored at 1) below which a
/// float tensor counts as (p,q)-Einstein.
pub const EINSTEIN_TOL: f64 = 1e-10;

/// Least-squares fit of `cᵖR^q ≈ λ g^{2q-p}`.
///
/// Returns `(λ_fit, ‖cᵖR^q − λ_fit g^{2q-p}‖)`; the tensor is (p,q)-Einstein
/// iff the residual vanishes.
pub fn einstein_pq_defect<S: Scalar>(r: &CurvatureTensor<S>, p: usize, q: usize) -> Result<(S, f64)> {
    let n = r.n();
    if p == 0 || p >= 2 * q || 2 * q > n {
        return Err(Error::Degree(format!(
            "(p,q)-Einstein needs 0 < p < 2q <= n, got p = {p}, q = {q}, n = {n}"
        )));
    }
    let lhs = r.form().pow(q).contract_iter(p)?;
    let gk = DoubleForm::<S>::metric(n)?.pow(2 * q - p);
    let lambda = lhs.inner(&gk)? / gk.inner(&gk)?;
    let residual = lhs.try_sub(&gk.scale(&lambda))?;
    let res = if S::EXACT {
        residual.inner(&residual)?.to_f64().sqrt()
    } else {
        residual.norm()
    };
    Ok((lambda, res))
}

/// Outcome of the `h₄ₖ ≥ 0` test for (1,k)-Einstein tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityCheck<S = f64> {
    pub is_1k_einstein: bool,
    pub h4k: S,
}

impl<S: Scalar> PositivityCheck<S> {
    /// True unless the tensor is (1,k)-Einstein with `h₄ₖ < -tol`.
    pub fn holds(&self, tol: f64) -> bool {
        !self.is_1k_einstein || self.h4k.to_f64() >= -tol
    }
}

/// Tests the (1,k)-Einstein condition `cRᵏ = λ g^{2k-1}` and reports `h₄ₖ`,
/// which is nonnegative whenever the condition holds.
pub fn h4k_positivity_check<S: Scalar>(r: &CurvatureTensor<S>, k: usize) -> Result<PositivityCheck<S>> {
    let n = r.n();
    if k == 0 || 4 * k > n {
        return Err(Error::Degree(format!("need 1 <= k and 4k <= n, got k = {k}, n = {n}")));
    }
    let (_, residual) = einstein_pq_defect(r, 1, k)?;
    let scale = r.form().pow(k).contract()?.norm().max(1.0);
    let is_1k_einstein = if S::EXACT {
        residual == 0.0
    } else {
        residual <= EINSTEIN_TOL * scale
    };
    Ok(PositivityCheck {
        is_1k_einstein,
        h4k: gauss_bonnet_even(r, 2 * k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn constant_curvature_four_dim() {
        let g = DoubleForm::<Q>::metric(4).unwrap();
        let r = CurvatureTensor::new(g.pow(2).scale(&Q::from_ratio(1, 2))).unwrap();
        let (lambda, res) = einstein_pq_defect(&r, 1, 1).unwrap();
        assert_eq!(lambda, Q::from_i64(3));
        assert_eq!(res, 0.0);
        let check = h4k_positivity_check(&r, 1).unwrap();
        assert!(check.is_1k_einstein);
        assert_eq!(check.h4k, Q::from_i64(6));
    }

    #[test]
    fn flat_is_einstein_with_zero_h4() {
        let r = CurvatureTensor::<Q>::zero(4).unwrap();
        let check = h4k_positivity_check(&r, 1).unwrap();
        assert!(check.is_1k_einstein && check.holds(0.0));
        assert_eq!(check.h4k, Q::from_i64(0));
        assert!(r.form().pow(1).is_zero());
    }

    #[test]
    fn degree_constraints() {
        let r = CurvatureTensor::<f64>::zero(4).unwrap();
        assert!(einstein_pq_defect(&r, 2, 1).is_err());
        assert!(einstein_pq_defect(&r, 0, 1).is_err());
        assert!(einstein_pq_defect(&r, 1, 3).is_err());
        assert!(h4k_positivity_check(&r, 2).is_err());
    }
}
