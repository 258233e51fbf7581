use super::{gauss_bonnet_even, CurvatureTensor, ShapeOperatorData};
use crate::double_form::DoubleForm;
use crate::error::{Error, Result};
use crate::scalar::{factorial, powi, Scalar};

/// Curvature of a hypersurface with second fundamental form `B` in the space
/// form of curvature `λ`: `R = ½B² + (λ/2) g²`.
pub fn gauss_equation<S: Scalar>(b: &ShapeOperatorData<S>, lambda: &S) -> Result<CurvatureTensor<S>> {
    let half = S::from_ratio(1, 2);
    let n = b.n();
    let g = DoubleForm::<S>::metric(n)?;
    let form = b
        .b()
        .pow(2)
        .scale(&half)
        .try_add(&g.pow(2).scale(&(half * lambda.clone())))?;
    // Bianchi and symmetry hold identically for Gauss-type tensors
    Ok(CurvatureTensor::new_unchecked(form))
}

/// Higher mean curvature `s_k = *(g^{n-k} B^k) / (k!(n-k)!)`.
pub fn mean_curvature_s<S: Scalar>(b: &ShapeOperatorData<S>, k: usize, n: usize) -> Result<S> {
    if b.n() != n {
        return Err(Error::DimensionMismatch(b.n(), n));
    }
    if k > n {
        return Err(Error::Degree(format!("k = {k} exceeds n = {n}")));
    }
    let g = DoubleForm::<S>::metric(n)?;
    let v = g.pow(n - k).wedge(&b.b().pow(k))?.hodge().value()?;
    Ok(v / (factorial::<S>(k) * factorial(n - k)))
}

/// Both sides of `s₂ₚ = 2ᵖ/(2p)! · h₂ₚ` for the Euclidean hypersurface with
/// second fundamental form `B`.
pub fn even_intrinsic_identity<S: Scalar>(
    b: &ShapeOperatorData<S>,
    p: usize,
    n: usize,
) -> Result<(S, S)> {
    if p == 0 || 2 * p > n {
        return Err(Error::Degree(format!("need 1 <= p and 2p <= n, got p = {p}, n = {n}")));
    }
    let s = mean_curvature_s(b, 2 * p, n)?;
    let r = gauss_equation(b, &S::zero())?;
    let h = gauss_bonnet_even(&r, p)?;
    Ok((s, h * powi(&S::from_i64(2), p) / factorial(2 * p)))
}

/// Odd Gauss–Bonnet curvature `h₂ₚ₊₁(N) = *(g^{n-2p-1}/(n-2p-1)! · Rᵖ B_N)`.
/// For `p = 0` this is `trace(B)`.
pub fn gauss_bonnet_odd<S: Scalar>(
    r: &CurvatureTensor<S>,
    b: &ShapeOperatorData<S>,
    p: usize,
    n: usize,
) -> Result<S> {
    if r.n() != n {
        return Err(Error::DimensionMismatch(r.n(), n));
    }
    if b.n() != n {
        return Err(Error::DimensionMismatch(b.n(), n));
    }
    if 2 * p + 1 > n {
        return Err(Error::Degree(format!("2p+1 = {} exceeds n = {n}", 2 * p + 1)));
    }
    let g = DoubleForm::<S>::metric(n)?;
    let top = g.pow(n - 2 * p - 1).wedge(&r.form().pow(p))?.wedge(b.b())?;
    Ok(top.hodge().value()? / factorial(n - 2 * p - 1))
}

/// Elementary symmetric polynomials `e₀..eₙ` of `κ`, by expanding `Π(1 + κᵢ t)`.
pub fn elementary_symmetric<S: Scalar>(kappa: &[S]) -> Vec<S> {
    let mut e = vec![S::zero(); kappa.len() + 1];
    e[0] = S::one();
    for (m, x) in kappa.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            e[j] = e[j].clone() + e[j - 1].clone() * x.clone();
        }
    }
    e
}

/// Left side of the `(2k)`-minimality condition for a hypersurface with
/// principal curvatures `κ` in a space form of curvature `λ`:
/// `Σᵢ (2k-2i+1)!(n-2k-1+2i)! λⁱ/(i!(k-i)!) s_{2k-2i+1}`.
///
/// Equals `2ᵏ(n-2k-1)!/k! · h₂ₖ₊₁` for the induced curvature.
pub fn minimality_defect<S: Scalar>(kappa: &[S], lambda: &S, k: usize) -> Result<S> {
    let n = kappa.len();
    if 2 * k + 1 > n {
        return Err(Error::Degree(format!("2k+1 = {} exceeds n = {n}", 2 * k + 1)));
    }
    let s = elementary_symmetric(kappa);
    let mut acc = S::zero();
    for i in 0..=k {
        let m = 2 * k - 2 * i + 1;
        let coef = factorial::<S>(m) * factorial(n - 2 * k - 1 + 2 * i) * powi(lambda, i)
            / (factorial::<S>(i) * factorial(k - i));
        acc = acc + coef * s[m].clone();
    }
    Ok(acc)
}
