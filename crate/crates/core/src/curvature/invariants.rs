use super::{CurvatureTensor, LovelockCoefficients};
use crate::double_form::{basis, DoubleForm};
use crate::error::{Error, Result};
use crate::scalar::{factorial, powi, Scalar};

fn check_even_order(n: usize, k: usize) -> Result<()> {
    if 2 * k > n {
        Err(Error::Degree(format!("2k = {} exceeds n = {n}", 2 * k)))
    } else {
        Ok(())
    }
}

/// `(2k)`-th Gauss–Bonnet curvature `h₂ₖ = *(g^{n-2k} Rᵏ) / (n-2k)!`.
///
/// `h₀ = 1` and, with the normalization of this crate, `h₂ = ½ scal`.
pub fn gauss_bonnet_even<S: Scalar>(r: &CurvatureTensor<S>, k: usize) -> Result<S> {
    let n = r.n();
    check_even_order(n, k)?;
    let g = DoubleForm::<S>::metric(n)?;
    let top = g.pow(n - 2 * k).wedge(&r.form().pow(k))?;
    let v = top.hodge().value()?;
    Ok(v / factorial(n - 2 * k))
}

/// `c^{2k-1} Rᵏ / (2k-1)!`, the `(2k)`-th Ricci tensor.
pub fn generalized_ricci<S: Scalar>(r: &CurvatureTensor<S>, k: usize) -> Result<DoubleForm<S>> {
    if k == 0 {
        return Err(Error::InvalidArgument("generalized Ricci tensor needs k >= 1".into()));
    }
    check_even_order(r.n(), k)?;
    let c = r.form().pow(k).contract_iter(2 * k - 1)?;
    Ok(c.scale(&(S::one() / factorial(2 * k - 1))))
}

/// Einstein–Lovelock tensor `T₂ₖ = h₂ₖ g − c^{2k-1}Rᵏ/(2k-1)!`, with `T₀ = g`.
pub fn einstein_lovelock<S: Scalar>(r: &CurvatureTensor<S>, k: usize) -> Result<DoubleForm<S>> {
    let n = r.n();
    check_even_order(n, k)?;
    let g = DoubleForm::<S>::metric(n)?;
    if k == 0 {
        return Ok(g);
    }
    let h = gauss_bonnet_even(r, k)?;
    g.scale(&h).try_sub(&generalized_ricci(r, k)?)
}

/// Thorpe's `(2p)`-th sectional curvature of the plane spanned by the given
/// orthonormal vectors: `R₂ₚ(u, u)` with `R₂ₚ = 2ᵖ/(2p)! · Rᵖ`.
pub fn sectional_2p<S: Scalar>(r: &CurvatureTensor<S>, p: usize, plane: &[Vec<S>]) -> Result<S> {
    let n = r.n();
    if p == 0 {
        return Err(Error::InvalidArgument("p must be positive".into()));
    }
    check_even_order(n, p)?;
    if plane.len() != 2 * p || plane.iter().any(|u| u.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "expected {} vectors of length {n}",
            2 * p
        )));
    }
    let mut gram_defect = 0.0f64;
    for (a, u) in plane.iter().enumerate() {
        for (b, v) in plane.iter().enumerate() {
            let dot = u
                .iter()
                .zip(v)
                .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
                .to_f64();
            let want = if a == b { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((dot - want).abs());
        }
    }
    if gram_defect > 1e-10 {
        return Err(Error::NotOrthonormal(gram_defect));
    }
    let rp = r.form().pow(p);
    let v = rp.eval_vectors(plane, plane)?;
    Ok(v * powi(&S::from_i64(2), p) / factorial(2 * p))
}

/// Curvature term of the Weitzenböck formula on `p`-forms:
/// `{g·Ric/(p-1) − 2R} · g^{p-2}/(p-2)!`.
pub fn weitzenbock_form<S: Scalar>(r: &CurvatureTensor<S>, p: usize) -> Result<DoubleForm<S>> {
    let n = r.n();
    if p < 2 || p > n {
        return Err(Error::InvalidArgument(format!("Weitzenböck form needs 2 <= p <= n, got p = {p}")));
    }
    let g = DoubleForm::<S>::metric(n)?;
    let g_ric = g.wedge(&r.ricci())?.scale(&(S::one() / S::from_i64(p as i64 - 1)));
    let bracket = g_ric.try_sub(&r.form().scale(&S::from_i64(2)))?;
    let tail = g.pow(p - 2).scale(&(S::one() / factorial(p - 2)));
    bracket.wedge(&tail)
}

/// Matrix of a (p,p) form on the canonical basis of `Λᵖ`; `gᵖ/p!` maps to the
/// identity.
pub fn as_operator<S: Scalar>(a: &DoubleForm<S>) -> Result<Vec<Vec<S>>> {
    if a.p() != a.q() {
        return Err(Error::BidegreeMismatch(a.p(), a.q(), a.p(), a.p()));
    }
    let idx = basis(a.n(), a.p());
    Ok(idx
        .iter()
        .map(|&i| idx.iter().map(|&j| a.get(i, j)).collect())
        .collect())
}

/// Lovelock Lagrangian `Σ c₂ₖ h₂ₖ` with `h₀ = 1`.
pub fn lovelock_lagrangian<S: Scalar>(
    r: &CurvatureTensor<S>,
    coeffs: &LovelockCoefficients<S>,
) -> Result<S> {
    if coeffs.0.is_empty() {
        return Err(Error::InvalidArgument("at least the cosmological coefficient c0 is required".into()));
    }
    if 2 * coeffs.order() > r.n() {
        return Err(Error::Degree(format!(
            "{} coefficients need dimension >= {}",
            coeffs.0.len(),
            2 * coeffs.order()
        )));
    }
    let mut acc = coeffs.0[0].clone();
    for (k, c) in coeffs.0.iter().enumerate().skip(1) {
        if !c.is_zero() {
            acc = acc + c.clone() * gauss_bonnet_even(r, k)?;
        }
    }
    Ok(acc)
}
