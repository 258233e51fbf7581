//! Curvature tensors and shape operators with known invariants.

use serde::{Deserialize, Serialize};

use crate::curvature::{
    einstein_pq_defect, gauss_equation, CurvatureTensor, ShapeOperatorData, EINSTEIN_TOL,
};
use crate::double_form::{check_dim, DoubleForm, MultiIndex};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ConstantCurvature,
    Product,
    Hypersurface,
    RandomBianchi,
    RandomEinstein,
}

/// Serializable model description.
///
/// `lambda` is the (ambient) curvature for `constant_curvature` and
/// `hypersurface`; `kappa` the principal curvatures of a hypersurface;
/// `factors` the two factors of a `product`; `seed` (and optionally `terms`)
/// drive the random kinds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<ModelSpec>>,
}

/// A built model: its curvature and, for hypersurfaces, the shape operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Model<S = f64> {
    pub curvature: CurvatureTensor<S>,
    pub shape: Option<ShapeOperatorData<S>>,
}

impl ModelSpec {
    pub fn constant_curvature(n: usize, lambda: f64) -> Self {
        ModelSpec {
            kind: ModelKind::ConstantCurvature,
            n: Some(n),
            lambda: Some(lambda),
            ..Self::empty(ModelKind::ConstantCurvature)
        }
    }

    pub fn random_bianchi(n: usize, seed: u64) -> Self {
        ModelSpec {
            n: Some(n),
            seed: Some(seed),
            ..Self::empty(ModelKind::RandomBianchi)
        }
    }

    pub fn random_einstein(n: usize, seed: u64) -> Self {
        ModelSpec {
            n: Some(n),
            seed: Some(seed),
            ..Self::empty(ModelKind::RandomEinstein)
        }
    }

    pub fn hypersurface(kappa: Vec<f64>, lambda: f64) -> Self {
        ModelSpec {
            n: Some(kappa.len()),
            kappa: Some(kappa),
            lambda: Some(lambda),
            ..Self::empty(ModelKind::Hypersurface)
        }
    }

    pub fn product(a: ModelSpec, b: ModelSpec) -> Self {
        ModelSpec {
            factors: Some(vec![a, b]),
            ..Self::empty(ModelKind::Product)
        }
    }

    fn empty(kind: ModelKind) -> Self {
        ModelSpec {
            kind,
            n: None,
            lambda: None,
            kappa: None,
            seed: None,
            terms: None,
            factors: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Ambient dimension of the model.
    pub fn dim(&self) -> Result<usize> {
        match self.kind {
            ModelKind::Product => {
                let f = self.factor_pair()?;
                Ok(f.0.dim()? + f.1.dim()?)
            }
            ModelKind::Hypersurface => {
                let k = self.kappa.as_ref().ok_or_else(|| missing("kappa"))?;
                if let Some(n) = self.n {
                    if n != k.len() {
                        return Err(Error::DimensionMismatch(n, k.len()));
                    }
                }
                Ok(k.len())
            }
            _ => self.n.ok_or_else(|| missing("n")),
        }
    }

    fn factor_pair(&self) -> Result<(&ModelSpec, &ModelSpec)> {
        match self.factors.as_deref() {
            Some([a, b]) => Ok((a, b)),
            _ => Err(Error::InvalidArgument("product needs exactly two factors".into())),
        }
    }

    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| missing("seed"))
    }

    /// Builds the model in the requested scalar type. Float parameters are
    /// converted exactly, so rational and float builds agree bit for bit.
    pub fn build<S: Scalar>(&self) -> Result<Model<S>> {
        let n = self.dim()?;
        let curvature_only = |curvature| Model {
            curvature,
            shape: None,
        };
        match self.kind {
            ModelKind::ConstantCurvature => {
                let lambda = self.lambda.ok_or_else(|| missing("lambda"))?;
                Ok(curvature_only(constant_curvature(n, &S::from_f64(lambda))?))
            }
            ModelKind::Product => {
                let (a, b) = self.factor_pair()?;
                let (a, b) = (a.build::<S>()?, b.build::<S>()?);
                Ok(curvature_only(product(&a.curvature, &b.curvature)?))
            }
            ModelKind::Hypersurface => {
                let kappa: Vec<S> = self.kappa.iter().flatten().map(|&k| S::from_f64(k)).collect();
                let lambda = S::from_f64(self.lambda.unwrap_or(0.0));
                let (shape, curvature) = hypersurface_model(&kappa, &lambda)?;
                Ok(Model {
                    curvature,
                    shape: Some(shape),
                })
            }
            ModelKind::RandomBianchi => Ok(curvature_only(random_bianchi(
                n,
                self.seed()?,
                self.terms.unwrap_or_else(|| default_terms(n)),
            )?)),
            ModelKind::RandomEinstein => {
                if let Some(t) = self.terms {
                    let r = random_bianchi(n, self.seed()?, t)?;
                    Ok(curvature_only(einstein_projection(&r)?))
                } else {
                    Ok(curvature_only(random_einstein(n, self.seed()?)?))
                }
            }
        }
    }
}

fn missing(field: &str) -> Error {
    Error::InvalidArgument(format!("model spec is missing `{field}`"))
}

/// Number of Gauss-type terms used by default: the dimension
/// `n²(n²-1)/12` of the space of algebraic curvature tensors, plus one.
pub fn default_terms(n: usize) -> usize {
    n * n * (n * n).saturating_sub(1) / 12 + 1
}

/// `R = (λ/2) g²`, constant sectional curvature `λ`.
pub fn constant_curvature<S: Scalar>(n: usize, lambda: &S) -> Result<CurvatureTensor<S>> {
    if n < 2 {
        return Err(Error::InvalidArgument("constant curvature needs n >= 2".into()));
    }
    let g = DoubleForm::<S>::metric(n)?;
    let half = S::from_ratio(1, 2);
    Ok(CurvatureTensor::new_unchecked(g.pow(2).scale(&(half * lambda.clone()))))
}

/// Curvature of a Riemannian product: `R1` on axes `[0, n1)`, `R2` on
/// `[n1, n1 + n2)`, no mixed components.
pub fn product<S: Scalar>(r1: &CurvatureTensor<S>, r2: &CurvatureTensor<S>) -> Result<CurvatureTensor<S>> {
    let (n1, n2) = (r1.n(), r2.n());
    let n = n1 + n2;
    check_dim(n)?;
    let shifted = |m: MultiIndex| MultiIndex::from_mask(m.mask() << n1);
    let entries = r1
        .form()
        .entries()
        .map(|(i, j, v)| (i, j, v.clone()))
        .chain(r2.form().entries().map(|(i, j, v)| (shifted(i), shifted(j), v.clone())))
        .filter(|(_, _, v)| !v.is_zero())
        .collect::<Vec<_>>();
    Ok(CurvatureTensor::new_unchecked(DoubleForm::from_entries(n, 2, 2, entries)?))
}

/// Random symmetric (1,1) form with dyadic entries `m/8`, `m ∈ [-16, 16]`,
/// exactly representable in every scalar mode.
pub fn random_symmetric<S: Scalar>(n: usize, rng: &mut SeededRng) -> Result<DoubleForm<S>> {
    let mut m = vec![S::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let v = S::from_ratio(rng.int_in(-16, 16), 8);
            m[i * n + j] = v.clone();
            m[j * n + i] = v;
        }
    }
    DoubleForm::from_matrix(n, &m)
}

/// `R = Σₘ εₘ ½ Sₘ²` over `terms` random symmetric forms with random signs;
/// deterministic in `seed`.
pub fn random_bianchi<S: Scalar>(n: usize, seed: u64, terms: usize) -> Result<CurvatureTensor<S>> {
    if n < 2 {
        return Err(Error::InvalidArgument("random curvature needs n >= 2".into()));
    }
    if terms == 0 {
        return Err(Error::InvalidArgument("terms must be positive".into()));
    }
    let mut rng = SeededRng::new(seed);
    let half = S::from_ratio(1, 2);
    let mut acc = DoubleForm::<S>::zeros(n, 2, 2)?;
    for _ in 0..terms {
        let s = random_symmetric::<S>(n, &mut rng)?;
        let sign = S::from_i64(rng.sign());
        acc = acc.try_add(&s.pow(2).scale(&(half.clone() * sign)))?;
    }
    Ok(CurvatureTensor::new_unchecked(acc))
}

/// Removes the traceless Ricci part: `R' = R − g·S`, `S = (Ric − (scal/n)g)/(n−2)`,
/// so that `cR' = (scal/n) g`.
pub fn einstein_projection<S: Scalar>(r: &CurvatureTensor<S>) -> Result<CurvatureTensor<S>> {
    let n = r.n();
    if n < 3 {
        return Err(Error::InvalidArgument("Einstein projection needs n >= 3".into()));
    }
    let g = DoubleForm::<S>::metric(n)?;
    let ric = r.ricci();
    let mean = r.scalar_curvature() / S::from_i64(n as i64);
    let traceless = ric.try_sub(&g.scale(&mean))?;
    let s = traceless.scale(&(S::one() / S::from_i64(n as i64 - 2)));
    Ok(CurvatureTensor::new_unchecked(r.form().try_sub(&g.wedge(&s)?)?))
}

/// Removes the whole Ricci part (Weyl projection), leaving a Ricci-flat
/// algebraic curvature tensor: `S = (Ric − scal/(2(n−1)) g)/(n−2)`.
pub fn ricci_flat_projection<S: Scalar>(r: &CurvatureTensor<S>) -> Result<CurvatureTensor<S>> {
    let n = r.n();
    if n < 3 {
        return Err(Error::InvalidArgument("Ricci-flat projection needs n >= 3".into()));
    }
    let g = DoubleForm::<S>::metric(n)?;
    let shift = r.scalar_curvature() / S::from_i64(2 * (n as i64 - 1));
    let s = r
        .ricci()
        .try_sub(&g.scale(&shift))?
        .scale(&(S::one() / S::from_i64(n as i64 - 2)));
    Ok(CurvatureTensor::new_unchecked(r.form().try_sub(&g.wedge(&s)?)?))
}

/// Einstein projection of `random_bianchi(n, seed, default_terms(n))`.
pub fn random_einstein<S: Scalar>(n: usize, seed: u64) -> Result<CurvatureTensor<S>> {
    if n < 3 {
        return Err(Error::InvalidArgument("random Einstein tensors need n >= 3".into()));
    }
    einstein_projection(&random_bianchi(n, seed, default_terms(n))?)
}

/// `B = diag(κ)` and `R = ½B² + (λ/2)g²`.
pub fn hypersurface_model<S: Scalar>(
    kappa: &[S],
    lambda: &S,
) -> Result<(ShapeOperatorData<S>, CurvatureTensor<S>)> {
    let b = ShapeOperatorData::from_kappa(kappa)?;
    let r = gauss_equation(&b, lambda)?;
    Ok((b, r))
}

/// Random curvature supported on the first three axes of an `n`-dimensional
/// space (a 3-manifold times a flat factor). Seeds whose 3-dimensional
/// factor is Einstein are rejected.
pub fn supported_on_three_axes<S: Scalar>(n: usize, seed: u64) -> Result<CurvatureTensor<S>> {
    if n < 4 {
        return Err(Error::InvalidArgument("need n >= 4 for a nontrivial flat factor".into()));
    }
    let r3 = random_bianchi(3, seed, default_terms(3))?;
    let (_, residual) = einstein_pq_defect(&r3, 1, 1)?;
    if residual <= EINSTEIN_TOL * r3.ricci().norm().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "seed {seed} gives an Einstein 3-dimensional factor"
        )));
    }
    product(&r3, &CurvatureTensor::zero(n - 3)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::gauss_bonnet_even;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn zero_constant_curvature() {
        assert!(constant_curvature(4, &Q::from_i64(0)).unwrap().form().is_zero());
        assert!(constant_curvature(1, &Q::from_i64(1)).is_err());
    }

    #[test]
    fn random_bianchi_is_deterministic_and_valid() {
        let a = random_bianchi::<Q>(4, 11, 5).unwrap();
        let b = random_bianchi::<Q>(4, 11, 5).unwrap();
        assert_eq!(a, b);
        assert!(CurvatureTensor::new(a.form().clone()).is_ok());
        let c = random_bianchi::<Q>(4, 12, 5).unwrap();
        assert_ne!(a, c);
        // float and exact builds coincide
        let f = random_bianchi::<f64>(4, 11, 5).unwrap();
        assert_eq!(f.convert::<Q>(), a);
    }

    #[test]
    fn single_term_with_metric_is_half_g_squared() {
        // S = g reproduces ±½g² by construction
        let g = DoubleForm::<Q>::metric(3).unwrap();
        let r = g.pow(2).scale(&Q::from_ratio(1, 2));
        assert!(CurvatureTensor::new(r).is_ok());
    }

    #[test]
    fn einstein_projection_fixes_einstein_input() {
        let r = constant_curvature(5, &Q::from_i64(1)).unwrap();
        assert_eq!(einstein_projection(&r).unwrap(), r);
        assert!(random_einstein::<f64>(2, 1).is_err());
    }

    #[test]
    fn ricci_flat_projection_kills_ricci() {
        let r = random_bianchi::<Q>(5, 3, 8).unwrap();
        let w = ricci_flat_projection(&r).unwrap();
        assert!(w.ricci().is_zero());
        assert!(!w.form().is_zero());
    }

    #[test]
    fn product_of_spheres() {
        let s2 = constant_curvature(2, &Q::from_i64(1)).unwrap();
        let r = product(&s2, &s2).unwrap();
        assert_eq!(r.n(), 4);
        assert!(CurvatureTensor::new(r.form().clone()).is_ok());
        // h4 = 2, so χ(S²×S²) = h4·vol/(8π²) = 2·16π²/(8π²) = 4
        assert_eq!(gauss_bonnet_even(&r, 2).unwrap(), Q::from_i64(2));
        let z = CurvatureTensor::<Q>::zero(2).unwrap();
        assert!(product(&z, &z).unwrap().form().is_zero());
    }

    #[test]
    fn model_spec_roundtrip() {
        let s = ModelSpec::product(ModelSpec::random_bianchi(3, 9), ModelSpec::constant_curvature(2, 0.0));
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(ModelSpec::from_json(&j).unwrap(), s);
        assert_eq!(s.dim().unwrap(), 5);
        let m = s.build::<f64>().unwrap();
        assert!(m.curvature.form().pow(2).is_zero());
        assert!(ModelSpec::from_json(r#"{"kind":"random_bianchi","n":4}"#).unwrap().build::<f64>().is_err());
        assert!(ModelSpec::from_json(r#"{"kind":"sphere"}"#).is_err());
    }
}
