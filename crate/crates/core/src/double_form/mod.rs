//! Dense (p,q)-double forms over an oriented inner-product space with a fixed
//! orthonormal basis.
//!
//! A double form is stored by its coefficients on the canonical basis
//! `e_I ⊗ e_J`, `I` and `J` strictly increasing, laid out row-major by the
//! colexicographic ranks of `I` and `J`. Evaluation at an arbitrary ordering
//! of basis vectors applies the sorting signs, so skew symmetry within each
//! block is built into the representation.

mod json;
mod multi_index;
mod ops;

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::MAX_DIM;

pub use json::DoubleFormJson;
pub use multi_index::{basis, binom, shuffle_sign, MultiIndex};

#[derive(Clone, Debug, PartialEq)]
pub struct DoubleForm<S = f64> {
    n: usize,
    p: usize,
    q: usize,
    coeffs: Vec<S>,
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroDimension)
    } else if n > MAX_DIM {
        Err(Error::DimensionTooLarge(n))
    } else {
        Ok(())
    }
}

impl<S: Scalar> DoubleForm<S> {
    pub fn zeros(n: usize, p: usize, q: usize) -> Result<Self> {
        check_dim(n)?;
        if p > n || q > n {
            return Err(Error::InvalidBidegree { n, p, q });
        }
        Ok(Self::zeros_unchecked(n, p, q))
    }

    pub(crate) fn zeros_unchecked(n: usize, p: usize, q: usize) -> Self {
        DoubleForm {
            n,
            p,
            q,
            coeffs: vec![S::zero(); binom(n, p) * binom(n, q)],
        }
    }

    /// The (0,0) form with value `v`.
    pub fn scalar(n: usize, v: S) -> Result<Self> {
        check_dim(n)?;
        Ok(DoubleForm {
            n,
            p: 0,
            q: 0,
            coeffs: vec![v],
        })
    }

    /// The metric as a (1,1) form: coefficients `δ_ij`.
    pub fn metric(n: usize) -> Result<Self> {
        let mut g = Self::zeros(n, 1, 1)?;
        for i in 0..n {
            g.coeffs[i * n + i] = S::one();
        }
        Ok(g)
    }

    /// Builds a form from canonical `(I, J, value)` triples. Missing entries
    /// are zero; repeated entries accumulate.
    pub fn from_entries<It>(n: usize, p: usize, q: usize, entries: It) -> Result<Self>
    where
        It: IntoIterator<Item = (MultiIndex, MultiIndex, S)>,
    {
        let mut out = Self::zeros(n, p, q)?;
        for (i, j, v) in entries {
            if i.len() != p || j.len() != q || i.mask() >> n != 0 || j.mask() >> n != 0 {
                return Err(Error::InvalidMultiIndex {
                    axes: i.axes().into_iter().chain(j.axes()).collect(),
                    n,
                    reason: "index does not match the bidegree",
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(i.axes(), j.axes()));
            }
            let k = out.offset(i, j);
            out.coeffs[k] = out.coeffs[k].clone() + v;
        }
        Ok(out)
    }

    /// Symmetric (1,1) form from a row-major `n × n` matrix (only the given
    /// entries are used; symmetry is not enforced here).
    pub fn from_matrix(n: usize, m: &[S]) -> Result<Self> {
        check_dim(n)?;
        if m.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} matrix entries, got {}",
                n * n,
                m.len()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        Ok(DoubleForm {
            n,
            p: 1,
            q: 1,
            coeffs: m.to_vec(),
        })
    }

    /// Diagonal (1,1) form.
    pub fn diagonal(diag: &[S]) -> Result<Self> {
        let n = diag.len();
        let mut out = Self::zeros(n, 1, 1)?;
        for (i, d) in diag.iter().enumerate() {
            out.coeffs[i * n + i] = d.clone();
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    /// Coefficients in row-major canonical order.
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    #[inline]
    fn offset(&self, i: MultiIndex, j: MultiIndex) -> usize {
        i.rank() * binom(self.n, self.q) + j.rank()
    }

    /// Coefficient at a canonical index pair.
    pub fn get(&self, i: MultiIndex, j: MultiIndex) -> S {
        debug_assert_eq!((i.len(), j.len()), (self.p, self.q));
        self.coeffs[self.offset(i, j)].clone()
    }

    pub fn set(&mut self, i: MultiIndex, j: MultiIndex, v: S) {
        debug_assert_eq!((i.len(), j.len()), (self.p, self.q));
        let k = self.offset(i, j);
        self.coeffs[k] = v;
    }

    /// Value of the form as the scalar of a (0,0) form.
    pub fn value(&self) -> Result<S> {
        if self.p != 0 || self.q != 0 {
            return Err(Error::BidegreeMismatch(self.p, self.q, 0, 0));
        }
        Ok(self.coeffs[0].clone())
    }

    /// Iterates `(I, J, value)` over the canonical basis in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (MultiIndex, MultiIndex, &S)> + '_ {
        let rows = basis(self.n, self.p);
        let cols = basis(self.n, self.q);
        let nc = cols.len();
        self.coeffs.iter().enumerate().map(move |(k, v)| (rows[k / nc], cols[k % nc], v))
    }

    pub(crate) fn nonzero(&self) -> Vec<(MultiIndex, MultiIndex, S)> {
        self.entries()
            .filter(|(_, _, v)| !v.is_zero())
            .map(|(i, j, v)| (i, j, v.clone()))
            .collect()
    }

    /// Evaluates the form on basis vectors given by axis lists in any order.
    /// Repeated axes give zero.
    pub fn eval_axes(&self, u: &[usize], v: &[usize]) -> Result<S> {
        if u.len() != self.p || v.len() != self.q {
            return Err(Error::BidegreeMismatch(self.p, self.q, u.len(), v.len()));
        }
        if u.iter().chain(v).any(|&a| a >= self.n) {
            return Err(Error::InvalidArgument("axis out of range".into()));
        }
        match (MultiIndex::sorted(u), MultiIndex::sorted(v)) {
            (Some((su, i)), Some((sv, j))) => {
                let v = self.get(i, j);
                Ok(if su * sv > 0 { v } else { -v })
            }
            _ => Ok(S::zero()),
        }
    }

    /// Evaluates the form on arbitrary vectors (components in the orthonormal
    /// basis): `Σ a(I,J) det(u|_I) det(v|_J)`.
    pub fn eval_vectors(&self, u: &[Vec<S>], v: &[Vec<S>]) -> Result<S> {
        if u.len() != self.p || v.len() != self.q {
            return Err(Error::BidegreeMismatch(self.p, self.q, u.len(), v.len()));
        }
        if u.iter().chain(v).any(|x| x.len() != self.n) {
            return Err(Error::InvalidArgument("vector length differs from dimension".into()));
        }
        let rows = basis(self.n, self.p);
        let cols = basis(self.n, self.q);
        let du: Vec<S> = rows.iter().map(|&i| minor(u, i)).collect();
        let dv: Vec<S> = cols.iter().map(|&j| minor(v, j)).collect();
        let mut acc = S::zero();
        for (r, a) in du.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (c, b) in dv.iter().enumerate() {
                let x = &self.coeffs[r * cols.len() + c];
                if !x.is_zero() && !b.is_zero() {
                    acc = acc + x.clone() * a.clone() * b.clone();
                }
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map_coeffs(|v| v.clone() * s.clone())
    }

    fn map_coeffs(&self, f: impl Fn(&S) -> S) -> Self {
        DoubleForm {
            n: self.n,
            p: self.p,
            q: self.q,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Converts the scalar type (exactly for `f64 → Rational`).
    pub fn convert<T: Scalar>(&self) -> DoubleForm<T> {
        DoubleForm {
            n: self.n,
            p: self.p,
            q: self.q,
            coeffs: self.coeffs.iter().map(|v| T::from_f64(v.to_f64())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_zero())
    }

    /// Euclidean norm of the coefficient vector, `sqrt(inner(a, a))`.
    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|v| {
                let x = v.to_f64();
                x * x
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.p != other.p || self.q != other.q {
            return Err(Error::BidegreeMismatch(self.p, self.q, other.p, other.q));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        DoubleForm {
            n: self.n,
            p: self.p,
            q: self.q,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

/// Determinant of the `p × p` matrix `[u_k(i_l)]` for the axes of `idx`.
fn minor<S: Scalar>(u: &[Vec<S>], idx: MultiIndex) -> S {
    let axes = idx.axes();
    let p = axes.len();
    let mut m: Vec<Vec<S>> = u.iter().map(|row| axes.iter().map(|&a| row[a].clone()).collect()).collect();
    determinant(&mut m, p)
}

pub(crate) fn determinant<S: Scalar>(m: &mut [Vec<S>], p: usize) -> S {
    let mut det = S::one();
    for col in 0..p {
        let pivot = (col..p)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| {
                m[a][col]
                    .abs()
                    .partial_cmp(&m[b][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(pr) = pivot else {
            return S::zero();
        };
        if pr != col {
            m.swap(pr, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det = det * pv.clone();
        for r in col + 1..p {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / pv.clone();
            for c in col..p {
                let t = m[col][c].clone() * f.clone();
                m[r][c] = m[r][c].clone() - t;
            }
        }
    }
    det
}

impl<S: Scalar> Add for &DoubleForm<S> {
    type Output = DoubleForm<S>;

    /// Panics on shape mismatch; use [`DoubleForm::try_add`] for a checked sum.
    fn add(self, rhs: Self) -> DoubleForm<S> {
        self.try_add(rhs).expect("double forms of equal shape")
    }
}

impl<S: Scalar> Sub for &DoubleForm<S> {
    type Output = DoubleForm<S>;

    fn sub(self, rhs: Self) -> DoubleForm<S> {
        self.try_sub(rhs).expect("double forms of equal shape")
    }
}

impl<S: Scalar> Neg for &DoubleForm<S> {
    type Output = DoubleForm<S>;

    fn neg(self) -> DoubleForm<S> {
        self.map_coeffs(|v| -v.clone())
    }
}

impl<S: Scalar> Mul<&DoubleForm<S>> for &DoubleForm<S> {
    type Output = DoubleForm<S>;

    /// Exterior product; panics on dimension mismatch.
    fn mul(self, rhs: &DoubleForm<S>) -> DoubleForm<S> {
        self.wedge(rhs).expect("double forms of equal dimension")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn idx(a: &[usize], n: usize) -> MultiIndex {
        MultiIndex::new(a, n).unwrap()
    }

    #[test]
    fn metric_form_is_identity() {
        let g = DoubleForm::<f64>::metric(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g.get(idx(&[i], 3), idx(&[j], 3)), want);
            }
        }
        assert_eq!(DoubleForm::<f64>::metric(0), Err(Error::ZeroDimension));
        assert_eq!(DoubleForm::<f64>::metric(13), Err(Error::DimensionTooLarge(13)));
    }

    #[test]
    fn evaluation_applies_permutation_signs() {
        let n = 4;
        let mut r = DoubleForm::<Rational>::zeros(n, 2, 2).unwrap();
        r.set(idx(&[0, 1], n), idx(&[2, 3], n), Rational::from_i64(5));
        assert_eq!(r.eval_axes(&[1, 0], &[2, 3]).unwrap(), Rational::from_i64(-5));
        assert_eq!(r.eval_axes(&[1, 0], &[3, 2]).unwrap(), Rational::from_i64(5));
        assert_eq!(r.eval_axes(&[1, 1], &[2, 3]).unwrap(), Rational::from_i64(0));
    }

    #[test]
    fn vector_evaluation_matches_basis_evaluation() {
        let n = 3;
        let mut a = DoubleForm::<f64>::zeros(n, 2, 1).unwrap();
        a.set(idx(&[0, 2], n), idx(&[1], n), 3.0);
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        assert_eq!(a.eval_vectors(&[e(2), e(0)], &[e(1)]).unwrap(), -3.0);
        // linearity in the first slot
        let u = vec![2.0, 0.0, 0.0];
        assert_eq!(a.eval_vectors(&[u, e(2)], &[e(1)]).unwrap(), 6.0);
    }

    #[test]
    fn from_entries_rejects_non_finite() {
        let e = DoubleForm::<f64>::from_entries(2, 1, 1, [(idx(&[0], 2), idx(&[0], 2), f64::NAN)]);
        assert!(matches!(e, Err(Error::NonFinite(..))));
    }
}
