use super::{basis, binom, shuffle_sign, DoubleForm};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

impl<S: Scalar> DoubleForm<S> {
    /// Exterior (Kulkarni) product `(θ1⊗θ2)(θ3⊗θ4) = (θ1∧θ3)⊗(θ2∧θ4)`.
    ///
    /// The coefficient at `(K, L)` sums `sign(I,I';K) sign(J,J';L) a(I,J) b(I',J')`
    /// over splittings `K = I ⊔ I'`, `L = J ⊔ J'`, where `sign(I,I';K)` sorts the
    /// concatenation `(I, I')` into `K`. Degrees beyond `n` give the zero form.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let (p, q) = (self.p + other.p, self.q + other.q);
        let mut out = Self::zeros_unchecked(n, p, q);
        if p > n || q > n {
            return Ok(out);
        }
        let lhs = self.nonzero();
        let rhs = other.nonzero();
        let ncols = binom(n, q);
        for (i, j, a) in &lhs {
            for (i2, j2, b) in &rhs {
                if !i.is_disjoint(*i2) || !j.is_disjoint(*j2) {
                    continue;
                }
                let k = i.union(*i2).rank() * ncols + j.union(*j2).rank();
                let prod = a.clone() * b.clone();
                out.coeffs[k] = if shuffle_sign(*i, *i2) * shuffle_sign(*j, *j2) > 0 {
                    out.coeffs[k].clone() + prod
                } else {
                    out.coeffs[k].clone() - prod
                };
            }
        }
        Ok(out)
    }

    /// `k`-fold exterior power; `pow(0)` is the scalar 1.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = DoubleForm {
            n: self.n,
            p: 0,
            q: 0,
            coeffs: vec![S::one()],
        };
        for _ in 0..k {
            acc = acc.wedge(self).expect("same dimension");
        }
        acc
    }

    /// Ricci contraction: `(ca)(x..; y..) = Σ_i a(e_i, x..; e_i, y..)`.
    pub fn contract(&self) -> Result<Self> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::Degree(format!(
                "cannot contract a ({},{}) form",
                self.p, self.q
            )));
        }
        let n = self.n;
        let mut out = Self::zeros_unchecked(n, self.p - 1, self.q - 1);
        let rows = basis(n, self.p - 1);
        let cols = basis(n, self.q - 1);
        for (r, &i) in rows.iter().enumerate() {
            for (c, &j) in cols.iter().enumerate() {
                let mut acc = S::zero();
                for axis in 0..n {
                    if i.contains(axis) || j.contains(axis) {
                        continue;
                    }
                    let v = self.get(i.with(axis), j.with(axis));
                    if v.is_zero() {
                        continue;
                    }
                    // moving e_axis from the front to its sorted slot
                    if (i.count_below(axis) + j.count_below(axis)) % 2 == 0 {
                        acc = acc + v;
                    } else {
                        acc = acc - v;
                    }
                }
                out.coeffs[r * cols.len() + c] = acc;
            }
        }
        Ok(out)
    }

    /// `m`-fold contraction.
    pub fn contract_iter(&self, m: usize) -> Result<Self> {
        if m > self.p.min(self.q) {
            return Err(Error::Degree(format!(
                "cannot contract a ({},{}) form {m} times",
                self.p, self.q
            )));
        }
        let mut acc = self.clone();
        for _ in 0..m {
            acc = acc.contract()?;
        }
        Ok(acc)
    }

    /// Factorwise Hodge star `*(e_I ⊗ e_J) = sign(I,Iᶜ) sign(J,Jᶜ) e_Iᶜ ⊗ e_Jᶜ`.
    pub fn hodge(&self) -> Self {
        let n = self.n;
        // forms of degree beyond n are zero; so is their dual
        let mut out = Self::zeros_unchecked(n, n.saturating_sub(self.p), n.saturating_sub(self.q));
        for (i, j, v) in self.entries() {
            if v.is_zero() {
                continue;
            }
            let (ic, jc) = (i.complement(n), j.complement(n));
            let v = if shuffle_sign(i, ic) * shuffle_sign(j, jc) > 0 {
                v.clone()
            } else {
                -v.clone()
            };
            out.set(ic, jc, v);
        }
        out
    }

    /// Inner product for which `{e_I ⊗ e_J}` is orthonormal.
    pub fn inner(&self, other: &Self) -> Result<S> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.bidegree() != other.bidegree() {
            return Err(Error::BidegreeMismatch(self.p, self.q, other.p, other.q));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// Interchanges the two blocks: `(J, I) ↦ a(I, J)`.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros_unchecked(self.n, self.q, self.p);
        for (i, j, v) in self.entries() {
            out.set(j, i, v.clone());
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.p == self.q && self.transpose() == *self
    }

    /// Squared norm of the cyclic sum `a(x,y,z,w) + a(y,z,x,w) + a(z,x,y,w)`
    /// over all basis quadruples; exact in rational mode.
    pub fn bianchi_defect_squared(&self) -> Result<S> {
        if self.bidegree() != (2, 2) {
            return Err(Error::BidegreeMismatch(self.p, self.q, 2, 2));
        }
        let n = self.n;
        let mut acc = S::zero();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let c = self.eval_axes(&[x, y], &[z, w])?
                            + self.eval_axes(&[y, z], &[x, w])?
                            + self.eval_axes(&[z, x], &[y, w])?;
                        if !c.is_zero() {
                            acc = acc + c.clone() * c;
                        }
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Norm of the first-Bianchi cyclic sum; zero iff the identity holds.
    pub fn bianchi_defect(&self) -> Result<f64> {
        Ok(self.bianchi_defect_squared()?.to_f64().sqrt())
    }
}
