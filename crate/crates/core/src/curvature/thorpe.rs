//! Brute-force permutation form of Thorpe's tensors, kept as an oracle for the
//! exterior-product route.

use super::CurvatureTensor;
use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};

/// Largest `p` accepted by the oracle; cost grows as `((2p)!)²`.
pub const THORPE_MAX_P: usize = 2;

/// Permutations of `0..m` with their signs.
fn signed_permutations(m: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], sign: i64, out: &mut Vec<(Vec<usize>, i64)>) {
        let m = used.len();
        if prefix.len() == m {
            out.push((prefix.clone(), sign));
            return;
        }
        for x in 0..m {
            if used[x] {
                continue;
            }
            // inversions contributed by placing x after the earlier entries
            let inv = prefix.iter().filter(|&&y| y > x).count();
            used[x] = true;
            prefix.push(x);
            rec(prefix, used, if inv % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            used[x] = false;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), &mut vec![false; m], 1, &mut out);
    out
}

/// The raw double sum
/// `Σ_{α,β ∈ S₂ₚ} ε(α)ε(β) Π_i R(u_{α(2i-1)}, u_{α(2i)}, v_{β(2i-1)}, v_{β(2i)})`
/// over basis vectors given by axis lists.
///
/// With the exterior-product conventions of [`DoubleForm::wedge`] this sum
/// equals `4ᵖ · Rᵖ(u; v)`: each of the `(2p)!/2ᵖ` ordered pair splittings
/// per block is reached by `2ᵖ` permutations, and `Rᵖ` sums the ordered
/// splittings once.
///
/// [`DoubleForm::wedge`]: crate::DoubleForm::wedge
pub fn thorpe_sum<S: Scalar>(r: &CurvatureTensor<S>, p: usize, u: &[usize], v: &[usize]) -> Result<S> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be positive".into()));
    }
    if p > THORPE_MAX_P {
        return Err(Error::InvalidArgument(format!(
            "oracle restricted to p <= {THORPE_MAX_P}, got {p}"
        )));
    }
    let n = r.n();
    if 2 * p > n {
        return Err(Error::Degree(format!("2p = {} exceeds n = {n}", 2 * p)));
    }
    if u.len() != 2 * p || v.len() != 2 * p {
        return Err(Error::InvalidArgument(format!("expected {} vectors per block", 2 * p)));
    }
    if u.iter().chain(v).any(|&a| a >= n) {
        return Err(Error::InvalidArgument("axis out of range".into()));
    }
    let perms = signed_permutations(2 * p);
    let form = r.form();
    let mut acc = S::zero();
    for (alpha, sa) in &perms {
        for (beta, sb) in &perms {
            let mut prod = S::one();
            for i in 0..p {
                let x = form.eval_axes(
                    &[u[alpha[2 * i]], u[alpha[2 * i + 1]]],
                    &[v[beta[2 * i]], v[beta[2 * i + 1]]],
                )?;
                if x.is_zero() {
                    prod = S::zero();
                    break;
                }
                prod = prod * x;
            }
            if prod.is_zero() {
                continue;
            }
            acc = if sa * sb > 0 { acc + prod } else { acc - prod };
        }
    }
    Ok(acc)
}

/// Permutation-sum evaluation of `Rᵖ(u; v)`: [`thorpe_sum`] divided by `4ᵖ`.
pub fn thorpe_oracle<S: Scalar>(r: &CurvatureTensor<S>, p: usize, u: &[usize], v: &[usize]) -> Result<S> {
    let sum = thorpe_sum(r, p, u, v)?;
    Ok(sum / powi(&S::from_i64(4), p))
}
