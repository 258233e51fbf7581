use std::collections::HashMap;

use super::field::{MetricField, ScalarField, TensorField2};
use super::parallel::{compensated_sum, map_points, try_map_points};
use crate::curvature::{einstein_lovelock, gauss_bonnet_even, CurvatureTensor};
use crate::double_form::{DoubleForm, MultiIndex};
use crate::error::{Error, Result};

/// Christoffel symbols `Γᵏᵢⱼ` at one point, stored as `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

fn christoffel_local(gf: &MetricField, p: usize) -> Vec<f64> {
    let n = gf.n();
    let grid = gf.grid();
    // dg[a][i][j] = ∂ₐ g_ij
    let mut dg = vec![0.0; n * n * n];
    for a in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = grid.diff(p, a, |q| gf.at(q)[i * n + j]);
                dg[(a * n + i) * n + j] = v;
                dg[(a * n + j) * n + i] = v;
            }
        }
    }
    // Γ_{l,ij} = ½(∂ᵢg_jl + ∂ⱼg_il − ∂ₗg_ij)
    let mut low = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (dg[(i * n + j) * n + l] + dg[(j * n + i) * n + l] - dg[(l * n + i) * n + j]);
                low[(l * n + i) * n + j] = v;
                low[(l * n + j) * n + i] = v;
            }
        }
    }
    let ginv = gf.inverse_at(p);
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..n).map(|l| ginv[k * n + l] * low[(l * n + i) * n + j]).sum();
                gamma[(k * n + i) * n + j] = v;
                gamma[(k * n + j) * n + i] = v;
            }
        }
    }
    gamma
}

/// `Γᵏᵢⱼ = ½gᵏˡ(∂ᵢg_jl + ∂ⱼg_il − ∂ₗg_ij)` with 4th-order central differences.
pub fn christoffel(gf: &MetricField, x: &[usize]) -> Result<Christoffel> {
    let p = gf.grid().index(x)?;
    Ok(Christoffel {
        n: gf.n(),
        data: christoffel_local(gf, p),
    })
}

/// `Rᵐᵢⱼₗ = ∂ᵢΓᵐⱼₗ − ∂ⱼΓᵐᵢₗ + ΓᵐᵢₛΓˢⱼₗ − ΓᵐⱼₛΓˢᵢₗ`, lowered to the double
/// form `R(∂ᵢ,∂ⱼ; ∂ₖ,∂ₗ) = g_km Rᵐᵢⱼₗ`, stored as `[i][j][k][l]`.
fn riemann_coord<'a>(gf: &MetricField, p: usize, gamma: impl Fn(usize) -> &'a [f64]) -> Vec<f64> {
    let n = gf.n();
    let grid = gf.grid();
    let n3 = n * n * n;
    // dgam[a][m][j][l] = ∂ₐΓᵐⱼₗ
    let mut dgam = vec![0.0; n * n3];
    for a in 0..n {
        for c in 0..n3 {
            dgam[a * n3 + c] = grid.diff(p, a, |q| gamma(q)[c]);
        }
    }
    let gc = gamma(p);
    let gi = |k: usize, i: usize, j: usize| gc[(k * n + i) * n + j];
    let mut rup = vec![0.0; n * n3];
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for l in 0..n {
                    let mut v = dgam[i * n3 + (m * n + j) * n + l] - dgam[j * n3 + (m * n + i) * n + l];
                    for s in 0..n {
                        v += gi(m, i, s) * gi(s, j, l) - gi(m, j, s) * gi(s, i, l);
                    }
                    rup[((m * n + i) * n + j) * n + l] = v;
                }
            }
        }
    }
    let g = gf.at(p);
    let mut out = vec![0.0; n * n3];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out[((i * n + j) * n + k) * n + l] =
                        (0..n).map(|m| g[k * n + m] * rup[((m * n + i) * n + j) * n + l]).sum();
                }
            }
        }
    }
    out
}

/// Contracts slot `pos` of a 4-tensor with the frame: `Σᵢ E[i][a] t[..i..]`.
fn frame_slot(t: &[f64], e: &[f64], n: usize, pos: usize) -> Vec<f64> {
    let stride = n.pow(3 - pos as u32);
    let mut out = vec![0.0; t.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let a = (idx / stride) % n;
        let base = idx - a * stride;
        *o = (0..n).map(|i| e[i * n + a] * t[base + i * stride]).sum();
    }
    out
}

fn riemann_frame<'a>(gf: &MetricField, p: usize, gamma: impl Fn(usize) -> &'a [f64]) -> Result<DoubleForm> {
    let n = gf.n();
    let (e, _) = gf.frame_at(p);
    let mut t = riemann_coord(gf, p, gamma);
    for pos in 0..4 {
        t = frame_slot(&t, &e, n, pos);
    }
    let mut form = DoubleForm::zeros(n, 2, 2)?;
    let at = |a: usize, b: usize, c: usize, d: usize| t[((a * n + b) * n + c) * n + d];
    for a in 0..n {
        for b in a + 1..n {
            let i = MultiIndex::from_mask((1 << a) | (1 << b));
            for c in 0..n {
                for d in c + 1..n {
                    let j = MultiIndex::from_mask((1 << c) | (1 << d));
                    form.set(i, j, 0.5 * (at(a, b, c, d) - at(a, b, d, c)));
                }
            }
        }
    }
    Ok(form)
}

/// Curvature tensor at a lattice point in the Cholesky orthonormal frame,
/// with the sign convention `R(e₀,e₁; e₀,e₁) = K(e₀,e₁)`.
///
/// The symmetries hold only to truncation error, so the tensor is not
/// validated.
pub fn riemann_at(gf: &MetricField, x: &[usize]) -> Result<CurvatureTensor> {
    let grid = gf.grid();
    let p = grid.index(x)?;
    let mut local: HashMap<usize, Vec<f64>> = HashMap::new();
    local.insert(p, christoffel_local(gf, p));
    for a in 0..gf.n() {
        for s in [-2, -1, 1, 2] {
            let q = grid.shift(p, a, s);
            local.entry(q).or_insert_with(|| christoffel_local(gf, q));
        }
    }
    Ok(CurvatureTensor::new_unchecked(riemann_frame(gf, p, |q| local[&q].as_slice())?))
}

/// Christoffel symbols at every lattice point, for whole-field evaluations.
#[derive(Clone, Debug)]
pub struct Connection<'a> {
    metric: &'a MetricField,
    gamma: Vec<f64>,
}

impl<'a> Connection<'a> {
    pub fn new(metric: &'a MetricField) -> Self {
        let gamma = map_points(metric.grid().len(), |p| christoffel_local(metric, p)).concat();
        Connection { metric, gamma }
    }

    pub fn metric(&self) -> &MetricField {
        self.metric
    }

    fn gamma(&self, p: usize) -> &[f64] {
        let m = self.metric.n().pow(3);
        &self.gamma[p * m..(p + 1) * m]
    }

    /// Same as [`riemann_at`] at linear index `p`.
    pub fn riemann(&self, p: usize) -> Result<CurvatureTensor> {
        Ok(CurvatureTensor::new_unchecked(riemann_frame(self.metric, p, |q| self.gamma(q))?))
    }

    /// Pointwise `h₂ₖ`.
    pub fn gauss_bonnet_field(&self, k: usize) -> Result<ScalarField> {
        check_even(self.metric.n(), k)?;
        let values = try_map_points(self.metric.grid().len(), |p| gauss_bonnet_even(&self.riemann(p)?, k))?;
        ScalarField::new(self.metric.grid().clone(), values)
    }

    /// `T₂ₖ` as a matrix in the orthonormal frame at `p`.
    fn lovelock_frame(&self, p: usize, k: usize) -> Result<Vec<f64>> {
        let n = self.metric.n();
        let t = if k == 0 {
            DoubleForm::metric(n)?
        } else {
            einstein_lovelock(&self.riemann(p)?, k)?
        };
        Ok(matrix_11(&t))
    }

    /// `T₂ₖ` in coordinates, `T = L T_frame Lᵀ`, symmetrized.
    pub fn einstein_lovelock_field(&self, k: usize) -> Result<TensorField2> {
        let gf = self.metric;
        let n = gf.n();
        check_even(n, k)?;
        let values = try_map_points(gf.grid().len(), |p| {
            let tf = self.lovelock_frame(p, k)?;
            let (_, l) = gf.frame_at(p);
            let mut t = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let mut s = 0.0;
                    for a in 0..=i {
                        for b in 0..=j {
                            s += l[i * n + a] * 0.5 * (tf[a * n + b] + tf[b * n + a]) * l[j * n + b];
                        }
                    }
                    t[i * n + j] = s;
                    t[j * n + i] = s;
                }
            }
            Ok(t)
        })?;
        Ok(TensorField2::from_values_unchecked(gf.grid(), values.concat()))
    }

    /// `⟨T₂ₖ, h⟩_g` at every point (frame components).
    pub fn lovelock_pairing(&self, h: &TensorField2, k: usize) -> Result<ScalarField> {
        let gf = self.metric;
        gf.grid().check_same(h.grid())?;
        check_even(gf.n(), k)?;
        let values = try_map_points(gf.grid().len(), |p| {
            let tf = self.lovelock_frame(p, k)?;
            let (e, _) = gf.frame_at(p);
            Ok(frame_pairing(&tf, h.at(p), &e, gf.n()))
        })?;
        ScalarField::new(gf.grid().clone(), values)
    }

    /// `ℓ₂ₖ(f) = −⟨T₂ₖ, Hess f⟩` at every point.
    pub fn ell_2k_field(&self, f: &ScalarField, k: usize) -> Result<ScalarField> {
        let gf = self.metric;
        gf.grid().check_same(f.grid())?;
        check_ell(gf.n(), k)?;
        let values = try_map_points(gf.grid().len(), |p| {
            let tf = self.lovelock_frame(p, k)?;
            let hess = hessian_local(gf, f, p, self.gamma(p));
            let (e, _) = gf.frame_at(p);
            Ok(-frame_pairing(&tf, &hess, &e, gf.n()))
        })?;
        ScalarField::new(gf.grid().clone(), values)
    }

    /// `div T` at every point, in coordinates.
    pub fn divergence_field(&self, t: &TensorField2) -> Result<Vec<Vec<f64>>> {
        self.metric.grid().check_same(t.grid())?;
        Ok(map_points(self.metric.grid().len(), |p| {
            divergence_local(self.metric, t, p, self.gamma(p))
        }))
    }

    /// Extreme eigenvalues of `T₂ₖ` in the orthonormal frame over the grid,
    /// i.e. whether `T₂ₖ` is definite on this fixture.
    pub fn lovelock_eigen_range(&self, k: usize) -> Result<(f64, f64)> {
        let n = self.metric.n();
        check_even(n, k)?;
        let ranges = try_map_points(self.metric.grid().len(), |p| {
            let tf = self.lovelock_frame(p, k)?;
            let m = nalgebra::DMatrix::from_fn(n, n, |a, b| 0.5 * (tf[a * n + b] + tf[b * n + a]));
            let ev = nalgebra::SymmetricEigen::new(m).eigenvalues;
            Ok((ev.min(), ev.max()))
        })?;
        Ok(ranges
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b))))
    }
}

fn check_even(n: usize, k: usize) -> Result<()> {
    if 2 * k > n {
        return Err(Error::Degree(format!("2k = {} exceeds n = {n}", 2 * k)));
    }
    Ok(())
}

fn check_ell(n: usize, k: usize) -> Result<()> {
    if 2 * k >= n {
        return Err(Error::Degree(format!("ℓ₂ₖ needs 2k < n, got k = {k}, n = {n}")));
    }
    Ok(())
}

fn matrix_11(t: &DoubleForm) -> Vec<f64> {
    let n = t.n();
    let mut m = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            m[a * n + b] = t.get(MultiIndex::from_mask(1 << a), MultiIndex::from_mask(1 << b));
        }
    }
    m
}

/// `Σ_ab T_ab (EᵀhE)_ab` for a frame matrix `T` and coordinate matrix `h`.
fn frame_pairing(tf: &[f64], h: &[f64], e: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut hab = 0.0;
            for i in 0..n {
                for j in 0..n {
                    hab += e[i * n + a] * h[i * n + j] * e[j * n + b];
                }
            }
            acc += tf[a * n + b] * hab;
        }
    }
    acc
}

fn hessian_local(gf: &MetricField, f: &ScalarField, p: usize, gamma: &[f64]) -> Vec<f64> {
    let n = gf.n();
    let grid = gf.grid();
    let df = |q: usize, j: usize| grid.diff(q, j, |r| f.at(r));
    let grad: Vec<f64> = (0..n).map(|k| df(p, k)).collect();
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let dd = 0.5 * (grid.diff(p, i, |q| df(q, j)) + grid.diff(p, j, |q| df(q, i)));
            let corr: f64 = (0..n).map(|k| gamma[(k * n + i) * n + j] * grad[k]).sum();
            h[i * n + j] = dd - corr;
            h[j * n + i] = dd - corr;
        }
    }
    h
}

fn divergence_local(gf: &MetricField, t: &TensorField2, p: usize, gamma: &[f64]) -> Vec<f64> {
    let n = gf.n();
    let grid = gf.grid();
    let ginv = gf.inverse_at(p);
    let tp = t.at(p);
    let gm = |l: usize, i: usize, j: usize| gamma[(l * n + i) * n + j];
    // dt[i][k][j] = ∂ᵢ T_kj
    let mut dt = vec![0.0; n * n * n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                dt[(i * n + k) * n + j] = grid.diff(p, i, |q| t.at(q)[k * n + j]);
            }
        }
    }
    (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..n {
                for k in 0..n {
                    let gik = ginv[i * n + k];
                    if gik == 0.0 {
                        continue;
                    }
                    let mut v = dt[(i * n + k) * n + j];
                    for l in 0..n {
                        v -= gm(l, i, k) * tp[l * n + j] + gm(l, i, j) * tp[k * n + l];
                    }
                    acc += gik * v;
                }
            }
            acc
        })
        .collect()
}

/// `(div T)ⱼ = gⁱᵏ(∂ᵢT_kj − ΓˡᵢₖT_lj − ΓˡᵢⱼT_kl)` in coordinates.
pub fn divergence(gf: &MetricField, t: &TensorField2, x: &[usize]) -> Result<Vec<f64>> {
    gf.grid().check_same(t.grid())?;
    let p = gf.grid().index(x)?;
    Ok(divergence_local(gf, t, p, &christoffel_local(gf, p)))
}

/// `Hess(f)ᵢⱼ = ∂ᵢ∂ⱼf − Γᵏᵢⱼ∂ₖf` in coordinates, second derivatives as
/// compositions of first-derivative stencils, symmetrized.
pub fn hessian(gf: &MetricField, f: &ScalarField, x: &[usize]) -> Result<Vec<f64>> {
    gf.grid().check_same(f.grid())?;
    let p = gf.grid().index(x)?;
    Ok(hessian_local(gf, f, p, &christoffel_local(gf, p)))
}

/// `ℓ₂ₖ(f) = −⟨T₂ₖ, Hess f⟩` at one point; `ℓ₀ = −tr_g Hess` is the Laplacian
/// with nonnegative spectrum.
pub fn ell_2k(gf: &MetricField, f: &ScalarField, k: usize, x: &[usize]) -> Result<f64> {
    gf.grid().check_same(f.grid())?;
    let n = gf.n();
    check_ell(n, k)?;
    let p = gf.grid().index(x)?;
    let tf = if k == 0 {
        matrix_11(&DoubleForm::metric(n)?)
    } else {
        matrix_11(&einstein_lovelock(&riemann_at(gf, x)?, k)?)
    };
    let hess = hessian_local(gf, f, p, &christoffel_local(gf, p));
    let (e, _) = gf.frame_at(p);
    Ok(-frame_pairing(&tf, &hess, &e, n))
}

/// `Σₓ f(x) √det g(x) Π hᵢ`, compensated, in lattice order.
pub fn integrate(gf: &MetricField, f: &ScalarField) -> Result<f64> {
    gf.grid().check_same(f.grid())?;
    let dv = gf.grid().cell_volume();
    Ok(compensated_sum(
        (0..gf.grid().len()).map(|p| f.at(p) * gf.sqrt_det(p)),
    ) * dv)
}

/// `H₂ₖ(g) = ∫ h₂ₖ μ_g`; `H₀` is the volume.
pub fn total_gauss_bonnet(gf: &MetricField, k: usize) -> Result<f64> {
    check_even(gf.n(), k)?;
    if k == 0 {
        return integrate(gf, &ScalarField::constant(gf.grid(), 1.0));
    }
    integrate(gf, &Connection::new(gf).gauss_bonnet_field(k)?)
}

/// Max over the lattice of `|div T₂ₖ|_g`.
pub fn lovelock_divergence_defect(gf: &MetricField, k: usize) -> Result<f64> {
    let conn = Connection::new(gf);
    let t = conn.einstein_lovelock_field(k)?;
    let div = conn.divergence_field(&t)?;
    let n = gf.n();
    Ok(div
        .iter()
        .enumerate()
        .map(|(p, v)| {
            let ginv = gf.inverse_at(p);
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += ginv[i * n + j] * v[i] * v[j];
                }
            }
            s.max(0.0).sqrt()
        })
        .fold(0.0, f64::max))
}

/// `|∫f₁ ℓ₂ₖ(f₂) μ − ∫f₂ ℓ₂ₖ(f₁) μ|`.
pub fn selfadjointness_check(gf: &MetricField, f1: &ScalarField, f2: &ScalarField, k: usize) -> Result<f64> {
    Ok(selfadjointness_terms(gf, f1, f2, k)?.0)
}

/// The self-adjointness defect together with the scale
/// `∫|f₁ ℓ₂ₖ(f₂)| μ + ∫|f₂ ℓ₂ₖ(f₁)| μ` it should be compared against.
pub fn selfadjointness_terms(gf: &MetricField, f1: &ScalarField, f2: &ScalarField, k: usize) -> Result<(f64, f64)> {
    gf.grid().check_same(f1.grid())?;
    gf.grid().check_same(f2.grid())?;
    check_ell(gf.n(), k)?;
    let conn = Connection::new(gf);
    let l2 = conn.ell_2k_field(f2, k)?;
    let l1 = if f1 == f2 { l2.clone() } else { conn.ell_2k_field(f1, k)? };
    let grid = gf.grid();
    let a = ScalarField::from_fn(grid, |p| f1.at(p) * l2.at(p));
    let b = ScalarField::from_fn(grid, |p| f2.at(p) * l1.at(p));
    let abs = |s: &ScalarField| ScalarField::from_fn(grid, |p| s.at(p).abs());
    let defect = (integrate(gf, &a)? - integrate(gf, &b)?).abs();
    Ok((defect, integrate(gf, &abs(&a))? + integrate(gf, &abs(&b))?))
}
