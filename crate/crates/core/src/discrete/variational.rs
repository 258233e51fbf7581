use serde::{Deserialize, Serialize};

use super::field::{ComponentTerm, MetricField, TensorField2};
use super::geometry::{integrate, lovelock_divergence_defect, total_gauss_bonnet, Connection};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Regularization `δ` in the relative defect `|D − G| / (|G| + δ)`.
pub const DEFECT_FLOOR: f64 = 1e-300;

/// Outcome of [`variational_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalReport {
    pub k: usize,
    /// `G = ½∫⟨T₂ₖ(g), h⟩ μ_g`.
    pub gradient: f64,
    pub eps: Vec<f64>,
    /// `D(ε) = (H₂ₖ(g+εh) − H₂ₖ(g−εh)) / 2ε`.
    pub difference_quotients: Vec<f64>,
    /// `|D(ε) − G| / (|G| + δ)`.
    pub defects: Vec<f64>,
    /// Polynomial extrapolation of `D(ε)` to `ε = 0` in powers of `ε²`.
    pub extrapolated: f64,
    pub extrapolated_defect: f64,
    /// Fitted order of `|D(ε) − G|` in `ε` (nominally 2 until the
    /// discretization floor is reached); `None` with fewer than two `ε`.
    pub eps_order: Option<f64>,
}

/// Neville extrapolation of samples `y(x)` to `x = 0`.
pub fn extrapolate_to_zero(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::InvalidArgument("need matching nonempty sample lists".into()));
    }
    let mut p = y.to_vec();
    let m = x.len();
    for level in 1..m {
        for i in 0..m - level {
            let (xi, xj) = (x[i], x[i + level]);
            if xi == xj {
                return Err(Error::InvalidArgument("extrapolation nodes must be distinct".into()));
            }
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    Ok(p[0])
}

/// Least-squares slope of `log e` against `log s`.
pub fn fitted_order(spacings: &[f64], errors: &[f64]) -> Result<f64> {
    if spacings.len() < 2 || spacings.len() != errors.len() {
        return Err(Error::InvalidArgument("need at least two (spacing, error) pairs".into()));
    }
    if spacings.iter().chain(errors).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("spacings and errors must be positive".into()));
    }
    let xs: Vec<f64> = spacings.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Compares the symmetric difference quotient of `H₂ₖ` along `h` with the
/// gradient formula `H′₂ₖ(h) = ½∫⟨T₂ₖ, h⟩ μ_g`.
pub fn variational_check(gf: &MetricField, hdir: &TensorField2, k: usize, eps_list: &[f64]) -> Result<VariationalReport> {
    gf.grid().check_same(hdir.grid())?;
    if 2 * k > gf.n() {
        return Err(Error::Degree(format!("2k = {} exceeds n = {}", 2 * k, gf.n())));
    }
    if eps_list.is_empty() || eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument("eps values must be positive".into()));
    }
    let pairing = Connection::new(gf).lovelock_pairing(hdir, k)?;
    let gradient = 0.5 * integrate(gf, &pairing)?;
    let mut quotients = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let plus = total_gauss_bonnet(&gf.perturbed(hdir, eps)?, k)?;
        let minus = total_gauss_bonnet(&gf.perturbed(hdir, -eps)?, k)?;
        quotients.push((plus - minus) / (2.0 * eps));
    }
    let rel = |d: f64| (d - gradient).abs() / (gradient.abs() + DEFECT_FLOOR);
    let eps2: Vec<f64> = eps_list.iter().map(|e| e * e).collect();
    let extrapolated = extrapolate_to_zero(&eps2, &quotients)?;
    let raw: Vec<f64> = quotients.iter().map(|d| (d - gradient).abs()).collect();
    let eps_order = if eps_list.len() >= 2 && raw.iter().all(|&r| r > 0.0) {
        fitted_order(eps_list, &raw).ok()
    } else {
        None
    };
    Ok(VariationalReport {
        k,
        gradient,
        eps: eps_list.to_vec(),
        defects: quotients.iter().map(|&d| rel(d)).collect(),
        difference_quotients: quotients,
        extrapolated,
        extrapolated_defect: rel(extrapolated),
        eps_order,
    })
}

/// Outcome of [`lovelock_divergence_study`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceStudy {
    pub n: usize,
    pub k: usize,
    pub sizes: Vec<usize>,
    /// Max over the lattice of `|div T₂ₖ|_g` per grid.
    pub defects: Vec<f64>,
    /// Observed order between consecutive grids.
    pub pairwise_orders: Vec<f64>,
    /// Least-squares order over all grids.
    pub fitted_order: f64,
}

/// Refinement study of `div T₂ₖ` for the fixed metric `δ + Σ terms` sampled on
/// grids of period `2π` with the given sizes.
pub fn lovelock_divergence_study(n: usize, k: usize, terms: &[ComponentTerm], sizes: &[usize]) -> Result<DivergenceStudy> {
    if sizes.len() < 2 {
        return Err(Error::InvalidArgument("need at least two grid sizes".into()));
    }
    let mut defects = Vec::with_capacity(sizes.len());
    for &s in sizes {
        let gf = MetricField::trig(&Grid::uniform(n, s)?, terms)?;
        defects.push(lovelock_divergence_defect(&gf, k)?);
    }
    let spacings: Vec<f64> = sizes.iter().map(|&s| 1.0 / s as f64).collect();
    let pairwise_orders = spacings
        .windows(2)
        .zip(defects.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(DivergenceStudy {
        n,
        k,
        sizes: sizes.to_vec(),
        fitted_order: fitted_order(&spacings, &defects)?,
        defects,
        pairwise_orders,
    })
}
