use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::parallel::try_map_points;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Smallest admissible eigenvalue of the metric at any lattice point.
pub const MIN_EIGENVALUE: f64 = 1e-8;

/// `amp · cos(Σₐ freq[a]·θₐ + phase)` with `θₐ = 2π xₐ / Nₐ` the lattice phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub amp: f64,
    pub freq: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

impl TrigTerm {
    pub fn eval(&self, phases: &[f64]) -> f64 {
        let arg = self
            .freq
            .iter()
            .zip(phases)
            .fold(self.phase, |acc, (&m, &t)| acc + m as f64 * t);
        self.amp * arg.cos()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.freq.len() != n {
            return Err(Error::ShapeMismatch(vec![n], vec![self.freq.len()]));
        }
        if !(self.amp.is_finite() && self.phase.is_finite()) {
            return Err(Error::InvalidArgument("trig term must be finite".into()));
        }
        Ok(())
    }
}

/// A [`TrigTerm`] added to the symmetric component `(i, j)` of a tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentTerm {
    pub i: usize,
    pub j: usize,
    pub amp: f64,
    pub freq: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

impl ComponentTerm {
    fn term(&self) -> TrigTerm {
        TrigTerm {
            amp: self.amp,
            freq: self.freq.clone(),
            phase: self.phase,
        }
    }
}

/// Random low-frequency symmetric perturbation: one term per component with
/// frequencies in `{-1, 0, 1}ⁿ` (not all zero), random phase and amplitude at
/// most `amplitude / n`, so the perturbation has operator norm `≤ amplitude`.
pub fn random_component_terms(n: usize, seed: u64, amplitude: f64) -> Vec<ComponentTerm> {
    let mut rng = SeededRng::new(seed);
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i..n {
            let freq = loop {
                let f: Vec<i64> = (0..n).map(|_| rng.int_in(-1, 1)).collect();
                if f.iter().any(|&m| m != 0) {
                    break f;
                }
            };
            let amp = amplitude / n as f64 * rng.range(0.5, 1.0) * rng.sign() as f64;
            let phase = rng.range(0.0, std::f64::consts::TAU);
            terms.push(ComponentTerm { i, j, amp, freq, phase });
        }
    }
    terms
}

/// Scalar function on a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(vec![grid.len()], vec![values.len()]));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("scalar field must be finite".into()));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(usize) -> f64) -> Self {
        let values = (0..grid.len()).map(f).collect();
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    /// Sum of trigonometric terms.
    pub fn trig(grid: &Grid, terms: &[TrigTerm]) -> Result<Self> {
        for t in terms {
            t.check(grid.dim())?;
        }
        Ok(Self::from_fn(grid, |p| {
            let ph = grid.phases(p);
            terms.iter().map(|t| t.eval(&ph)).sum()
        }))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, p: usize) -> f64 {
        self.values[p]
    }
}

/// Symmetric `n×n` matrix per lattice point, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField2 {
    n: usize,
    grid: Grid,
    values: Vec<f64>,
}

impl TensorField2 {
    /// Validates shape and symmetry (to `1e-12` relative) and symmetrizes.
    pub fn new(grid: Grid, mut values: Vec<f64>) -> Result<Self> {
        let n = grid.dim();
        if values.len() != grid.len() * n * n {
            return Err(Error::ShapeMismatch(vec![grid.len(), n, n], vec![values.len()]));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("tensor field must be finite".into()));
        }
        for m in values.chunks_mut(n * n) {
            for i in 0..n {
                for j in i + 1..n {
                    let (a, b) = (m[i * n + j], m[j * n + i]);
                    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                        return Err(Error::InvalidArgument("tensor field must be symmetric".into()));
                    }
                    let s = 0.5 * (a + b);
                    m[i * n + j] = s;
                    m[j * n + i] = s;
                }
            }
        }
        Ok(TensorField2 { n, grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: &Grid, values: Vec<f64>) -> Self {
        TensorField2 {
            n: grid.dim(),
            grid: grid.clone(),
            values,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.dim();
        Self::from_values_unchecked(grid, vec![0.0; grid.len() * n * n])
    }

    /// Sum of trigonometric component terms (each added to `(i,j)` and `(j,i)`).
    pub fn trig(grid: &Grid, terms: &[ComponentTerm]) -> Result<Self> {
        let n = grid.dim();
        for t in terms {
            t.term().check(n)?;
            if t.i >= n || t.j >= n {
                return Err(Error::InvalidArgument(format!("component ({}, {}) out of range", t.i, t.j)));
            }
        }
        let mut values = vec![0.0; grid.len() * n * n];
        for (p, m) in values.chunks_mut(n * n).enumerate() {
            let ph = grid.phases(p);
            for t in terms {
                let v = t.term().eval(&ph);
                m[t.i * n + t.j] += v;
                if t.i != t.j {
                    m[t.j * n + t.i] += v;
                }
            }
        }
        Ok(Self::from_values_unchecked(grid, values))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row-major matrix at point `p`.
    pub fn at(&self, p: usize) -> &[f64] {
        let m = self.n * self.n;
        &self.values[p * m..(p + 1) * m]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_values_unchecked(&self.grid, self.values.iter().map(|v| v * s).collect())
    }
}

/// Riemannian metric on a periodic lattice with cached inverse and volume
/// density. Every point is symmetric positive definite.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    n: usize,
    grid: Grid,
    values: Vec<f64>,
    inverse: Vec<f64>,
    sqrt_det: Vec<f64>,
}

impl MetricField {
    /// Validates symmetry and positive definiteness (smallest eigenvalue
    /// `> 1e-8`) at every point.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let n = grid.dim();
        if n < 2 {
            return Err(Error::InvalidArgument("metric fields need n >= 2".into()));
        }
        let t = TensorField2::new(grid, values)?;
        let grid = t.grid;
        let values = t.values;
        let per_point = try_map_points(grid.len(), |p| {
            let m = DMatrix::from_row_slice(n, n, &values[p * n * n..(p + 1) * n * n]);
            let min = SymmetricEigen::new(m.clone()).eigenvalues.min();
            let chol = match m.cholesky() {
                Some(c) if min > MIN_EIGENVALUE => c,
                _ => return Err(Error::NotPositiveDefinite(grid.coords(p))),
            };
            let det_sqrt: f64 = chol.l_dirty().diagonal().iter().product();
            let inv = chol.inverse();
            let mut row_major = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    row_major.push(0.5 * (inv[(i, j)] + inv[(j, i)]));
                }
            }
            Ok((row_major, det_sqrt))
        })?;
        let mut inverse = Vec::with_capacity(values.len());
        let mut sqrt_det = Vec::with_capacity(grid.len());
        for (inv, d) in per_point {
            inverse.extend(inv);
            sqrt_det.push(d);
        }
        Ok(MetricField {
            n,
            grid,
            values,
            inverse,
            sqrt_det,
        })
    }

    /// The Euclidean metric `δ`.
    pub fn flat(grid: &Grid) -> Result<Self> {
        Self::constant(grid, 1.0)
    }

    /// `c · δ`.
    pub fn constant(grid: &Grid, c: f64) -> Result<Self> {
        let n = grid.dim();
        let mut values = vec![0.0; grid.len() * n * n];
        for m in values.chunks_mut(n * n) {
            for i in 0..n {
                m[i * n + i] = c;
            }
        }
        Self::new(grid.clone(), values)
    }

    /// `δ + Σ terms`.
    pub fn trig(grid: &Grid, terms: &[ComponentTerm]) -> Result<Self> {
        let pert = TensorField2::trig(grid, terms)?;
        Self::flat(grid)?.perturbed(&pert, 1.0)
    }

    /// `e^{2u} δ`.
    pub fn conformal(grid: &Grid, u: &ScalarField) -> Result<Self> {
        grid.check_same(u.grid())?;
        let n = grid.dim();
        let mut values = vec![0.0; grid.len() * n * n];
        for (p, m) in values.chunks_mut(n * n).enumerate() {
            for i in 0..n {
                m[i * n + i] = (2.0 * u.at(p)).exp();
            }
        }
        Self::new(grid.clone(), values)
    }

    /// Flat torus of period `2π` plus [`random_component_terms`].
    pub fn perturbed_flat(grid: &Grid, seed: u64, amplitude: f64) -> Result<Self> {
        Self::trig(grid, &random_component_terms(grid.dim(), seed, amplitude))
    }

    /// `g + ε h`; fails if the result leaves the positive-definite cone.
    pub fn perturbed(&self, h: &TensorField2, eps: f64) -> Result<Self> {
        self.grid.check_same(h.grid())?;
        let values = self.values.iter().zip(&h.values).map(|(g, x)| g + eps * x).collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row-major `g_ij` at point `p`.
    pub fn at(&self, p: usize) -> &[f64] {
        let m = self.n * self.n;
        &self.values[p * m..(p + 1) * m]
    }

    /// Row-major `g^ij` at point `p`.
    pub fn inverse_at(&self, p: usize) -> &[f64] {
        let m = self.n * self.n;
        &self.inverse[p * m..(p + 1) * m]
    }

    /// `√det g` at point `p`.
    pub fn sqrt_det(&self, p: usize) -> f64 {
        self.sqrt_det[p]
    }

    /// Orthonormal frame `E = L^{-T}` with `g = L Lᵀ` (Cholesky), row-major:
    /// `e_a = Σᵢ E[i][a] ∂ᵢ`. Also returns `L`.
    pub fn frame_at(&self, p: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let m = DMatrix::from_row_slice(n, n, self.at(p));
        let l = m.cholesky().expect("validated metric").l();
        let e = l
            .transpose()
            .try_inverse()
            .expect("triangular factor with positive diagonal");
        let row_major = |a: &DMatrix<f64>| {
            let mut v = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    v.push(a[(i, j)]);
                }
            }
            v
        };
        (row_major(&e), row_major(&l))
    }

    /// Parses the JSON ingestion format (see [`MetricFieldSpec`]).
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: MetricFieldSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        spec.build()
    }
}

/// Where the metric values come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricSource {
    /// One row-major `n×n` matrix per lattice point, in linear index order.
    Explicit { values: Vec<Vec<f64>> },
    /// `δ + Σ terms`.
    Trig { terms: Vec<ComponentTerm> },
}

/// JSON form of a [`MetricField`]:
/// `{"n":…, "shape":[…], "h":[…], "kind":"explicit"|"trig", …}`.
/// `h` defaults to a period of `2π` on every axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricFieldSpec {
    pub n: usize,
    pub shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(flatten)]
    pub source: MetricSource,
}

impl MetricFieldSpec {
    pub fn grid(&self) -> Result<Grid> {
        if self.shape.len() != self.n {
            return Err(Error::ShapeMismatch(vec![self.n], vec![self.shape.len()]));
        }
        match &self.h {
            Some(h) => Grid::new(self.shape.clone(), h.clone()),
            None => Grid::periodic(self.shape.clone()),
        }
    }

    pub fn build(&self) -> Result<MetricField> {
        let grid = self.grid()?;
        match &self.source {
            MetricSource::Explicit { values } => {
                if values.len() != grid.len() {
                    return Err(Error::ShapeMismatch(vec![grid.len()], vec![values.len()]));
                }
                if let Some(v) = values.iter().find(|v| v.len() != self.n * self.n) {
                    return Err(Error::ShapeMismatch(vec![self.n, self.n], vec![v.len()]));
                }
                MetricField::new(grid, values.concat())
            }
            MetricSource::Trig { terms } => MetricField::trig(&grid, terms),
        }
    }
}
