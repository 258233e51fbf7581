use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_DIM;

/// Smallest number of points per axis; the 5-point stencil needs distinct
/// neighbours at offsets `±1, ±2`.
pub const MIN_POINTS: usize = 5;

/// Periodic rectangular lattice, last axis fastest. Axis `a` has period
/// `shape[a] · h[a]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    shape: Vec<usize>,
    h: Vec<f64>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, h: Vec<f64>) -> Result<Self> {
        let n = shape.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge(n));
        }
        if h.len() != n {
            return Err(Error::ShapeMismatch(vec![n], vec![h.len()]));
        }
        if let Some(&s) = shape.iter().find(|&&s| s < MIN_POINTS) {
            return Err(Error::InvalidArgument(format!(
                "grid axes need at least {MIN_POINTS} points, got {s}"
            )));
        }
        if h.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidArgument("grid spacings must be positive and finite".into()));
        }
        Ok(Grid { shape, h })
    }

    /// Uniform grid of period `2π` on every axis.
    pub fn uniform(n: usize, size: usize) -> Result<Self> {
        Self::new(vec![size; n], vec![TAU / size as f64; n])
    }

    /// Grid of period `2π` with the given per-axis sizes.
    pub fn periodic(shape: Vec<usize>) -> Result<Self> {
        let h = shape.iter().map(|&s| TAU / s as f64).collect();
        Self::new(shape, h)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.h
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn period(&self, axis: usize) -> f64 {
        self.shape[axis] as f64 * self.h[axis]
    }

    /// `Π hᵢ`.
    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    /// `Π periods`.
    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.period(a)).product()
    }

    fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    /// Linear index of a point given by its lattice coordinates.
    pub fn index(&self, x: &[usize]) -> Result<usize> {
        if x.len() != self.dim() || x.iter().zip(&self.shape).any(|(&c, &s)| c >= s) {
            return Err(Error::InvalidArgument(format!(
                "point {x:?} is not on a grid of shape {:?}",
                self.shape
            )));
        }
        Ok(x.iter().zip(&self.shape).fold(0, |acc, (&c, &s)| acc * s + c))
    }

    /// Lattice coordinates of a linear index.
    pub fn coords(&self, mut p: usize) -> Vec<usize> {
        let mut x = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            x[a] = p % self.shape[a];
            p /= self.shape[a];
        }
        x
    }

    /// Neighbour `s` steps along `axis`, wrapping periodically.
    pub fn shift(&self, p: usize, axis: usize, s: isize) -> usize {
        let stride = self.stride(axis);
        let size = self.shape[axis];
        let c = (p / stride) % size;
        let c2 = (c as isize + s).rem_euclid(size as isize) as usize;
        p + c2 * stride - c * stride
    }

    /// Phase `2π · coord / size` of a point along each axis.
    pub fn phases(&self, p: usize) -> Vec<f64> {
        self.coords(p)
            .iter()
            .zip(&self.shape)
            .map(|(&c, &s)| TAU * c as f64 / s as f64)
            .collect()
    }

    /// 4th-order central first derivative along `axis` of the lattice
    /// function `f` at `p`.
    pub fn diff(&self, p: usize, axis: usize, f: impl Fn(usize) -> f64) -> f64 {
        let m2 = f(self.shift(p, axis, -2));
        let m1 = f(self.shift(p, axis, -1));
        let p1 = f(self.shift(p, axis, 1));
        let p2 = f(self.shift(p, axis, 2));
        (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * self.h[axis])
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self.shape != other.shape || self.h != other.h {
            return Err(Error::ShapeMismatch(self.shape.clone(), other.shape.clone()));
        }
        Ok(())
    }
}
