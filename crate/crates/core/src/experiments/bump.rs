use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{PeriodicGrid, DEFAULT_PERIOD};

/// Smallest period `24π·m`, `m` a power of two, whose lattice spacing is
/// strictly below the bump plateau radius `4^{-d}`. Every such period keeps
/// `(17/12)·2ⁿ` on the lattice.
pub fn counterexample_period(d: usize) -> f64 {
    let plateau = 4f64.powi(-(d as i32));
    let mut m = 1.0;
    while 2.0 * PI / (DEFAULT_PERIOD * m) >= plateau {
        m *= 2.0;
    }
    DEFAULT_PERIOD * m
}

/// Shape parameters of a [`BumpProfile`], recorded in reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub d: usize,
    /// Transform equals 1 for `|ξ| <= plateau`.
    pub plateau: f64,
    /// Transform vanishes for `|ξ| >= support`.
    pub support: f64,
    pub period: f64,
}

/// One-dimensional even bump `φ` described by its transform `φ̂`: equal to 1
/// on `|ξ| <= 4^{-d}`, 0 on `|ξ| >= 2^{-d}`, and an `exp(-1/t)` blend in
/// between. Physical values use `φ̂(ξ) = ∫ φ(x) e^{-ixξ} dx`, so on the torus of
/// period `Λ` the Fourier coefficients of (the periodization of) `φ` are
/// `φ̂(ξ_k)/Λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpProfile {
    params: BumpParams,
    unit: f64,
    transform_values: Vec<f64>,
}

fn blend(t: f64) -> f64 {
    let a = if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    let b = if t >= 1.0 { 0.0 } else { (-1.0 / (1.0 - t)).exp() };
    a / (a + b)
}

/// Tabulates the bump transform on one axis of `grid`.
pub fn make_bump(grid: &PeriodicGrid, d: usize) -> Result<BumpProfile> {
    if d == 0 {
        return Err(Error::param("bump dimension must be at least 1"));
    }
    let plateau = 4f64.powi(-(d as i32));
    let support = 2f64.powi(-(d as i32));
    let unit = grid.frequency_unit();
    if unit >= plateau {
        return Err(Error::UnderResolved(format!(
            "lattice spacing {unit} does not resolve the bump plateau radius {plateau}; use period >= {}",
            counterexample_period(d)
        )));
    }
    let params = BumpParams { d, plateau, support, period: grid.period() };
    let mut bump = BumpProfile { params, unit, transform_values: Vec::new() };
    bump.transform_values =
        (0..grid.points_per_axis()).map(|i| bump.transform(grid.wavenumber(i) as f64 * unit)).collect();
    Ok(bump)
}

impl BumpProfile {
    pub fn params(&self) -> BumpParams {
        self.params
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn period(&self) -> f64 {
        self.params.period
    }

    /// `φ̂(ξ)` at any real frequency.
    pub fn transform(&self, xi: f64) -> f64 {
        let r = xi.abs();
        let BumpParams { plateau, support, .. } = self.params;
        if r <= plateau {
            1.0
        } else if r >= support {
            0.0
        } else {
            blend((support - r) / (support - plateau))
        }
    }

    /// `φ̂` at the lattice frequencies of one axis, in transform order.
    pub fn transform_values(&self) -> &[f64] {
        &self.transform_values
    }

    pub fn frequency_unit(&self) -> f64 {
        self.unit
    }

    /// Periodized `φ` sampled on a one-dimensional grid of `points` nodes over
    /// the bump's period.
    pub fn profile_1d(&self, points: usize) -> Result<ScalarField> {
        let grid = PeriodicGrid::new(1, points, self.period())?;
        let coefficients = (0..points)
            .map(|i| Complex64::new(self.transform(grid.wavenumber(i) as f64 * self.unit) / self.period(), 0.0))
            .collect();
        ScalarField::from_coefficients(&grid, coefficients)
    }
}
