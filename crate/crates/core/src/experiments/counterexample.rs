use num_complex::Complex64;

use super::bump::{counterexample_period, BumpProfile};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::PeriodicGrid;

/// Carrier frequency `(17/12)·2ⁿ` of `f_n`.
pub fn ring_frequency(n: i32) -> f64 {
    17.0 / 12.0 * 2f64.powi(n)
}

/// Smallest grid for dimension `d` on the counterexample period that fully
/// resolves dyadic block `n`.
pub fn counterexample_grid(d: usize, n: i32) -> Result<PeriodicGrid> {
    let period = counterexample_period(d);
    PeriodicGrid::new(d, PeriodicGrid::points_for_block(n, period), period)
}

fn check_compatible(n: i32, grid: &PeriodicGrid, bump: &BumpProfile) -> Result<()> {
    if bump.d() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: bump.d() });
    }
    if bump.period() != grid.period() || bump.transform_values().len() != grid.points_per_axis() {
        return Err(Error::GridMismatch);
    }
    if n < 0 {
        return Err(Error::param(format!("counterexample index must be non-negative, got {n}")));
    }
    Ok(())
}

/// Separable field with per-axis coefficient tables.
fn separable(grid: &PeriodicGrid, axes: &[Vec<Complex64>]) -> Result<ScalarField> {
    let coefficients = (0..grid.len())
        .map(|flat| (0..grid.dim()).map(|a| axes[a][grid.axis_index(flat, a)]).product())
        .collect();
    ScalarField::from_coefficients(grid, coefficients)
}

fn bump_axis(grid: &PeriodicGrid, bump: &BumpProfile) -> Vec<Complex64> {
    bump.transform_values().iter().map(|&b| Complex64::new(b / grid.period(), 0.0)).collect()
}

/// `f_n = 2^{-ns} φ(x₁) sin((17/12)2ⁿ x₁) φ(x₂)⋯φ(x_d)` as the first component of
/// a velocity. Built in frequency space, so coefficients outside the annulus
/// `|ξ₁ ∓ (17/12)2ⁿ| < 2^{-d}` are exactly zero.
pub fn make_fn(n: i32, grid: &PeriodicGrid, s: f64, bump: &BumpProfile) -> Result<VectorField> {
    check_compatible(n, grid, bump)?;
    let carrier = ring_frequency(n);
    if !grid.on_lattice(carrier) {
        return Err(Error::param(format!("carrier {carrier} is not a lattice frequency")));
    }
    let need = 8.0 / 3.0 * 2f64.powi(n);
    if grid.max_axis_frequency() < need {
        return Err(Error::UnderResolved(format!(
            "block {n} needs frequencies up to {need}, grid reaches {}",
            grid.max_axis_frequency()
        )));
    }
    let unit = grid.frequency_unit();
    let amplitude = 2f64.powf(-n as f64 * s) / grid.period();
    // sin(Kx)φ(x) has transform (φ̂(ξ−K) − φ̂(ξ+K)) / 2i.
    let first: Vec<Complex64> = (0..grid.points_per_axis())
        .map(|i| {
            let xi = grid.wavenumber(i) as f64 * unit;
            let diff = bump.transform(xi - carrier) - bump.transform(xi + carrier);
            Complex64::new(0.0, -0.5 * amplitude * diff)
        })
        .collect();
    let rest = bump_axis(grid, bump);
    let mut axes = vec![first];
    axes.extend(std::iter::repeat(rest).take(grid.dim() - 1));
    Ok(VectorField::first_component(separable(grid, &axes)?))
}

/// `g_n = 2^{-n} φ(x₁)⋯φ(x_d)` as the first component of a velocity.
pub fn make_gn(n: i32, grid: &PeriodicGrid, bump: &BumpProfile) -> Result<VectorField> {
    check_compatible(n, grid, bump)?;
    let axis = bump_axis(grid, bump);
    let mut axes = vec![axis.iter().map(|c| c * 2f64.powi(-n)).collect::<Vec<_>>()];
    axes.extend(std::iter::repeat(axis).take(grid.dim() - 1));
    Ok(VectorField::first_component(separable(grid, &axes)?))
}

/// The pair `(u₀ⁿ, v₀ⁿ) = ((f_n, 0, …), (f_n + g_n, 0, …))`.
pub fn counterexample_pair(
    n: i32,
    grid: &PeriodicGrid,
    s: f64,
    bump: &BumpProfile,
) -> Result<(VectorField, VectorField)> {
    let f = make_fn(n, grid, s, bump)?;
    let g = make_gn(n, grid, bump)?;
    let v = f.add(&g)?;
    Ok((f, v))
}
