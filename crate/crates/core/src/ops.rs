//! Fourier-multiplier operators and grid quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{magnitude, Components, ScalarField, VectorField};
use crate::grid::PeriodicGrid;

/// Standard 2/3-rule cutoff for quadratic nonlinearities.
pub const TWO_THIRDS: f64 = 2.0 / 3.0;

/// `∂_{x_axis} f`. The Nyquist mode on `axis` is zeroed.
pub fn spectral_derivative(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    let grid = f.grid();
    if axis >= grid.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: grid.dim() });
    }
    let n = grid.points_per_axis();
    let unit = grid.frequency_unit();
    Ok(f.apply_multiplier(|flat| {
        let i = grid.axis_index(flat, axis);
        if i == n / 2 {
            Complex64::default()
        } else {
            Complex64::new(0.0, grid.wavenumber(i) as f64 * unit)
        }
    }))
}

fn helmholtz_symbol(grid: &PeriodicGrid) -> impl Fn(usize) -> f64 + '_ {
    move |flat| 1.0 + grid.frequency_sq(flat)
}

/// `(1 − Δ)^{-1} f`: each coefficient divided by `1 + |ξ|²`.
pub fn helmholtz_inverse(f: &ScalarField) -> ScalarField {
    let symbol = helmholtz_symbol(f.grid());
    f.apply_multiplier(|flat| Complex64::new(1.0 / symbol(flat), 0.0))
}

/// `(1 − Δ) f`.
pub fn helmholtz(f: &ScalarField) -> ScalarField {
    let symbol = helmholtz_symbol(f.grid());
    f.apply_multiplier(|flat| Complex64::new(symbol(flat), 0.0))
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    f.apply_multiplier(|flat| Complex64::new(-grid.frequency_sq(flat), 0.0))
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let components = (0..f.grid().dim())
        .map(|axis| spectral_derivative(f, axis).expect("axis within grid dimension"))
        .collect();
    VectorField::from_components_unchecked(components)
}

pub fn divergence(u: &VectorField) -> Result<ScalarField> {
    let dim = u.grid().dim();
    if u.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: u.len() });
    }
    let mut acc = spectral_derivative(u.component(0), 0)?;
    for axis in 1..dim {
        acc = acc.add(&spectral_derivative(u.component(axis), axis)?)?;
    }
    Ok(acc)
}

/// `jacobian(u)[i][j] = ∂_{x_j} u_i`.
pub fn jacobian(u: &VectorField) -> Result<Vec<Vec<ScalarField>>> {
    let dim = u.grid().dim();
    if u.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: u.len() });
    }
    u.components()
        .iter()
        .map(|ui| (0..dim).map(|j| spectral_derivative(ui, j)).collect())
        .collect()
}

/// Zeroes every coefficient with `|k| > fraction·N/2` on some axis.
pub fn dealias(f: &ScalarField, fraction: f64) -> ScalarField {
    let mask = dealias_mask(f.grid(), fraction);
    f.apply_real_multiplier(&mask)
}

pub(crate) fn dealias_mask(grid: &PeriodicGrid, fraction: f64) -> Vec<f64> {
    let cutoff = fraction * (grid.points_per_axis() / 2) as f64;
    (0..grid.len())
        .map(|flat| {
            let kept = (0..grid.dim())
                .all(|a| (grid.wavenumber(grid.axis_index(flat, a)).abs() as f64) <= cutoff);
            if kept {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Rectangle-rule `L^p` norm of the pointwise magnitude, `p ∈ (1, ∞)`.
pub fn lp_norm<F: Components + ?Sized>(f: &F, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_of_samples(&magnitude(f.components()), p, f.grid().cell_volume()))
}

pub fn linf_norm<F: Components + ?Sized>(f: &F) -> f64 {
    magnitude(f.components()).into_iter().fold(0.0, f64::max)
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("integrability exponent must lie in (1, ∞), got {p}")))
    }
}

pub(crate) fn lp_of_samples(values: &[f64], p: f64, cell: f64) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    // Scale by the maximum so large p does not overflow.
    let sum: f64 = values.iter().map(|v| (v.abs() / max).powf(p)).sum();
    max * (sum * cell).powf(1.0 / p)
}

/// `L²` norm from coefficients via Parseval: `(Λ^d Σ |c_k|²)^{1/2}`.
pub fn parseval_l2<F: Components + ?Sized>(f: &F) -> f64 {
    let vol = f.grid().volume();
    let sum: f64 = f
        .components()
        .iter()
        .flat_map(|c| c.coefficients().iter())
        .map(|z| z.norm_sqr())
        .sum();
    (vol * sum).sqrt()
}

/// `∫ u·(1 − Δ)u dx = ∫ |u|² + |∇u|²`, evaluated spectrally.
pub fn h1_energy(u: &VectorField) -> f64 {
    let grid = u.grid();
    let vol = grid.volume();
    u.components()
        .iter()
        .map(|c| {
            c.coefficients()
                .iter()
                .enumerate()
                .map(|(i, z)| (1.0 + grid.frequency_sq(i)) * z.norm_sqr())
                .sum::<f64>()
        })
        .sum::<f64>()
        * vol
}

/// Maximum over nodes of the Frobenius norm of `∇u`.
pub fn gradient_linf(u: &VectorField) -> Result<f64> {
    let jac = jacobian(u)?;
    let entries: Vec<ScalarField> = jac.into_iter().flatten().collect();
    Ok(linf_norm(&VectorField::from_components_unchecked(entries)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{random_bandlimited, rel_err};

    fn grid1(n: usize) -> PeriodicGrid {
        PeriodicGrid::standard(1, n).unwrap()
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = grid1(64);
        let d = spectral_derivative(&ScalarField::constant(&g, 3.0), 0).unwrap();
        assert!(linf_norm(&d) == 0.0);
    }

    #[test]
    fn derivative_of_sine() {
        let g = PeriodicGrid::standard(2, 32).unwrap();
        let w = 5.0 * g.frequency_unit();
        let f = ScalarField::from_fn(&g, |x| (w * x[0]).sin());
        let d = spectral_derivative(&f, 0).unwrap();
        let exact = ScalarField::from_fn(&g, |x| w * (w * x[0]).cos());
        assert!(linf_norm(&d.sub(&exact).unwrap()) < 1e-10);
        assert!(matches!(spectral_derivative(&f, 2), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn nyquist_mode_is_dropped_by_derivative() {
        let g = grid1(16);
        let f = ScalarField::from_fn(&g, |x| (8.0 * g.frequency_unit() * x[0]).cos());
        let d = spectral_derivative(&f, 0).unwrap();
        assert!(linf_norm(&d) < 1e-12);
    }

    #[test]
    fn mixed_derivatives_commute() {
        let g = PeriodicGrid::standard(2, 32).unwrap();
        let f = random_bandlimited(&g, 6, 1);
        let a = spectral_derivative(&spectral_derivative(&f, 0).unwrap(), 1).unwrap();
        let b = spectral_derivative(&spectral_derivative(&f, 1).unwrap(), 0).unwrap();
        assert!(linf_norm(&a.sub(&b).unwrap()) <= 1e-10 * linf_norm(&a));
    }

    #[test]
    fn helmholtz_on_single_mode_and_constant() {
        let g = grid1(64);
        let k = 7.0 * g.frequency_unit();
        let f = ScalarField::from_fn(&g, |x| (k * x[0]).cos());
        let h = helmholtz_inverse(&f);
        let exact = f.scale(1.0 / (1.0 + k * k));
        assert!(linf_norm(&h.sub(&exact).unwrap()) < 1e-12);
        let c = helmholtz_inverse(&ScalarField::constant(&g, 2.0));
        assert!(linf_norm(&c.sub(&ScalarField::constant(&g, 2.0)).unwrap()) < 1e-14);
    }

    #[test]
    fn helmholtz_pair_inverts() {
        let g = PeriodicGrid::standard(2, 32).unwrap();
        let f = random_bandlimited(&g, 8, 3);
        let back = helmholtz_inverse(&helmholtz(&f));
        assert!(rel_err(back.samples(), f.samples()) < 1e-10);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = PeriodicGrid::standard(2, 32).unwrap();
        let f = random_bandlimited(&g, 6, 4);
        let lap = divergence(&gradient(&f)).unwrap();
        assert!(rel_err(lap.samples(), laplacian(&f).samples()) < 1e-10);
        let grad_c = gradient(&ScalarField::constant(&g, 1.0));
        assert!(linf_norm(&grad_c) == 0.0);
    }

    #[test]
    fn jacobian_collapses_in_one_dimension() {
        let g = grid1(32);
        let u = VectorField::from(random_bandlimited(&g, 5, 2));
        let jac = jacobian(&u).unwrap();
        assert_eq!(jac.len(), 1);
        assert_eq!(jac[0].len(), 1);
        let ux = spectral_derivative(u.component(0), 0).unwrap();
        assert!(linf_norm(&jac[0][0].sub(&ux).unwrap()) == 0.0);
    }

    #[test]
    fn lp_norm_of_constant_and_bad_exponent() {
        let g = PeriodicGrid::standard(2, 16).unwrap();
        let f = ScalarField::constant(&g, -3.0);
        for p in [1.5, 2.0, 4.0] {
            let expect = 3.0 * g.volume().powf(1.0 / p);
            assert!((lp_norm(&f, p).unwrap() - expect).abs() < 1e-12 * expect);
        }
        assert!(lp_norm(&f, 1.0).is_err());
        assert!(lp_norm(&f, f64::INFINITY).is_err());
        assert_eq!(linf_norm(&f), 3.0);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = PeriodicGrid::standard(2, 32).unwrap();
        let f = random_bandlimited(&g, 10, 5);
        let a = lp_norm(&f, 2.0).unwrap();
        assert!((a - parseval_l2(&f)).abs() <= 1e-10 * a);
    }

    #[test]
    fn dealias_behaviour() {
        let g = grid1(64);
        let f = random_bandlimited(&g, 31, 6);
        let same = dealias(&f, 1.0);
        assert_eq!(same.coefficients(), f.coefficients());
        let k = 29usize;
        let samples = (0..64).map(|i| (std::f64::consts::TAU * ((k * i) % 64) as f64 / 64.0).sin()).collect();
        let hi = ScalarField::from_samples(&g, samples).unwrap();
        assert!(linf_norm(&dealias(&hi, TWO_THIRDS)) < 1e-14);
        assert!(parseval_l2(&dealias(&f, TWO_THIRDS)) <= parseval_l2(&f));
    }
}
