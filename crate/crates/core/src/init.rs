//! Reproducible initial data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::PeriodicGrid;

/// Random real field whose coefficients vanish outside `|k_axis| <= kmax`
/// (integer wavenumbers on every axis). Coefficients are uniform in the unit
/// square before symmetrization.
pub fn random_bandlimited(grid: &PeriodicGrid, kmax: usize, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients = (0..grid.len())
        .map(|flat| {
            let inside = grid.wavevector(flat).iter().all(|k| k.unsigned_abs() as usize <= kmax);
            // Draw unconditionally so the stream does not depend on kmax.
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let nyquist = grid.wavevector(flat).iter().any(|&k| k == -(grid.points_per_axis() as i64) / 2);
            if inside && !nyquist {
                z
            } else {
                Complex64::default()
            }
        })
        .collect();
    ScalarField::from_coefficients(grid, coefficients).expect("length matches grid")
}

/// Velocity field with every component [`random_bandlimited`].
pub fn random_velocity(grid: &PeriodicGrid, kmax: usize, seed: u64) -> VectorField {
    let comps = (0..grid.dim())
        .map(|i| random_bandlimited(grid, kmax, seed.wrapping_mul(31).wrapping_add(i as u64)))
        .collect();
    VectorField::velocity(comps).expect("components share the grid")
}

/// Smooth random velocity: Gaussian-weighted spectrum with e-folding
/// frequency `width` (in physical frequency units), scaled so that the
/// largest sample magnitude equals `amplitude`. Modes beyond `3·width` are
/// dropped.
pub fn smooth_random(grid: &PeriodicGrid, amplitude: f64, width: f64, seed: u64) -> Result<VectorField> {
    if !(width > 0.0) {
        return Err(Error::param("spectral width must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps = Vec::with_capacity(grid.dim());
    for _ in 0..grid.dim() {
        let coefficients: Vec<Complex64> = (0..grid.len())
            .map(|flat| {
                let xi = grid.frequency_sq(flat).sqrt();
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if xi == 0.0 || xi > 3.0 * width || xi > grid.max_axis_frequency() / 3.0 {
                    Complex64::default()
                } else {
                    z * (-(xi / width).powi(2)).exp()
                }
            })
            .collect();
        comps.push(ScalarField::from_coefficients(grid, coefficients)?);
    }
    let u = VectorField::velocity(comps)?;
    let peak = crate::ops::linf_norm(&u);
    if peak == 0.0 {
        return Err(Error::UnderResolved("grid too coarse for the requested spectral width".into()));
    }
    Ok(u.scale(amplitude / peak))
}

/// Lacunary data `amplitude · Σ_j 2^{-js} cos(ξ_j x₁ + θ_j)` with `ξ_j = (17/12)·2^j`
/// for `j ∈ blocks`. Each term sits on the plateau of dyadic block `j`, so
/// `Δ_j` isolates exactly one term and `2^{js}‖Δ_j u‖_{L^p}` is the same for
/// every `j`.
pub fn lacunary(
    grid: &PeriodicGrid,
    s: f64,
    amplitude: f64,
    blocks: std::ops::RangeInclusive<i32>,
    seed: u64,
) -> Result<VectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = grid.frequency_unit();
    let mut coefficients = vec![Complex64::default(); grid.len()];
    let stride = grid.stride(0);
    for j in blocks {
        if j < 0 {
            return Err(Error::param("lacunary blocks start at 0"));
        }
        let xi = 17.0 / 12.0 * 2f64.powi(j);
        if !grid.on_lattice(xi) {
            return Err(Error::param(format!("frequency {xi} is not a lattice frequency")));
        }
        let k = (xi / unit).round() as i64;
        if (k as f64) > grid.points_per_axis() as f64 / 3.0 {
            return Err(Error::UnderResolved(format!("block {j} exceeds the dealiased band")));
        }
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let c = Complex64::from_polar(0.5 * 2f64.powf(-j as f64 * s), theta);
        coefficients[grid.index_of_wavenumber(k) * stride] += c;
        coefficients[grid.index_of_wavenumber(-k) * stride] += c.conj();
    }
    let f = ScalarField::from_coefficients(grid, coefficients)?;
    Ok(VectorField::first_component(f.scale(amplitude)))
}
