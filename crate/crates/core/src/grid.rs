//! Uniform periodic grids on the d-dimensional torus `[0, period)^d`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Default box period. With `2π/Λ = 1/12` every frequency `(17/12)·2ⁿ` used by
/// the counterexample data sits exactly on the lattice.
pub const DEFAULT_PERIOD: f64 = 24.0 * PI;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

struct GridInner {
    dim: usize,
    n: usize,
    period: f64,
    plans: Plans,
}

/// A d-dimensional periodic grid with `n` points per axis and the same period on
/// every axis. Cloning is cheap; FFT plans are shared.
#[derive(Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("dim", &self.dim())
            .field("points_per_axis", &self.points_per_axis())
            .field("period", &self.period())
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.dim() == other.dim()
                && self.points_per_axis() == other.points_per_axis()
                && self.period().to_bits() == other.period().to_bits())
    }
}

impl PeriodicGrid {
    pub fn new(dim: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if points_per_axis < 2 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be an even power of two, got {points_per_axis}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        let total = points_per_axis
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidGrid("grid too large".into()))?;
        if total > 1 << 28 {
            return Err(Error::InvalidGrid(format!("{total} points exceeds the supported size")));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(points_per_axis),
            inverse: planner.plan_fft_inverse(points_per_axis),
        };
        Ok(Self {
            inner: Arc::new(GridInner { dim, n: points_per_axis, period, plans }),
        })
    }

    /// Grid with the default period `24π`.
    pub fn standard(dim: usize, points_per_axis: usize) -> Result<Self> {
        Self::new(dim, points_per_axis, DEFAULT_PERIOD)
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.inner.n
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    /// Lattice spacing in frequency space, `2π/Λ`.
    pub fn frequency_unit(&self) -> f64 {
        2.0 * PI / self.inner.period
    }

    /// Total number of grid nodes, `N^d`.
    pub fn len(&self) -> usize {
        self.inner.n.pow(self.inner.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.inner.period / self.inner.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.inner.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.inner.period.powi(self.inner.dim as i32)
    }

    /// Largest representable frequency magnitude along one axis, `(N/2)·2π/Λ`.
    pub fn max_axis_frequency(&self) -> f64 {
        (self.inner.n / 2) as f64 * self.frequency_unit()
    }

    /// Largest Euclidean frequency magnitude on the lattice (the corner mode).
    pub fn max_frequency(&self) -> f64 {
        self.max_axis_frequency() * (self.inner.dim as f64).sqrt()
    }

    /// Stride of `axis` in the row-major flat layout (axis 0 varies slowest).
    pub fn stride(&self, axis: usize) -> usize {
        self.inner.n.pow((self.inner.dim - 1 - axis) as u32)
    }

    /// Signed integer wavenumber for FFT-ordered index `i` on one axis. The
    /// Nyquist index maps to `-N/2`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.inner.n;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT-ordered index of signed wavenumber `k` (taken modulo `N`).
    pub fn index_of_wavenumber(&self, k: i64) -> usize {
        k.rem_euclid(self.inner.n as i64) as usize
    }

    /// Axis index of flat position `flat`.
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.stride(axis)) % self.inner.n
    }

    /// Signed wavenumber vector of flat spectral position `flat`.
    pub fn wavevector(&self, flat: usize) -> Vec<i64> {
        (0..self.dim()).map(|a| self.wavenumber(self.axis_index(flat, a))).collect()
    }

    /// Squared frequency magnitude `|ξ|²` at flat spectral position `flat`.
    pub fn frequency_sq(&self, flat: usize) -> f64 {
        let unit = self.frequency_unit();
        (0..self.dim())
            .map(|a| {
                let xi = self.wavenumber(self.axis_index(flat, a)) as f64 * unit;
                xi * xi
            })
            .sum()
    }

    /// Frequency magnitudes `|ξ|` for every flat spectral position.
    pub fn frequency_magnitudes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.frequency_sq(i).sqrt()).collect()
    }

    /// Flat index of the spectral partner `-k` (used for conjugate symmetry).
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let n = self.inner.n;
        (0..self.dim())
            .map(|a| {
                let i = self.axis_index(flat, a);
                ((n - i) % n) * self.stride(a)
            })
            .sum()
    }

    /// Physical coordinates of the node at flat position `flat`.
    pub fn coordinates(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        (0..self.dim()).map(|a| self.axis_index(flat, a) as f64 * h).collect()
    }

    /// Whether a frequency is an exact lattice frequency.
    pub fn on_lattice(&self, xi: f64) -> bool {
        let k = xi / self.frequency_unit();
        (k - k.round()).abs() <= 1e-9 * k.abs().max(1.0)
    }

    /// Resolution rule for block `n` content plus quadratic interactions:
    /// `(N/2)·(2π/Λ) >= (8/3)·2ⁿ·1.5`.
    pub fn resolves_block(&self, n: i32) -> bool {
        self.max_axis_frequency() >= 4.0 * 2f64.powi(n)
    }

    /// Smallest power-of-two `N` with the default period that resolves block `n`.
    pub fn points_for_block(n: i32, period: f64) -> usize {
        let unit = 2.0 * PI / period;
        let need = 4.0 * 2f64.powi(n) / unit * 2.0;
        (need.ceil() as usize).next_power_of_two().max(8)
    }

    /// In-place forward transform, normalized so a constant `c` maps to `c` at `k = 0`.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.plans.forward);
        let scale = 1.0 / self.len() as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    /// In-place inverse transform (unnormalized synthesis).
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.plans.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(data.len(), self.len());
        let n = self.inner.n;
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        if self.dim() == 1 {
            plan.process_with_scratch(data, &mut scratch);
            return;
        }
        let mut line = vec![Complex64::default(); n];
        for axis in 0..self.dim() {
            let stride = self.stride(axis);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    plan.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            let block = stride * n;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}
