//! Test-only oracles that do not go through the library's operator code.
#![allow(dead_code)]

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Direct 1-D Camassa–Holm right-hand side
/// `−u u_x − (1 − ∂_xx)^{-1} ∂_x (u² + ½ u_x²)` on a periodic grid of period
/// `period`, with products truncated to `|k| <= cutoff`.
pub struct ChOracle {
    n: usize,
    period: f64,
    cutoff: f64,
}

impl ChOracle {
    pub fn new(n: usize, period: f64, dealias_fraction: f64) -> Self {
        Self { n, period, cutoff: dealias_fraction * (n / 2) as f64 }
    }

    fn k(&self, i: usize) -> f64 {
        let k = if i < self.n / 2 { i as f64 } else { i as f64 - self.n as f64 };
        k
    }

    fn fft(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(self.n).process(&mut buf);
        buf
    }

    fn ifft(&self, c: &[Complex64]) -> Vec<f64> {
        let mut buf = c.to_vec();
        FftPlanner::new().plan_fft_inverse(self.n).process(&mut buf);
        buf.iter().map(|z| z.re / self.n as f64).collect()
    }

    fn deriv(&self, c: &[Complex64]) -> Vec<Complex64> {
        let w = 2.0 * std::f64::consts::PI / self.period;
        c.iter()
            .enumerate()
            .map(|(i, z)| if i == self.n / 2 { Complex64::default() } else { z * Complex64::new(0.0, w * self.k(i)) })
            .collect()
    }

    fn truncate(&self, mut c: Vec<Complex64>) -> Vec<Complex64> {
        for (i, z) in c.iter_mut().enumerate() {
            if self.k(i).abs() > self.cutoff {
                *z = Complex64::default();
            }
        }
        c
    }

    pub fn rhs(&self, u: &[f64]) -> Vec<f64> {
        let w = 2.0 * std::f64::consts::PI / self.period;
        let uh = self.fft(u);
        let ux = self.ifft(&self.deriv(&uh));
        let adv: Vec<f64> = u.iter().zip(&ux).map(|(a, b)| a * b).collect();
        let flux: Vec<f64> = u.iter().zip(&ux).map(|(a, b)| a * a + 0.5 * b * b).collect();
        let adv_h = self.truncate(self.fft(&adv));
        let flux_h = self.deriv(&self.truncate(self.fft(&flux)));
        let out: Vec<Complex64> = adv_h
            .iter()
            .zip(&flux_h)
            .enumerate()
            .map(|(i, (a, f))| -a - f / (1.0 + (w * self.k(i)).powi(2)))
            .collect();
        self.ifft(&out)
    }

    /// Classical RK4 on the closed-form right-hand side.
    pub fn integrate(&self, u0: &[f64], dt: f64, steps: usize) -> Vec<f64> {
        let mut u = u0.to_vec();
        let axpy = |x: &[f64], a: f64, y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p + a * q).collect() };
        for _ in 0..steps {
            let k1 = self.rhs(&u);
            let k2 = self.rhs(&axpy(&u, 0.5 * dt, &k1));
            let k3 = self.rhs(&axpy(&u, 0.5 * dt, &k2));
            let k4 = self.rhs(&axpy(&u, dt, &k3));
            for i in 0..u.len() {
                u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        u
    }
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `∫ (u² + u_x²) dx` on a one-dimensional periodic grid, with `u_x` from a
/// direct transform.
pub fn ch_energy(u: &[f64], period: f64) -> f64 {
    let n = u.len();
    let oracle = ChOracle::new(n, period, 1.0);
    let ux = oracle.ifft(&oracle.deriv(&oracle.fft(u)));
    let h = period / n as f64;
    u.iter().zip(&ux).map(|(a, b)| a * a + b * b).sum::<f64>() * h
}
