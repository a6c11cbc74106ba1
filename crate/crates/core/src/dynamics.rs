//! Right-hand side of the Euler–Poincaré system in nonlocal transport form,
//!
//! ```text
//! ∂_t u + (u·∇)u = Q(u,u) + R(u,u) = P(u,u),
//! Q(u,v) = −(1−Δ)^{-1} div(∇u∇v + ∇u(∇v)ᵀ − (∇u)ᵀ∇v − (div u)∇v + ½ I (∇u:∇v)),
//! R(u,v) = −(1−Δ)^{-1}((div u) v + (∇u)ᵀ·v),
//! ```
//!
//! where `∇u` is the Jacobian, `(∇u)_{ij} = ∂_{x_j} u_i`, and the divergence of
//! a matrix acts on rows, `(div T)_i = Σ_j ∂_{x_j} T_ij`. Under this reading the
//! transport form is equivalent to the momentum form
//! `∂_t m + u·∇m + (∇u)ᵀm + m div u = 0`, `m = (1−Δ)u`.
//!
//! Every quadratic product is dealiased before any further derivative or
//! inversion is applied.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::PeriodicGrid;
use crate::ops::{dealias_mask, helmholtz, helmholtz_inverse, lp_norm, spectral_derivative, TWO_THIRDS};

/// Samples of `g[i][j] = ∂_{x_i} u_j`.
struct GradientTable {
    g: Vec<Vec<Vec<f64>>>,
}

impl GradientTable {
    fn new(u: &VectorField) -> Result<Self> {
        let dim = u.grid().dim();
        if u.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: u.len() });
        }
        let g = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| spectral_derivative(u.component(j), i).map(|d| d.samples().to_vec()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { g })
    }

    fn get(&self, i: usize, j: usize) -> &[f64] {
        &self.g[i][j]
    }

    fn divergence(&self) -> Vec<f64> {
        let dim = self.g.len();
        let mut acc = self.g[0][0].clone();
        for i in 1..dim {
            for (a, v) in acc.iter_mut().zip(&self.g[i][i]) {
                *a += v;
            }
        }
        acc
    }
}

/// Quadratic operators with a configurable dealiasing cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nonlinearity {
    pub dealias_fraction: f64,
}

impl Default for Nonlinearity {
    fn default() -> Self {
        Self { dealias_fraction: TWO_THIRDS }
    }
}

impl Nonlinearity {
    pub fn new(dealias_fraction: f64) -> Result<Self> {
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::param(format!("dealias fraction must lie in (0, 1], got {dealias_fraction}")));
        }
        Ok(Self { dealias_fraction })
    }

    /// Transforms product samples and drops the aliased band.
    fn project(&self, grid: &PeriodicGrid, samples: Vec<f64>, mask: &[f64]) -> ScalarField {
        let f = ScalarField::physical_unchecked(grid, samples);
        f.apply_real_multiplier(mask)
    }

    fn mask(&self, grid: &PeriodicGrid) -> Vec<f64> {
        dealias_mask(grid, self.dealias_fraction)
    }

    /// Spectral `div T` for the Q tensor, before the `−(1−Δ)^{-1}`.
    fn q_divergence(&self, gu: &GradientTable, gv: &GradientTable, grid: &PeriodicGrid, mask: &[f64]) -> Vec<ScalarField> {
        let dim = grid.dim();
        let len = grid.len();
        let div_u = gu.divergence();
        let mut contraction = vec![0.0; len];
        for k in 0..dim {
            for l in 0..dim {
                for (c, (a, b)) in contraction.iter_mut().zip(gu.get(k, l).iter().zip(gv.get(k, l))) {
                    *c += a * b;
                }
            }
        }
        let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); len]; dim];
        // With J = ∇u, J_ab = g[b][a]:
        // T_ij = (JuJv)_ij + (JuJvᵀ)_ij − (JuᵀJv)_ij − (div u)(Jv)_ij + ½δ_ij (Ju:Jv).
        for i in 0..dim {
            for j in 0..dim {
                let mut t = vec![0.0; len];
                for k in 0..dim {
                    let (a1, b1) = (gu.get(k, i), gv.get(j, k));
                    let (a2, b2) = (gu.get(k, i), gv.get(k, j));
                    let (a3, b3) = (gu.get(i, k), gv.get(j, k));
                    for x in 0..len {
                        t[x] += a1[x] * b1[x] + a2[x] * b2[x] - a3[x] * b3[x];
                    }
                }
                let jv = gv.get(j, i);
                for x in 0..len {
                    t[x] -= div_u[x] * jv[x];
                }
                if i == j {
                    for x in 0..len {
                        t[x] += 0.5 * contraction[x];
                    }
                }
                let tij = self.project(grid, t, mask);
                let d = spectral_derivative(&tij, j).expect("axis within dimension");
                for (acc, c) in out[i].iter_mut().zip(d.coefficients()) {
                    *acc += c;
                }
            }
        }
        out.into_iter().map(|c| ScalarField::spectral_unchecked(grid, c)).collect()
    }

    /// Dealiased `(div u) v_i + Σ_j ∂_{x_i}u_j v_j` for each `i`.
    fn r_inner(&self, gu: &GradientTable, v: &VectorField, grid: &PeriodicGrid, mask: &[f64]) -> Vec<ScalarField> {
        let dim = grid.dim();
        let div_u = gu.divergence();
        (0..dim)
            .map(|i| {
                let mut acc: Vec<f64> = div_u.iter().zip(v.component(i).samples()).map(|(a, b)| a * b).collect();
                for j in 0..dim {
                    for (x, (a, b)) in acc.iter_mut().zip(gu.get(i, j).iter().zip(v.component(j).samples())) {
                        *x += a * b;
                    }
                }
                self.project(grid, acc, mask)
            })
            .collect()
    }

    /// Dealiased `(u·∇v)_i = Σ_k u_k ∂_{x_k} v_i`.
    fn convection_with(&self, u: &VectorField, gv: &GradientTable, grid: &PeriodicGrid, mask: &[f64]) -> Vec<ScalarField> {
        let dim = grid.dim();
        (0..dim)
            .map(|i| {
                let mut acc = vec![0.0; grid.len()];
                for k in 0..dim {
                    for (x, (a, b)) in acc.iter_mut().zip(u.component(k).samples().iter().zip(gv.get(k, i))) {
                        *x += a * b;
                    }
                }
                self.project(grid, acc, mask)
            })
            .collect()
    }

    pub fn q_op(&self, u: &VectorField, v: &VectorField) -> Result<VectorField> {
        u.ensure_compatible(v)?;
        let grid = u.grid().clone();
        let mask = self.mask(&grid);
        let (gu, gv) = (GradientTable::new(u)?, GradientTable::new(v)?);
        let div_t = self.q_divergence(&gu, &gv, &grid, &mask);
        Ok(VectorField::from_components_unchecked(
            div_t.iter().map(|c| helmholtz_inverse(c).scale(-1.0)).collect(),
        ))
    }

    pub fn r_op(&self, u: &VectorField, v: &VectorField) -> Result<VectorField> {
        u.ensure_compatible(v)?;
        let grid = u.grid().clone();
        let mask = self.mask(&grid);
        let gu = GradientTable::new(u)?;
        let inner = self.r_inner(&gu, v, &grid, &mask);
        Ok(VectorField::from_components_unchecked(
            inner.iter().map(|c| helmholtz_inverse(c).scale(-1.0)).collect(),
        ))
    }

    /// `(u·∇)v`, dealiased.
    pub fn convection(&self, u: &VectorField, v: &VectorField) -> Result<VectorField> {
        u.ensure_compatible(v)?;
        let grid = u.grid().clone();
        let mask = self.mask(&grid);
        let gv = GradientTable::new(v)?;
        Ok(VectorField::from_components_unchecked(self.convection_with(u, &gv, &grid, &mask)))
    }

    /// `P(u,u) = Q(u,u) + R(u,u)`.
    pub fn p_op(&self, u: &VectorField) -> Result<VectorField> {
        let grid = u.grid().clone();
        let mask = self.mask(&grid);
        let gu = GradientTable::new(u)?;
        Ok(VectorField::from_components_unchecked(self.p_with(&gu, u, &grid, &mask)))
    }

    fn p_with(&self, gu: &GradientTable, u: &VectorField, grid: &PeriodicGrid, mask: &[f64]) -> Vec<ScalarField> {
        let div_t = self.q_divergence(gu, gu, grid, mask);
        let inner = self.r_inner(gu, u, grid, mask);
        div_t
            .iter()
            .zip(&inner)
            .map(|(a, b)| helmholtz_inverse(&a.add(b).expect("same grid")).scale(-1.0))
            .collect()
    }

    /// `∂_t u = −(u·∇)u + P(u,u)`.
    pub fn ep_rhs(&self, u: &VectorField) -> Result<VectorField> {
        let grid = u.grid().clone();
        let mask = self.mask(&grid);
        let gu = GradientTable::new(u)?;
        let conv = self.convection_with(u, &gu, &grid, &mask);
        let p = self.p_with(&gu, u, &grid, &mask);
        let comps = p.iter().zip(&conv).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(VectorField::from_components_unchecked(comps))
    }

    /// Right-hand side of the linear transport problem
    /// `∂_t w + (v·∇)w = source`.
    pub fn transport_rhs(&self, velocity: &VectorField, w: &VectorField, source: &VectorField) -> Result<VectorField> {
        let conv = self.convection(velocity, w)?;
        source.sub(&conv)
    }

    /// `U₀ = (u₀·∇)u₀ − Q(u₀,u₀) − R(u₀,u₀)`, i.e. `−ep_rhs(u₀)`.
    pub fn u0_functional(&self, u0: &VectorField) -> Result<VectorField> {
        Ok(self.ep_rhs(u0)?.scale(-1.0))
    }

    /// `L²` norm of the momentum-form residual
    /// `∂_t m_i + Σ_j u_j ∂_{x_j} m_i + Σ_j (∂_{x_i} u_j) m_j + m_i div u`
    /// with `m = (1−Δ)u` and `∂_t m = (1−Δ)u_t`.
    pub fn momentum_residual(&self, u: &VectorField, u_t: &VectorField) -> Result<f64> {
        u.ensure_compatible(u_t)?;
        let grid = u.grid().clone();
        let mask = self.mask(&grid);
        let m = u.map(helmholtz);
        let m_t = u_t.map(helmholtz);
        let gu = GradientTable::new(u)?;
        let gm = GradientTable::new(&m)?;
        let div_u = gu.divergence();
        let dim = grid.dim();
        let mut comps = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut acc: Vec<f64> = div_u.iter().zip(m.component(i).samples()).map(|(a, b)| a * b).collect();
            for j in 0..dim {
                let (uj, dmi) = (u.component(j).samples(), gm.get(j, i));
                let (duj, mj) = (gu.get(i, j), m.component(j).samples());
                for x in 0..acc.len() {
                    acc[x] += uj[x] * dmi[x] + duj[x] * mj[x];
                }
            }
            let nonlinear = self.project(&grid, acc, &mask);
            comps.push(m_t.component(i).add(&nonlinear)?);
        }
        lp_norm(&VectorField::from_components_unchecked(comps), 2.0)
    }
}

pub fn q_op(u: &VectorField, v: &VectorField) -> Result<VectorField> {
    Nonlinearity::default().q_op(u, v)
}

pub fn r_op(u: &VectorField, v: &VectorField) -> Result<VectorField> {
    Nonlinearity::default().r_op(u, v)
}

pub fn p_op(u: &VectorField) -> Result<VectorField> {
    Nonlinearity::default().p_op(u)
}

pub fn ep_rhs(u: &VectorField) -> Result<VectorField> {
    Nonlinearity::default().ep_rhs(u)
}

pub fn u0_functional(u0: &VectorField) -> Result<VectorField> {
    Nonlinearity::default().u0_functional(u0)
}

pub fn momentum_residual(u: &VectorField, u_t: &VectorField) -> Result<f64> {
    Nonlinearity::default().momentum_residual(u, u_t)
}

/// `‖(1−Δ)u‖_{L²}`, the natural scale for [`momentum_residual`].
pub fn momentum_l2(u: &VectorField) -> Result<f64> {
    lp_norm(&u.map(helmholtz), 2.0)
}
