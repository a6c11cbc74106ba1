//! Time integration of the transport form, the Picard approximation scheme,
//! and its Cauchy diagnostics.

use serde::{Deserialize, Serialize};

use crate::dynamics::Nonlinearity;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::littlewood_paley::{DyadicPartition, SpaceParams};
use crate::ops::{gradient_linf, h1_energy, linf_norm, TWO_THIRDS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlowupGuard {
    /// Trip when `‖∇u‖_{L^∞}` exceeds this value.
    Absolute(f64),
    /// Trip when `‖∇u‖_{L^∞}` exceeds this multiple of its initial value.
    RelativeToInitial(f64),
}

/// Regularity triple for per-step diagnostics: `F^s_{p,r}` and `B^{s-1}_{p,∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticNorms {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl DiagnosticNorms {
    pub fn tl(&self) -> Result<SpaceParams> {
        SpaceParams::triebel_lizorkin(self.s, self.p, self.r)
    }

    /// `B^{s-1}_{p,∞}`.
    pub fn besov_low(&self) -> Result<SpaceParams> {
        SpaceParams::besov(self.s - 1.0, self.p, f64::INFINITY)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub blowup: BlowupGuard,
    pub dealias_fraction: f64,
    pub cfl_safety: f64,
    pub diagnostics: Option<DiagnosticNorms>,
    /// Keep every `record_every`-th state (the initial and final states are
    /// always kept).
    pub record_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            t_final: 1.0,
            blowup: BlowupGuard::RelativeToInitial(10.0),
            dealias_fraction: TWO_THIRDS,
            cfl_safety: 0.8,
            diagnostics: None,
            record_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::param(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::param("cfl_safety must lie in (0, 1]"));
        }
        match self.blowup {
            BlowupGuard::Absolute(v) | BlowupGuard::RelativeToInitial(v) if !(v > 0.0) => {
                return Err(Error::param("blow-up threshold must be positive"));
            }
            _ => {}
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every must be at least 1"));
        }
        Nonlinearity::new(self.dealias_fraction)?;
        Ok(())
    }

    pub fn with_t_final(&self, t_final: f64) -> Self {
        Self { t_final, ..self.clone() }
    }

    fn nonlinearity(&self) -> Nonlinearity {
        Nonlinearity { dealias_fraction: self.dealias_fraction }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticRow {
    pub t: f64,
    pub tl_norm: Option<f64>,
    pub besov_low_norm: Option<f64>,
    pub grad_linf: f64,
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<VectorField>,
    /// One row per accepted step (plus `t = 0`), independent of `record_every`.
    pub diagnostics: Vec<DiagnosticRow>,
}

impl Trajectory {
    pub fn final_state(&self) -> &VectorField {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial time")
    }

    pub fn initial_state(&self) -> &VectorField {
        &self.states[0]
    }
}

/// State that classical RK4 can advance.
trait OdeState: Sized {
    /// `self + a·other`.
    fn axpy(&self, a: f64, other: &Self) -> Result<Self>;
}

impl OdeState for VectorField {
    fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.lincomb(1.0, other, a)
    }
}

impl OdeState for Vec<VectorField> {
    fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.iter().zip(other).map(|(x, y)| x.lincomb(1.0, y, a)).collect()
    }
}

fn rk4<S: OdeState>(u: &S, dt: f64, rhs: impl Fn(&S) -> Result<S>) -> Result<S> {
    let k1 = rhs(u)?;
    let k2 = rhs(&u.axpy(0.5 * dt, &k1)?)?;
    let k3 = rhs(&u.axpy(0.5 * dt, &k2)?)?;
    let k4 = rhs(&u.axpy(dt, &k3)?)?;
    u.axpy(dt / 6.0, &k1)?
        .axpy(dt / 3.0, &k2)?
        .axpy(dt / 3.0, &k3)?
        .axpy(dt / 6.0, &k4)
}

/// `dt · Σ_axis ‖u_axis‖_∞ · ξ_cut`, with `ξ_cut` the largest retained frequency.
pub fn cfl_number(u: &VectorField, dt: f64, dealias_fraction: f64) -> f64 {
    let xi_cut = dealias_fraction * u.grid().max_axis_frequency();
    let speed: f64 = u.components().iter().map(linf_norm).sum();
    dt * speed * xi_cut
}

fn check_cfl(fields: &[&VectorField], dt: f64, cfg: &SolverConfig) -> Result<()> {
    let cfl = fields.iter().map(|u| cfl_number(u, dt, cfg.dealias_fraction)).fold(0.0, f64::max);
    if cfl > cfg.cfl_safety {
        Err(Error::CflViolation { cfl, suggested_dt: 0.5 * dt })
    } else {
        Ok(())
    }
}

/// One classical RK4 step of `∂_t u = ep_rhs(u)`.
pub fn rk4_step(u: &VectorField, dt: f64, cfg: &SolverConfig) -> Result<VectorField> {
    check_cfl(&[u], dt, cfg)?;
    let nl = cfg.nonlinearity();
    rk4(u, dt, |v| nl.ep_rhs(v))
}

struct Recorder<'a> {
    part: Option<DyadicPartition>,
    norms: Option<(SpaceParams, SpaceParams)>,
    cfg: &'a SolverConfig,
}

impl<'a> Recorder<'a> {
    fn new(u0: &VectorField, cfg: &'a SolverConfig) -> Result<Self> {
        let norms = cfg.diagnostics.map(|d| Ok::<_, Error>((d.tl()?, d.besov_low()?))).transpose()?;
        let part = norms.as_ref().map(|_| DyadicPartition::new(u0.grid()));
        Ok(Self { part, norms, cfg })
    }

    fn row(&self, t: f64, u: &VectorField) -> Result<DiagnosticRow> {
        let (tl_norm, besov_low_norm) = match (&self.part, &self.norms) {
            (Some(part), Some((tl, b))) => (Some(part.tl_norm(u, tl)?), Some(part.besov_norm(u, b)?)),
            _ => (None, None),
        };
        Ok(DiagnosticRow { t, tl_norm, besov_low_norm, grad_linf: gradient_linf(u)?, energy: h1_energy(u) })
    }

    fn threshold(&self, initial_grad: f64) -> f64 {
        match self.cfg.blowup {
            BlowupGuard::Absolute(v) => v,
            BlowupGuard::RelativeToInitial(f) => f * initial_grad,
        }
    }
}

/// Uniform step that lands exactly on `t_final` from `t`.
fn next_step(t: f64, t_final: f64, dt: f64) -> f64 {
    let remaining = t_final - t;
    let steps = (remaining / dt - 1e-9).ceil().max(1.0);
    remaining / steps
}

/// Integrates `∂_t u = ep_rhs(u)` on `[0, t_final]`, halving `dt` whenever the
/// CFL bound is violated, and recording diagnostics at every accepted step.
pub fn solve(u0: &VectorField, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let rec = Recorder::new(u0, cfg)?;
    let first = rec.row(0.0, u0)?;
    let threshold = rec.threshold(first.grad_linf);
    let mut traj = Trajectory { times: vec![0.0], states: vec![u0.clone()], diagnostics: vec![first] };
    let mut u = u0.clone();
    let mut t = 0.0;
    let mut dt = cfg.dt;
    let mut step = 0usize;
    while t < cfg.t_final {
        let h = next_step(t, cfg.t_final, dt);
        let next = match rk4_step(&u, h, cfg) {
            Ok(v) => v,
            Err(Error::CflViolation { suggested_dt, .. }) if suggested_dt > 1e-14 * cfg.dt.max(cfg.t_final) => {
                dt = suggested_dt;
                continue;
            }
            Err(e) => return Err(e),
        };
        let t_next = if (cfg.t_final - (t + h)).abs() <= 1e-12 * cfg.t_final { cfg.t_final } else { t + h };
        let row = rec.row(t_next, &next)?;
        if row.grad_linf > threshold {
            return Err(Error::BlowupDetected {
                time: t_next,
                grad_linf: row.grad_linf,
                threshold,
                partial: Box::new(traj),
            });
        }
        step += 1;
        t = t_next;
        u = next;
        traj.diagnostics.push(row);
        if step % cfg.record_every == 0 || t >= cfg.t_final {
            traj.times.push(t);
            traj.states.push(u.clone());
        }
    }
    Ok(traj)
}

/// State at `t_final` only.
pub fn solve_final(u0: &VectorField, cfg: &SolverConfig) -> Result<VectorField> {
    let cfg = SolverConfig { diagnostics: None, record_every: usize::MAX, ..cfg.clone() };
    Ok(solve(u0, &cfg)?.final_state().clone())
}

/// What drives the first link of a transport chain.
enum ChainHead {
    /// `u⁰ ≡ 0`.
    Zero,
    /// The nonlinear solution itself, integrated alongside the chain.
    Nonlinear,
}

/// Integrates a chain `w_0 → w_1 → …` where `w_{k+1}` solves
/// `∂_t w_{k+1} + (w_k·∇)w_{k+1} = P(w_k, w_k)`. With [`ChainHead::Nonlinear`]
/// the first entry of `initial` is advanced by the full nonlinear equation.
/// All links share RK4 stages, so every frozen field is evaluated exactly at
/// the stage times it is needed.
fn integrate_chain(head: ChainHead, initial: Vec<VectorField>, cfg: &SolverConfig) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    let nl = cfg.nonlinearity();
    let grid = initial[0].grid().clone();
    let rhs = |state: &Vec<VectorField>| -> Result<Vec<VectorField>> {
        let mut out = Vec::with_capacity(state.len());
        for (k, w) in state.iter().enumerate() {
            let driver = match (k, &head) {
                (0, ChainHead::Nonlinear) => {
                    out.push(nl.ep_rhs(w)?);
                    continue;
                }
                (0, ChainHead::Zero) => None,
                (k, _) => Some(&state[k - 1]),
            };
            match driver {
                // Frozen zero velocity and zero source.
                None => out.push(VectorField::zeros(&grid)),
                Some(v) => {
                    let source = nl.p_op(v)?;
                    out.push(nl.transport_rhs(v, w, &source)?);
                }
            }
        }
        Ok(out)
    };

    let recorders = initial.iter().map(|w| Recorder::new(w, cfg)).collect::<Result<Vec<_>>>()?;
    let mut trajs: Vec<Trajectory> = initial
        .iter()
        .zip(&recorders)
        .map(|(w, rec)| {
            Ok(Trajectory { times: vec![0.0], states: vec![w.clone()], diagnostics: vec![rec.row(0.0, w)?] })
        })
        .collect::<Result<_>>()?;
    let thresholds: Vec<f64> =
        trajs.iter().zip(&recorders).map(|(tr, rec)| rec.threshold(tr.diagnostics[0].grad_linf)).collect();

    let mut state = initial;
    let mut t = 0.0;
    let mut dt = cfg.dt;
    let mut step = 0usize;
    while t < cfg.t_final {
        let h = next_step(t, cfg.t_final, dt);
        let refs: Vec<&VectorField> = state.iter().collect();
        if let Err(Error::CflViolation { suggested_dt, .. }) = check_cfl(&refs, h, cfg) {
            if suggested_dt <= 1e-14 * cfg.dt.max(cfg.t_final) {
                return Err(Error::param("time step underflow"));
            }
            dt = suggested_dt;
            continue;
        }
        let next = rk4(&state, h, &rhs)?;
        let t_next = if (cfg.t_final - (t + h)).abs() <= 1e-12 * cfg.t_final { cfg.t_final } else { t + h };
        step += 1;
        for (k, w) in next.iter().enumerate() {
            let row = recorders[k].row(t_next, w)?;
            if row.grad_linf > thresholds[k] {
                return Err(Error::BlowupDetected {
                    time: t_next,
                    grad_linf: row.grad_linf,
                    threshold: thresholds[k],
                    partial: Box::new(trajs.swap_remove(k)),
                });
            }
            trajs[k].diagnostics.push(row);
        }
        t = t_next;
        state = next;
        if step % cfg.record_every == 0 || t >= cfg.t_final {
            for (tr, w) in trajs.iter_mut().zip(&state) {
                tr.times.push(t);
                tr.states.push(w.clone());
            }
        }
    }
    Ok(trajs)
}

/// Picard iterates `u⁰ = 0, u¹, …, u^{n_iters}` where `u^{n+1}` solves the linear
/// transport problem `∂_t u^{n+1} + (uⁿ·∇)u^{n+1} = P(uⁿ, uⁿ)` with data
/// `S_{n+1} u₀`. Returns `n_iters + 1` trajectories, index = iterate number.
pub fn picard_solve(
    u0: &VectorField,
    n_iters: usize,
    cfg: &SolverConfig,
    part: &DyadicPartition,
) -> Result<Vec<Trajectory>> {
    if n_iters == 0 {
        return Err(Error::param("need at least one Picard iteration"));
    }
    let initial = (1..=n_iters)
        .map(|n| part.low_pass_vector(u0, n as i32))
        .collect::<Result<Vec<_>>>()?;
    let mut out = integrate_chain(ChainHead::Zero, initial, cfg)?;
    let zero = VectorField::zeros(u0.grid());
    let template = &out[0];
    let rec = Recorder::new(&zero, cfg)?;
    let zero_traj = Trajectory {
        times: template.times.clone(),
        states: template.times.iter().map(|_| zero.clone()).collect(),
        diagnostics: template.diagnostics.iter().map(|r| rec.row(r.t, &zero)).collect::<Result<_>>()?,
    };
    out.insert(0, zero_traj);
    Ok(out)
}

/// Integrates the nonlinear solution `u` and, alongside it, the linear
/// transport problem with `u` frozen as velocity and `P(u,u)` as source,
/// started from the same data. Returns `(u, w)`; at a fixed point `w = u`.
pub fn frozen_solution_transport(u0: &VectorField, cfg: &SolverConfig) -> Result<(Trajectory, Trajectory)> {
    let mut trajs = integrate_chain(ChainHead::Nonlinear, vec![u0.clone(), u0.clone()], cfg)?;
    let w = trajs.pop().expect("two links");
    let u = trajs.pop().expect("two links");
    Ok((u, w))
}

/// `b_n^m = ‖u^{n+m} − uⁿ‖` at the common end time, for every `n` with
/// `n + m` available. The norm is selected by `sp.kind`.
pub fn cauchy_diagnostic(
    iterates: &[Trajectory],
    m: usize,
    sp: &SpaceParams,
    part: &DyadicPartition,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::param("m must be at least 1"));
    }
    if iterates.len() < m + 1 {
        return Err(Error::InsufficientIterates { needed: m + 1, available: iterates.len() });
    }
    (0..iterates.len() - m)
        .map(|n| {
            let diff = iterates[n + m].final_state().sub(iterates[n].final_state())?;
            part.norm(&diff, sp)
        })
        .collect()
}
