use serde::{Deserialize, Serialize};

use super::{positive_log2_slope, Check, Report, Table};
use crate::error::{Error, Result};
use crate::evolution::{cauchy_diagnostic, picard_solve, solve_final, SolverConfig, Trajectory};
use crate::field::VectorField;
use crate::littlewood_paley::{DyadicPartition, SpaceParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub s: f64,
    pub p: f64,
    pub r: f64,
    /// Highest iterate computed; `b_n^1` is available for `n < n_iters`.
    pub n_iters: usize,
    /// Iterates whose `b_n^1` enter the decay fit.
    pub fit_min: usize,
    pub fit_max: usize,
    /// Iterate compared against the nonlinear solution.
    pub compare: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { s: 2.0, p: 2.0, r: 2.0, n_iters: 9, fit_min: 1, fit_max: 6, compare: 8 }
    }
}

impl PicardConfig {
    fn validate(&self) -> Result<()> {
        if self.fit_min < 1 || self.fit_max <= self.fit_min || self.fit_max >= self.n_iters {
            return Err(Error::param("need 1 <= fit_min < fit_max < n_iters"));
        }
        if self.compare >= self.n_iters {
            return Err(Error::param("compare must be below n_iters"));
        }
        SpaceParams::triebel_lizorkin(self.s, self.p, self.r)?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardReport {
    pub config: PicardConfig,
    pub solver: SolverConfig,
    pub points_per_axis: usize,
    pub dim: usize,
    /// `b_n^1` at the final time, index `n`.
    pub b1: Vec<f64>,
    /// `b_n^2` at the final time, index `n`.
    pub b2: Vec<f64>,
    pub slope: Option<f64>,
    /// `‖u^{compare} − u‖_{B^{s−1}_{p,∞}}` at the final time.
    pub solution_gap: f64,
    /// Largest `F^s_{p,r}` norm over recorded states, per iterate.
    pub iterate_norms: Vec<f64>,
    pub checks: Vec<Check>,
}

fn sup_norm(traj: &Trajectory, part: &DyadicPartition, sp: &SpaceParams) -> Result<f64> {
    traj.states.iter().try_fold(0.0, |m: f64, u| Ok(m.max(part.tl_norm(u, sp)?)))
}

/// Runs the Picard scheme alongside the nonlinear solve and reports Cauchy
/// decay, agreement with the limit and uniform boundedness.
pub fn picard_experiment(
    u0: &VectorField,
    cfg: &PicardConfig,
    solver: &SolverConfig,
    part: &DyadicPartition,
) -> Result<PicardReport> {
    cfg.validate()?;
    let low = SpaceParams::besov(cfg.s - 1.0, cfg.p, f64::INFINITY)?;
    let high = SpaceParams::triebel_lizorkin(cfg.s, cfg.p, cfg.r)?;
    let (iterates, solution) = rayon::join(
        || picard_solve(u0, cfg.n_iters, solver, part),
        || solve_final(u0, &SolverConfig { record_every: usize::MAX, ..solver.clone() }),
    );
    let (iterates, solution) = (iterates?, solution?);
    let b1 = cauchy_diagnostic(&iterates, 1, &low, part)?;
    let b2 = cauchy_diagnostic(&iterates, 2, &low, part)?;
    let solution_gap = part.besov_norm(&iterates[cfg.compare].final_state().sub(&solution)?, &low)?;
    let iterate_norms = iterates.iter().map(|t| sup_norm(t, part, &high)).collect::<Result<Vec<_>>>()?;

    let xs: Vec<f64> = (cfg.fit_min..=cfg.fit_max).map(|n| n as f64).collect();
    let ys: Vec<f64> = (cfg.fit_min..=cfg.fit_max).map(|n| b1[n]).collect();
    let slope = positive_log2_slope(&xs, &ys);
    let mut checks = vec![match slope {
        Some(s) => Check::new("Cauchy decay", (-1.4..=-0.6).contains(&s), format!("log2 slope {s:.4}, need -1 +/- 0.4")),
        None => Check::new("Cauchy decay", false, "b_n^1 not strictly positive"),
    }];
    let bound = b1[cfg.compare];
    checks.push(Check::new(
        "limit agreement",
        solution_gap <= bound,
        format!("‖u^{} − u‖ = {solution_gap:.4e}, b^1 = {bound:.4e}", cfg.compare),
    ));
    let subadditive = (0..b2.len()).all(|n| b2[n] <= (b1[n] + b1[n + 1]) * (1.0 + 1e-12));
    checks.push(Check::new("triangle inequality", subadditive, "b_n^2 <= b_n^1 + b_{n+1}^1"));
    let head = iterate_norms[1..4.min(iterate_norms.len())].iter().copied().fold(0.0, f64::max);
    let all = iterate_norms.iter().copied().fold(0.0, f64::max);
    checks.push(Check::new(
        "uniform bound",
        all <= 2.0 * head,
        format!("max {all:.4e} vs first three {head:.4e}, need <= 2x"),
    ));
    Ok(PicardReport {
        config: cfg.clone(),
        solver: solver.clone(),
        points_per_axis: u0.grid().points_per_axis(),
        dim: u0.grid().dim(),
        b1,
        b2,
        slope,
        solution_gap,
        iterate_norms,
        checks,
    })
}

impl Report for PicardReport {
    fn name(&self) -> &'static str {
        "picard"
    }

    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        Table {
            header: vec!["n", "b1", "b2", "iterate_norm", "slope"],
            rows: (0..self.iterate_norms.len())
                .map(|n| {
                    vec![
                        Some(n as f64),
                        self.b1.get(n).copied(),
                        self.b2.get(n).copied(),
                        Some(self.iterate_norms[n]),
                        self.slope,
                    ]
                })
                .collect(),
        }
    }
}
