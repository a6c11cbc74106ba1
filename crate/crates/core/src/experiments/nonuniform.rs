use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bump::{counterexample_period, make_bump, BumpParams};
use super::counterexample::counterexample_pair;
use super::rl::{rl_lower_bound, RlConfig};
use super::{positive_log2_slope, Check, Report, Table};
use crate::dynamics::Nonlinearity;
use crate::error::{Error, Result};
use crate::evolution::{solve_final, SolverConfig};
use crate::grid::PeriodicGrid;
use crate::littlewood_paley::{DyadicPartition, SpaceParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonuniformConfig {
    pub dim: usize,
    pub n_min: i32,
    pub n_max: i32,
    pub s: f64,
    pub p: f64,
    pub r: f64,
    /// Fixed probe time; `None` selects it by halving from `t_start`.
    pub t_probe: Option<f64>,
    pub t_start: f64,
    pub max_halvings: usize,
    /// Accept a probe time once the expansion remainder is at most this
    /// fraction of the linear term for every `n`.
    pub remainder_fraction: f64,
    /// Fixed resolution for every `n`; `None` picks the smallest grid per `n`.
    pub points_per_axis: Option<usize>,
    pub solver: SolverConfig,
}

impl NonuniformConfig {
    pub fn new(dim: usize) -> Self {
        let (n_min, n_max) = if dim == 1 { (4, 8) } else { (3, 5) };
        Self {
            dim,
            n_min,
            n_max,
            s: 2.0,
            p: 2.0,
            r: 2.0,
            t_probe: None,
            t_start: 2.0,
            max_halvings: 6,
            remainder_fraction: 0.25,
            points_per_axis: None,
            solver: SolverConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_min < 0 || self.n_max < self.n_min {
            return Err(Error::param("need 0 <= n_min <= n_max"));
        }
        if let Some(t) = self.t_probe {
            if !(t >= 0.0) {
                return Err(Error::param("t_probe must be non-negative"));
            }
        } else if !(self.t_start > 0.0) {
            return Err(Error::param("t_start must be positive"));
        }
        SpaceParams::triebel_lizorkin(self.s, self.p, self.r)?;
        self.solver.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonuniformRow {
    pub n: i32,
    pub points_per_axis: usize,
    /// `‖u₀ⁿ − v₀ⁿ‖_{F^s_{p,r}}`.
    pub delta0: f64,
    /// `‖S_t(u₀ⁿ) − S_t(v₀ⁿ)‖_{F^s_{p,r}}` at the probe time; `None` after blow-up.
    pub delta_t: Option<f64>,
    /// `delta_t / t_probe`.
    pub ratio: Option<f64>,
    /// `t·‖U₀(u₀ⁿ) − U₀(v₀ⁿ)‖`.
    pub linear_term: f64,
    /// `‖(S_t u₀ⁿ − S_t v₀ⁿ) − (u₀ⁿ − v₀ⁿ) + t(U₀(u₀ⁿ) − U₀(v₀ⁿ))‖`.
    pub remainder: Option<f64>,
    pub blowup: Option<String>,
}

impl NonuniformRow {
    fn within_budget(&self, fraction: f64) -> bool {
        matches!(self.remainder, Some(q) if q <= fraction * self.linear_term)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub config: NonuniformConfig,
    pub period: f64,
    pub bump: BumpParams,
    pub t_probe: f64,
    pub rows: Vec<NonuniformRow>,
    pub delta0_slope: Option<f64>,
    /// `min_n δ(n, t)/t`.
    pub c0: Option<f64>,
    /// `max_n δ(n, t)/t ÷ min_n δ(n, t)/t`.
    pub spread: Option<f64>,
    /// Empirical limit of the averaged lower bound over the same `n` range.
    pub rl_limit: Option<f64>,
    pub checks: Vec<Check>,
}

fn probe(cfg: &NonuniformConfig, n: i32, t: f64) -> Result<NonuniformRow> {
    let period = counterexample_period(cfg.dim);
    let points = cfg.points_per_axis.unwrap_or_else(|| PeriodicGrid::points_for_block(n, period));
    let grid = PeriodicGrid::new(cfg.dim, points, period)?;
    let bump = make_bump(&grid, cfg.dim)?;
    let (u0, v0) = counterexample_pair(n, &grid, cfg.s, &bump)?;
    let part = DyadicPartition::new(&grid);
    let sp = SpaceParams::triebel_lizorkin(cfg.s, cfg.p, cfg.r)?;
    let nl = Nonlinearity::new(cfg.solver.dealias_fraction)?;

    let d0 = u0.sub(&v0)?;
    let delta0 = part.tl_norm(&d0, &sp)?;
    let du = nl.u0_functional(&u0)?.sub(&nl.u0_functional(&v0)?)?;
    let linear_term = t * part.tl_norm(&du, &sp)?;
    let solver = cfg.solver.with_t_final(t);
    let solved = solve_final(&u0, &solver).and_then(|a| Ok((a, solve_final(&v0, &solver)?)));
    let (ut, vt) = match solved {
        Ok(pair) => pair,
        Err(Error::BlowupDetected { time, grad_linf, threshold, .. }) => {
            return Ok(NonuniformRow {
                n,
                points_per_axis: points,
                delta0,
                delta_t: None,
                ratio: None,
                linear_term,
                remainder: None,
                blowup: Some(format!("gradient {grad_linf:.3e} exceeded {threshold:.3e} at t = {time}")),
            });
        }
        Err(e) => return Err(e),
    };
    let dt_diff = ut.sub(&vt)?;
    let delta_t = part.tl_norm(&dt_diff, &sp)?;
    let remainder = part.tl_norm(&dt_diff.sub(&d0)?.lincomb(1.0, &du, t)?, &sp)?;
    Ok(NonuniformRow {
        n,
        points_per_axis: points,
        delta0,
        delta_t: Some(delta_t),
        ratio: (t > 0.0).then(|| delta_t / t),
        linear_term,
        remainder: Some(remainder),
        blowup: None,
    })
}

fn sweep(cfg: &NonuniformConfig, t: f64) -> Result<Vec<NonuniformRow>> {
    (cfg.n_min..=cfg.n_max).collect::<Vec<_>>().par_iter().map(|&n| probe(cfg, n, t)).collect()
}

/// Evolves the counterexample pairs `(u₀ⁿ, v₀ⁿ)` to a common probe time and
/// reports the decay of the initial distance against the persistence of the
/// solution distance.
pub fn nonuniform_experiment(cfg: &NonuniformConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut checks = Vec::new();
    let (t_probe, rows) = match cfg.t_probe {
        Some(t) => (t, sweep(cfg, t)?),
        None => {
            let mut t = cfg.t_start;
            let mut attempt = 0;
            loop {
                let rows = sweep(cfg, t)?;
                let ok = rows.iter().all(|r| r.within_budget(cfg.remainder_fraction));
                if ok || attempt == cfg.max_halvings {
                    checks.push(Check::new(
                        "probe time",
                        ok,
                        format!(
                            "t = {t} after {attempt} halvings; remainder <= {} x linear term: {ok}",
                            cfg.remainder_fraction
                        ),
                    ));
                    break (t, rows);
                }
                t *= 0.5;
                attempt += 1;
            }
        }
    };

    let period = counterexample_period(cfg.dim);
    let bump_grid = PeriodicGrid::new(cfg.dim, PeriodicGrid::points_for_block(cfg.n_min, period), period)?;
    let bump = make_bump(&bump_grid, cfg.dim)?.params();

    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let d0: Vec<f64> = rows.iter().map(|r| r.delta0).collect();
    let delta0_slope = positive_log2_slope(&ns, &d0);
    checks.push(match delta0_slope {
        Some(s) => Check::new(
            "initial distance decay",
            (-1.3..=-0.7).contains(&s),
            format!("log2 slope {s:.4}, need -1 +/- 0.3"),
        ),
        None => Check::new("initial distance decay", false, "initial distances not strictly positive"),
    });

    let blown: Vec<i32> = rows.iter().filter(|r| r.blowup.is_some()).map(|r| r.n).collect();
    if !blown.is_empty() {
        checks.push(Check::new("no blow-up", false, format!("blow-up guard tripped for n = {blown:?}")));
    }
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let (c0, spread) = if ratios.is_empty() {
        (None, None)
    } else {
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        (Some(lo), (lo > 0.0).then(|| hi / lo))
    };
    match (c0, spread) {
        (Some(c), Some(sp)) => {
            checks.push(Check::new("uniform lower bound", c > 0.0, format!("c0 = {c:.6e}")));
            checks.push(Check::new("ratio spread", sp <= 4.0, format!("max/min ratio {sp:.4}, need <= 4")));
        }
        _ => checks.push(Check::new("uniform lower bound", false, "no positive separation ratios")),
    }

    let rl_limit = if cfg.n_max >= 4 {
        let rl = RlConfig {
            dim: cfg.dim,
            n_min: cfg.n_min.max(4),
            n_max: cfg.n_max,
            s: cfg.s,
            p: cfg.p,
            points_per_axis: cfg.points_per_axis,
        };
        Some(rl_lower_bound(&rl)?.empirical_limit)
    } else {
        None
    };
    if let (Some(c), Some(limit)) = (c0, rl_limit) {
        let q = c / limit;
        checks.push(Check::new(
            "consistent with averaged bound",
            (0.25..=4.0).contains(&q),
            format!("c0 / limit = {q:.4}, need within [1/4, 4]"),
        ));
    }

    Ok(ExperimentReport { config: cfg.clone(), period, bump, t_probe, rows, delta0_slope, c0, spread, rl_limit, checks })
}

impl Report for ExperimentReport {
    fn name(&self) -> &'static str {
        "nonuniform"
    }

    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        Table {
            header: vec!["n", "delta0", "delta_t", "ratio", "slope"],
            rows: self
                .rows
                .iter()
                .map(|r| vec![Some(r.n as f64), Some(r.delta0), r.delta_t, r.ratio, self.delta0_slope])
                .collect(),
        }
    }
}
