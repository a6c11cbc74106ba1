use rayon::prelude::*;
use serde::Serialize;

use super::{positive_loglog_slope, Check, Report, Table};
use crate::dynamics::Nonlinearity;
use crate::error::{Error, Result};
use crate::evolution::{solve_final, SolverConfig};
use crate::field::VectorField;
use crate::littlewood_paley::{DyadicPartition, SpaceParams};

/// `t0, t0/2, …, t0/2^{count-1}`.
pub fn halving_times(t0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t0 * 0.5f64.powi(k as i32)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop31Row {
    pub t: f64,
    /// `‖S_t(u₀) − u₀ + t U₀‖`.
    pub second_order: f64,
    /// `‖S_t(u₀) − u₀‖`.
    pub first_order: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop31Report {
    pub space: SpaceParams,
    pub solver: SolverConfig,
    pub points_per_axis: usize,
    pub dim: usize,
    pub rows: Vec<Prop31Row>,
    pub second_order_slope: Option<f64>,
    pub first_order_slope: Option<f64>,
    pub checks: Vec<Check>,
}

/// Measures the short-time expansion `S_t(u₀) = u₀ − t U₀ + O(t²)` at each
/// `t` in `t_list`, each by its own solve with uniform steps.
pub fn prop31_check(
    u0: &VectorField,
    t_list: &[f64],
    sp: &SpaceParams,
    part: &DyadicPartition,
    cfg: &SolverConfig,
) -> Result<Prop31Report> {
    if t_list.len() < 2 || t_list.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::param("need at least two positive times"));
    }
    let nl = Nonlinearity::new(cfg.dealias_fraction)?;
    let u0_term = nl.u0_functional(u0)?;
    let rows = t_list
        .par_iter()
        .map(|&t| {
            let ut = solve_final(u0, &cfg.with_t_final(t))?;
            let drift = ut.sub(u0)?;
            let second = drift.lincomb(1.0, &u0_term, t)?;
            Ok(Prop31Row { t, second_order: part.norm(&second, sp)?, first_order: part.norm(&drift, sp)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let second: Vec<f64> = rows.iter().map(|r| r.second_order).collect();
    let first: Vec<f64> = rows.iter().map(|r| r.first_order).collect();
    let second_order_slope = positive_loglog_slope(&ts, &second);
    let first_order_slope = positive_loglog_slope(&ts, &first);
    let mut checks = Vec::new();
    if second.iter().chain(&first).all(|v| *v == 0.0) {
        checks.push(Check::new("stationary data", true, "every expansion error vanishes"));
    } else {
        checks.push(match second_order_slope {
            Some(s) => Check::new("second-order slope", s >= 1.9, format!("slope {s:.4}, need >= 1.9")),
            None => Check::new("second-order slope", false, "error not strictly positive at every t"),
        });
        checks.push(match first_order_slope {
            Some(s) => Check::new(
                "first-order slope",
                (0.9..=1.1).contains(&s),
                format!("slope {s:.4}, need within [0.9, 1.1]"),
            ),
            None => Check::new("first-order slope", false, "drift not strictly positive at every t"),
        });
    }
    Ok(Prop31Report {
        space: *sp,
        solver: cfg.clone(),
        points_per_axis: u0.grid().points_per_axis(),
        dim: u0.grid().dim(),
        rows,
        second_order_slope,
        first_order_slope,
        checks,
    })
}

impl Report for Prop31Report {
    fn name(&self) -> &'static str {
        "prop31"
    }

    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        Table {
            header: vec!["t", "second_order", "first_order", "second_order_slope", "first_order_slope"],
            rows: self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Some(r.t),
                        Some(r.second_order),
                        Some(r.first_order),
                        self.second_order_slope,
                        self.first_order_slope,
                    ]
                })
                .collect(),
        }
    }
}
