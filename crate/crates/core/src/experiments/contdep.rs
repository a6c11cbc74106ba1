use rayon::prelude::*;
use serde::Serialize;

use super::{Check, Report, Table};
use crate::error::{Error, Result};
use crate::evolution::{solve_final, SolverConfig};
use crate::field::VectorField;
use crate::littlewood_paley::{DyadicPartition, SpaceParams};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContDepRow {
    pub level: i32,
    /// `‖S_N u₀ − u₀‖`.
    pub denominator: f64,
    /// `‖S_t(S_N u₀) − S_t(u₀)‖`.
    pub numerator: f64,
    /// `numerator / denominator`, absent when the denominator vanishes.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContDepReport {
    pub space: SpaceParams,
    pub solver: SolverConfig,
    pub points_per_axis: usize,
    pub dim: usize,
    pub rows: Vec<ContDepRow>,
    pub checks: Vec<Check>,
}

/// Compares solutions from low-pass truncated data `S_N u₀` with the solution
/// from `u₀` for each `N` in `levels` (ascending).
pub fn continuous_dependence_experiment(
    u0: &VectorField,
    levels: &[i32],
    sp: &SpaceParams,
    part: &DyadicPartition,
    cfg: &SolverConfig,
) -> Result<ContDepReport> {
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("levels must be non-empty and strictly increasing"));
    }
    let reference = solve_final(u0, cfg)?;
    let rows = levels
        .par_iter()
        .map(|&level| {
            let truncated = part.low_pass_vector(u0, level)?;
            let denominator = part.norm(&truncated.sub(u0)?, sp)?;
            let evolved = solve_final(&truncated, cfg)?;
            let numerator = part.norm(&evolved.sub(&reference)?, sp)?;
            let ratio = (denominator > 0.0).then(|| numerator / denominator);
            Ok(ContDepRow { level, denominator, numerator, ratio })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut checks = Vec::new();
    let monotone = rows.windows(2).all(|w| w[1].denominator <= w[0].denominator * (1.0 + 1e-12));
    checks.push(Check::new("denominator monotone", monotone, "‖S_N u₀ − u₀‖ non-increasing in N"));
    let ratios: Vec<(i32, f64)> = rows.iter().filter_map(|r| r.ratio.map(|q| (r.level, q))).collect();
    match ratios.first() {
        Some(&(level, base)) => {
            let worst = ratios.iter().map(|(_, q)| *q).fold(0.0, f64::max);
            checks.push(Check::new(
                "ratio bounded",
                worst <= 10.0 * base,
                format!("max ratio {worst:.4e} vs {base:.4e} at N = {level}, need <= 10x"),
            ));
        }
        None => checks.push(Check::new("ratio bounded", true, "every truncation is exact")),
    }
    let exact: Vec<&ContDepRow> = rows.iter().filter(|r| r.denominator == 0.0).collect();
    if !exact.is_empty() {
        let ok = exact.iter().all(|r| r.numerator == 0.0);
        checks.push(Check::new("identity truncation", ok, "S_N u₀ = u₀ implies identical solutions"));
    }
    Ok(ContDepReport {
        space: *sp,
        solver: cfg.clone(),
        points_per_axis: u0.grid().points_per_axis(),
        dim: u0.grid().dim(),
        rows,
        checks,
    })
}

impl Report for ContDepReport {
    fn name(&self) -> &'static str {
        "contdep"
    }

    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        Table {
            header: vec!["level", "denominator", "numerator", "ratio"],
            rows: self
                .rows
                .iter()
                .map(|r| vec![Some(r.level as f64), Some(r.denominator), Some(r.numerator), r.ratio])
                .collect(),
        }
    }
}
