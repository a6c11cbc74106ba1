//! Counterexample data and the numerical experiments built on the solver.
//!
//! Every experiment returns a serializable report that embeds the
//! configuration it was run with, a plot-ready table and a list of
//! pass/fail [`Check`]s.

mod bump;
mod contdep;
mod counterexample;
mod nonuniform;
mod picard;
mod prop31;
mod rl;

use serde::{Deserialize, Serialize};

pub use bump::{counterexample_period, make_bump, BumpParams, BumpProfile};
pub use contdep::{continuous_dependence_experiment, ContDepReport, ContDepRow};
pub use counterexample::{counterexample_grid, counterexample_pair, make_fn, make_gn, ring_frequency};
pub use nonuniform::{nonuniform_experiment, ExperimentReport, NonuniformConfig, NonuniformRow};
pub use picard::{picard_experiment, PicardConfig, PicardReport};
pub use prop31::{halving_times, prop31_check, Prop31Report, Prop31Row};
pub use rl::{cos_p_mean, rl_lower_bound, RlConfig, RlReport, RlRow};

/// Outcome of one quantitative criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Column-oriented numeric table for CSV output. Missing values are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Common surface of experiment reports.
pub trait Report: Serialize {
    fn name(&self) -> &'static str;
    fn checks(&self) -> &[Check];
    fn table(&self) -> Table;

    fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }
}

/// Slope of `log₂ y` over `x`, or `None` if any `y` is not strictly positive.
fn positive_log2_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    (x.len() >= 2 && y.iter().all(|v| *v > 0.0 && v.is_finite())).then(|| crate::stats::log2_slope(x, y))
}

/// Slope of `log y` over `log x`, or `None` if any value is not strictly positive.
fn positive_loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    (x.len() >= 2 && y.iter().all(|v| *v > 0.0 && v.is_finite())).then(|| crate::stats::loglog_slope(x, y))
}
