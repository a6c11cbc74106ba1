use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bump::{counterexample_period, make_bump, BumpParams, BumpProfile};
use super::counterexample::{make_fn, make_gn, ring_frequency};
use super::{positive_log2_slope, Check, Report, Table};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::PeriodicGrid;
use crate::littlewood_paley::{DyadicPartition, SpaceParams};
use crate::ops::{lp_norm, spectral_derivative};

/// `(mean of |cos θ|^p over a period)^{1/p}` by midpoint quadrature.
pub fn cos_p_mean(p: f64) -> f64 {
    let m = 1 << 16;
    let h = std::f64::consts::TAU / m as f64;
    let mean = (0..m).map(|i| ((i as f64 + 0.5) * h).cos().abs().powf(p)).sum::<f64>() / m as f64;
    mean.powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RlConfig {
    pub dim: usize,
    pub n_min: i32,
    pub n_max: i32,
    pub s: f64,
    pub p: f64,
    /// Fixed resolution for every `n`; `None` picks the smallest grid per `n`.
    pub points_per_axis: Option<usize>,
}

impl RlConfig {
    pub fn new(dim: usize, s: f64, p: f64) -> Self {
        let (n_min, n_max) = if dim == 1 { (4, 8) } else { (4, 5) };
        Self { dim, n_min, n_max, s, p, points_per_axis: None }
    }

    fn validate(&self) -> Result<()> {
        if self.n_min < 4 || self.n_max < self.n_min {
            return Err(Error::param("need 4 <= n_min <= n_max for the single-block property"));
        }
        SpaceParams::triebel_lizorkin(self.s, self.p, 2.0)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RlRow {
    pub n: i32,
    pub points_per_axis: usize,
    /// `2^{ns}‖g_n ∂₁f_n‖_{L^p}`.
    pub value: f64,
    /// Triebel–Lizorkin seminorm of `g_n ∂₁f_n` through the general path.
    pub seminorm: f64,
    /// `|seminorm − value| / value`.
    pub shortcut_gap: f64,
    /// Spectral `ℓ²` mass of `g_n ∂₁f_n` outside `|ξ₁ ∓ (17/12)2ⁿ| <= 1`, relative.
    pub out_of_annulus: f64,
    /// `max_{j≠n} ‖Δ_j(g_n ∂₁f_n)‖_{L^p} / ‖g_n ∂₁f_n‖_{L^p}`.
    pub off_block: f64,
    /// `‖g_n ∂₁g_n‖_F + ‖f_n ∂₁g_n‖_F`.
    pub remainder: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RlReport {
    pub config: RlConfig,
    pub bump: BumpParams,
    pub rows: Vec<RlRow>,
    /// `(17/12)·c_p·‖φ²‖_{L^p}·‖φ‖_{L^{2p}}^{2(d−1)}` for the periodized bump.
    pub limit: f64,
    /// Value at the largest `n`.
    pub empirical_limit: f64,
    /// Relative change between the two largest `n`.
    pub last_change: Option<f64>,
    pub remainder_slope: Option<f64>,
    pub checks: Vec<Check>,
}

fn annulus_leak(h: &ScalarField, carrier: f64) -> f64 {
    let grid = h.grid();
    let unit = grid.frequency_unit();
    let (mut inside, mut outside) = (0.0, 0.0);
    for (flat, c) in h.coefficients().iter().enumerate() {
        let k = grid.wavevector(flat);
        let xi1 = (k[0] as f64 * unit).abs();
        let rest_ok = k[1..].iter().all(|&m| (m as f64 * unit).abs() <= 1.0);
        if (xi1 - carrier).abs() <= 1.0 + 1e-12 && rest_ok {
            inside += c.norm_sqr();
        } else {
            outside += c.norm_sqr();
        }
    }
    (outside / (inside + outside)).sqrt()
}

fn row(cfg: &RlConfig, n: i32) -> Result<(RlRow, BumpProfile)> {
    let period = counterexample_period(cfg.dim);
    let points = cfg.points_per_axis.unwrap_or_else(|| PeriodicGrid::points_for_block(n, period));
    let grid = PeriodicGrid::new(cfg.dim, points, period)?;
    let carrier = ring_frequency(n);
    if carrier + 1.0 >= grid.max_axis_frequency() {
        return Err(Error::UnderResolved(format!("product at block {n} exceeds the grid band")));
    }
    let bump = make_bump(&grid, cfg.dim)?;
    let part = DyadicPartition::new(&grid);
    let sp = SpaceParams::triebel_lizorkin(cfg.s, cfg.p, 2.0)?;
    let f = make_fn(n, &grid, cfg.s, &bump)?.into_components().swap_remove(0);
    let g = make_gn(n, &grid, &bump)?.into_components().swap_remove(0);
    let df = spectral_derivative(&f, 0)?;
    let dg = spectral_derivative(&g, 0)?;
    let h = g.mul(&df)?;
    let h_lp = lp_norm(&h, cfg.p)?;
    let value = 2f64.powf(n as f64 * cfg.s) * h_lp;
    let seminorm = part.tl_seminorm(&h, &sp)?;
    let off_block = part
        .block_norms(&h, cfg.p)?
        .into_iter()
        .filter(|(j, _)| *j != n)
        .fold(0.0, |m: f64, (_, v)| m.max(v / h_lp));
    let remainder = part.tl_norm(&g.mul(&dg)?, &sp)? + part.tl_norm(&f.mul(&dg)?, &sp)?;
    Ok((
        RlRow {
            n,
            points_per_axis: points,
            value,
            seminorm,
            shortcut_gap: (seminorm - value).abs() / value,
            out_of_annulus: annulus_leak(&h, carrier),
            off_block,
            remainder,
        },
        bump,
    ))
}

/// Limit of `2^{ns}‖g_n ∂₁f_n‖_{L^p}` predicted by high-frequency averaging,
/// evaluated for the periodized bump on `points` nodes per period.
fn averaged_limit(bump: &BumpProfile, p: f64, points: usize) -> Result<f64> {
    let phi = bump.profile_1d(points)?;
    let phi_sq = phi.mul(&phi)?;
    let d = bump.d() as i32;
    let tail = if d > 1 { lp_norm(&VectorField::from(phi), 2.0 * p)?.powi(2 * (d - 1)) } else { 1.0 };
    Ok(17.0 / 12.0 * cos_p_mean(p) * lp_norm(&phi_sq, p)? * tail)
}

/// Verifies the single-block structure of `g_n ∂₁f_n` and the convergence of
/// its weighted `Lᵖ` norm to the averaged limit.
pub fn rl_lower_bound(cfg: &RlConfig) -> Result<RlReport> {
    cfg.validate()?;
    let ns: Vec<i32> = (cfg.n_min..=cfg.n_max).collect();
    let results = ns.par_iter().map(|&n| row(cfg, n)).collect::<Result<Vec<_>>>()?;
    let bump = results.last().expect("non-empty range").1.clone();
    let rows: Vec<RlRow> = results.into_iter().map(|(r, _)| r).collect();
    let limit = averaged_limit(&bump, cfg.p, 1 << 12)?;
    let empirical_limit = rows.last().expect("non-empty range").value;
    let last_change = (rows.len() >= 2).then(|| {
        let (a, b) = (rows[rows.len() - 2].value, rows[rows.len() - 1].value);
        (b - a).abs() / b
    });
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let rem: Vec<f64> = rows.iter().map(|r| r.remainder).collect();
    let remainder_slope = positive_log2_slope(&xs, &rem);

    let worst = |f: fn(&RlRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let mut checks = vec![
        Check::new(
            "single-block shortcut",
            worst(|r| r.shortcut_gap) <= 1e-10,
            format!("max relative gap {:.3e}, need <= 1e-10", worst(|r| r.shortcut_gap)),
        ),
        Check::new(
            "annulus support",
            worst(|r| r.out_of_annulus) <= 1e-12,
            format!("max relative leak {:.3e}, need <= 1e-12", worst(|r| r.out_of_annulus)),
        ),
        Check::new(
            "off-block mass",
            worst(|r| r.off_block) <= 1e-12,
            format!("max relative off-block norm {:.3e}, need <= 1e-12", worst(|r| r.off_block)),
        ),
    ];
    if let Some(c) = last_change {
        checks.push(Check::new("converged", c <= 0.05, format!("last relative change {c:.4}, need <= 0.05")));
    }
    let limit_gap = (empirical_limit - limit).abs() / limit;
    checks.push(Check::new(
        "averaged limit",
        limit_gap <= 0.02,
        format!("empirical {empirical_limit:.6} vs averaged {limit:.6}, relative gap {limit_gap:.4}, need <= 0.02"),
    ));
    checks.push(match remainder_slope {
        Some(s) => Check::new("remainder decay", s <= -0.5, format!("log2 slope {s:.4}, need <= -0.5")),
        None => Check::new("remainder decay", false, "remainder not strictly positive"),
    });
    Ok(RlReport { config: cfg.clone(), bump: bump.params(), rows, limit, empirical_limit, last_change, remainder_slope, checks })
}

impl Report for RlReport {
    fn name(&self) -> &'static str {
        "rllimit"
    }

    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        Table {
            header: vec!["n", "value", "seminorm", "out_of_annulus", "off_block", "remainder", "limit"],
            rows: self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Some(r.n as f64),
                        Some(r.value),
                        Some(r.seminorm),
                        Some(r.out_of_annulus),
                        Some(r.off_block),
                        Some(r.remainder),
                        Some(self.limit),
                    ]
                })
                .collect(),
        }
    }
}
