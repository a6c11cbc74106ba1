use std::path::Path;

use ep_core::evolution::{self, DiagnosticRow};
use ep_core::experiments::{
    self, counterexample_grid, counterexample_period, make_bump, make_fn, make_gn, NonuniformConfig,
    PicardConfig, Report, RlConfig,
};
use ep_core::init::{lacunary, smooth_random};
use ep_core::ops::lp_norm;
use ep_core::{
    BlowupGuard, DiagnosticNorms, DyadicPartition, PeriodicGrid, SolverConfig, SpaceKind, SpaceParams,
    VectorField,
};

use crate::config::{parse_levels, Config};
use crate::field_io::{read_field, write_field};
use crate::output::{format_number, write_atomic, write_json, write_table};
use crate::{CliError, ExperimentName};

/// Block norms below this fraction of the largest are printed as zero.
pub const SPECTRUM_FLOOR: f64 = 1e-12;

/// Per-command defaults for the initial datum.
struct InitDefaults {
    init: &'static str,
    nx: usize,
    amplitude: f64,
    width: f64,
    seed: u64,
}

fn solver_from(cfg: &mut Config, base: SolverConfig) -> Result<SolverConfig, CliError> {
    let blowup = match cfg.get_opt::<f64>("blowup_abs")? {
        Some(v) => BlowupGuard::Absolute(v),
        None => {
            let d = match base.blowup {
                BlowupGuard::RelativeToInitial(f) => f,
                BlowupGuard::Absolute(_) => 10.0,
            };
            BlowupGuard::RelativeToInitial(cfg.get("blowup_factor", d)?)
        }
    };
    Ok(SolverConfig {
        dt: cfg.get("dt", base.dt)?,
        t_final: cfg.get("tfinal", base.t_final)?,
        blowup,
        dealias_fraction: cfg.get("dealias", base.dealias_fraction)?,
        cfl_safety: cfg.get("cfl_safety", base.cfl_safety)?,
        diagnostics: base.diagnostics,
        record_every: cfg.get("record_every", base.record_every)?,
    })
}

fn regularity(cfg: &mut Config) -> Result<(f64, f64, f64), CliError> {
    Ok((cfg.get("s", 2.0)?, cfg.get("p", 2.0)?, cfg.get("r", 2.0)?))
}

/// Largest block whose lacunary frequency stays inside the dealiased band.
fn top_lacunary_block(grid: &PeriodicGrid) -> i32 {
    let band = grid.points_per_axis() as f64 / 3.0 * grid.frequency_unit();
    (0..).take_while(|j| 17.0 / 12.0 * 2f64.powi(*j) <= band).last().unwrap_or(0)
}

fn builtin_grid(cfg: &mut Config, d: usize, nx: usize) -> Result<PeriodicGrid, CliError> {
    let nx = cfg.get("nx", nx)?;
    let period = cfg.get("period", ep_core::DEFAULT_PERIOD)?;
    Ok(PeriodicGrid::new(d, nx, period)?)
}

/// An explicit `key` must agree with the value fixed by `source`.
fn require_match<T>(cfg: &mut Config, key: &str, actual: T, source: &str) -> Result<(), CliError>
where
    T: std::str::FromStr + std::fmt::Display + PartialEq,
    T::Err: std::fmt::Display,
{
    match cfg.get_opt::<T>(key)? {
        Some(v) if v != actual => Err(CliError::Config(format!("{key} = {v} conflicts with {source} ({actual})"))),
        _ => Ok(()),
    }
}

fn initial_field(cfg: &mut Config, defaults: &InitDefaults, s: f64) -> Result<VectorField, CliError> {
    let init = cfg.get_string("init", defaults.init);
    let counterexample = |prefix: &str| init.strip_prefix(prefix).and_then(|n| n.parse::<i32>().ok());
    match init.as_str() {
        "zero" => {
            let d = cfg.get("d", 1usize)?;
            Ok(VectorField::zeros(&builtin_grid(cfg, d, defaults.nx)?))
        }
        "smooth" => {
            let d = cfg.get("d", 1usize)?;
            let grid = builtin_grid(cfg, d, defaults.nx)?;
            let amplitude = cfg.get("amplitude", defaults.amplitude)?;
            let width = cfg.get("width", defaults.width)?;
            let seed = cfg.get("seed", defaults.seed)?;
            Ok(smooth_random(&grid, amplitude, width, seed)?)
        }
        "lacunary" => {
            let d = cfg.get("d", 1usize)?;
            let grid = builtin_grid(cfg, d, defaults.nx)?;
            let amplitude = cfg.get("amplitude", defaults.amplitude)?;
            let seed = cfg.get("seed", defaults.seed)?;
            let top = cfg.get("top_block", top_lacunary_block(&grid))?;
            Ok(lacunary(&grid, s, amplitude, 0..=top, seed)?)
        }
        _ if counterexample("fn").is_some() || counterexample("gn").is_some() => {
            let is_f = init.starts_with("fn");
            let n = counterexample(if is_f { "fn" } else { "gn" }).unwrap();
            let d = cfg.get("d", 1usize)?;
            let grid = match cfg.get_opt::<usize>("nx")? {
                Some(nx) => PeriodicGrid::new(d, nx, counterexample_period(d))?,
                None => counterexample_grid(d, n)?,
            };
            require_match(cfg, "period", grid.period(), &init)?;
            cfg.note("nx", grid.points_per_axis());
            cfg.note("period", grid.period());
            let bump = make_bump(&grid, d)?;
            Ok(if is_f { make_fn(n, &grid, s, &bump)? } else { make_gn(n, &grid, &bump)? })
        }
        path => {
            let u = read_field(Path::new(path))?;
            let g = u.grid();
            require_match(cfg, "d", g.dim(), path)?;
            require_match(cfg, "nx", g.points_per_axis(), path)?;
            require_match(cfg, "period", g.period(), path)?;
            if u.len() != g.dim() {
                return Err(CliError::Config(format!("{path} is not a velocity field")));
            }
            cfg.note("d", g.dim());
            cfg.note("nx", g.points_per_axis());
            cfg.note("period", g.period());
            Ok(u)
        }
    }
}

fn trajectory_table(rows: &[DiagnosticRow]) -> experiments::Table {
    experiments::Table {
        header: vec!["t", "tl_norm", "besov_low_norm", "grad_linf", "energy"],
        rows: rows
            .iter()
            .map(|r| vec![Some(r.t), r.tl_norm, r.besov_low_norm, Some(r.grad_linf), Some(r.energy)])
            .collect(),
    }
}

pub fn simulate(cfg: &mut Config, out: &Path, outputs: &mut Vec<String>) -> Result<(), CliError> {
    let (s, p, r) = regularity(cfg)?;
    let defaults = InitDefaults { init: "smooth", nx: 256, amplitude: 0.1, width: 1.0, seed: 0 };
    let u0 = initial_field(cfg, &defaults, s)?;
    let mut solver = solver_from(cfg, SolverConfig::default())?;
    solver.diagnostics = Some(DiagnosticNorms { s, p, r });
    cfg.finish()?;
    solver.validate()?;
    DiagnosticNorms { s, p, r }.tl()?;

    write_field(&out.join("initial.field"), &u0).map_err(anyhow::Error::from)?;
    outputs.push("initial.field".into());
    let (traj, failure) = match evolution::solve(&u0, &solver) {
        Ok(t) => (t, None),
        Err(ep_core::Error::BlowupDetected { time, grad_linf, threshold, partial }) => {
            let msg = format!("blow-up at t = {time:.6e}: |grad u|_inf = {grad_linf:.6e} > {threshold:.6e}");
            (*partial, Some(CliError::Blowup(msg)))
        }
        Err(e) => return Err(e.into()),
    };
    write_table(&out.join("trajectory.csv"), &trajectory_table(&traj.diagnostics))?;
    write_field(&out.join("final.field"), traj.final_state()).map_err(anyhow::Error::from)?;
    outputs.extend(["trajectory.csv".to_string(), "final.field".to_string()]);
    if let Some(last) = traj.diagnostics.last() {
        println!(
            "t = {}  F-norm = {}  grad_linf = {}  energy = {}",
            format_number(last.t),
            last.tl_norm.map(format_number).unwrap_or_default(),
            format_number(last.grad_linf),
            format_number(last.energy)
        );
    }
    failure.map_or(Ok(()), Err)
}

pub struct NormsRequest<'a> {
    pub input: &'a Path,
    pub s: f64,
    pub p: f64,
    pub index: f64,
    pub kind: SpaceKind,
}

/// Norm summary and per-block spectrum as printable text.
pub fn norms_report(req: &NormsRequest) -> Result<String, CliError> {
    let u = read_field(req.input)?;
    let sp = SpaceParams::new(req.s, req.p, req.index, req.kind)?;
    let part = DyadicPartition::new(u.grid());
    let g = u.grid();
    let mut text = format!(
        "# dim = {}, points_per_axis = {}, period = {}, components = {}\n",
        g.dim(),
        g.points_per_axis(),
        g.period(),
        u.len()
    );
    let label = match req.kind {
        SpaceKind::Besov => "besov",
        SpaceKind::TriebelLizorkin => "triebel_lizorkin",
    };
    text += &format!("lp_norm = {}\n", format_number(lp_norm(&u, req.p)?));
    text += &format!("{label}_norm = {}\n", format_number(part.norm(&u, &sp)?));
    let rows = part.spectrum(&u, &sp)?;
    let top = rows.iter().map(|r| r.block_lp).fold(0.0, f64::max);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["j", "block_lp", "weighted"]).map_err(anyhow::Error::from)?;
    for row in rows {
        let (b, wt) = if row.block_lp <= SPECTRUM_FLOOR * top { (0.0, 0.0) } else { (row.block_lp, row.weighted) };
        w.write_record([row.j.to_string(), format_number(b), format_number(wt)]).map_err(anyhow::Error::from)?;
    }
    text += &String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?).map_err(anyhow::Error::from)?;
    Ok(text)
}

fn finish_report<R: Report>(report: &R, out: &Path, outputs: &mut Vec<String>) -> Result<(), CliError> {
    write_json(&out.join("report.json"), report)?;
    write_table(&out.join("report.csv"), &report.table())?;
    outputs.extend(["report.json".to_string(), "report.csv".to_string()]);
    for c in report.checks() {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{}: {}", report.name(), if report.passed() { "all checks passed" } else { "some checks failed" });
    Ok(())
}

pub fn experiment(
    name: ExperimentName,
    cfg: &mut Config,
    out: &Path,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    match name {
        ExperimentName::Nonuniform => {
            let d = cfg.get("d", 1usize)?;
            let base = NonuniformConfig::new(d);
            let ec = NonuniformConfig {
                dim: d,
                n_min: cfg.get("n_min", base.n_min)?,
                n_max: cfg.get("n_max", base.n_max)?,
                s: cfg.get("s", base.s)?,
                p: cfg.get("p", base.p)?,
                r: cfg.get("r", base.r)?,
                t_probe: cfg.get_opt("t_probe")?,
                t_start: cfg.get("t_start", base.t_start)?,
                max_halvings: cfg.get("max_halvings", base.max_halvings)?,
                remainder_fraction: cfg.get("remainder_fraction", base.remainder_fraction)?,
                points_per_axis: cfg.get_opt("nx")?,
                solver: solver_from(cfg, base.solver)?,
            };
            cfg.finish()?;
            finish_report(&experiments::nonuniform_experiment(&ec)?, out, outputs)
        }
        ExperimentName::Prop31 => {
            let (s, p, r) = regularity(cfg)?;
            let defaults = InitDefaults { init: "smooth", nx: 256, amplitude: 0.1, width: 1.0, seed: 7 };
            let u0 = initial_field(cfg, &defaults, s)?;
            let t0 = cfg.get("t0", 0.5)?;
            let count = cfg.get("count", 5usize)?;
            let solver = solver_from(cfg, SolverConfig { dt: 1e-3, ..Default::default() })?;
            cfg.finish()?;
            let sp = SpaceParams::triebel_lizorkin(s, p, r)?;
            let part = DyadicPartition::new(u0.grid());
            let times = experiments::halving_times(t0, count);
            finish_report(&experiments::prop31_check(&u0, &times, &sp, &part, &solver)?, out, outputs)
        }
        ExperimentName::Picard => {
            let (s, p, r) = regularity(cfg)?;
            let defaults = InitDefaults { init: "lacunary", nx: 1 << 14, amplitude: 0.02, width: 1.0, seed: 3 };
            let u0 = initial_field(cfg, &defaults, s)?;
            let base = PicardConfig::default();
            let pc = PicardConfig {
                s,
                p,
                r,
                n_iters: cfg.get("n_iters", base.n_iters)?,
                fit_min: cfg.get("fit_min", base.fit_min)?,
                fit_max: cfg.get("fit_max", base.fit_max)?,
                compare: cfg.get("compare", base.compare)?,
            };
            let solver =
                solver_from(cfg, SolverConfig { dt: 1e-2, t_final: 0.5, record_every: 10, ..Default::default() })?;
            cfg.finish()?;
            let part = DyadicPartition::new(u0.grid());
            finish_report(&experiments::picard_experiment(&u0, &pc, &solver, &part)?, out, outputs)
        }
        ExperimentName::Contdep => {
            let (s, p, r) = regularity(cfg)?;
            let defaults = InitDefaults { init: "smooth", nx: 2048, amplitude: 0.5, width: 8.0, seed: 11 };
            let u0 = initial_field(cfg, &defaults, s)?;
            let part = DyadicPartition::new(u0.grid());
            let default_levels = format!("-1..{}", part.j_max() + 1);
            let levels = parse_levels(&cfg.get_string("levels", &default_levels))?;
            let solver = solver_from(cfg, SolverConfig::default())?;
            cfg.finish()?;
            let sp = SpaceParams::triebel_lizorkin(s, p, r)?;
            let report = experiments::continuous_dependence_experiment(&u0, &levels, &sp, &part, &solver)?;
            finish_report(&report, out, outputs)
        }
        ExperimentName::Rllimit => {
            let d = cfg.get("d", 1usize)?;
            let (s, p) = (cfg.get("s", 2.0)?, cfg.get("p", 2.0)?);
            let base = RlConfig::new(d, s, p);
            let rc = RlConfig {
                n_min: cfg.get("n_min", base.n_min)?,
                n_max: cfg.get("n_max", base.n_max)?,
                points_per_axis: cfg.get_opt("nx")?,
                ..base
            };
            cfg.finish()?;
            finish_report(&experiments::rl_lower_bound(&rc)?, out, outputs)
        }
    }
}

pub fn write_resolved(cfg: &Config, out: &Path, outputs: &mut Vec<String>) -> Result<(), CliError> {
    write_atomic(&out.join("resolved.conf"), cfg.render_resolved().as_bytes()).map_err(anyhow::Error::from)?;
    outputs.push("resolved.conf".into());
    Ok(())
}
