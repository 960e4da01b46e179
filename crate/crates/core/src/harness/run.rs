//! Orchestration: running cases, convergence studies and data comparison.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::error::{Result, SolverError};
use crate::harness::cases::init_case;
use crate::harness::config::{CaseConfig, CaseKind};
use crate::harness::norms::{l1_diff, rate_from, restrict, GridField};
use crate::harness::snapshot::{
    read_snapshot, snapshot_name, write_meta, write_snapshot, SnapshotMeta,
};
use crate::physics::{eigenvalues, PhysParams};
use crate::scheme::PccuOperator;
use crate::state::FlowState;
use crate::timeint::{advance_to, StepControl, StepRecord};

#[derive(Clone, Debug)]
pub struct RunReport {
    pub label: String,
    pub final_state: FlowState,
    pub t: f64,
    pub steps: usize,
    /// Smallest cell depth after any stage, before flooring.
    pub min_h: f64,
    /// `(t, energy)` at the start and after every step.
    pub energy: Vec<(f64, f64)>,
    /// Cell-steps at which the resonance flag was raised in x or y.
    pub resonance_count: usize,
    pub wall_time: Duration,
    /// Snapshot times with the written file, if any.
    pub snapshots: Vec<(f64, Option<PathBuf>)>,
    pub step_log: Vec<StepRecord>,
}

fn count_resonant(state: &FlowState, params: &PhysParams) -> usize {
    let g = state.grid();
    let mut n = 0;
    for k in 0..g.ny as isize {
        for i in 0..g.nx as isize {
            let w = state.get(i, k);
            if w.h <= params.h_cut {
                continue;
            }
            let flagged = [[1.0, 0.0], [0.0, 1.0]].into_iter().any(|nu| {
                eigenvalues(&w, nu, params)
                    .map(|e| e.resonant)
                    .unwrap_or(false)
            });
            n += flagged as usize;
        }
    }
    n
}

/// Runs one configuration, writing snapshots into `out_dir` when given.
pub fn run_single(cfg: &CaseConfig, out_dir: Option<&Path>) -> Result<RunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut state = init_case(cfg)?;
    let params = cfg.params;
    let mut op = PccuOperator::new(params, cfg.scheme, cfg.boundary);
    let mut control = StepControl::new(cfg.cfl, cfg.t_end)?;
    control.max_steps = cfg.max_steps;

    let mut stops = cfg.snapshots.clone();
    if stops.last().is_none_or(|&t| t < cfg.t_end) && cfg.t_end > 0.0 {
        stops.push(cfg.t_end);
    }

    let mut energy = vec![(0.0, state.energy(&params))];
    let mut resonance_count = 0;
    let mut min_h = state.h.interior_min();
    let mut captured: Vec<(f64, FlowState)> = Vec::new();
    let mut observer = |s: &FlowState, r: &StepRecord| -> Result<()> {
        energy.push((r.t, s.energy(&params)));
        resonance_count += count_resonant(s, &params);
        min_h = min_h.min(r.min_h);
        Ok(())
    };
    let log = advance_to(
        &mut state,
        &mut control,
        &mut op,
        params.dry(),
        &stops,
        &mut observer,
        |s, t| {
            captured.push((t, s.clone()));
            Ok(())
        },
    )?;
    if cfg.t_end == 0.0 {
        captured.push((0.0, state.clone()));
    }

    let mut snapshots = Vec::new();
    for (t, s) in &captured {
        let path = match out_dir {
            Some(dir) => {
                let path = dir.join(snapshot_name(cfg.case.name(), *t));
                write_snapshot(s, &path)?;
                let upto: Vec<StepRecord> = log.iter().copied().filter(|r| r.t <= *t).collect();
                let meta = SnapshotMeta {
                    time: *t,
                    steps: upto.len(),
                    min_h: upto.iter().map(|r| r.min_h).fold(f64::INFINITY, f64::min),
                    energy: s.energy(&params),
                    config: cfg.clone(),
                    step_log: upto,
                };
                write_meta(&meta, &path)?;
                Some(path)
            }
            None => None,
        };
        snapshots.push((*t, path));
    }

    Ok(RunReport {
        label: cfg.case.name().to_string(),
        final_state: state,
        t: control.t,
        steps: log.len(),
        min_h,
        energy,
        resonance_count,
        wall_time: start.elapsed(),
        snapshots,
        step_log: log,
    })
}

/// Runs a case; multigrain expands into one run per grain diameter, each in
/// its own subdirectory.
pub fn run_case(cfg: &CaseConfig) -> Result<Vec<RunReport>> {
    cfg.validate()?;
    let out = cfg.output_dir.as_deref();
    if cfg.case != CaseKind::Multigrain {
        return Ok(vec![run_single(cfg, out)?]);
    }
    let mut reports = Vec::new();
    for &d in &cfg.options.d50_sweep {
        let mut sub = cfg.clone();
        sub.params.d50 = d;
        sub.options.d50_sweep = vec![d];
        let label = format!("d50_{d}");
        let dir = out.map(|o| o.join(&label));
        sub.output_dir = dir.clone();
        let mut r = run_single(&sub, dir.as_deref())?;
        r.label = label;
        reports.push(r);
    }
    Ok(reports)
}

/// Interior values of a named field: `h`, `hu`, `hv`, `hC`, `zb` or `eta`.
pub fn extract_field(state: &FlowState, name: &str) -> Result<GridField> {
    let g = state.grid();
    let values = match name {
        "h" => state.h.interior_vec(),
        "hu" => state.hu.interior_vec(),
        "hv" => state.hv.interior_vec(),
        "hC" | "hc" => state.hc.interior_vec(),
        "zb" | "Zb" => state.zb.interior_vec(),
        "eta" => state.eta_interior(),
        _ => {
            return Err(SolverError::config(
                "field",
                format!("unknown field `{name}`, expected h, hu, hv, hC, zb or eta"),
            ))
        }
    };
    GridField::new(g.nx, g.ny, values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// L1 difference to the next coarser solution, restricted.
    pub diff: Option<f64>,
    pub rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub field: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn last_rate(&self) -> Option<f64> {
        self.rows.iter().rev().find_map(|r| r.rate)
    }
}

/// Self-convergence study over `n_list` (each entry twice the previous).
/// Returns one table per field.
pub fn converge(
    cfg: &CaseConfig,
    n_list: &[usize],
    fields: &[&str],
) -> Result<Vec<ConvergenceTable>> {
    if n_list.len() < 2 || n_list.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(SolverError::config(
            "n-list",
            "needs at least two resolutions, each doubling the previous",
        ));
    }
    for f in fields {
        // reject unknown names before running anything
        extract_field(&FlowState::zeros(&cfg.grid()?), f)?;
    }
    let mut finals = Vec::new();
    for &n in n_list {
        let mut c = cfg.clone();
        c.nx = n;
        c.ny = if cfg.case.is_1d() { 1 } else { n };
        c.snapshots.clear();
        if cfg.case == CaseKind::Multigrain {
            c.params.d50 = cfg
                .options
                .d50_sweep
                .first()
                .copied()
                .unwrap_or(c.params.d50);
        }
        let r = run_single(&c, None)?;
        finals.push(r.final_state);
    }
    let mut tables = Vec::new();
    for f in fields {
        let sols: Vec<GridField> = finals
            .iter()
            .map(|s| extract_field(s, f))
            .collect::<Result<_>>()?;
        let mut rows = vec![ConvergenceRow {
            n: n_list[0],
            diff: None,
            rate: None,
        }];
        for j in 1..sols.len() {
            let diff = l1_diff(&restrict(&sols[j])?, &sols[j - 1])?;
            let rate = rows[j - 1].diff.map(|prev| rate_from(prev, diff));
            rows.push(ConvergenceRow {
                n: n_list[j],
                diff: Some(diff),
                rate,
            });
        }
        tables.push(ConvergenceTable {
            field: f.to_string(),
            rows,
        });
    }
    Ok(tables)
}

/// Reads a two-column `x value` file; commas or whitespace separate columns
/// and `#` starts a comment.
pub fn read_profile(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| SolverError::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse().ok()).collect();
        match parsed.as_deref() {
            Some([x, v]) => out.push((*x, *v)),
            // a non-numeric first line is a header
            None if out.is_empty() && n == 0 => continue,
            _ => {
                return Err(SolverError::config(
                    "data",
                    format!("{}:{}: expected two numeric columns", path.display(), n + 1),
                ))
            }
        }
    }
    if out.is_empty() {
        return Err(SolverError::config(
            "data",
            format!("{} has no data rows", path.display()),
        ));
    }
    Ok(out)
}

/// Piecewise-linear interpolation, constant beyond the ends. `xs` increasing.
pub fn interpolate(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return vs[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return vs[last];
    }
    let j = xs.partition_point(|&p| p <= x);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let s = (x - x0) / (x1 - x0);
    vs[j - 1] + s * (vs[j] - vs[j - 1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub field: String,
    /// `(x, measured, simulated)`.
    pub points: Vec<(f64, f64, f64)>,
    /// Mean absolute misfit.
    pub misfit: f64,
}

/// Compares the middle row of a snapshot with a measured profile.
pub fn compare(snapshot: &Path, data: &Path, field: &str) -> Result<Comparison> {
    let snap = read_snapshot(snapshot)?;
    let rows = snap.rows();
    let row = rows
        .get(rows.len() / 2)
        .ok_or_else(|| SolverError::config("snapshot", "no records"))?;
    let xs: Vec<f64> = row.iter().map(|r| r.x).collect();
    let vs: Vec<f64> = row
        .iter()
        .map(|r| r.field(field))
        .collect::<Option<_>>()
        .ok_or_else(|| SolverError::config("field", format!("snapshot has no column `{field}`")))?;
    let measured = read_profile(data)?;
    let points: Vec<(f64, f64, f64)> = measured
        .iter()
        .map(|&(x, m)| (x, m, interpolate(&xs, &vs, x)))
        .collect();
    let misfit = points.iter().map(|(_, m, s)| (m - s).abs()).sum::<f64>() / points.len() as f64;
    Ok(Comparison {
        field: field.to_string(),
        points,
        misfit,
    })
}
