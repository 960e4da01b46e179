//! CFL step control and second-order SSP Runge-Kutta (Heun) stepping.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::grid::Grid2D;
use crate::physics::{DryTolerance, NCOMP};
use crate::scheme::{PccuOperator, Rhs, WaveSpeeds};
use crate::state::FlowState;

/// Anything that can produce `dW/dt` for a [`FlowState`]. The operator may
/// fill ghost cells of its argument.
pub trait SemiDiscrete {
    fn evaluate(&mut self, state: &mut FlowState, out: &mut Rhs) -> Result<WaveSpeeds>;
}

impl SemiDiscrete for PccuOperator {
    fn evaluate(&mut self, state: &mut FlowState, out: &mut Rhs) -> Result<WaveSpeeds> {
        self.assemble_rhs(state, out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub cfl: f64,
    pub t: f64,
    pub t_end: f64,
    pub dt_last: f64,
    pub max_steps: usize,
    /// Step used when every local speed vanishes.
    pub dt_max: f64,
    /// Overrides the CFL step (temporal convergence studies).
    pub fixed_dt: Option<f64>,
}

impl StepControl {
    pub fn new(cfl: f64, t_end: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(SolverError::config(
                "cfl",
                format!("{cfl} is outside (0, 1]"),
            ));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(SolverError::config(
                "t_end",
                format!("{t_end} must be finite and non-negative"),
            ));
        }
        Ok(StepControl {
            cfl,
            t: 0.0,
            t_end,
            dt_last: 0.0,
            max_steps: 10_000_000,
            dt_max: 1e-2,
            fixed_dt: None,
        })
    }
}

/// `cfl * min(dx / (4a), dy / (4b))`, clipped so that `t + dt <= t_stop`.
pub fn compute_dt(speeds: &WaveSpeeds, grid: &Grid2D, control: &StepControl, t_stop: f64) -> f64 {
    let remaining = t_stop - control.t;
    let mut dt = match control.fixed_dt {
        Some(dt) => dt,
        None => {
            let mut limit = f64::INFINITY;
            if speeds.ax > 0.0 {
                limit = limit.min(grid.dx / (4.0 * speeds.ax));
            }
            if speeds.by > 0.0 {
                limit = limit.min(grid.dy / (4.0 * speeds.by));
            }
            if limit.is_finite() {
                control.cfl * limit
            } else {
                control.dt_max
            }
        }
    };
    if dt >= remaining {
        dt = remaining;
    }
    dt
}

/// Scratch space reused across steps.
#[derive(Clone, Debug)]
pub struct Stepper {
    k1: Rhs,
    k2: Rhs,
    stage: FlowState,
    /// Speeds of the last evaluation at the start of a step.
    pub speeds: Option<WaveSpeeds>,
    /// Smallest cell depth seen after any stage, before flooring.
    pub min_h: f64,
}

impl Stepper {
    pub fn new(grid: &Grid2D) -> Self {
        Stepper {
            k1: Rhs::zeros(grid.nx, grid.ny),
            k2: Rhs::zeros(grid.nx, grid.ny),
            stage: FlowState::zeros(grid),
            speeds: None,
            min_h: f64::INFINITY,
        }
    }

    /// Evaluates `L(W^n)` and returns the local speeds used to pick `dt`.
    pub fn prepare(
        &mut self,
        state: &mut FlowState,
        op: &mut impl SemiDiscrete,
    ) -> Result<WaveSpeeds> {
        let s = op.evaluate(state, &mut self.k1)?;
        self.speeds = Some(s);
        Ok(s)
    }

    /// Completes one Heun step from `L(W^n)` computed by [`Stepper::prepare`].
    pub fn finish(
        &mut self,
        state: &mut FlowState,
        dt: f64,
        dry: DryTolerance,
        op: &mut impl SemiDiscrete,
    ) -> Result<()> {
        if self.speeds.take().is_none() {
            return Err(SolverError::Contract(
                "finish called without prepare".into(),
            ));
        }
        self.stage.clone_from(state);
        euler_update(&mut self.stage, &self.k1, dt);
        self.min_h = self.min_h.min(enforce_admissible(&mut self.stage, dry));
        check_finite(&self.stage, "stage 1")?;

        op.evaluate(&mut self.stage, &mut self.k2)?;
        euler_update(&mut self.stage, &self.k2, dt);
        average_into(state, &self.stage);
        self.min_h = self.min_h.min(enforce_admissible(state, dry));
        check_finite(state, "stage 2")?;
        Ok(())
    }
}

/// One SSP-RK2 step of size `dt`.
pub fn ssp_rk2_step(
    state: &mut FlowState,
    dt: f64,
    dry: DryTolerance,
    op: &mut impl SemiDiscrete,
    stepper: &mut Stepper,
) -> Result<()> {
    stepper.prepare(state, op)?;
    stepper.finish(state, dt, dry, op)
}

fn euler_update(state: &mut FlowState, rhs: &Rhs, dt: f64) {
    let grid = *state.grid();
    for (m, field) in state.fields_mut().into_iter().enumerate() {
        for k in 0..grid.ny {
            for i in 0..grid.nx {
                field[(i as isize, k as isize)] += dt * rhs.get(i, k)[m];
            }
        }
    }
}

/// `state = (state + other) / 2` over the interior.
fn average_into(state: &mut FlowState, other: &FlowState) {
    let grid = *state.grid();
    for (dst, src) in state.fields_mut().into_iter().zip(other.fields()) {
        for k in 0..grid.ny as isize {
            for i in 0..grid.nx as isize {
                dst[(i, k)] = 0.5 * dst[(i, k)] + 0.5 * src[(i, k)];
            }
        }
    }
}

/// Floors the depth at zero, zeros momenta and `hC` in dry cells and clamps
/// `hC` into `[0, h]`. Returns the smallest depth before flooring.
pub fn enforce_admissible(state: &mut FlowState, dry: DryTolerance) -> f64 {
    let grid = *state.grid();
    let mut min_h = f64::INFINITY;
    for k in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            let mut w = state.get(i, k);
            min_h = min_h.min(w.h);
            if w.h < 0.0 {
                w.h = 0.0;
            }
            if w.h <= dry.h_cut {
                w.hu = 0.0;
                w.hv = 0.0;
                w.hc = 0.0;
            } else {
                if w.h < dry.h_reg {
                    let pr = w.regularized(dry);
                    w.hu = w.h * pr.u;
                    w.hv = w.h * pr.v;
                }
                w.hc = w.hc.clamp(0.0, w.h);
            }
            state.set(i, k, w);
        }
    }
    min_h
}

pub fn check_finite(state: &FlowState, stage: &str) -> Result<()> {
    let grid = state.grid();
    for k in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            let w = state.get(i, k).to_array();
            if let Some(m) = (0..NCOMP).find(|&m| !w[m].is_finite()) {
                return Err(SolverError::Numerical {
                    stage: stage.to_string(),
                    i,
                    k,
                    detail: format!("component {m} is {}", w[m]),
                });
            }
        }
    }
    Ok(())
}

/// One line of the step log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub max_speed: f64,
    pub min_h: f64,
}

/// Called after every completed step.
pub trait Observer {
    fn after_step(&mut self, state: &FlowState, record: &StepRecord) -> Result<()>;
}

impl<F: FnMut(&FlowState, &StepRecord) -> Result<()>> Observer for F {
    fn after_step(&mut self, state: &FlowState, record: &StepRecord) -> Result<()> {
        self(state, record)
    }
}

/// Advances to `control.t_end`, landing exactly on every time in `stops`
/// (sorted, within `(t, t_end]`) and calling `at_stop` there.
pub fn advance_to(
    state: &mut FlowState,
    control: &mut StepControl,
    op: &mut impl SemiDiscrete,
    dry: DryTolerance,
    stops: &[f64],
    observer: &mut impl Observer,
    mut at_stop: impl FnMut(&FlowState, f64) -> Result<()>,
) -> Result<Vec<StepRecord>> {
    let grid = *state.grid();
    let mut stepper = Stepper::new(&grid);
    let mut log = Vec::new();
    let t0 = control.t;
    let mut pending = stops.iter().copied().filter(|&s| s > t0).peekable();
    while control.t < control.t_end {
        if log.len() >= control.max_steps {
            return Err(SolverError::StepLimit {
                max_steps: control.max_steps,
                t: control.t,
            });
        }
        let speeds = stepper.prepare(state, op)?;
        let t_stop = pending
            .peek()
            .copied()
            .unwrap_or(control.t_end)
            .min(control.t_end);
        let dt = compute_dt(&speeds, &grid, control, t_stop);
        if !(dt > 0.0) {
            return Err(SolverError::Numerical {
                stage: "step control".into(),
                i: -1,
                k: -1,
                detail: format!("non-positive time step {dt} at t = {}", control.t),
            });
        }
        stepper.min_h = f64::INFINITY;
        stepper.finish(state, dt, dry, op)?;
        control.t = if dt == t_stop - control.t {
            t_stop
        } else {
            control.t + dt
        };
        control.dt_last = dt;
        let record = StepRecord {
            step: log.len() + 1,
            t: control.t,
            dt,
            max_speed: speeds.ax.max(speeds.by),
            min_h: stepper.min_h,
        };
        observer.after_step(state, &record)?;
        log.push(record);
        while let Some(&s) = pending.peek() {
            if s <= control.t {
                at_stop(state, s)?;
                pending.next();
            } else {
                break;
            }
        }
    }
    Ok(log)
}
