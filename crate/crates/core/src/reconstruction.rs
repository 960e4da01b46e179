//! Piecewise-linear AENO reconstruction and the positivity-preserving
//! hydrostatic correction of interface states.
//!
//! The reconstructed variables are `(eta, hu, hv, hC, Zb)` with `eta = h + Zb`;
//! the interface depth is recovered as `eta - Zb`. Reconstructing the free
//! surface keeps a flat `eta` flat at every edge, which is what makes the
//! lake-at-rest state exactly reproducible.

use serde::{Deserialize, Serialize};

use crate::physics::{Axis, ConservedState, DryTolerance, Vec5, NCOMP};
use crate::state::FlowState;

/// Parameters of the AENO weight `beta = r / sqrt(l^2 + r^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AenoParams {
    pub l: f64,
    pub eps: f64,
}

impl Default for AenoParams {
    fn default() -> Self {
        AenoParams { l: 1.0, eps: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reconstruction {
    /// Piecewise constant; the scheme drops to first order.
    FirstOrder,
    #[default]
    Aeno,
}

/// AENO blending weight, in `[0, 1)`.
#[inline]
pub fn aeno_beta(delta_minus: f64, delta_plus: f64, params: &AenoParams) -> f64 {
    let (m, d) = (delta_minus.abs(), delta_plus.abs() + params.eps);
    if m < 1e150 && d < 1e150 {
        // r / sqrt(l^2 + r^2) with r = m / d, cleared of the inner division
        let beta = m / (params.l * params.l * d * d + m * m).sqrt();
        return beta.min(1.0f64.next_down());
    }
    let r = m / d;
    // r^2 overflows long before beta stops rounding to one
    if r > 1e150 {
        return 1.0f64.next_down();
    }
    let beta = r / (params.l * params.l + r * r).sqrt();
    beta.min(1.0f64.next_down())
}

/// Convex combination `beta * delta_plus + (1 - beta) * delta_minus`.
#[inline]
pub fn aeno_slope(delta_minus: f64, delta_plus: f64, params: &AenoParams) -> f64 {
    if delta_minus == 0.0 {
        // beta is zero
        return 0.0;
    }
    let beta = aeno_beta(delta_minus, delta_plus, params);
    beta * delta_plus + (1.0 - beta) * delta_minus
}

#[inline]
fn limited(kind: Reconstruction, delta_minus: f64, delta_plus: f64, params: &AenoParams) -> f64 {
    match kind {
        Reconstruction::FirstOrder => 0.0,
        Reconstruction::Aeno => aeno_slope(delta_minus, delta_plus, params),
    }
}

/// Limited slopes of the reconstructed variables in one cell.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SlopePair {
    pub delta_x: Vec5,
    pub delta_y: Vec5,
}

/// `(eta, hu, hv, hC, Zb)` from a conserved state.
#[inline]
pub fn to_recon_vars(w: &ConservedState) -> Vec5 {
    [w.h + w.zb, w.hu, w.hv, w.hc, w.zb]
}

/// Inverse of [`to_recon_vars`]; the depth may come out negative.
#[inline]
pub fn from_recon_vars(v: &Vec5) -> ConservedState {
    ConservedState {
        h: v[0] - v[4],
        hu: v[1],
        hv: v[2],
        hc: v[3],
        zb: v[4],
    }
}

#[inline]
fn recon_at(state: &FlowState, i: isize, k: isize) -> Vec5 {
    to_recon_vars(&state.get(i, k))
}

/// Limited slope of every reconstructed variable of cell `(i, k)` along `axis`.
/// Needs one valid neighbour on each side.
#[inline]
pub fn axis_slopes(
    state: &FlowState,
    i: isize,
    k: isize,
    axis: Axis,
    kind: Reconstruction,
    params: &AenoParams,
) -> Vec5 {
    if kind == Reconstruction::FirstOrder {
        return [0.0; NCOMP];
    }
    let grid = state.grid();
    let (lo, hi, step) = match axis {
        Axis::X => ((i - 1, k), (i + 1, k), grid.dx),
        Axis::Y => ((i, k - 1), (i, k + 1), grid.dy),
    };
    let c = recon_at(state, i, k);
    let l = recon_at(state, lo.0, lo.1);
    let r = recon_at(state, hi.0, hi.1);
    let inv = 1.0 / step;
    let mut out = [0.0; NCOMP];
    for m in 0..NCOMP {
        let dm = (c[m] - l[m]) * inv;
        let dp = (r[m] - c[m]) * inv;
        out[m] = limited(kind, dm, dp, params);
    }
    // Keep both edge depths inside [0, 2h]. The blend is not monotone, so a
    // nearly dry cell could otherwise push its free surface below the bed on
    // one side and export more water than it holds through the other. The
    // steeper of the two slopes gives way: a flat surface over a bed step
    // stays flat, a flat bed under a thin front stays flat.
    let h = (c[0] - c[4]).max(0.0);
    let half = 0.5 * step;
    let dh = (out[0] - out[4]) * half;
    if dh.abs() > h {
        let allowed = h.copysign(dh) / half;
        if out[4].abs() > out[0].abs() {
            out[4] = out[0] - allowed;
        } else {
            out[0] = out[4] + allowed;
        }
    }
    out
}

pub fn cell_slopes(
    state: &FlowState,
    i: isize,
    k: isize,
    kind: Reconstruction,
    params: &AenoParams,
) -> SlopePair {
    SlopePair {
        delta_x: axis_slopes(state, i, k, Axis::X, kind, params),
        delta_y: axis_slopes(state, i, k, Axis::Y, kind, params),
    }
}

/// Value of the linear reconstruction of cell `(i, k)` at signed offset
/// `sign * step / 2` along `axis`, in reconstructed variables.
#[inline]
pub fn edge_value(center: &Vec5, slope: &Vec5, half_step: f64, sign: f64) -> Vec5 {
    let mut out = *center;
    for m in 0..NCOMP {
        out[m] += sign * slope[m] * half_step;
    }
    out
}

/// Both sides of one interface.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InterfacePair {
    pub w_minus: ConservedState,
    pub w_plus: ConservedState,
}

impl InterfacePair {
    pub fn new(w_minus: ConservedState, w_plus: ConservedState) -> Self {
        InterfacePair { w_minus, w_plus }
    }

    pub fn eta_minus(&self) -> f64 {
        self.w_minus.eta()
    }

    pub fn eta_plus(&self) -> f64 {
        self.w_plus.eta()
    }

    /// `W+ - W-` componentwise.
    pub fn jump(&self) -> Vec5 {
        let a = self.w_minus.to_array();
        let b = self.w_plus.to_array();
        std::array::from_fn(|m| b[m] - a[m])
    }
}

/// Raw extrapolated states at the interface below cell `(i, k)` along `axis`,
/// that is between `(i-1, k)` and `(i, k)` in x or `(i, k-1)` and `(i, k)` in y.
pub fn extrapolate(
    state: &FlowState,
    i: isize,
    k: isize,
    axis: Axis,
    kind: Reconstruction,
    params: &AenoParams,
) -> InterfacePair {
    let grid = state.grid();
    let (left, half) = match axis {
        Axis::X => ((i - 1, k), 0.5 * grid.dx),
        Axis::Y => ((i, k - 1), 0.5 * grid.dy),
    };
    let sl = axis_slopes(state, left.0, left.1, axis, kind, params);
    let sr = axis_slopes(state, i, k, axis, kind, params);
    pair_from_slopes(&state.get(left.0, left.1), &sl, &state.get(i, k), &sr, half)
}

/// Raw pair from the two adjacent cells and their slopes along the face normal.
#[inline]
pub fn pair_from_slopes(
    left: &ConservedState,
    left_slope: &Vec5,
    right: &ConservedState,
    right_slope: &Vec5,
    half_step: f64,
) -> InterfacePair {
    let (minus, plus) = edges_from_slopes(left, left_slope, right, right_slope, half_step);
    InterfacePair::new(from_recon_vars(&minus), from_recon_vars(&plus))
}

/// Same as [`pair_from_slopes`], left in reconstructed variables.
#[inline]
pub fn edges_from_slopes(
    left: &ConservedState,
    left_slope: &Vec5,
    right: &ConservedState,
    right_slope: &Vec5,
    half_step: f64,
) -> (Vec5, Vec5) {
    (
        edge_value(&to_recon_vars(left), left_slope, half_step, 1.0),
        edge_value(&to_recon_vars(right), right_slope, half_step, -1.0),
    )
}

/// Hydrostatic correction of a raw extrapolated pair.
///
/// Both sides are brought to a common bed level no higher than the local free
/// surface, the depth is clipped at zero and the discharges and `hC` are
/// rebuilt from the corrected depth and the uncorrected velocities and
/// concentration.
pub fn hydrostatic_correct(raw: &InterfacePair, dry: DryTolerance) -> InterfacePair {
    let (wm, wp) = (&raw.w_minus, &raw.w_plus);
    correct_sides(wm, wm.h + wm.zb, wp, wp.h + wp.zb, dry)
}

/// Hydrostatic correction of edge values given as `(eta, hu, hv, hC, Zb)`.
/// Taking `eta` as reconstructed, rather than as `h + Zb` after the fact,
/// keeps a flat surface flat to the last bit.
pub fn correct_edges(minus: &Vec5, plus: &Vec5, dry: DryTolerance) -> InterfacePair {
    correct_sides(
        &from_recon_vars(minus),
        minus[0],
        &from_recon_vars(plus),
        plus[0],
        dry,
    )
}

#[inline]
fn correct_sides(
    wm: &ConservedState,
    eta_m: f64,
    wp: &ConservedState,
    eta_p: f64,
    dry: DryTolerance,
) -> InterfacePair {
    let zmax = wm.zb.max(wp.zb);
    let zb_m = zmax.min(eta_m);
    let zb_p = zmax.min(eta_p);
    let zstar = zb_m.max(zb_p);
    let h_m = (eta_m - zstar).min(wm.h).max(0.0);
    let h_p = (eta_p - zstar).min(wp.h).max(0.0);
    InterfacePair {
        w_minus: rebuild(wm, h_m, zb_m, dry),
        w_plus: rebuild(wp, h_p, zb_p, dry),
    }
}

#[inline]
fn rebuild(raw: &ConservedState, h: f64, zb: f64, dry: DryTolerance) -> ConservedState {
    if h <= dry.h_cut {
        return ConservedState {
            h,
            hu: 0.0,
            hv: 0.0,
            hc: 0.0,
            zb,
        };
    }
    // above h_reg the regularized velocity is exactly hu / h
    if h == raw.h && h >= dry.h_reg {
        return ConservedState { zb, ..*raw };
    }
    let pr = raw.regularized(dry);
    ConservedState {
        h,
        hu: h * pr.u,
        hv: h * pr.v,
        hc: h * pr.c,
        zb,
    }
}

/// Extrapolation followed by the hydrostatic correction.
pub fn interface_pair(
    state: &FlowState,
    i: isize,
    k: isize,
    axis: Axis,
    kind: Reconstruction,
    params: &AenoParams,
    dry: DryTolerance,
) -> InterfacePair {
    let grid = state.grid();
    let (left, half) = match axis {
        Axis::X => ((i - 1, k), 0.5 * grid.dx),
        Axis::Y => ((i, k - 1), 0.5 * grid.dy),
    };
    let sl = axis_slopes(state, left.0, left.1, axis, kind, params);
    let sr = axis_slopes(state, i, k, axis, kind, params);
    let (minus, plus) =
        edges_from_slopes(&state.get(left.0, left.1), &sl, &state.get(i, k), &sr, half);
    correct_edges(&minus, &plus, dry)
}
