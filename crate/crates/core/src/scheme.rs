//! Semi-discrete path-conservative central-upwind right-hand side.
//!
//! Every cell receives
//!
//! ```text
//! dW/dt = -(D-_{i+1/2} + D+_{i-1/2} + F(W-_{i+1/2}) - F(W+_{i-1/2}) + B_cell) / dx
//!         - (y analogue) / dy + S
//! ```
//!
//! where `D+-` split the interface jump `F(W+) - F(W-) + B^Psi` with the
//! central-upwind weights and `B_cell` integrates the nonconservative products
//! along the in-cell segment between the two corrected edge states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::grid::BoundarySpec;
use crate::physics::{
    bed_celerity_with, flux, flux_with, friction_coefficient, mixture_density,
    sediment_closures_with, Axis, ConservedState, GrainConstants, PhysParams, Primitives, Vec5, HC,
    NCOMP, ZB,
};
use crate::reconstruction::{
    axis_slopes, correct_edges, edges_from_slopes, AenoParams, InterfacePair, Reconstruction,
    SlopePair,
};
use crate::state::FlowState;

/// Quadrature rule on `[0, 1]` for the path terms without a closed form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    /// One node at `s = 1/2`, weight 1.
    #[default]
    Midpoint,
    /// Three-point Gauss-Legendre.
    Gauss3,
    /// One node at `s = 1/2` with weight `8/18`. Not consistent; kept for comparison.
    CenterWeight,
}

impl Quadrature {
    pub fn nodes(self) -> &'static [(f64, f64)] {
        const MID: [(f64, f64); 1] = [(0.5, 1.0)];
        const SINGLE: [(f64, f64); 1] = [(0.5, 8.0 / 18.0)];
        // 0.5 -+ sqrt(15)/10
        const GAUSS: [(f64, f64); 3] = [
            (0.5, 8.0 / 18.0),
            (0.112_701_665_379_258_31, 5.0 / 18.0),
            (0.887_298_334_620_741_7, 5.0 / 18.0),
        ];
        match self {
            Quadrature::Midpoint => &MID,
            Quadrature::Gauss3 => &GAUSS,
            Quadrature::CenterWeight => &SINGLE,
        }
    }
}

/// Discretization of the momentum entry of the interface path term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopographyTerm {
    /// Linear-path integral of all nonconservative products.
    #[default]
    Path,
    /// Replace the interface momentum entry by `-g {{h}} [h]`.
    Hydrostatic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrictionForm {
    /// `-C_f u |u|` with cell values.
    #[default]
    Pointwise,
    /// `-g h_avg S_f`, `h_avg` the mean of the two corrected edge depths of the cell.
    InterfaceAveraged,
}

/// Switches and options of the spatial discretization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchemeConfig {
    pub reconstruction: Reconstruction,
    pub aeno: AenoParams,
    pub quadrature: Quadrature,
    pub topography: TopographyTerm,
    pub friction_form: FrictionForm,
    pub exchange: bool,
    pub friction: bool,
    pub diffusion: bool,
    /// When false every nonconservative product is dropped, leaving a plain
    /// central-upwind scheme for the conservative part.
    pub nonconservative: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            reconstruction: Reconstruction::Aeno,
            aeno: AenoParams::default(),
            quadrature: Quadrature::Midpoint,
            topography: TopographyTerm::Path,
            friction_form: FrictionForm::Pointwise,
            exchange: true,
            friction: true,
            diffusion: true,
            nonconservative: true,
        }
    }
}

/// One-sided local speeds at one interface.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Speeds {
    pub a_plus: f64,
    pub a_minus: f64,
}

impl Speeds {
    #[inline]
    pub fn max_abs(&self) -> f64 {
        self.a_plus.max(-self.a_minus)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Fluctuation {
    pub d_minus: Vec5,
    pub d_plus: Vec5,
    pub cu_flux: Vec5,
    pub b_psi: Vec5,
    /// Physical fluxes `F(W-)` and `F(W+)`.
    pub f_minus: Vec5,
    pub f_plus: Vec5,
}

/// Largest one-sided speeds over all x- and y-interfaces.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WaveSpeeds {
    pub ax: f64,
    pub by: f64,
}

#[inline]
fn normal_of(v: [f64; 2], axis: Axis) -> f64 {
    match axis {
        Axis::X => v[0],
        Axis::Y => v[1],
    }
}

pub fn local_speeds(pair: &InterfacePair, params: &PhysParams, axis: Axis) -> Speeds {
    let dry = params.dry();
    speeds_with(
        pair,
        &[pair.w_minus.regularized(dry), pair.w_plus.regularized(dry)],
        params,
        axis,
    )
}

fn speeds_with(
    pair: &InterfacePair,
    prims: &[Primitives; 2],
    params: &PhysParams,
    axis: Axis,
) -> Speeds {
    let mut a_plus = 0.0f64;
    let mut a_minus = 0.0f64;
    for (w, pr) in [&pair.w_minus, &pair.w_plus].into_iter().zip(prims) {
        let un = pr.along(axis);
        let c = (params.g * w.h.max(0.0)).sqrt();
        let ub = normal_of(bed_celerity_with(w, pr, params).velocity, axis);
        a_plus = a_plus.max(un + c).max(un).max(ub);
        a_minus = a_minus.min(un - c).min(un).min(ub);
    }
    Speeds { a_plus, a_minus }
}

/// `g h delta_rho / (2 rho)` at a state on the path.
#[inline]
fn coupling(w: &ConservedState, c: f64, params: &PhysParams) -> f64 {
    params.g * w.h * params.delta_rho() / (2.0 * mixture_density(c, params))
}

/// Linear-path integral of the nonconservative products between `a` and `b`.
///
/// The `g h dZb` entry is integrated exactly as `g {{h}} [Zb]`; the density
/// coupling and the bed advection use `quadrature`.
pub fn path_integral(
    a: &ConservedState,
    b: &ConservedState,
    params: &PhysParams,
    axis: Axis,
    quadrature: Quadrature,
) -> Vec5 {
    let mut out = [0.0; NCOMP];
    let dh = b.h - a.h;
    let dhc = b.hc - a.hc;
    let dzb = b.zb - a.zb;
    if dh == 0.0 && dhc == 0.0 && dzb == 0.0 {
        return out;
    }
    let m = axis.normal_momentum();
    let mut momentum = params.g * 0.5 * (a.h + b.h) * dzb;
    let mut bed = 0.0;
    // Both sides of a corrected interface share one bed level, and a path
    // free of sediment has no density coupling; skip whichever is zero.
    let with_coupling = dhc != 0.0 || (dh != 0.0 && (a.hc != 0.0 || b.hc != 0.0));
    let with_bed = dzb != 0.0;
    if with_coupling || with_bed {
        for &(s, w) in quadrature.nodes() {
            let p = a.lerp(b, s);
            let pr = p.regularized(params.dry());
            if with_coupling {
                let k = coupling(&p, pr.c, params);
                momentum += w * (k * dhc - k * pr.c * dh);
            }
            if with_bed {
                bed += w * normal_of(bed_celerity_with(&p, &pr, params).velocity, axis);
            }
        }
    }
    out[m] = momentum;
    out[ZB] = bed * dzb;
    out
}

/// Well-balanced replacement of the interface momentum term, `-g {{h}} [h]`.
#[inline]
pub fn wb_topography(pair: &InterfacePair, params: &PhysParams) -> f64 {
    let (hm, hp) = (pair.w_minus.h, pair.w_plus.h);
    -params.g * 0.5 * (hm + hp) * (hp - hm)
}

/// Nonconservative interface term `B^Psi` under the configured options.
pub fn interface_b(
    pair: &InterfacePair,
    params: &PhysParams,
    axis: Axis,
    config: &SchemeConfig,
) -> Vec5 {
    if !config.nonconservative {
        return [0.0; NCOMP];
    }
    let mut b = path_integral(&pair.w_minus, &pair.w_plus, params, axis, config.quadrature);
    if config.topography == TopographyTerm::Hydrostatic {
        b[axis.normal_momentum()] = wb_topography(pair, params);
    }
    b
}

/// Splits the interface jump into left- and right-going fluctuations.
pub fn fluctuations(
    pair: &InterfacePair,
    speeds: &Speeds,
    b_psi: &Vec5,
    params: &PhysParams,
    axis: Axis,
) -> Fluctuation {
    let fm = flux(&pair.w_minus, axis, params);
    let fp = flux(&pair.w_plus, axis, params);
    let mut out = split_jump(pair, speeds, b_psi, fm, fp);
    let (ap, am) = (speeds.a_plus, speeds.a_minus);
    let span = ap - am;
    if span > 0.0 {
        let jump = pair.jump();
        for m in 0..NCOMP {
            out.cu_flux[m] = (ap * fm[m] - am * fp[m]) / span + ap * am / span * jump[m];
        }
    }
    out
}

fn split_jump(
    pair: &InterfacePair,
    speeds: &Speeds,
    b_psi: &Vec5,
    fm: Vec5,
    fp: Vec5,
) -> Fluctuation {
    let (ap, am) = (speeds.a_plus, speeds.a_minus);
    let span = ap - am;
    if span <= 0.0 {
        return Fluctuation {
            f_minus: fm,
            f_plus: fp,
            ..Default::default()
        };
    }
    let jump = pair.jump();
    let inv_span = 1.0 / span;
    let lambda1 = (ap + am) * inv_span;
    let lambda0 = -2.0 * ap * am * inv_span;
    let mut out = Fluctuation {
        b_psi: *b_psi,
        f_minus: fm,
        f_plus: fp,
        ..Default::default()
    };
    for m in 0..NCOMP {
        let total = fp[m] - fm[m] + b_psi[m];
        out.d_minus[m] = 0.5 * (1.0 - lambda1) * total - 0.5 * lambda0 * jump[m];
        out.d_plus[m] = 0.5 * (1.0 + lambda1) * total + 0.5 * lambda0 * jump[m];
    }
    out
}

/// Net exchange source for a given `E - D`.
#[inline]
pub fn exchange_source(net: f64, u: f64, v: f64, params: &PhysParams) -> Vec5 {
    let q = net / (1.0 - params.p);
    [q, -q * u, -q * v, net, -q]
}

/// Interior-only time derivative, row-major over `(k, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rhs {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<Vec5>,
}

impl Rhs {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Rhs {
            nx,
            ny,
            data: vec![[0.0; NCOMP]; nx * ny],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> &Vec5 {
        &self.data[k * self.nx + i]
    }

    /// Largest absolute entry of component `m`.
    pub fn max_abs(&self, m: usize) -> f64 {
        self.data.iter().map(|r| r[m].abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct FaceData {
    pair: InterfacePair,
    d_minus: Vec5,
    d_plus: Vec5,
    f_minus: Vec5,
    f_plus: Vec5,
    speed: f64,
}

/// The PCCU spatial operator with its scratch buffers.
#[derive(Clone, Debug)]
pub struct PccuOperator {
    pub params: PhysParams,
    pub config: SchemeConfig,
    pub bc: BoundarySpec,
    grain: GrainConstants,
    xfaces: Vec<FaceData>,
    yfaces: Vec<FaceData>,
    slopes: Vec<SlopePair>,
    fsh: Vec<f64>,
    conc: Vec<f64>,
}

impl PccuOperator {
    pub fn new(params: PhysParams, config: SchemeConfig, bc: BoundarySpec) -> Self {
        PccuOperator {
            grain: GrainConstants::new(&params),
            params,
            config,
            bc,
            xfaces: Vec::new(),
            yfaces: Vec::new(),
            slopes: Vec::new(),
            fsh: Vec::new(),
            conc: Vec::new(),
        }
    }

    /// Corrected interface pair of the x-face `i` (between cells `i-1` and `i`)
    /// in row `k`, from the last evaluation.
    pub fn x_pair(&self, nx: usize, i: usize, k: usize) -> InterfacePair {
        self.xfaces[k * (nx + 1) + i].pair
    }

    /// Corrected interface pair of the y-face `k` (between rows `k-1` and `k`)
    /// in column `i`, from the last evaluation.
    pub fn y_pair(&self, nx: usize, i: usize, k: usize) -> InterfacePair {
        self.yfaces[k * nx + i].pair
    }

    /// Face below cell `(i, k)` along `axis`, using the precomputed slopes.
    fn face(
        &self,
        state: &FlowState,
        slopes: &[SlopePair],
        i: isize,
        k: isize,
        axis: Axis,
    ) -> FaceData {
        let p = &self.params;
        let grid = state.grid();
        let (left, half) = match axis {
            Axis::X => ((i - 1, k), 0.5 * grid.dx),
            Axis::Y => ((i, k - 1), 0.5 * grid.dy),
        };
        let (il, ir) = (grid.index(left.0, left.1), grid.index(i, k));
        let (sl, sr) = match axis {
            Axis::X => (&slopes[il].delta_x, &slopes[ir].delta_x),
            Axis::Y => (&slopes[il].delta_y, &slopes[ir].delta_y),
        };
        let (minus, plus) = edges_from_slopes(&state.at(il), sl, &state.at(ir), sr, half);
        let pair = correct_edges(&minus, &plus, p.dry());
        let prims = [
            pair.w_minus.regularized(p.dry()),
            pair.w_plus.regularized(p.dry()),
        ];
        let speeds = speeds_with(&pair, &prims, p, axis);
        let b = interface_b(&pair, p, axis, &self.config);
        let fm = flux_with(&pair.w_minus, &prims[0], axis, p);
        let fp = flux_with(&pair.w_plus, &prims[1], axis, p);
        let fl = split_jump(&pair, &speeds, &b, fm, fp);
        FaceData {
            pair,
            d_minus: fl.d_minus,
            d_plus: fl.d_plus,
            f_minus: fl.f_minus,
            f_plus: fl.f_plus,
            speed: speeds.max_abs(),
        }
    }

    /// Fills ghosts of `state` and writes `dW/dt` for every interior cell.
    pub fn assemble_rhs(&mut self, state: &mut FlowState, out: &mut Rhs) -> Result<WaveSpeeds> {
        state.fill_ghosts(&self.bc);
        let grid = *state.grid();
        let (nx, ny) = (grid.nx, grid.ny);
        if out.nx != nx || out.ny != ny {
            return Err(SolverError::Contract(format!(
                "rhs buffer is {}x{}, grid is {nx}x{ny}",
                out.nx, out.ny
            )));
        }
        self.xfaces.resize((nx + 1) * ny, FaceData::default());
        self.yfaces.resize(nx * (ny + 1), FaceData::default());

        let mut xfaces = std::mem::take(&mut self.xfaces);
        let mut yfaces = std::mem::take(&mut self.yfaces);
        let mut fsh = std::mem::take(&mut self.fsh);
        let mut conc = std::mem::take(&mut self.conc);
        let mut slopes = std::mem::take(&mut self.slopes);
        let st: &FlowState = state;
        let this: &Self = self;

        // slopes of the interior and the first ghost layer
        slopes.resize(grid.padded_len(), SlopePair::default());
        let gw = grid.ghost_width as isize;
        let (kind, aeno) = (self.config.reconstruction, &self.config.aeno);
        slopes
            .par_chunks_mut(grid.stride())
            .enumerate()
            .for_each(|(row, out)| {
                let k = row as isize - gw;
                if k < -1 || k > ny as isize {
                    return;
                }
                for (col, s) in out.iter_mut().enumerate() {
                    let i = col as isize - gw;
                    if i < -1 || i > nx as isize {
                        continue;
                    }
                    *s = SlopePair {
                        delta_x: axis_slopes(st, i, k, Axis::X, kind, aeno),
                        delta_y: axis_slopes(st, i, k, Axis::Y, kind, aeno),
                    };
                }
            });
        let sl = &slopes;
        xfaces
            .par_chunks_mut(nx + 1)
            .enumerate()
            .for_each(|(k, row)| {
                for (i, f) in row.iter_mut().enumerate() {
                    *f = this.face(st, sl, i as isize, k as isize, Axis::X);
                }
            });
        yfaces.par_chunks_mut(nx).enumerate().for_each(|(k, row)| {
            for (i, f) in row.iter_mut().enumerate() {
                *f = this.face(st, sl, i as isize, k as isize, Axis::Y);
            }
        });

        let diffusion = self.config.diffusion && self.params.nu_m > 0.0;
        if diffusion {
            // f_s h on the padded grid, needed one cell beyond the interior
            fsh.resize(grid.padded_len(), 0.0);
            let dry = self.params.dry();
            conc.resize(grid.padded_len(), 0.0);
            conc.par_iter_mut()
                .enumerate()
                .for_each(|(idx, c)| *c = st.at(idx).regularized(dry).c);
            // only cells next to a concentration jump carry a diffusive flux
            let stride = grid.stride();
            let cs = &conc;
            fsh.par_iter_mut().enumerate().for_each(|(idx, v)| {
                let c0 = cs[idx];
                let near_jump = [
                    idx.wrapping_sub(1),
                    idx + 1,
                    idx.wrapping_sub(stride),
                    idx + stride,
                ]
                .into_iter()
                .any(|j| j < cs.len() && cs[j] != c0);
                *v = if near_jump {
                    let w = st.at(idx);
                    sediment_closures_with(&w, &this.params, &this.grain).f_s * w.h.max(0.0)
                } else {
                    0.0
                };
            });
        }

        let ax = xfaces.iter().map(|f| f.speed).fold(0.0, f64::max);
        let by = yfaces.iter().map(|f| f.speed).fold(0.0, f64::max);

        let xf = &xfaces;
        let yf = &yfaces;
        let fs = &fsh;
        let cs = &conc;
        out.data
            .par_chunks_mut(nx)
            .enumerate()
            .for_each(|(k, row)| {
                for (i, r) in row.iter_mut().enumerate() {
                    *r = this.cell_rhs(st, xf, yf, fs, cs, diffusion, i, k);
                }
            });

        self.xfaces = xfaces;
        self.yfaces = yfaces;
        self.slopes = slopes;
        self.fsh = fsh;
        self.conc = conc;

        for (n, r) in out.data.iter().enumerate() {
            if let Some(m) = r.iter().position(|v| !v.is_finite()) {
                return Err(SolverError::Numerical {
                    stage: "rhs assembly".into(),
                    i: (n % nx) as isize,
                    k: (n / nx) as isize,
                    detail: format!("component {m} is {}", r[m]),
                });
            }
        }
        Ok(WaveSpeeds { ax, by })
    }

    #[allow(clippy::too_many_arguments)]
    fn cell_rhs(
        &self,
        state: &FlowState,
        xf: &[FaceData],
        yf: &[FaceData],
        fsh: &[f64],
        conc: &[f64],
        diffusion: bool,
        i: usize,
        k: usize,
    ) -> Vec5 {
        let p = &self.params;
        let grid = state.grid();
        let nx = grid.nx;
        let left = &xf[k * (nx + 1) + i];
        let right = &xf[k * (nx + 1) + i + 1];
        let bottom = &yf[k * nx + i];
        let top = &yf[(k + 1) * nx + i];

        let mut r = [0.0; NCOMP];
        for (axis, lo, hi, step) in [
            (Axis::X, left, right, grid.dx),
            (Axis::Y, bottom, top, grid.dy),
        ] {
            let a = &lo.pair.w_plus;
            let b = &hi.pair.w_minus;
            let (fa, fb) = (&lo.f_plus, &hi.f_minus);
            let cell_b = if self.config.nonconservative {
                path_integral(a, b, p, axis, self.config.quadrature)
            } else {
                [0.0; NCOMP]
            };
            let inv = 1.0 / step;
            for m in 0..NCOMP {
                r[m] -= (hi.d_minus[m] + lo.d_plus[m] + fb[m] - fa[m] + cell_b[m]) * inv;
            }
        }

        let (ii, kk) = (i as isize, k as isize);
        let w = state.get(ii, kk);
        let pr = w.regularized(p.dry());

        if self.config.exchange {
            let cl = sediment_closures_with(&w, p, &self.grain);
            let s = exchange_source(cl.net_exchange(), pr.u, pr.v, p);
            for m in 0..NCOMP {
                r[m] += s[m];
            }
        }

        let speed = pr.speed();
        if self.config.friction && p.n > 0.0 && w.h > p.h_cut && speed > 0.0 {
            match self.config.friction_form {
                FrictionForm::Pointwise => {
                    let cf = friction_coefficient(w.h, p);
                    r[1] -= cf * pr.u * speed;
                    r[2] -= cf * pr.v * speed;
                }
                FrictionForm::InterfaceAveraged => {
                    let sf = p.n * p.n * speed / w.h.powf(4.0 / 3.0);
                    let hx = 0.5 * (right.pair.w_minus.h + left.pair.w_plus.h);
                    let hy = 0.5 * (top.pair.w_minus.h + bottom.pair.w_plus.h);
                    r[1] -= p.g * hx * sf * pr.u;
                    r[2] -= p.g * hy * sf * pr.v;
                }
            }
        }

        if diffusion {
            let centre = grid.index(ii, kk);
            let (c0, f0) = (conc[centre], fsh[centre]);
            let flux = |j: usize, step: f64| {
                let dc = conc[j] - c0;
                if dc == 0.0 {
                    0.0
                } else {
                    0.5 * (f0 + fsh[j]) * p.nu_m * dc / step
                }
            };
            let stride = grid.stride();
            // outward differences: (east - center) + (west - center) = east - west flux difference
            r[HC] += (flux(centre + 1, grid.dx) + flux(centre - 1, grid.dx)) / grid.dx
                + (flux(centre + stride, grid.dy) + flux(centre - stride, grid.dy)) / grid.dy;
        }
        r
    }
}

/// One-shot right-hand side evaluation.
pub fn assemble_rhs(
    state: &mut FlowState,
    params: &PhysParams,
    config: &SchemeConfig,
    bc: &BoundarySpec,
) -> Result<(Rhs, WaveSpeeds)> {
    let g = *state.grid();
    let mut op = PccuOperator::new(*params, *config, *bc);
    let mut out = Rhs::zeros(g.nx, g.ny);
    let speeds = op.assemble_rhs(state, &mut out)?;
    Ok((out, speeds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BoundaryKind, Grid2D, GHOST_WIDTH};
    use crate::physics::{HU, HV};
    use approx::assert_relative_eq;

    fn params() -> PhysParams {
        PhysParams::default()
    }

    #[test]
    fn still_water_speeds() {
        let w = ConservedState::new(1.0, 0.0, 0.0, 0.0, 0.0);
        let s = local_speeds(&InterfacePair::new(w, w), &params(), Axis::X);
        assert_relative_eq!(s.a_plus, 3.130495, epsilon = 1e-6);
        assert_relative_eq!(s.a_minus, -3.130495, epsilon = 1e-6);
    }

    #[test]
    fn supercritical_speeds() {
        let p = PhysParams {
            grass_a: 0.0,
            ..params()
        };
        let w = ConservedState::from_primitives(1.0, 5.0, 0.0, 0.0, 0.0);
        let s = local_speeds(&InterfacePair::new(w, w), &p, Axis::X);
        assert_eq!(s.a_minus, 0.0);
        assert_relative_eq!(s.a_plus, 8.130495, epsilon = 1e-6);
    }

    #[test]
    fn dry_side_contributes_nothing() {
        let wm = ConservedState::new(1.0, 0.0, 0.0, 0.0, 0.0);
        let wp = ConservedState::default();
        let s = local_speeds(&InterfacePair::new(wm, wp), &params(), Axis::X);
        assert_relative_eq!(s.a_plus, 9.8f64.sqrt());
    }

    #[test]
    fn path_integral_examples() {
        let p = params();
        let w = ConservedState::new(1.0, 0.3, 0.0, 0.01, 0.2);
        assert_eq!(
            path_integral(&w, &w, &p, Axis::X, Quadrature::Midpoint),
            [0.0; 5]
        );

        let a = ConservedState::new(1.0, 0.0, 0.0, 0.0, 0.0);
        let b = ConservedState::new(2.0, 0.0, 0.0, 0.0, 0.1);
        let bp = path_integral(&a, &b, &p, Axis::X, Quadrature::Midpoint);
        assert_relative_eq!(bp[HU], 1.47, max_relative = 1e-14);
        assert_eq!(bp[ZB], 0.0);
        let by = path_integral(&a, &b, &p, Axis::Y, Quadrature::Gauss3);
        assert_relative_eq!(by[HV], 1.47, max_relative = 1e-14);
        assert_eq!(by[HU], 0.0);
    }

    #[test]
    fn gauss_rule_integrates_cubics() {
        let q = Quadrature::Gauss3.nodes();
        let integral: f64 = q.iter().map(|&(s, w)| w * s * s * s).sum();
        assert_relative_eq!(integral, 0.25, max_relative = 1e-15);
        let total: f64 = q.iter().map(|&(_, w)| w).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn topography_replacement_examples() {
        let p = params();
        let w = ConservedState::new(1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(wb_topography(&InterfacePair::new(w, w), &p), 0.0);
        let wp = ConservedState::new(1.2, 0.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(
            wb_topography(&InterfacePair::new(w, wp), &p),
            -2.156,
            max_relative = 1e-12
        );
    }

    #[test]
    fn equal_states_give_null_fluctuations() {
        let p = params();
        let w = ConservedState::from_primitives(0.7, 0.4, -0.2, 0.05, 0.3);
        let pair = InterfacePair::new(w, w);
        let s = local_speeds(&pair, &p, Axis::X);
        let b = path_integral(&w, &w, &p, Axis::X, Quadrature::Midpoint);
        let f = fluctuations(&pair, &s, &b, &p, Axis::X);
        assert_eq!(f.d_minus, [0.0; 5]);
        assert_eq!(f.d_plus, [0.0; 5]);
        let fx = flux(&w, Axis::X, &p);
        for m in 0..NCOMP {
            assert_relative_eq!(f.cu_flux[m], fx[m], max_relative = 1e-14);
        }
    }

    #[test]
    fn symmetric_speeds_split_evenly() {
        let p = params();
        let wm = ConservedState::new(1.0, 0.0, 0.0, 0.0, 0.0);
        let wp = ConservedState::new(1.1, 0.0, 0.0, 0.0, 0.0);
        let pair = InterfacePair::new(wm, wp);
        let c = 9.8f64.sqrt();
        let s = Speeds {
            a_plus: c,
            a_minus: -c,
        };
        let f = fluctuations(&pair, &s, &[0.0; 5], &p, Axis::X);
        let dflux = 0.5 * 9.8 * (1.1f64 * 1.1 - 1.0);
        assert_relative_eq!(f.d_minus[0], -0.5 * c * 0.1, max_relative = 1e-14);
        assert_relative_eq!(f.d_plus[0], 0.5 * c * 0.1, max_relative = 1e-14);
        assert_relative_eq!(f.d_minus[1], 0.5 * dflux, max_relative = 1e-14);
        assert_relative_eq!(f.d_minus[1] + f.d_plus[1], dflux, max_relative = 1e-14);
    }

    #[test]
    fn degenerate_speeds_give_zeros() {
        let p = params();
        let pair = InterfacePair::default();
        let f = fluctuations(&pair, &Speeds::default(), &[0.0; 5], &p, Axis::X);
        assert_eq!(f, Fluctuation::default());
    }

    #[test]
    fn exchange_source_example() {
        let s = exchange_source(0.006, 0.0, 0.0, &params());
        assert_relative_eq!(s[0], 0.01, max_relative = 1e-14);
        assert_relative_eq!(s[4], -0.01, max_relative = 1e-14);
        assert_eq!(s[3], 0.006);
    }

    fn bump_state(n: usize) -> FlowState {
        let g = Grid2D::new([0.0, 1.0, 0.0, 1.0], n, n, GHOST_WIDTH).unwrap();
        FlowState::from_fn(&g, |x, y| {
            let zb = 0.02 + 0.1 * (-(x - 0.5).powi(2) - (y - 0.5).powi(2)).exp();
            ConservedState::new(2.0 - zb, 0.0, 0.0, 0.0, zb)
        })
    }

    #[test]
    fn lake_at_rest_rhs_vanishes() {
        let mut s = bump_state(20);
        let cfg = SchemeConfig {
            exchange: false,
            ..Default::default()
        };
        let (rhs, _) = assemble_rhs(&mut s, &params(), &cfg, &BoundarySpec::default()).unwrap();
        for m in 0..NCOMP {
            assert!(rhs.max_abs(m) <= 1e-12, "component {m}: {}", rhs.max_abs(m));
        }
    }

    #[test]
    fn uniform_periodic_state_sees_only_sources() {
        let g = Grid2D::new([0.0, 1.0, 0.0, 1.0], 6, 5, GHOST_WIDTH).unwrap();
        let w = ConservedState::from_primitives(0.8, 0.5, -0.3, 0.02, 0.1);
        let mut s = FlowState::from_fn(&g, |_, _| w);
        let p = params();
        let cfg = SchemeConfig::default();
        let bc = BoundarySpec::uniform(BoundaryKind::Periodic);
        let (rhs, _) = assemble_rhs(&mut s, &p, &cfg, &bc).unwrap();
        let cl = crate::physics::sediment_closures(&w, &p);
        let pr = w.regularized(p.dry());
        let mut expect = exchange_source(cl.net_exchange(), pr.u, pr.v, &p);
        let cf = friction_coefficient(w.h, &p);
        expect[1] -= cf * pr.u * pr.speed();
        expect[2] -= cf * pr.v * pr.speed();
        for r in &rhs.data {
            for m in 0..NCOMP {
                assert!(
                    (r[m] - expect[m]).abs() <= 1e-12 * (1.0 + expect[m].abs()),
                    "{m}"
                );
            }
        }
    }
}
