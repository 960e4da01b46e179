//! Pointwise model evaluations.
//!
//! The unknown is `W = (h, hu, hv, hC, Zb)`. The system is written as
//!
//! ```text
//! W_t + F1(W)_x + F2(W)_y + B1 Zb_x + B2 (hC)_x + B3 h_x + (y terms) = S(W)
//! ```
//!
//! where the bed equation is purely nonconservative (advection of `Zb` at the
//! bed celerity) and the `B2`/`B3` pair carries the mixture-density coupling.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};

/// Number of components of the state vector.
pub const NCOMP: usize = 5;

pub type Vec5 = [f64; NCOMP];

pub const H: usize = 0;
pub const HU: usize = 1;
pub const HV: usize = 2;
pub const HC: usize = 3;
pub const ZB: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    /// Index of the momentum component normal to faces of this axis.
    #[inline]
    pub fn normal_momentum(self) -> usize {
        match self {
            Axis::X => HU,
            Axis::Y => HV,
        }
    }

    #[inline]
    pub fn normal(self) -> [f64; 2] {
        match self {
            Axis::X => [1.0, 0.0],
            Axis::Y => [0.0, 1.0],
        }
    }
}

/// Conserved variables of one cell or one interface side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConservedState {
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
    pub hc: f64,
    pub zb: f64,
}

/// Velocities and concentration derived from a [`ConservedState`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Primitives {
    pub u: f64,
    pub v: f64,
    pub c: f64,
}

impl Primitives {
    #[inline]
    pub fn along(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.u,
            Axis::Y => self.v,
        }
    }

    #[inline]
    pub fn speed(&self) -> f64 {
        (self.u * self.u + self.v * self.v).sqrt()
    }
}

impl ConservedState {
    pub fn new(h: f64, hu: f64, hv: f64, hc: f64, zb: f64) -> Self {
        ConservedState { h, hu, hv, hc, zb }
    }

    /// Builds a state from depth, velocities, concentration and bed.
    pub fn from_primitives(h: f64, u: f64, v: f64, c: f64, zb: f64) -> Self {
        ConservedState {
            h,
            hu: h * u,
            hv: h * v,
            hc: h * c,
            zb,
        }
    }

    #[inline]
    pub fn to_array(self) -> Vec5 {
        [self.h, self.hu, self.hv, self.hc, self.zb]
    }

    #[inline]
    pub fn from_array(a: Vec5) -> Self {
        ConservedState {
            h: a[H],
            hu: a[HU],
            hv: a[HV],
            hc: a[HC],
            zb: a[ZB],
        }
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.h + self.zb
    }

    /// Regularized velocities: `q/h` above `h_reg`, the damped
    /// `sqrt(2) h q / sqrt(h^4 + h_reg^4)` between `h_cut` and `h_reg`, zero
    /// below.
    #[inline]
    pub fn regularized(&self, dry: DryTolerance) -> Primitives {
        if self.h <= dry.h_cut {
            return Primitives::default();
        }
        let inv = 1.0 / self.h;
        let c = (self.hc * inv).clamp(0.0, 1.0);
        if self.h >= dry.h_reg {
            return Primitives {
                u: self.hu * inv,
                v: self.hv * inv,
                c,
            };
        }
        let h2 = self.h * self.h;
        let r2 = dry.h_reg * dry.h_reg;
        let s = std::f64::consts::SQRT_2 * self.h / (h2 * h2 + r2 * r2).sqrt();
        Primitives {
            u: s * self.hu,
            v: s * self.hv,
            c,
        }
    }

    /// Desingularized velocities and concentration: zero at or below `h_cut`,
    /// concentration clamped to `[0, 1]`.
    #[inline]
    pub fn primitives(&self, h_cut: f64) -> Primitives {
        if self.h > h_cut {
            Primitives {
                u: self.hu / self.h,
                v: self.hv / self.h,
                c: (self.hc / self.h).clamp(0.0, 1.0),
            }
        } else {
            Primitives::default()
        }
    }

    /// Linear interpolation `self + s (other - self)`.
    #[inline]
    pub fn lerp(&self, other: &ConservedState, s: f64) -> ConservedState {
        ConservedState {
            h: self.h + s * (other.h - self.h),
            hu: self.hu + s * (other.hu - self.hu),
            hv: self.hv + s * (other.hv - self.hv),
            hc: self.hc + s * (other.hc - self.hc),
            zb: self.zb + s * (other.zb - self.zb),
        }
    }
}

/// Transport-mode convention when the shear velocity vanishes and the Rouse
/// number is undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FsAtRest {
    #[default]
    One,
    Zero,
}

/// Physical constants and closure coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysParams {
    pub rho_w: f64,
    pub rho_s: f64,
    pub g: f64,
    /// Bed porosity.
    pub p: f64,
    /// Manning coefficient.
    pub n: f64,
    pub d50: f64,
    /// Kinematic viscosity of water.
    pub nu: f64,
    /// Erosion-force coefficient.
    pub phi_e: f64,
    /// Hindered-settling exponent.
    pub m: f64,
    pub kappa: f64,
    /// Concentration diffusivity.
    pub nu_m: f64,
    /// Bedload law `Q_b = a |u|^b`.
    pub grass_a: f64,
    pub grass_b: f64,
    /// Floor on `|1 - Fr^2|` in the bed celerity.
    pub fr_clamp: f64,
    /// Dry tolerance.
    pub h_cut: f64,
    /// Depth below which velocities are damped.
    pub h_reg: f64,
    pub fs_at_rest: FsAtRest,
}

/// Depth thresholds for turning conserved variables into velocities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DryTolerance {
    pub h_cut: f64,
    pub h_reg: f64,
}

impl DryTolerance {
    /// Plain `q/h` above `h_cut`.
    pub fn sharp(h_cut: f64) -> Self {
        DryTolerance { h_cut, h_reg: 0.0 }
    }
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            rho_w: 1000.0,
            rho_s: 2650.0,
            g: 9.8,
            p: 0.4,
            n: 0.028,
            d50: 0.001,
            nu: 0.000012,
            phi_e: 0.015,
            m: 2.0,
            kappa: 0.4,
            nu_m: 1e-6,
            grass_a: 0.001,
            grass_b: 3.0,
            fr_clamp: 1e-3,
            h_cut: 1e-10,
            h_reg: 1e-3,
            fs_at_rest: FsAtRest::One,
        }
    }
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("rho_w", self.rho_w),
            ("rho_s", self.rho_s),
            ("g", self.g),
            ("p", self.p),
            ("n", self.n),
            ("d50", self.d50),
            ("nu", self.nu),
            ("phi_e", self.phi_e),
            ("m", self.m),
            ("kappa", self.kappa),
            ("nu_m", self.nu_m),
            ("grass_a", self.grass_a),
            ("grass_b", self.grass_b),
            ("fr_clamp", self.fr_clamp),
            ("h_cut", self.h_cut),
            ("h_reg", self.h_reg),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(SolverError::config(
                    format!("params.{key}"),
                    "must be finite",
                ));
            }
        }
        let check = |ok: bool, key: &str, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(SolverError::config(
                    format!("params.{key}"),
                    what.to_string(),
                ))
            }
        };
        check(self.rho_w > 0.0, "rho_w", "must be positive")?;
        check(self.rho_s > self.rho_w, "rho_s", "must exceed rho_w")?;
        check(self.g > 0.0, "g", "must be positive")?;
        check(self.p > 0.0 && self.p < 1.0, "p", "must lie in (0, 1)")?;
        check(self.n >= 0.0, "n", "must be non-negative")?;
        check(self.d50 > 0.0, "d50", "must be positive")?;
        check(self.nu > 0.0, "nu", "must be positive")?;
        check(self.phi_e >= 0.0, "phi_e", "must be non-negative")?;
        check(self.m >= 0.0, "m", "must be non-negative")?;
        check(self.kappa > 0.0, "kappa", "must be positive")?;
        check(self.nu_m >= 0.0, "nu_m", "must be non-negative")?;
        check(self.grass_a >= 0.0, "grass_a", "must be non-negative")?;
        check(self.grass_b >= 0.0, "grass_b", "must be non-negative")?;
        check(self.fr_clamp > 0.0, "fr_clamp", "must be positive")?;
        check(self.h_cut > 0.0, "h_cut", "must be positive")?;
        check(self.h_reg >= 0.0, "h_reg", "must be non-negative")?;
        Ok(())
    }

    #[inline]
    pub fn dry(&self) -> DryTolerance {
        DryTolerance {
            h_cut: self.h_cut,
            h_reg: self.h_reg,
        }
    }

    /// Submerged specific gravity `rho_s / rho_w - 1`.
    #[inline]
    pub fn submerged_gravity(&self) -> f64 {
        self.rho_s / self.rho_w - 1.0
    }

    #[inline]
    pub fn delta_rho(&self) -> f64 {
        self.rho_s - self.rho_w
    }
}

/// Mixture density for a volumetric concentration `c` in `[0, 1]`.
#[inline]
pub fn mixture_density(c: f64, params: &PhysParams) -> f64 {
    debug_assert!((0.0..=1.0).contains(&c), "concentration {c} outside [0, 1]");
    params.rho_w * (1.0 - c) + params.rho_s * c
}

/// Physical flux along `axis`. The bed component is always zero.
#[inline]
pub fn flux(w: &ConservedState, axis: Axis, params: &PhysParams) -> Vec5 {
    flux_with(w, &w.regularized(params.dry()), axis, params)
}

/// [`flux`] with the regularized primitives of `w` already at hand.
#[inline]
pub fn flux_with(w: &ConservedState, pr: &Primitives, axis: Axis, params: &PhysParams) -> Vec5 {
    let pressure = 0.5 * params.g * w.h * w.h;
    match axis {
        Axis::X => [w.hu, w.hu * pr.u + pressure, w.hu * pr.v, w.hu * pr.c, 0.0],
        Axis::Y => [w.hv, w.hv * pr.u, w.hv * pr.v + pressure, w.hv * pr.c, 0.0],
    }
}

/// Coefficient vectors of the nonconservative products along one axis:
/// `zb` multiplies the bed gradient, `hc` the gradient of `hC`, `h` the depth
/// gradient.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NonconsVectors {
    pub zb: Vec5,
    pub hc: Vec5,
    pub h: Vec5,
}

/// Nonconservative coefficient vectors in x and y.
pub fn noncons_vectors(w: &ConservedState, params: &PhysParams) -> [NonconsVectors; 2] {
    let pr = w.regularized(params.dry());
    let ub = bed_celerity(w, params).velocity;
    let gh = params.g * w.h;
    let coupling = gh * params.delta_rho() / (2.0 * mixture_density(pr.c, params));
    let mut out = [NonconsVectors::default(); 2];
    for (axis, vecs) in [Axis::X, Axis::Y].into_iter().zip(out.iter_mut()) {
        let m = axis.normal_momentum();
        vecs.zb[m] = gh;
        vecs.zb[ZB] = match axis {
            Axis::X => ub[0],
            Axis::Y => ub[1],
        };
        vecs.hc[m] = coupling;
        vecs.h[m] = -coupling * pr.c;
    }
    out
}

/// Quasi-linear matrix `A = dF/dW + B` along `axis`, with rows and columns
/// ordered as `(h, hu, hv, hC, Zb)`.
pub fn quasi_linear_matrix(w: &ConservedState, axis: Axis, params: &PhysParams) -> [[f64; 5]; 5] {
    let pr = w.regularized(params.dry());
    let (u, v, c) = (pr.u, pr.v, pr.c);
    let gh = params.g * w.h;
    let delta = params.delta_rho() / (2.0 * mixture_density(c, params));
    let ub = bed_celerity(w, params).velocity;
    match axis {
        Axis::X => [
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [-u * u + gh - delta * gh * c, 2.0 * u, 0.0, delta * gh, gh],
            [-u * v, v, u, 0.0, 0.0],
            [-u * c, c, 0.0, u, 0.0],
            [0.0, 0.0, 0.0, 0.0, ub[0]],
        ],
        Axis::Y => [
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [-u * v, v, u, 0.0, 0.0],
            [-v * v + gh - delta * gh * c, 0.0, 2.0 * v, delta * gh, gh],
            [-v * c, 0.0, c, v, 0.0],
            [0.0, 0.0, 0.0, 0.0, ub[1]],
        ],
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvalues {
    /// `{u_b.n, u.n, u.n, u.n - sqrt(gh), u.n + sqrt(gh)}`.
    pub values: Vec5,
    /// True near the resonance hypersurface `(u.n - u_b.n)^2 = gh`.
    pub resonant: bool,
}

/// Eigenvalues of the quasi-linear system in direction `normal` (unit vector).
pub fn eigenvalues(
    w: &ConservedState,
    normal: [f64; 2],
    params: &PhysParams,
) -> Result<Eigenvalues> {
    if w.h < 0.0 || !w.h.is_finite() {
        return Err(SolverError::Contract(format!(
            "eigenvalues requested for depth {}",
            w.h
        )));
    }
    let pr = w.regularized(params.dry());
    let un = pr.u * normal[0] + pr.v * normal[1];
    let ub = bed_celerity(w, params).velocity;
    let ubn = ub[0] * normal[0] + ub[1] * normal[1];
    let gh = params.g * w.h;
    let c = gh.sqrt();
    let rel = un - ubn;
    Ok(Eigenvalues {
        values: [ubn, un, un, un - c, un + c],
        resonant: (rel * rel - gh).abs() < params.fr_clamp * gh,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BedCelerity {
    pub velocity: [f64; 2],
    /// The `1/(1 - Fr^2)` factor hit the resonance guard.
    pub clamped: bool,
}

/// Characteristic advection velocity of the bed.
///
/// `u_b = 1/(1-p) * dQ_b/dh * 1/(1 - Fr^2) * u/|u|` with `Q_b = a |u|^b` and
/// the depth derivative taken at fixed discharge, `dQ_b/dh = -b a |u|^b / h`.
#[inline]
pub fn bed_celerity(w: &ConservedState, params: &PhysParams) -> BedCelerity {
    if w.h <= params.h_cut {
        return BedCelerity::default();
    }
    bed_celerity_with(w, &w.regularized(params.dry()), params)
}

/// [`bed_celerity`] with the regularized primitives of `w` already at hand.
#[inline]
pub fn bed_celerity_with(w: &ConservedState, pr: &Primitives, params: &PhysParams) -> BedCelerity {
    if w.h <= params.h_cut {
        return BedCelerity::default();
    }
    let speed = pr.speed();
    if speed == 0.0 {
        return BedCelerity::default();
    }
    let dqb_dh = -params.grass_b * params.grass_a * pow_fast(speed, params.grass_b) / w.h;
    let fr2 = speed * speed / (params.g * w.h);
    let mut denom = 1.0 - fr2;
    let clamped = denom.abs() < params.fr_clamp;
    if clamped {
        denom = if denom < 0.0 {
            -params.fr_clamp
        } else {
            params.fr_clamp
        };
    }
    // magnitude over speed, so the components are one product each
    let scale = dqb_dh / ((1.0 - params.p) * denom * speed);
    BedCelerity {
        velocity: [scale * pr.u, scale * pr.v],
        clamped,
    }
}

/// `x^e`, by repeated multiplication when `e` is a small whole number.
#[inline]
pub fn pow_fast(x: f64, e: f64) -> f64 {
    let n = e as i32;
    if (0..=8).contains(&n) && n as f64 == e {
        let mut p = 1.0;
        for _ in 0..n {
            p *= x;
        }
        p
    } else {
        x.powf(e)
    }
}

/// Manning friction coefficient `n^2 g h^{-1/3}` with `h` floored at `h_cut`.
#[inline]
pub fn friction_coefficient(h: f64, params: &PhysParams) -> f64 {
    params.n * params.n * params.g / h.max(params.h_cut).cbrt()
}

/// Settling velocity of the median grain.
pub fn settling_velocity(params: &PhysParams) -> f64 {
    let visc = 13.95 * params.nu / params.d50;
    let s = params.submerged_gravity();
    (visc * visc + 1.09 * s * params.g * params.d50).sqrt() - visc
}

/// Dimensionless grain size `d50 (s g / nu^2)^{1/3}`.
pub fn dimensionless_grain_size(params: &PhysParams) -> f64 {
    let s = params.submerged_gravity();
    params.d50 * (s * params.g / (params.nu * params.nu)).cbrt()
}

/// Critical Shields number as a function of the dimensionless grain size.
pub fn critical_shields(d_star: f64) -> f64 {
    0.3 / (1.0 + 1.2 * d_star) + 0.055 * (1.0 - (-0.02 * d_star).exp())
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SedimentClosures {
    pub u_star: f64,
    pub theta: f64,
    pub theta_cr: f64,
    pub d_star: f64,
    pub w_s: f64,
    pub f_s: f64,
    pub rouse_z: f64,
    pub c_a: f64,
    pub erosion: f64,
    pub deposition: f64,
    pub s: f64,
}

impl SedimentClosures {
    /// Net exchange `E - D`.
    #[inline]
    pub fn net_exchange(&self) -> f64 {
        self.erosion - self.deposition
    }
}

/// Grain-size dependent closure terms that do not depend on the local flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrainConstants {
    pub s: f64,
    pub d_star: f64,
    pub theta_cr: f64,
    pub w_s: f64,
    pub d50_pow: f64,
}

impl GrainConstants {
    pub fn new(params: &PhysParams) -> Self {
        let d_star = dimensionless_grain_size(params);
        GrainConstants {
            s: params.submerged_gravity(),
            d_star,
            theta_cr: critical_shields(d_star),
            w_s: settling_velocity(params),
            d50_pow: params.d50.powf(-0.2),
        }
    }
}

/// Erosion, deposition and transport-mode closures at one state.
pub fn sediment_closures(w: &ConservedState, params: &PhysParams) -> SedimentClosures {
    sediment_closures_with(w, params, &GrainConstants::new(params))
}

/// As [`sediment_closures`], reusing precomputed grain constants.
#[inline]
pub fn sediment_closures_with(
    w: &ConservedState,
    params: &PhysParams,
    grain: &GrainConstants,
) -> SedimentClosures {
    let mut out = SedimentClosures {
        d_star: grain.d_star,
        theta_cr: grain.theta_cr,
        w_s: grain.w_s,
        s: grain.s,
        f_s: 1.0,
        rouse_z: f64::INFINITY,
        ..Default::default()
    };
    if w.h <= params.h_cut {
        out.f_s = match params.fs_at_rest {
            FsAtRest::One => 1.0,
            FsAtRest::Zero => 0.0,
        };
        return out;
    }
    let pr = w.regularized(params.dry());
    let speed = pr.speed();
    let cf = friction_coefficient(w.h, params);
    out.u_star = (cf * speed * speed).sqrt();
    out.theta = out.u_star * out.u_star / (params.g * grain.s * params.d50);
    if out.u_star > 0.0 {
        out.rouse_z = grain.w_s / (params.kappa * out.u_star);
        out.f_s = (2.5 * (-out.rouse_z).exp()).min(1.0);
    } else {
        out.f_s = match params.fs_at_rest {
            FsAtRest::One => 1.0,
            FsAtRest::Zero => 0.0,
        };
    }
    // alpha_c C = min(2, (1 - p)/C) C = min(2C, 1 - p)
    out.c_a = (2.0 * pr.c).min(1.0 - params.p).max(0.0);
    if out.theta >= grain.theta_cr {
        out.erosion = params.phi_e * (out.theta - grain.theta_cr) * speed * grain.d50_pow / w.h;
    }
    out.deposition = grain.w_s * pow_fast(1.0 - out.c_a, params.m) * out.c_a;
    out
}

/// Depth-integrated mechanical energy density `h|u|^2/2 + g h^2/2 + g h Zb`.
#[inline]
pub fn energy_density(w: &ConservedState, params: &PhysParams) -> f64 {
    let pr = w.regularized(params.dry());
    0.5 * w.h * (pr.u * pr.u + pr.v * pr.v) + 0.5 * params.g * w.h * w.h + params.g * w.h * w.zb
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_params() -> PhysParams {
        PhysParams::default()
    }

    #[test]
    fn density_end_members_and_midpoint() {
        let p = reference_params();
        assert_eq!(mixture_density(0.0, &p), 1000.0);
        assert_eq!(mixture_density(1.0, &p), 2650.0);
        assert_relative_eq!(mixture_density(0.5, &p), 1825.0);
    }

    #[test]
    #[cfg(debug_assertions)]
    #[should_panic]
    fn density_rejects_out_of_range() {
        mixture_density(1.5, &reference_params());
    }

    #[test]
    fn flux_examples() {
        let p = reference_params();
        let still = ConservedState::from_primitives(1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(flux(&still, Axis::X, &p), [0.0, 4.9, 0.0, 0.0, 0.0]);

        let w = ConservedState::from_primitives(2.0, 1.0, 0.5, 0.01, 0.3);
        let fx = flux(&w, Axis::X, &p);
        let expect = [2.0, 21.6, 1.0, 0.02, 0.0];
        for (a, b) in fx.iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
        let fy = flux(&w, Axis::Y, &p);
        let expect = [1.0, 1.0, 20.1, 0.01, 0.0];
        for (a, b) in fy.iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
    }

    #[test]
    fn noncons_vector_examples() {
        let p = reference_params();
        let dry = ConservedState::from_primitives(0.0, 0.0, 0.0, 0.0, 1.0);
        for v in noncons_vectors(&dry, &p) {
            assert!(v.zb.iter().chain(&v.hc).chain(&v.h).all(|&x| x == 0.0));
        }

        let w = ConservedState::from_primitives(1.0, 0.0, 0.0, 0.1, 0.0);
        let [x, y] = noncons_vectors(&w, &p);
        assert_relative_eq!(
            x.hc[HU],
            9.8 * 1650.0 / (2.0 * 1165.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(x.hc[HU], 6.93991, epsilon = 1e-5);
        assert_eq!(x.hc[HV], 0.0);
        assert_relative_eq!(y.hc[HV], x.hc[HU]);
        assert_relative_eq!(x.zb[HU], 9.8);

        let w = ConservedState::from_primitives(1.0, 0.0, 0.0, 0.0, 0.0);
        let [x, _] = noncons_vectors(&w, &p);
        assert_relative_eq!(x.hc[HU], 8.085, max_relative = 1e-14);
        assert_eq!(x.h[HU], 0.0);
    }

    #[test]
    fn eigenvalue_examples() {
        let mut p = reference_params();
        let still = ConservedState::from_primitives(1.0, 0.0, 0.0, 0.0, 0.0);
        let e = eigenvalues(&still, [1.0, 0.0], &p).unwrap();
        let c = 9.8f64.sqrt();
        assert_eq!(e.values, [0.0, 0.0, 0.0, -c, c]);
        assert_relative_eq!(c, 3.130495, epsilon = 1e-6);

        // u = 0.5 with a bedload law tuned to give u_b = 0.2 exactly:
        // u_b = (1/(1-p)) * (-b a |u|^b / h) / (1 - Fr^2)
        let w = ConservedState::from_primitives(1.0, 0.5, 0.0, 0.0, 0.0);
        let fr2 = 0.25 / 9.8;
        p.grass_b = 1.0;
        p.grass_a = -0.2 * (1.0 - p.p) * (1.0 - fr2) / 0.5;
        let e = eigenvalues(&w, [1.0, 0.0], &p).unwrap();
        assert_relative_eq!(e.values[0], 0.2, max_relative = 1e-12);
        assert_eq!(e.values[1], 0.5);
        assert_relative_eq!(e.values[3], -2.630495, epsilon = 1e-6);
        assert_relative_eq!(e.values[4], 3.630495, epsilon = 1e-6);

        assert!(eigenvalues(
            &ConservedState::new(-1.0, 0.0, 0.0, 0.0, 0.0),
            [1.0, 0.0],
            &p
        )
        .is_err());
    }

    #[test]
    fn resonance_flag_on_hypersurface() {
        // with a = 0 the bed celerity vanishes and resonance is u^2 = gh
        let p = PhysParams {
            grass_a: 0.0,
            ..reference_params()
        };
        let h = 0.7;
        let u = (p.g * h).sqrt();
        let w = ConservedState::from_primitives(h, u, 0.0, 0.0, 0.0);
        assert!(eigenvalues(&w, [1.0, 0.0], &p).unwrap().resonant);
        let w = ConservedState::from_primitives(h, 0.5 * u, 0.0, 0.0, 0.0);
        assert!(!eigenvalues(&w, [1.0, 0.0], &p).unwrap().resonant);
    }

    #[test]
    fn bed_celerity_examples() {
        let p = reference_params();
        let rest = ConservedState::from_primitives(1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(bed_celerity(&rest, &p).velocity, [0.0, 0.0]);

        let w = ConservedState::new(1.0, 1.0, 0.0, 0.0, 0.0);
        let ub = bed_celerity(&w, &p);
        let expect = (1.0 / 0.6) * (-0.003) / (1.0 - 1.0 / 9.8);
        assert_relative_eq!(ub.velocity[0], expect, max_relative = 1e-14);
        assert_relative_eq!(ub.velocity[0], -0.005568, epsilon = 1e-6);
        assert_eq!(ub.velocity[1], 0.0);
        assert!(!ub.clamped);
    }

    #[test]
    fn bed_celerity_matches_finite_difference_of_bedload() {
        // dQ_b/dh at fixed q, by central differences of Q_b(h) = a |q/h|^b
        let p = reference_params();
        let (h, q) = (1.0f64, 1.0f64);
        let qb = |h: f64| p.grass_a * (q / h).abs().powf(p.grass_b);
        let eps = 1e-6;
        let dqb = (qb(h + eps) - qb(h - eps)) / (2.0 * eps);
        assert_relative_eq!(dqb, -0.003, max_relative = 1e-8);
        let fr2 = q * q / (h * h) / (p.g * h);
        let oracle = dqb / ((1.0 - p.p) * (1.0 - fr2));
        let ub = bed_celerity(&ConservedState::new(h, q, 0.0, 0.0, 0.0), &p);
        assert_relative_eq!(ub.velocity[0], oracle, max_relative = 1e-8);
    }

    #[test]
    fn bed_celerity_clamps_at_resonance() {
        let p = reference_params();
        let h = 1.0;
        let u = (p.g * h).sqrt();
        let w = ConservedState::from_primitives(h, u, 0.0, 0.0, 0.0);
        let ub = bed_celerity(&w, &p);
        assert!(ub.clamped);
        assert!(ub.velocity[0].is_finite());
        let expect = -p.grass_b * p.grass_a * u.powf(p.grass_b) / h / ((1.0 - p.p) * p.fr_clamp);
        assert_relative_eq!(ub.velocity[0].abs(), expect.abs(), max_relative = 1e-6);
    }

    #[test]
    fn closure_reference_values() {
        let p = PhysParams {
            nu: 1.2e-6,
            ..reference_params()
        };
        assert_relative_eq!(p.submerged_gravity(), 1.65, max_relative = 1e-14);
        let ws = settling_velocity(&p);
        assert_relative_eq!(ws, 0.117071, epsilon = 1e-6);
        // ws is the positive root of w^2 + 2 (13.95 nu/d) w - 1.09 s g d = 0
        let visc = 13.95 * p.nu / p.d50;
        assert!((ws * ws + 2.0 * visc * ws - 1.09 * 1.65 * 9.8 * 0.001).abs() < 1e-14);

        let d_star = dimensionless_grain_size(&p);
        assert_relative_eq!(d_star, 22.39, epsilon = 5e-3);
        assert_relative_eq!(critical_shields(d_star), 0.03062, epsilon = 1e-5);
    }

    #[test]
    fn closures_at_rest_are_zero() {
        let p = reference_params();
        let w = ConservedState::from_primitives(1.0, 0.0, 0.0, 0.0, 0.0);
        let c = sediment_closures(&w, &p);
        assert_eq!(c.erosion, 0.0);
        assert_eq!(c.deposition, 0.0);
        assert_eq!(c.u_star, 0.0);
        assert_eq!(c.f_s, 1.0);
        let zero = PhysParams {
            fs_at_rest: FsAtRest::Zero,
            ..p
        };
        assert_eq!(sediment_closures(&w, &zero).f_s, 0.0);
    }

    #[test]
    fn dry_cells_have_no_exchange() {
        let p = reference_params();
        let w = ConservedState::new(1e-12, 1e-12, 0.0, 1e-13, 0.0);
        let c = sediment_closures(&w, &p);
        assert_eq!(c.erosion, 0.0);
        assert_eq!(c.deposition, 0.0);
    }

    #[test]
    fn near_bed_concentration_saturates() {
        let p = reference_params();
        let low = sediment_closures(
            &ConservedState::from_primitives(1.0, 0.0, 0.0, 0.1, 0.0),
            &p,
        );
        assert_relative_eq!(low.c_a, 0.2);
        let high = sediment_closures(
            &ConservedState::from_primitives(1.0, 0.0, 0.0, 0.5, 0.0),
            &p,
        );
        assert_relative_eq!(high.c_a, 0.6);
        assert!(high.deposition > 0.0);
    }

    #[test]
    fn friction_examples() {
        let p = reference_params();
        assert_relative_eq!(
            friction_coefficient(1.0, &p),
            0.0076832,
            max_relative = 1e-12
        );
        let frictionless = PhysParams { n: 0.0, ..p };
        assert_eq!(friction_coefficient(1.0, &frictionless), 0.0);
        assert_eq!(
            friction_coefficient(1e-20, &p),
            friction_coefficient(p.h_cut, &p)
        );
    }

    #[test]
    fn energy_of_still_water() {
        let p = reference_params();
        let w = ConservedState::from_primitives(1.0, 0.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(energy_density(&w, &p), 4.9);
        assert_eq!(energy_density(&ConservedState::default(), &p), 0.0);
    }
}
