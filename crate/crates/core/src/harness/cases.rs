//! Initial conditions of the built-in cases.

use crate::error::Result;
use crate::grid::Grid2D;
use crate::harness::config::{CaseConfig, CaseKind, PrimitiveState};
use crate::physics::ConservedState;
use crate::state::FlowState;

/// Gaussian bed bump shared by the c-property and bedmotion cases.
pub fn bump_bed(x: f64, y: f64) -> f64 {
    0.02 + 0.1 * (-(x - 0.5).powi(2) - (y - 0.5).powi(2)).exp()
}

/// Concentration blob of the c-property case, scaled to amplitude `a`.
pub fn c_blob(x: f64, y: f64, a: f64) -> f64 {
    a * (-5.0 * (x - 0.9).powi(2) - 50.0 * (y - 0.5).powi(2)).exp()
}

fn from_primitive(s: &PrimitiveState) -> ConservedState {
    ConservedState::from_primitives(s.h, s.u, s.v, s.c, s.zb)
}

/// Fraction of `[a, b]` covered by `[c, d]`, exactly 0 or 1 when it is
/// disjoint or fully covered.
fn covered(a: f64, b: f64, c: f64, d: f64) -> f64 {
    if c <= a && b <= d {
        1.0
    } else {
        ((b.min(d) - a.max(c)) / (b - a)).clamp(0.0, 1.0)
    }
}

/// Fraction of cell `(i, k)` inside the square `[-0.5, 0.5]^2`.
fn inner_fraction(grid: &Grid2D, i: isize, k: isize) -> f64 {
    covered(grid.x_face(i), grid.x_face(i + 1), -0.5, 0.5)
        * covered(grid.y_face(k), grid.y_face(k + 1), -0.5, 0.5)
}

fn mix(a: &ConservedState, b: &ConservedState, f: f64) -> ConservedState {
    if f == 0.0 {
        *a
    } else if f == 1.0 {
        *b
    } else {
        a.lerp(b, f)
    }
}

/// Builds the initial cell averages of the configured case.
///
/// Smooth data is sampled at cell centers; the riemann2d and custom
/// discontinuities are averaged exactly over the cells they cut.
pub fn init_case(cfg: &CaseConfig) -> Result<FlowState> {
    let grid = cfg.grid()?;
    let opts = &cfg.options;
    let state = match cfg.case {
        CaseKind::CProperty => FlowState::from_fn(&grid, |x, y| {
            let zb = bump_bed(x, y);
            let h = 2.0 - zb;
            ConservedState::from_primitives(h, 0.0, 0.0, c_blob(x, y, opts.c_blob), zb)
        }),
        CaseKind::Dambreak1d | CaseKind::Multigrain => FlowState::from_fn(&grid, |x, _| {
            let h = if x <= 0.0 { 0.1 } else { 0.0 };
            ConservedState::new(h, 0.0, 0.0, 0.0, 0.0)
        }),
        CaseKind::Bedmotion => FlowState::from_fn(&grid, |x, y| {
            let zb = bump_bed(x, y);
            ConservedState::from_primitives(1.0 - zb, 0.0, 0.0, opts.c0, zb)
        }),
        CaseKind::Riemann2d => {
            let mut s = FlowState::zeros(&grid);
            for k in 0..grid.ny as isize {
                for i in 0..grid.nx as isize {
                    let f = inner_fraction(&grid, i, k);
                    let level = 1.0 + f;
                    s.set(
                        i,
                        k,
                        ConservedState::from_primitives(level, 0.0, 0.0, opts.c0, level),
                    );
                }
            }
            s
        }
        CaseKind::Custom => {
            let (l, r) = (from_primitive(&opts.left), from_primitive(&opts.right));
            let mut s = FlowState::zeros(&grid);
            for k in 0..grid.ny as isize {
                for i in 0..grid.nx as isize {
                    let f = covered(
                        grid.x_face(i),
                        grid.x_face(i + 1),
                        f64::NEG_INFINITY,
                        opts.x_split,
                    );
                    s.set(i, k, mix(&r, &l, f));
                }
            }
            s
        }
    };
    Ok(state)
}
