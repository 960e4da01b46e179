//! Uniform structured mesh with ghost layers.
//!
//! Interior cells are indexed by `(i, k)` with `0 <= i < nx` and `0 <= k < ny`;
//! ghost cells use negative indices or indices past the interior range, up to
//! `ghost_width` layers on every side. Storage is row-major over `(k, i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};

/// Default number of ghost layers; the second-order stencil needs two.
pub const GHOST_WIDTH: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub ghost_width: usize,
}

impl Grid2D {
    pub fn new(bounds: [f64; 4], nx: usize, ny: usize, ghost_width: usize) -> Result<Self> {
        let [x_min, x_max, y_min, y_max] = bounds;
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(SolverError::config("domain", "bounds must be finite"));
        }
        if x_max <= x_min || y_max <= y_min {
            return Err(SolverError::config(
                "domain",
                format!("non-positive extent [{x_min}, {x_max}] x [{y_min}, {y_max}]"),
            ));
        }
        if nx == 0 || ny == 0 {
            return Err(SolverError::config(
                "nx/ny",
                "cell counts must be at least 1",
            ));
        }
        if ghost_width < 2 {
            return Err(SolverError::config(
                "ghost_width",
                "at least two ghost layers are required",
            ));
        }
        Ok(Grid2D {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            dx: (x_max - x_min) / nx as f64,
            dy: (y_max - y_min) / ny as f64,
            ghost_width,
        })
    }

    /// Center of cell `(i, k)`; valid for ghost indices too.
    #[inline]
    pub fn center(&self, i: isize, k: isize) -> (f64, f64) {
        (
            self.x_min + (i as f64 + 0.5) * self.dx,
            self.y_min + (k as f64 + 0.5) * self.dy,
        )
    }

    #[inline]
    pub fn x_face(&self, i: isize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    #[inline]
    pub fn y_face(&self, k: isize) -> f64 {
        self.y_min + k as f64 * self.dy
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn interior_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Row stride of the ghost-padded storage.
    #[inline]
    pub fn stride(&self) -> usize {
        self.nx + 2 * self.ghost_width
    }

    #[inline]
    pub fn padded_rows(&self) -> usize {
        self.ny + 2 * self.ghost_width
    }

    #[inline]
    pub fn padded_len(&self) -> usize {
        self.stride() * self.padded_rows()
    }

    /// Linear storage index of `(i, k)`, ghost indices included.
    #[inline]
    pub fn index(&self, i: isize, k: isize) -> usize {
        let g = self.ghost_width as isize;
        debug_assert!(i >= -g && i < self.nx as isize + g, "i = {i} out of range");
        debug_assert!(k >= -g && k < self.ny as isize + g, "k = {k} out of range");
        ((k + g) as usize) * self.stride() + (i + g) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// Zero-order extrapolation.
    Outflow,
    /// Solid wall; the wall-normal momentum is odd across the wall.
    Reflective,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub bottom: BoundaryKind,
    pub top: BoundaryKind,
}

impl BoundarySpec {
    pub fn uniform(kind: BoundaryKind) -> Self {
        BoundarySpec {
            left: kind,
            right: kind,
            bottom: kind,
            top: kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use BoundaryKind::Periodic;
        if (self.left == Periodic) != (self.right == Periodic) {
            return Err(SolverError::config(
                "boundary",
                "periodic must be set on both x-sides",
            ));
        }
        if (self.bottom == Periodic) != (self.top == Periodic) {
            return Err(SolverError::config(
                "boundary",
                "periodic must be set on both y-sides",
            ));
        }
        Ok(())
    }
}

impl Default for BoundarySpec {
    fn default() -> Self {
        BoundarySpec::uniform(BoundaryKind::Outflow)
    }
}

/// Sign behaviour of a component under reflection at a wall.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Parity {
    /// Flip sign across left/right walls (x-momentum).
    pub odd_x: bool,
    /// Flip sign across bottom/top walls (y-momentum).
    pub odd_y: bool,
}

impl Parity {
    pub const EVEN: Parity = Parity {
        odd_x: false,
        odd_y: false,
    };
    pub const ODD_X: Parity = Parity {
        odd_x: true,
        odd_y: false,
    };
    pub const ODD_Y: Parity = Parity {
        odd_x: false,
        odd_y: true,
    };
}

/// One scalar per cell, ghost cells included.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    data: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: &Grid2D) -> Self {
        Field2D {
            grid: *grid,
            data: vec![0.0; grid.padded_len()],
        }
    }

    pub fn constant(grid: &Grid2D, value: f64) -> Self {
        Field2D {
            grid: *grid,
            data: vec![value; grid.padded_len()],
        }
    }

    /// Builds a field by evaluating `f` at every interior cell center; ghosts are zero.
    pub fn from_fn(grid: &Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut field = Field2D::zeros(grid);
        for k in 0..grid.ny as isize {
            for i in 0..grid.nx as isize {
                let (x, y) = grid.center(i, k);
                field[(i, k)] = f(x, y);
            }
        }
        field
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Interior values in row-major `(k, i)` order.
    pub fn interior(&self) -> impl Iterator<Item = f64> + '_ {
        let g = &self.grid;
        (0..g.ny as isize)
            .flat_map(move |k| (0..g.nx as isize).map(move |i| self.data[g.index(i, k)]))
    }

    pub fn interior_vec(&self) -> Vec<f64> {
        self.interior().collect()
    }

    pub fn interior_min(&self) -> f64 {
        self.interior().fold(f64::INFINITY, f64::min)
    }

    pub fn interior_max(&self) -> f64 {
        self.interior().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sets ghost values according to `spec`.
    ///
    /// The x-ghosts of every interior row are filled first, then whole ghost
    /// rows are filled in y, so corner cells are consistent with both sides.
    pub fn fill_ghosts(&mut self, spec: &BoundarySpec, parity: Parity) {
        let g = self.grid;
        let gw = g.ghost_width as isize;
        let nx = g.nx as isize;
        let ny = g.ny as isize;
        let sx = if parity.odd_x { -1.0 } else { 1.0 };
        let sy = if parity.odd_y { -1.0 } else { 1.0 };

        for k in 0..ny {
            for j in 0..gw {
                let ghost = -1 - j;
                self.data[g.index(ghost, k)] = match spec.left {
                    BoundaryKind::Outflow => self.data[g.index(0, k)],
                    BoundaryKind::Reflective => sx * self.data[g.index(j.min(nx - 1), k)],
                    BoundaryKind::Periodic => self.data[g.index((ghost).rem_euclid(nx), k)],
                };
                let ghost = nx + j;
                self.data[g.index(ghost, k)] = match spec.right {
                    BoundaryKind::Outflow => self.data[g.index(nx - 1, k)],
                    BoundaryKind::Reflective => sx * self.data[g.index((nx - 1 - j).max(0), k)],
                    BoundaryKind::Periodic => self.data[g.index(ghost.rem_euclid(nx), k)],
                };
            }
        }

        for j in 0..gw {
            for i in -gw..nx + gw {
                let ghost = -1 - j;
                self.data[g.index(i, ghost)] = match spec.bottom {
                    BoundaryKind::Outflow => self.data[g.index(i, 0)],
                    BoundaryKind::Reflective => sy * self.data[g.index(i, j.min(ny - 1))],
                    BoundaryKind::Periodic => self.data[g.index(i, ghost.rem_euclid(ny))],
                };
                let ghost = ny + j;
                self.data[g.index(i, ghost)] = match spec.top {
                    BoundaryKind::Outflow => self.data[g.index(i, ny - 1)],
                    BoundaryKind::Reflective => sy * self.data[g.index(i, (ny - 1 - j).max(0))],
                    BoundaryKind::Periodic => self.data[g.index(i, ghost.rem_euclid(ny))],
                };
            }
        }
    }
}

impl std::ops::Index<(isize, isize)> for Field2D {
    type Output = f64;

    #[inline]
    fn index(&self, (i, k): (isize, isize)) -> &f64 {
        &self.data[self.grid.index(i, k)]
    }
}

impl std::ops::IndexMut<(isize, isize)> for Field2D {
    #[inline]
    fn index_mut(&mut self, (i, k): (isize, isize)) -> &mut f64 {
        let idx = self.grid.index(i, k);
        &mut self.data[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_square_spacing() {
        let g = Grid2D::new([-1.0, 1.0, -1.0, 1.0], 400, 400, 2).unwrap();
        assert_relative_eq!(g.dx, 0.005, max_relative = 1e-15);
        assert_relative_eq!(g.dy, 0.005, max_relative = 1e-15);

        let g = Grid2D::new([-1.25, 1.25, 0.0, 1.0], 100, 1, 2).unwrap();
        assert_relative_eq!(g.dx, 0.025, max_relative = 1e-15);
    }

    #[test]
    fn single_cell_center() {
        let g = Grid2D::new([0.0, 1.0, 0.0, 1.0], 1, 1, 2).unwrap();
        assert_eq!(g.center(0, 0), (0.5, 0.5));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid2D::new([1.0, 0.0, 0.0, 1.0], 4, 4, 2).is_err());
        assert!(Grid2D::new([0.0, 1.0, 0.0, 0.0], 4, 4, 2).is_err());
        assert!(Grid2D::new([0.0, 1.0, 0.0, 1.0], 0, 4, 2).is_err());
        assert!(Grid2D::new([0.0, 1.0, 0.0, 1.0], 4, 4, 1).is_err());
    }

    #[test]
    fn area_sums_to_domain() {
        let g = Grid2D::new([-0.3, 1.7, 2.0, 2.9], 37, 11, 2).unwrap();
        let total: f64 = (0..g.interior_cells()).map(|_| g.cell_area()).sum();
        assert_relative_eq!(total, 2.0 * 0.9, max_relative = 1e-13);
    }

    #[test]
    fn periodic_must_be_pairwise() {
        let mut spec = BoundarySpec::default();
        spec.left = BoundaryKind::Periodic;
        assert!(spec.validate().is_err());
        spec.right = BoundaryKind::Periodic;
        assert!(spec.validate().is_ok());
        spec.top = BoundaryKind::Periodic;
        assert!(spec.validate().is_err());
    }

    fn row(values: &[f64]) -> Field2D {
        let g = Grid2D::new([0.0, 1.0, 0.0, 1.0], values.len(), 1, 2).unwrap();
        let mut f = Field2D::zeros(&g);
        for (i, v) in values.iter().enumerate() {
            f[(i as isize, 0)] = *v;
        }
        f
    }

    #[test]
    fn outflow_copies_nearest_interior() {
        let mut f = row(&[1.0, 2.0, 3.0]);
        f.fill_ghosts(&BoundarySpec::default(), Parity::EVEN);
        assert_eq!([f[(-2, 0)], f[(-1, 0)]], [1.0, 1.0]);
        assert_eq!([f[(3, 0)], f[(4, 0)]], [3.0, 3.0]);
        // corners follow the y-extension of the x-ghosts
        assert_eq!(f[(-2, -2)], 1.0);
        assert_eq!(f[(4, 1)], 3.0);
    }

    #[test]
    fn constant_field_extends_constant() {
        let g = Grid2D::new([0.0, 1.0, 0.0, 1.0], 5, 4, 2).unwrap();
        let mut f = Field2D::from_fn(&g, |_, _| 7.5);
        f.fill_ghosts(&BoundarySpec::default(), Parity::EVEN);
        assert!(f.as_slice().iter().all(|&v| v == 7.5));
    }

    #[test]
    fn reflective_wall_flips_normal_momentum() {
        let mut f = row(&[5.0]);
        f.fill_ghosts(
            &BoundarySpec::uniform(BoundaryKind::Reflective),
            Parity::ODD_X,
        );
        assert_eq!(f[(-1, 0)], -5.0);
        assert_eq!(f[(1, 0)], -5.0);
        // tangential walls leave it even
        assert_eq!(f[(0, -1)], 5.0);

        let mut f = row(&[1.0, 2.0, 3.0]);
        f.fill_ghosts(
            &BoundarySpec::uniform(BoundaryKind::Reflective),
            Parity::ODD_X,
        );
        assert_eq!([f[(-2, 0)], f[(-1, 0)]], [-2.0, -1.0]);
        assert_eq!([f[(3, 0)], f[(4, 0)]], [-3.0, -2.0]);
    }

    fn random_field(nx: usize, ny: usize, seed: &[f64]) -> Field2D {
        let g = Grid2D::new([0.0, 1.0, 0.0, 2.0], nx, ny, 2).unwrap();
        let mut f = Field2D::zeros(&g);
        let mut n = 0;
        for k in 0..ny as isize {
            for i in 0..nx as isize {
                f[(i, k)] = seed[n % seed.len()] + n as f64 * 0.01;
                n += 1;
            }
        }
        f
    }

    fn kinds() -> impl Strategy<Value = BoundarySpec> {
        let side = prop_oneof![Just(BoundaryKind::Outflow), Just(BoundaryKind::Reflective)];
        (
            side.clone(),
            side.clone(),
            side.clone(),
            side,
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(|(l, r, b, t, px, py)| {
                let mut s = BoundarySpec {
                    left: l,
                    right: r,
                    bottom: b,
                    top: t,
                };
                if px {
                    s.left = BoundaryKind::Periodic;
                    s.right = BoundaryKind::Periodic;
                }
                if py {
                    s.bottom = BoundaryKind::Periodic;
                    s.top = BoundaryKind::Periodic;
                }
                s
            })
    }

    proptest! {
        #[test]
        fn fill_ghosts_is_idempotent(
            nx in 1usize..7, ny in 1usize..7,
            seed in prop::collection::vec(-5.0f64..5.0, 1..20),
            spec in kinds(), odd_x in any::<bool>(), odd_y in any::<bool>(),
        ) {
            let parity = Parity { odd_x, odd_y };
            let mut once = random_field(nx, ny, &seed);
            once.fill_ghosts(&spec, parity);
            let mut twice = once.clone();
            twice.fill_ghosts(&spec, parity);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn periodic_ghosts_are_shifted_copies(
            nx in 1usize..7, ny in 1usize..7,
            seed in prop::collection::vec(-5.0f64..5.0, 1..20),
        ) {
            let mut f = random_field(nx, ny, &seed);
            f.fill_ghosts(&BoundarySpec::uniform(BoundaryKind::Periodic), Parity::EVEN);
            let (nx, ny) = (nx as isize, ny as isize);
            for k in -2..ny + 2 {
                for i in -2..nx + 2 {
                    prop_assert_eq!(f[(i, k)], f[(i.rem_euclid(nx), k.rem_euclid(ny))]);
                }
            }
        }

        #[test]
        fn centers_strictly_increase(nx in 1usize..50, ny in 1usize..50) {
            let g = Grid2D::new([-1.0, 3.0, 0.5, 0.75], nx, ny, 2).unwrap();
            for i in -2..nx as isize + 1 {
                prop_assert!(g.center(i + 1, 0).0 > g.center(i, 0).0);
            }
            for k in -2..ny as isize + 1 {
                prop_assert!(g.center(0, k + 1).1 > g.center(0, k).1);
            }
        }
    }
}
