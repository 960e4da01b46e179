//! Cell-average storage for the five conserved components.

use crate::grid::{BoundarySpec, Field2D, Grid2D, Parity};
use crate::physics::{energy_density, ConservedState, PhysParams};

/// Structure-of-arrays field of [`ConservedState`] values, ghosts included.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub h: Field2D,
    pub hu: Field2D,
    pub hv: Field2D,
    pub hc: Field2D,
    pub zb: Field2D,
}

impl FlowState {
    pub fn zeros(grid: &Grid2D) -> Self {
        FlowState {
            h: Field2D::zeros(grid),
            hu: Field2D::zeros(grid),
            hv: Field2D::zeros(grid),
            hc: Field2D::zeros(grid),
            zb: Field2D::zeros(grid),
        }
    }

    /// Evaluates `f` at every interior cell center.
    pub fn from_fn(grid: &Grid2D, mut f: impl FnMut(f64, f64) -> ConservedState) -> Self {
        let mut state = FlowState::zeros(grid);
        for k in 0..grid.ny as isize {
            for i in 0..grid.nx as isize {
                let (x, y) = grid.center(i, k);
                state.set(i, k, f(x, y));
            }
        }
        state
    }

    pub fn grid(&self) -> &Grid2D {
        self.h.grid()
    }

    #[inline]
    pub fn get(&self, i: isize, k: isize) -> ConservedState {
        let idx = self.grid().index(i, k);
        self.at(idx)
    }

    /// State at a raw storage index.
    #[inline]
    pub fn at(&self, idx: usize) -> ConservedState {
        ConservedState {
            h: self.h.as_slice()[idx],
            hu: self.hu.as_slice()[idx],
            hv: self.hv.as_slice()[idx],
            hc: self.hc.as_slice()[idx],
            zb: self.zb.as_slice()[idx],
        }
    }

    #[inline]
    pub fn set(&mut self, i: isize, k: isize, w: ConservedState) {
        self.h[(i, k)] = w.h;
        self.hu[(i, k)] = w.hu;
        self.hv[(i, k)] = w.hv;
        self.hc[(i, k)] = w.hc;
        self.zb[(i, k)] = w.zb;
    }

    pub fn fields(&self) -> [&Field2D; 5] {
        [&self.h, &self.hu, &self.hv, &self.hc, &self.zb]
    }

    pub fn fields_mut(&mut self) -> [&mut Field2D; 5] {
        [
            &mut self.h,
            &mut self.hu,
            &mut self.hv,
            &mut self.hc,
            &mut self.zb,
        ]
    }

    /// Applies the boundary conditions to every component; only the
    /// wall-normal momentum changes sign at reflective walls.
    pub fn fill_ghosts(&mut self, spec: &BoundarySpec) {
        self.h.fill_ghosts(spec, Parity::EVEN);
        self.hu.fill_ghosts(spec, Parity::ODD_X);
        self.hv.fill_ghosts(spec, Parity::ODD_Y);
        self.hc.fill_ghosts(spec, Parity::EVEN);
        self.zb.fill_ghosts(spec, Parity::EVEN);
    }

    /// Total mechanical energy `sum (h|u|^2/2 + g h^2/2 + g h Zb) dx dy`.
    pub fn energy(&self, params: &PhysParams) -> f64 {
        let g = self.grid();
        let mut total = 0.0;
        for k in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                total += energy_density(&self.get(i, k), params);
            }
        }
        total * g.cell_area()
    }

    /// Total water volume over the interior.
    pub fn volume(&self) -> f64 {
        self.h.interior().sum::<f64>() * self.grid().cell_area()
    }

    /// Free surface `h + Zb` over the interior, row-major.
    pub fn eta_interior(&self) -> Vec<f64> {
        self.h
            .interior()
            .zip(self.zb.interior())
            .map(|(h, z)| h + z)
            .collect()
    }
}

/// Total mechanical energy of a state field.
pub fn energy_diagnostic(state: &FlowState, params: &PhysParams) -> f64 {
    state.energy(params)
}
