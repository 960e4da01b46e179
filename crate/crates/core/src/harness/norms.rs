//! Discrete L1 differences, restriction and observed convergence rates.

use crate::error::{Result, SolverError};

/// Interior values of one scalar field on an `nx` by `ny` grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn new(nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != nx * ny {
            return Err(SolverError::Contract(format!(
                "{} values for a {nx}x{ny} field",
                values.len()
            )));
        }
        Ok(GridField { nx, ny, values })
    }

    #[inline]
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[k * self.nx + i]
    }
}

/// Mean absolute difference `(1 / (nx ny)) sum |a - b|`.
pub fn l1_diff(a: &GridField, b: &GridField) -> Result<f64> {
    if a.nx != b.nx || a.ny != b.ny {
        return Err(SolverError::Contract(format!(
            "cannot compare {}x{} with {}x{}",
            a.nx, a.ny, b.nx, b.ny
        )));
    }
    let sum: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .sum();
    Ok(sum / a.values.len() as f64)
}

/// Averages 2x2 blocks (2x1 when `ny == 1`) onto the next coarser grid.
pub fn restrict(fine: &GridField) -> Result<GridField> {
    let fy = if fine.ny == 1 { 1 } else { 2 };
    if !fine.nx.is_multiple_of(2) || !fine.ny.is_multiple_of(fy) {
        return Err(SolverError::Contract(format!(
            "{}x{} cannot be coarsened by 2",
            fine.nx, fine.ny
        )));
    }
    let (nx, ny) = (fine.nx / 2, fine.ny / fy);
    let mut values = Vec::with_capacity(nx * ny);
    for k in 0..ny {
        for i in 0..nx {
            let mut s = 0.0;
            for dk in 0..fy {
                for di in 0..2 {
                    s += fine.at(2 * i + di, fy * k + dk);
                }
            }
            values.push(s / (2 * fy) as f64);
        }
    }
    GridField::new(nx, ny, values)
}

/// `log2(e_coarse / e_fine)`; non-finite when either difference vanishes.
pub fn rate_from(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// Observed order from solutions at `N/4`, `N/2` and `N`.
pub fn convergence_rate(quarter: &GridField, half: &GridField, full: &GridField) -> Result<f64> {
    let e_coarse = l1_diff(&restrict(half)?, quarter)?;
    let e_fine = l1_diff(&restrict(full)?, half)?;
    Ok(rate_from(e_coarse, e_fine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn f(nx: usize, ny: usize, v: Vec<f64>) -> GridField {
        GridField::new(nx, ny, v).unwrap()
    }

    #[test]
    fn l1_examples() {
        let a = f(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(l1_diff(&a, &a).unwrap(), 0.0);
        let b = f(2, 2, vec![1.1, 2.3, 2.8, 4.2]);
        assert_relative_eq!(l1_diff(&a, &b).unwrap(), 0.2, max_relative = 1e-12);
        let zero = f(2, 2, vec![0.0; 4]);
        let d = f(
            2,
            2,
            a.values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| 2.0 * (x - y))
                .collect(),
        );
        assert_relative_eq!(l1_diff(&d, &zero).unwrap(), 0.4, max_relative = 1e-12);
        assert!(l1_diff(&a, &f(4, 1, vec![0.0; 4])).is_err());
    }

    #[test]
    fn rate_examples() {
        assert_eq!(rate_from(4.0, 1.0), 2.0);
        assert_relative_eq!(rate_from(2.11e-2, 5.83e-3), 1.856, epsilon = 1e-3);
        assert_eq!(rate_from(0.3, 0.3), 0.0);
        assert!(!rate_from(0.3, 0.0).is_finite());
    }

    #[test]
    fn restriction_preserves_piecewise_constants() {
        let coarse = f(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let mut fine = vec![0.0; 16];
        for k in 0..4 {
            for i in 0..4 {
                fine[k * 4 + i] = coarse.at(i / 2, k / 2);
            }
        }
        assert_eq!(restrict(&f(4, 4, fine)).unwrap(), coarse);
        let row = f(4, 1, vec![1.0, 3.0, 5.0, 5.0]);
        assert_eq!(restrict(&row).unwrap().values, vec![2.0, 5.0]);
        assert!(restrict(&f(3, 1, vec![0.0; 3])).is_err());
    }

    proptest! {
        #[test]
        fn l1_is_a_metric(
            a in prop::collection::vec(-10.0f64..10.0, 6),
            b in prop::collection::vec(-10.0f64..10.0, 6),
            c in prop::collection::vec(-10.0f64..10.0, 6),
        ) {
            let (a, b, c) = (f(3, 2, a), f(3, 2, b), f(3, 2, c));
            let ab = l1_diff(&a, &b).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, l1_diff(&b, &a).unwrap());
            prop_assert!(ab <= l1_diff(&a, &c).unwrap() + l1_diff(&c, &b).unwrap() + 1e-12);
        }

        #[test]
        fn rate_is_scale_invariant(e1 in 1e-6f64..1.0, e2 in 1e-6f64..1.0, s in 1e-3f64..1e3) {
            let r = rate_from(e1, e2);
            prop_assert!((rate_from(s * e1, s * e2) - r).abs() < 1e-9);
        }
    }
}
