use serde::{Deserialize, Serialize};

use super::grid::{Grid, Point};
use crate::error::{Error, Result};
use crate::special::{normal_cdf, unit_ball_volume};

/// Reference measure for level-set masses and rearrangements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MeasureSpec {
    Lebesgue { n: usize },
    Gaussian1D,
}

impl MeasureSpec {
    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::Lebesgue { n } => *n,
            MeasureSpec::Gaussian1D => 1,
        }
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: grid.dim(),
            });
        }
        Ok(())
    }

    /// μ-mass of the clipped dual cell of every node.
    pub fn cell_masses(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        Ok(match self {
            MeasureSpec::Lebesgue { .. } => (0..grid.len()).map(|i| grid.cell_volume(i)).collect(),
            MeasureSpec::Gaussian1D => {
                let axis = grid.axes()[0];
                (0..axis.nodes)
                    .map(|i| {
                        let (a, b) = axis.cell(i);
                        normal_cdf(b) - normal_cdf(a)
                    })
                    .collect()
            }
        })
    }

    /// Mass of the rearranged set through `x`: the centered ball of radius ‖x‖
    /// (Lebesgue) or the half-line `(lo, x)` inside the box (Gaussian).
    pub fn rearranged_mass(&self, grid: &Grid, x: &Point) -> f64 {
        match self {
            MeasureSpec::Lebesgue { n } => {
                let r2: f64 = x[..*n].iter().map(|c| c * c).sum();
                unit_ball_volume(*n) * r2.sqrt().powi(*n as i32)
            }
            MeasureSpec::Gaussian1D => {
                let lo = grid.axes()[0].lo;
                (normal_cdf(x[0]) - normal_cdf(lo)).max(0.0)
            }
        }
    }

    /// Size parameter of the rearranged set of mass `m`: ball radius or half-line endpoint.
    pub fn rearranged_extent(&self, grid: &Grid, m: f64) -> f64 {
        match self {
            MeasureSpec::Lebesgue { n } => (m / unit_ball_volume(*n)).powf(1.0 / *n as f64),
            MeasureSpec::Gaussian1D => {
                let lo = grid.axes()[0].lo;
                crate::special::normal_quantile((m + normal_cdf(lo)).min(1.0))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_cells_sum_to_box_mass() {
        let g = Grid::line(-8.0, 8.0, 101).unwrap();
        let m: f64 = MeasureSpec::Gaussian1D.cell_masses(&g).unwrap().iter().sum();
        assert!((m - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = Grid::centered_cube(2, 1.0, 3).unwrap();
        assert!(MeasureSpec::Lebesgue { n: 1 }.cell_masses(&g).is_err());
        assert!(MeasureSpec::Gaussian1D.cell_masses(&g).is_err());
    }
}
