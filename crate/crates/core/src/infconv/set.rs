use serde::{Deserialize, Serialize};

use crate::base::{grid::dot, Grid, GridFunction};
use crate::error::Result;
use crate::exec::{map_indexed, Execution};

use super::cost::CostSpec;
use super::engine::quadratic_envelope;

/// A union of grid cells, one flag per node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetOnGrid {
    grid: Grid,
    mask: Vec<bool>,
}

impl SetOnGrid {
    pub fn new(grid: Grid, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.len() {
            return Err(crate::Error::InvalidGrid(format!(
                "mask of length {} for {} cells",
                mask.len(),
                grid.len()
            )));
        }
        Ok(SetOnGrid { grid, mask })
    }

    pub fn from_predicate<P: Fn(usize) -> bool>(grid: &Grid, p: P) -> Self {
        SetOnGrid {
            grid: grid.clone(),
            mask: (0..grid.len()).map(p).collect(),
        }
    }

    pub fn empty(grid: &Grid) -> Self {
        SetOnGrid::from_predicate(grid, |_| false)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|m| *m)
    }

    pub fn volume(&self) -> f64 {
        (0..self.mask.len())
            .filter(|&i| self.mask[i])
            .map(|i| self.grid.cell_volume(i))
            .sum()
    }

    pub fn complement(&self) -> Self {
        SetOnGrid {
            grid: self.grid.clone(),
            mask: self.mask.iter().map(|m| !m).collect(),
        }
    }

    pub fn union_with(&mut self, other: &SetOnGrid) {
        for (a, b) in self.mask.iter_mut().zip(&other.mask) {
            *a |= *b;
        }
    }

    /// Nodes in exactly one of the two sets.
    pub fn symmetric_difference(&self, other: &SetOnGrid) -> Vec<usize> {
        (0..self.mask.len())
            .filter(|&i| self.mask[i] != other.mask[i])
            .collect()
    }

    /// Nodes with a block neighbour outside the set, or outside with one inside.
    pub fn boundary_layer(&self, i: usize) -> bool {
        self.grid
            .block_neighbors(i)
            .into_iter()
            .any(|j| self.mask[j] != self.mask[i])
    }
}

/// Squared Euclidean distance from every node to the set (`+∞` if empty).
pub fn squared_distance(exec: Execution, a: &SetOnGrid) -> Vec<f64> {
    if a.is_empty() {
        return vec![f64::INFINITY; a.mask.len()];
    }
    let ind: Vec<f64> = a.mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
    let f = GridFunction::new(a.grid.clone(), ind).expect("nonempty set");
    quadratic_envelope(exec, &f, 1.0)
        .expect("finite indicator")
        .into_values()
}

/// Strict enlargement `A_ε = {x : ∃ y ∈ A, φ(x, y) < ε}` on `A`'s grid.
pub fn enlarge(a: &SetOnGrid, cost: &CostSpec, eps: f64) -> Result<SetOnGrid> {
    enlarge_with(Execution::default(), a, cost, eps)
}

pub fn enlarge_with(exec: Execution, a: &SetOnGrid, cost: &CostSpec, eps: f64) -> Result<SetOnGrid> {
    cost.validate()?;
    if a.is_empty() {
        return Ok(SetOnGrid::empty(&a.grid));
    }
    let grid = &a.grid;
    let mask = match cost {
        CostSpec::InnerProduct { rho } => {
            let members: Vec<_> = (0..grid.len()).filter(|&i| a.mask[i]).map(|i| grid.point(i)).collect();
            map_indexed(exec, grid.len(), |i| {
                let x = grid.point(i);
                members.iter().any(|y| -rho.eval(dot(&x, y)) < eps)
            })
        }
        _ => squared_distance(exec, a)
            .into_iter()
            .map(|d2| cost.radial(d2.sqrt()).expect("radial cost") < eps)
            .collect(),
    };
    Ok(SetOnGrid {
        grid: grid.clone(),
        mask,
    })
}

/// Brute-force enlargement used as the oracle for [`enlarge`].
pub fn enlarge_bruteforce(a: &SetOnGrid, cost: &CostSpec, eps: f64) -> SetOnGrid {
    let grid = &a.grid;
    let members: Vec<_> = (0..grid.len()).filter(|&i| a.mask[i]).map(|i| grid.point(i)).collect();
    SetOnGrid::from_predicate(grid, |i| {
        let x = grid.point(i);
        members.iter().any(|y| cost.eval(&x, y) < eps)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infconv::cost::MonotoneMap;
    use proptest::prelude::*;

    #[test]
    fn interval_dilation() {
        let g = Grid::line(-2.0, 3.0, 501).unwrap();
        let a = SetOnGrid::from_predicate(&g, |i| (0.0..=1.0).contains(&g.point(i)[0]));
        let e = enlarge(&a, &CostSpec::distance(), 0.5).unwrap();
        for i in 0..g.len() {
            let x = g.point(i)[0];
            if x > -0.49 && x < 1.49 {
                assert!(e.contains(i));
            }
            if !(-0.51..=1.51).contains(&x) {
                assert!(!e.contains(i));
            }
        }
        assert!(enlarge(&SetOnGrid::empty(&g), &CostSpec::distance(), 1.0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn polar_complement_of_unit_disc() {
        let g = Grid::centered_cube(2, 2.0, 81).unwrap();
        let disc = SetOnGrid::from_predicate(&g, |i| {
            let p = g.point(i);
            p[0] * p[0] + p[1] * p[1] <= 1.0
        });
        let cost = CostSpec::InnerProduct {
            rho: MonotoneMap::Identity,
        };
        let e = enlarge(&disc, &cost, -1.0).unwrap();
        let c = e.complement();
        for i in 0..g.len() {
            let p = g.point(i);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            if r < 0.95 {
                assert!(c.contains(i), "r={r}");
            } else if r > 1.06 {
                assert!(!c.contains(i), "r={r}");
            }
        }
    }

    proptest! {
        #[test]
        fn distance_enlargement_matches_bruteforce(
            mask in proptest::collection::vec(proptest::bool::weighted(0.1), 15 * 12),
            eps in 0.0f64..3.0,
        ) {
            let g = Grid::new(vec![
                crate::base::Axis::new(-1.0, 2.0, 15).unwrap(),
                crate::base::Axis::new(0.0, 1.5, 12).unwrap(),
            ]).unwrap();
            let a = SetOnGrid::new(g, mask).unwrap();
            let cost = CostSpec::Distance { alpha: MonotoneMap::Cube };
            let fast = enlarge(&a, &cost, eps).unwrap();
            let slow = enlarge_bruteforce(&a, &cost, eps);
            // Ties at exactly ε may flip by rounding; demand agreement elsewhere.
            for i in fast.symmetric_difference(&slow) {
                let d2 = squared_distance(Execution::Sequential, &a)[i];
                prop_assert!((d2.sqrt().powi(3) - eps).abs() < 1e-9);
            }
        }

        #[test]
        fn cost_transfer_under_strictly_increasing_alpha(
            mask in proptest::collection::vec(proptest::bool::weighted(0.2), 60),
            eps in 0.01f64..2.0,
        ) {
            let g = Grid::line(-3.0, 3.0, 60).unwrap();
            let a = SetOnGrid::new(g, mask).unwrap();
            let alpha = MonotoneMap::table(vec![0.0, 1.0, 4.0], vec![-1.0, 0.5, 7.0]).unwrap();
            let lhs = enlarge(&a, &CostSpec::Distance { alpha: alpha.clone() }, alpha.eval(eps)).unwrap();
            let rhs = enlarge(&a, &CostSpec::distance(), eps).unwrap();
            for i in lhs.symmetric_difference(&rhs) {
                let d = squared_distance(Execution::Sequential, &a)[i].sqrt();
                prop_assert!((d - eps).abs() < 1e-9);
            }
        }
    }
}
