use serde::{Deserialize, Serialize};

use super::extended::ExtendedValue;
use crate::error::{Error, Result};

/// A point of ℝⁿ, n ≤ 3; unused trailing coordinates are zero.
pub type Point = [f64; 3];

pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    norm(&d)
}

/// One uniform axis: `nodes` equally spaced points covering `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidGrid(format!("axis needs lo < hi, got [{lo}, {hi}]")));
        }
        if nodes < 2 {
            return Err(Error::InvalidGrid(format!("axis needs at least 2 nodes, got {nodes}")));
        }
        Ok(Axis { lo, hi, nodes })
    }

    pub fn symmetric(half_width: f64, nodes: usize) -> Result<Self> {
        Axis::new(-half_width, half_width, nodes)
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.nodes - 1) as f64
    }

    /// Node coordinate; written around the midpoint so that a symmetric axis
    /// has exactly mirrored nodes.
    pub fn coord(&self, i: usize) -> f64 {
        let m = (self.nodes - 1) as f64;
        let mid = 0.5 * (self.lo + self.hi);
        mid + 0.5 * (self.hi - self.lo) * ((2 * i) as f64 - m) / m
    }

    /// Dual cell of node `i`, clipped to the axis extent.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let h = self.spacing();
        let x = self.coord(i);
        let a = if i == 0 { self.lo } else { x - 0.5 * h };
        let b = if i + 1 == self.nodes { self.hi } else { x + 0.5 * h };
        (a, b)
    }

    pub fn nearest(&self, x: f64) -> usize {
        let k = ((x - self.lo) / self.spacing()).round();
        k.clamp(0.0, (self.nodes - 1) as f64) as usize
    }

    fn is_symmetric(&self) -> bool {
        (self.lo + self.hi).abs() <= 1e-12 * (self.hi - self.lo)
    }
}

/// A tensor grid of dimension 1, 2 or 3 with row-major node ordering
/// (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1, 2 or 3, got {}",
                axes.len()
            )));
        }
        for a in &axes {
            Axis::new(a.lo, a.hi, a.nodes)?;
        }
        Ok(Grid { axes })
    }

    pub fn line(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        Grid::new(vec![Axis::new(lo, hi, nodes)?])
    }

    /// The box `[-half_width, half_width]^dim` with `nodes` nodes per axis.
    pub fn centered_cube(dim: usize, half_width: f64, nodes: usize) -> Result<Self> {
        let axis = Axis::symmetric(half_width, nodes)?;
        Grid::new(vec![axis; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn strides(&self) -> [usize; 3] {
        let mut s = [0usize; 3];
        let mut acc = 1;
        for k in (0..self.dim()).rev() {
            s[k] = acc;
            acc *= self.axes[k].nodes;
        }
        s
    }

    pub fn multi_index(&self, mut i: usize) -> [usize; 3] {
        let s = self.strides();
        let mut m = [0usize; 3];
        for k in 0..self.dim() {
            m[k] = i / s[k];
            i %= s[k];
        }
        m
    }

    pub fn flat_index(&self, m: [usize; 3]) -> usize {
        let s = self.strides();
        (0..self.dim()).map(|k| m[k] * s[k]).sum()
    }

    pub fn point(&self, i: usize) -> Point {
        let m = self.multi_index(i);
        let mut p = [0.0; 3];
        for k in 0..self.dim() {
            p[k] = self.axes[k].coord(m[k]);
        }
        p
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Lebesgue measure of the (clipped) dual cell of node `i`.
    pub fn cell_volume(&self, i: usize) -> f64 {
        let m = self.multi_index(i);
        (0..self.dim())
            .map(|k| {
                let (a, b) = self.axes[k].cell(m[k]);
                b - a
            })
            .product()
    }

    pub fn box_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.hi - a.lo).product()
    }

    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(f64::INFINITY, f64::min)
    }

    /// Nodes adjacent to `i` along each axis (at most `2·dim`).
    pub fn axis_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.multi_index(i);
        let s = self.strides();
        (0..self.dim()).flat_map(move |k| {
            let lo = (m[k] > 0).then(|| i - s[k]);
            let hi = (m[k] + 1 < self.axes[k].nodes).then(|| i + s[k]);
            lo.into_iter().chain(hi)
        })
    }

    /// Nodes in the 3^dim block around `i`, excluding `i` itself.
    pub fn block_neighbors(&self, i: usize) -> Vec<usize> {
        let m = self.multi_index(i);
        let d = self.dim();
        let mut out = Vec::with_capacity(26);
        let range = |k: usize| -> (isize, isize) {
            if k < d {
                (-1, 1)
            } else {
                (0, 0)
            }
        };
        let (a0, b0) = range(0);
        let (a1, b1) = range(1);
        let (a2, b2) = range(2);
        for d0 in a0..=b0 {
            for d1 in a1..=b1 {
                for d2 in a2..=b2 {
                    if d0 == 0 && d1 == 0 && d2 == 0 {
                        continue;
                    }
                    let off = [d0, d1, d2];
                    let mut q = [0usize; 3];
                    let mut ok = true;
                    for k in 0..d {
                        let v = m[k] as isize + off[k];
                        if v < 0 || v >= self.axes[k].nodes as isize {
                            ok = false;
                            break;
                        }
                        q[k] = v as usize;
                    }
                    if ok {
                        out.push(self.flat_index(q));
                    }
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.axes.iter().all(Axis::is_symmetric)
    }

    /// Index of the node at `-x` when the grid is symmetric about the origin.
    pub fn mirror_index(&self, i: usize) -> Option<usize> {
        if !self.is_symmetric() {
            return None;
        }
        let m = self.multi_index(i);
        let mut q = [0usize; 3];
        for k in 0..self.dim() {
            q[k] = self.axes[k].nodes - 1 - m[k];
        }
        Some(self.flat_index(q))
    }

    /// Index of a node sitting exactly on the origin, if any.
    pub fn origin_index(&self) -> Option<usize> {
        let mut q = [0usize; 3];
        for (k, a) in self.axes.iter().enumerate() {
            let j = a.nearest(0.0);
            if a.coord(j).abs() > 1e-12 * a.spacing() {
                return None;
            }
            q[k] = j;
        }
        Some(self.flat_index(q))
    }

    /// Nodes on the faces of the box.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let m = self.multi_index(i);
                (0..self.dim()).any(|k| m[k] == 0 || m[k] + 1 == self.axes[k].nodes)
            })
            .collect()
    }

    /// Smallest half-width of the box about the origin.
    pub fn inner_radius(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.lo.abs().min(a.hi.abs()))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A sampled extended-real function on a [`Grid`]; `+∞` outside the box.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NotANumber("grid value"));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::EmptyDomain);
        }
        Ok(GridFunction { grid, values })
    }

    pub fn line(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        let grid = Grid::line(lo, hi, values.len().max(2))?;
        GridFunction::new(grid, values)
    }

    pub fn from_fn<F: Fn(&Point) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        GridFunction::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, i: usize) -> ExtendedValue {
        ExtendedValue::new(self.values[i]).expect("validated at construction")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        GridFunction::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }
}
