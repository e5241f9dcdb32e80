//! Level-set masses, decreasing and increasing rearrangements, and Lipschitz
//! estimates.
//!
//! Sets on a grid are unions of clipped dual cells. The mass of `{f > λ}` is
//! the total μ-mass of the cells whose node value exceeds `λ`; the cells on
//! either side of the level (a node and an axis neighbour on opposite sides)
//! form the one-layer error bound. Levels are measured inside the sampled box.
//!
//! Rearrangement inverts the distribution function: finite node values are
//! sorted, equal values merged into plateaus and their cell masses
//! accumulated. An output node `x` receives the value of the first plateau
//! whose accumulated mass exceeds the mass of the rearranged set through `x`
//! (the centered ball of radius `‖x‖`, or the half-line left of `x`).

use serde::{Deserialize, Serialize};

use crate::base::{Grid, GridFunction, MeasureSpec};
use crate::error::{Error, Result};
use crate::infconv::{enlarge, CostSpec, MonotoneMap, SetOnGrid};

/// Relative shrink applied to rearranged-set masses so that a node sitting
/// exactly on a plateau boundary is assigned to the inner plateau.
const TIE_SHRINK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetMass {
    pub lambda: f64,
    pub mass: f64,
    pub error_bound: f64,
}

fn level_mass<P: Fn(f64) -> bool>(f: &GridFunction, lambda: f64, mu: MeasureSpec, inside: P) -> Result<LevelSetMass> {
    let masses = mu.cell_masses(f.grid())?;
    Ok(level_mass_with(f, lambda, &masses, inside))
}

fn level_mass_with<P: Fn(f64) -> bool>(f: &GridFunction, lambda: f64, masses: &[f64], inside: P) -> LevelSetMass {
    let grid = f.grid();
    let v = f.values();
    let mut mass = 0.0;
    let mut err = 0.0;
    for i in 0..v.len() {
        let a = inside(v[i]);
        if a {
            mass += masses[i];
        }
        if grid.axis_neighbors(i).any(|j| inside(v[j]) != a) {
            err += masses[i];
        }
    }
    LevelSetMass {
        lambda,
        mass,
        error_bound: err,
    }
}

/// μ-mass of `{f > λ}` inside the box.
pub fn superlevel_mass(f: &GridFunction, lambda: f64, mu: MeasureSpec) -> Result<LevelSetMass> {
    level_mass(f, lambda, mu, |v| v > lambda)
}

/// μ-mass of `{f < λ}` inside the box.
pub fn sublevel_mass(f: &GridFunction, lambda: f64, mu: MeasureSpec) -> Result<LevelSetMass> {
    level_mass(f, lambda, mu, |v| v < lambda)
}

/// μ-mass of `{f ≤ λ}` inside the box.
pub fn closed_sublevel_mass(f: &GridFunction, lambda: f64, mu: MeasureSpec) -> Result<LevelSetMass> {
    level_mass(f, lambda, mu, |v| v <= lambda)
}

/// Masses of `{f < λ}` for every λ in `lambdas`, sharing one cell-mass table.
pub fn sublevel_masses(f: &GridFunction, lambdas: &[f64], mu: MeasureSpec) -> Result<Vec<LevelSetMass>> {
    let masses = mu.cell_masses(f.grid())?;
    Ok(lambdas
        .iter()
        .map(|&l| level_mass_with(f, l, &masses, |v| v < l))
        .collect())
}

/// Masses of `{f ≥ λ}` for every λ in `lambdas`.
pub fn closed_superlevel_masses(f: &GridFunction, lambdas: &[f64], mu: MeasureSpec) -> Result<Vec<LevelSetMass>> {
    let masses = mu.cell_masses(f.grid())?;
    Ok(lambdas
        .iter()
        .map(|&l| level_mass_with(f, l, &masses, |v| v >= l))
        .collect())
}

/// Masses of `{f ≤ λ}` for every λ in `lambdas`.
pub fn closed_sublevel_masses(f: &GridFunction, lambdas: &[f64], mu: MeasureSpec) -> Result<Vec<LevelSetMass>> {
    let masses = mu.cell_masses(f.grid())?;
    Ok(lambdas
        .iter()
        .map(|&l| level_mass_with(f, l, &masses, |v| v <= l))
        .collect())
}

/// Plateau table: distinct values in traversal order with inclusive cumulative masses.
struct Distribution {
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Distribution {
    fn build(values: &[f64], masses: &[f64], descending: bool) -> Distribution {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| {
            let o = values[a].total_cmp(&values[b]);
            if descending {
                o.reverse()
            } else {
                o
            }
        });
        let mut out = Distribution {
            values: Vec::new(),
            cumulative: Vec::new(),
        };
        let mut acc = 0.0;
        for i in order {
            acc += masses[i];
            if out.values.last() == Some(&values[i]) {
                *out.cumulative.last_mut().unwrap() = acc;
            } else {
                out.values.push(values[i]);
                out.cumulative.push(acc);
            }
        }
        out
    }

    fn lookup(&self, mass: f64) -> Option<f64> {
        let k = self.cumulative.partition_point(|&c| c <= mass);
        self.values.get(k).copied()
    }
}

fn rearrange_on(f: &GridFunction, mu: MeasureSpec, out: &Grid, descending: bool, beyond: f64) -> Result<GridFunction> {
    mu.check_grid(f.grid())?;
    mu.check_grid(out)?;
    if matches!(mu, MeasureSpec::Lebesgue { .. }) && !out.is_symmetric() {
        return Err(Error::InvalidGrid(
            "Lebesgue rearrangements need an output box symmetric about the origin".into(),
        ));
    }
    let masses = mu.cell_masses(f.grid())?;
    let (vals, ms): (Vec<f64>, Vec<f64>) = f
        .values()
        .iter()
        .zip(&masses)
        .filter(|(v, _)| !descending || **v > 0.0)
        .filter(|(v, _)| descending || v.is_finite())
        .map(|(v, m)| (*v, *m))
        .unzip();
    let dist = Distribution::build(&vals, &ms, descending);
    let values = (0..out.len())
        .map(|i| {
            let m = mu.rearranged_mass(out, &out.point(i)) * (1.0 - TIE_SHRINK);
            dist.lookup(m).unwrap_or(beyond)
        })
        .collect();
    GridFunction::new(out.clone(), values)
}

/// Decreasing rearrangement `f*` on `f`'s own grid.
pub fn decreasing_rearrangement(f: &GridFunction, mu: MeasureSpec) -> Result<GridFunction> {
    decreasing_rearrangement_on(f, mu, f.grid())
}

/// Decreasing rearrangement `f*` sampled on `out`. Superlevel sets of the
/// output are centered balls (Lebesgue) or half-lines `{x < a}` (Gaussian).
pub fn decreasing_rearrangement_on(f: &GridFunction, mu: MeasureSpec, out: &Grid) -> Result<GridFunction> {
    if let Some((node, &value)) = f.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeValue { node, value });
    }
    if f.values().iter().all(|v| v.is_infinite()) {
        return Err(Error::EmptyDomain);
    }
    rearrange_on(f, mu, out, true, 0.0)
}

/// Increasing rearrangement `f_* = −log (e^{−f})*` on `f`'s own grid.
pub fn increasing_rearrangement(f: &GridFunction, mu: MeasureSpec) -> Result<GridFunction> {
    increasing_rearrangement_on(f, mu, f.grid())
}

/// Increasing rearrangement sampled on `out`; `{f_* < λ}` is the rearranged
/// set of `{f < λ}`. Outside the total finite mass the output is `+∞`.
pub fn increasing_rearrangement_on(f: &GridFunction, mu: MeasureSpec, out: &Grid) -> Result<GridFunction> {
    if let Some(node) = f.values().iter().position(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::InvalidArgument(format!(
            "function must be bounded below; -inf at node {node}"
        )));
    }
    rearrange_on(f, mu, out, false, f64::INFINITY)
}

fn spacing_along(grid: &Grid, i: usize, j: usize) -> f64 {
    let (a, b) = (grid.multi_index(i), grid.multi_index(j));
    let k = (0..grid.dim()).find(|&k| a[k] != b[k]).expect("distinct neighbours");
    grid.axes()[k].spacing()
}

/// Largest absolute slope between axis-adjacent nodes.
pub fn lipschitz_estimate(f: &GridFunction) -> Result<f64> {
    if let Some(i) = f.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::InfiniteValue(i));
    }
    Ok(lipschitz_estimate_below(f, f64::INFINITY))
}

/// As [`lipschitz_estimate`], restricted to adjacent pairs whose values are
/// both below `level`; infinite values are ignored.
pub fn lipschitz_estimate_below(f: &GridFunction, level: f64) -> f64 {
    let grid = f.grid();
    let v = f.values();
    let mut best: f64 = 0.0;
    for i in 0..v.len() {
        if !(v[i] < level) || !v[i].is_finite() {
            continue;
        }
        for j in grid.axis_neighbors(i).filter(|&j| j > i) {
            if v[j] < level && v[j].is_finite() {
                best = best.max((v[j] - v[i]).abs() / spacing_along(grid, i, j));
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnlargementViolation {
    pub lambda: f64,
    pub epsilon: f64,
    /// Nodes of `{f < λ}_ε` outside `{f < λ + Lε}` with no neighbour inside it.
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnlargementReport {
    pub lipschitz: f64,
    pub pairs: usize,
    pub violations: Vec<EnlargementViolation>,
}

impl EnlargementReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `{f < λ}_ε ⊆ {f < λ + Lε}` (Euclidean enlargement) on every pair of
/// the two grids, forgiving nodes that have a neighbour in the target set.
pub fn enlargement_lipschitz_check(
    f: &GridFunction,
    lipschitz: f64,
    epsilons: &[f64],
    lambdas: &[f64],
) -> Result<EnlargementReport> {
    if let Some(i) = f.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::InfiniteValue(i));
    }
    let grid = f.grid();
    let v = f.values();
    let cost = CostSpec::Distance {
        alpha: MonotoneMap::Identity,
    };
    let mut violations = Vec::new();
    for &lambda in lambdas {
        let a = SetOnGrid::from_predicate(grid, |i| v[i] < lambda);
        for &eps in epsilons {
            let grown = enlarge(&a, &cost, eps)?;
            let bound = lambda + lipschitz * eps;
            let target = |i: usize| v[i] < bound;
            let bad = (0..v.len())
                .filter(|&i| grown.contains(i) && !target(i))
                .filter(|&i| !grid.block_neighbors(i).into_iter().any(target))
                .count();
            if bad > 0 {
                violations.push(EnlargementViolation {
                    lambda,
                    epsilon: eps,
                    nodes: bad,
                });
            }
        }
    }
    Ok(EnlargementReport {
        lipschitz,
        pairs: lambdas.len() * epsilons.len(),
        violations,
    })
}

/// Layer-cake value `∫₀^∞ μ({e^{−f} > s}) ds` from `levels` level-set masses
/// (midpoint rule in `s ∈ (0, max e^{−f}]`).
pub fn layer_cake_exp_integral(f: &GridFunction, mu: MeasureSpec, levels: usize) -> Result<f64> {
    let top = (-f.min_value()).exp();
    let masses = mu.cell_masses(f.grid())?;
    let ds = top / levels as f64;
    let mut total = 0.0;
    for k in 0..levels {
        let s = (k as f64 + 0.5) * ds;
        let lambda = -s.ln();
        total += level_mass_with(f, lambda, &masses, |v| v < lambda).mass * ds;
    }
    Ok(total)
}

/// Direct cell sum `Σ μ(cell_i) e^{−f(x_i)}`.
pub fn exp_integral(f: &GridFunction, mu: MeasureSpec) -> Result<f64> {
    let masses = mu.cell_masses(f.grid())?;
    Ok(f.values().iter().zip(&masses).map(|(v, m)| m * (-v).exp()).sum())
}
