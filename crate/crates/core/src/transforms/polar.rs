use serde::{Deserialize, Serialize};

use crate::base::grid::dot;
use crate::base::{ConvexProfile, Grid, GridFunction, RadialPotential};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::infconv::{CostSpec, MonotoneMap};

/// Tolerance for `f(0) = 0`, nonnegativity and evenness of sampled inputs.
pub const CVX0_TOL: f64 = 1e-9;

/// Checks the sampled Cvx₀ conditions: a symmetric grid with an origin node,
/// `f(0) = 0`, `f ≥ 0` and `f(−x) = f(x)`. No `−∞` values.
pub fn validate_cvx0(f: &GridFunction) -> Result<()> {
    let g = f.grid();
    let v = f.values();
    if let Some((node, &value)) = v.iter().enumerate().find(|(_, x)| **x < -CVX0_TOL) {
        return Err(Error::NegativeValue { node, value });
    }
    let origin = g
        .origin_index()
        .ok_or_else(|| Error::InvalidGrid("Cvx0 inputs need a grid node at the origin".into()))?;
    if v[origin].abs() > CVX0_TOL {
        return Err(Error::NotGeometricConvex(format!("f(0) = {} instead of 0", v[origin])));
    }
    for i in 0..v.len() {
        let j = g
            .mirror_index(i)
            .ok_or_else(|| Error::InvalidGrid("Cvx0 inputs need a box symmetric about the origin".into()))?;
        let (a, b) = (v[i], v[j]);
        let same = a == b || (a - b).abs() <= CVX0_TOL * (1.0 + a.abs().max(b.abs()));
        if !same {
            return Err(Error::NotGeometricConvex(format!(
                "not even: f = {a} at node {i} but {b} at its mirror"
            )));
        }
    }
    Ok(())
}

fn finite_nodes(f: &GridFunction) -> Vec<([f64; 3], f64)> {
    (0..f.len())
        .filter(|&i| f.values()[i].is_finite())
        .map(|i| (f.grid().point(i), f.values()[i]))
        .collect()
}

/// `Tf(x) = sup_y ρ(⟨x, y⟩) − f(y)` over the finite nodes of `f`.
pub fn t_transform(f: &GridFunction, rho: &MonotoneMap, out: &Grid) -> Result<GridFunction> {
    t_transform_with(Execution::default(), f, rho, out)
}

pub fn t_transform_with(exec: Execution, f: &GridFunction, rho: &MonotoneMap, out: &Grid) -> Result<GridFunction> {
    CostSpec::InnerProduct { rho: rho.clone() }.validate()?;
    validate_cvx0(f)?;
    check_dims(f, out)?;
    let src = finite_nodes(f);
    let values = map_indexed(exec, out.len(), |i| {
        let x = out.point(i);
        src.iter()
            .map(|(y, v)| rho.eval(dot(&x, y)) - v)
            .fold(f64::NEG_INFINITY, f64::max)
    });
    GridFunction::new(out.clone(), values)
}

fn check_dims(f: &GridFunction, out: &Grid) -> Result<()> {
    if out.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: out.dim(),
        });
    }
    Ok(())
}

/// Discrete polar transform together with a bound on what the box hides.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarTransform {
    pub function: GridFunction,
    /// Per output node, how far the untruncated polar may exceed the box value.
    pub truncation_gap: Vec<f64>,
}

impl PolarTransform {
    pub fn max_truncation_gap(&self) -> f64 {
        self.truncation_gap.iter().copied().fold(0.0, f64::max)
    }
}

/// One term `(⟨x, y⟩ − 1)/f(y)` of the polar sup, `None` when excluded.
fn polar_term(num: f64, fy: f64) -> Option<f64> {
    if fy == f64::INFINITY {
        Some(0.0)
    } else if fy > 0.0 {
        Some(num / fy)
    } else if num > 0.0 {
        Some(f64::INFINITY)
    } else if num == 0.0 {
        Some(0.0)
    } else {
        // negative/0 is left open by the conventions; read as −∞.
        None
    }
}

/// `f°(x) = sup_y (⟨x, y⟩ − 1)/f(y)` with `0/0 = 0`, `+/0 = +∞`,
/// `negative/0` excluded and `f°(0) = 0`.
///
/// `f` is `+∞` off the box, which contributes a `0` term. The reported gap
/// bounds the sup over the rest of space for the convex extension along rays:
/// for `s ≥ 1`, `f(sy) ≥ s f(y)`, so rays through a boundary node `y`
/// contribute at most `⟨x, y⟩/f(y)`.
pub fn polar_transform(f: &GridFunction, out: &Grid) -> Result<PolarTransform> {
    polar_transform_with(Execution::default(), f, out)
}

pub fn polar_transform_with(exec: Execution, f: &GridFunction, out: &Grid) -> Result<PolarTransform> {
    validate_cvx0(f)?;
    check_dims(f, out)?;
    let src: Vec<_> = (0..f.len()).map(|i| (f.grid().point(i), f.values()[i])).collect();
    let rim: Vec<_> = f
        .grid()
        .boundary_nodes()
        .into_iter()
        .map(|i| (f.grid().point(i), f.values()[i]))
        .collect();
    let per_node = map_indexed(exec, out.len(), |i| {
        let x = out.point(i);
        if dot(&x, &x) == 0.0 {
            return (0.0, 0.0);
        }
        let mut best = 0.0f64;
        for (y, fy) in &src {
            if let Some(t) = polar_term(dot(&x, y) - 1.0, *fy) {
                best = best.max(t);
            }
        }
        let mut bound = 0.0f64;
        for (y, fy) in &rim {
            let ip = dot(&x, y);
            if ip > 0.0 && fy.is_finite() {
                bound = bound.max(if *fy > 0.0 { ip / fy } else { f64::INFINITY });
            }
        }
        (best, (bound - best).max(0.0))
    });
    let (values, truncation_gap) = per_node.into_iter().unzip();
    Ok(PolarTransform {
        function: GridFunction::new(out.clone(), values)?,
        truncation_gap,
    })
}

/// Exact `Ψ°` of a piecewise-linear profile sampled at `rs`.
pub fn polar_profile(psi: &ConvexProfile, rs: &[f64]) -> Vec<f64> {
    rs.iter().map(|&r| psi.polar_at(r)).collect()
}

/// Report of a scanned radial polar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarScan {
    pub values: Vec<f64>,
    /// Radii at which the best sample sat at `s_max`, so the sup may lie beyond.
    pub truncated: Vec<f64>,
}

/// `Ψ°(r) = sup_{0 < s ≤ s_max} (rs − 1)/Ψ(s)` for any radial potential: a scan on
/// `samples` points, then golden-section refinement around the best sample.
pub fn polar_profile_scan<P: RadialPotential + ?Sized>(psi: &P, rs: &[f64], s_max: f64, samples: usize) -> PolarScan {
    let samples = samples.max(4);
    let ratio = |r: f64, s: f64| polar_term(r * s - 1.0, psi.value(s)).unwrap_or(f64::NEG_INFINITY);
    let mut values = Vec::with_capacity(rs.len());
    let mut truncated = Vec::new();
    for &r in rs {
        if r <= 0.0 {
            values.push(0.0);
            continue;
        }
        let h = s_max / samples as f64;
        let (mut k, mut best) = (1, f64::NEG_INFINITY);
        for j in 1..=samples {
            let v = ratio(r, j as f64 * h);
            if v > best {
                best = v;
                k = j;
            }
        }
        if best.is_finite() {
            let (mut a, mut b) = ((k as f64 - 1.0).max(1e-3) * h, ((k + 1) as f64 * h).min(s_max));
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let c = b - phi * (b - a);
                let d = a + phi * (b - a);
                if ratio(r, c) >= ratio(r, d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            best = best.max(ratio(r, 0.5 * (a + b)));
        }
        if k == samples {
            truncated.push(r);
        }
        values.push(best.max(0.0));
    }
    PolarScan { values, truncated }
}
