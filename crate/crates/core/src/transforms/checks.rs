use serde::{Deserialize, Serialize};

use crate::base::{Axis, Grid, GridFunction, MeasureSpec};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::infconv::{interior_levels, ComparisonReport, MonotoneMap};
use crate::rearrange::{closed_sublevel_masses, increasing_rearrangement_on};
use crate::special::unit_ball_volume;

use super::legendre::legendre_grid_with;
use super::polar::{polar_transform_with, t_transform_with, validate_cvx0};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TransformKind {
    Legendre,
    Polar,
    T { rho: MonotoneMap },
}

impl TransformKind {
    pub fn tag(&self) -> String {
        match self {
            TransformKind::Legendre => "Legendre".into(),
            TransformKind::Polar => "Polar".into(),
            TransformKind::T { rho } => format!("T{{{}}}", rho.label()),
        }
    }
}

/// Exact discrete form of `{f° > λ} = λ{Lf > 1/λ}` at one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarIdentityRow {
    pub lambda: f64,
    /// Nodes where `[f°(x) > λ]` and `[Lf(x/λ) > 1/λ]` disagree.
    pub mismatches: usize,
    pub polar_mass: f64,
    /// `λⁿ |{Lf ≤ 1/λ}|` on the scaled grid.
    pub scaled_legendre_mass: f64,
    pub error_bound: f64,
}

impl PolarIdentityRow {
    pub fn pass(&self) -> bool {
        self.mismatches == 0 && (self.polar_mass - self.scaled_legendre_mass).abs() <= self.error_bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub transform: String,
    /// `|{Af ≤ λ}| ≤ |{Af_* ≤ λ}| + slack`.
    pub comparison: ComparisonReport,
    pub polar_identity: Vec<PolarIdentityRow>,
    /// Largest polar truncation gap over both inputs (0 for other transforms).
    pub max_truncation_gap: f64,
    /// Grid on which `f_*` was sampled.
    pub rearranged_grid: Vec<Axis>,
}

impl TransformReport {
    pub fn pass(&self) -> bool {
        self.comparison.pass && self.polar_identity.iter().all(|r| r.pass())
    }
}

/// Symmetric grid with the spacing of `g` that contains the centered ball of
/// volume `|box|`, so that the rearrangement of `f` (which is `+∞` off the box)
/// is sampled without truncation.
pub fn rearrangement_grid(g: &Grid) -> Result<Grid> {
    let n = g.dim();
    let radius = (g.box_volume() / unit_ball_volume(n)).powf(1.0 / n as f64);
    let axes = g
        .axes()
        .iter()
        .map(|a| {
            let h = a.spacing();
            let half = (0.5 * (a.hi - a.lo)).max(radius + 2.0 * h);
            let k = (half / h - 1e-9).ceil() as usize;
            Axis::symmetric(k as f64 * h, 2 * k + 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Grid::new(axes)
}

fn apply(exec: Execution, kind: &TransformKind, f: &GridFunction, out: &Grid) -> Result<(GridFunction, f64)> {
    Ok(match kind {
        TransformKind::Legendre => (legendre_grid_with(exec, f, out)?, 0.0),
        TransformKind::T { rho } => (t_transform_with(exec, f, rho, out)?, 0.0),
        TransformKind::Polar => {
            let p = polar_transform_with(exec, f, out)?;
            let gap = p.max_truncation_gap();
            (p.function, gap)
        }
    })
}

fn scaled_grid(g: &Grid, s: f64) -> Result<Grid> {
    Grid::new(
        g.axes()
            .iter()
            .map(|a| Axis::new(s * a.lo, s * a.hi, a.nodes))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Node-wise and mass forms of `{f° > λ} = λ{Lf > 1/λ}` on `out`.
pub fn polar_identity_check(
    exec: Execution,
    f: &GridFunction,
    polar: &GridFunction,
    lambdas: &[f64],
) -> Result<Vec<PolarIdentityRow>> {
    let out = polar.grid();
    let n = out.dim() as i32;
    let mu = MeasureSpec::Lebesgue { n: out.dim() };
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas.iter().filter(|l| **l > 0.0) {
        let scaled = scaled_grid(out, 1.0 / lambda)?;
        let l = legendre_grid_with(exec, f, &scaled)?;
        // Exact in exact arithmetic; rounding can flip nodes sitting on the threshold.
        let mismatches = (0..out.len())
            .filter(|&i| {
                let (p, q) = (polar.values()[i], l.values()[i]);
                let near =
                    (q - 1.0 / lambda).abs() <= 1e-9 * (1.0 + q.abs()) || (p - lambda).abs() <= 1e-9 * (1.0 + p.abs());
                (p > lambda) != (q > 1.0 / lambda) && !near
            })
            .count();
        let pm = closed_sublevel_masses(polar, &[lambda], mu)?[0];
        let lm = closed_sublevel_masses(&l, &[1.0 / lambda], mu)?[0];
        let scale = lambda.powi(n);
        rows.push(PolarIdentityRow {
            lambda,
            mismatches,
            polar_mass: pm.mass,
            scaled_legendre_mass: scale * lm.mass,
            error_bound: pm.error_bound + scale * lm.error_bound + 1e-12 * pm.mass,
        });
    }
    Ok(rows)
}

/// Compares `|{Af ≤ λ}|` with `|{Af_* ≤ λ}|` on `out` for `f ∈ Cvx₀`.
///
/// `f` is `+∞` off its box; `f_*` is its exact increasing rearrangement,
/// sampled on [`rearrangement_grid`]. An empty `lambdas` selects 32 levels
/// below the smallest boundary value of both transforms.
pub fn transform_comparison_check(
    f: &GridFunction,
    kind: &TransformKind,
    lambdas: &[f64],
    out: &Grid,
) -> Result<TransformReport> {
    transform_comparison_check_with(Execution::default(), f, kind, lambdas, out)
}

pub fn transform_comparison_check_with(
    exec: Execution,
    f: &GridFunction,
    kind: &TransformKind,
    lambdas: &[f64],
    out: &Grid,
) -> Result<TransformReport> {
    validate_cvx0(f)?;
    let n = f.dim();
    if n > 3 || out.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: out.dim(),
        });
    }
    let mu = MeasureSpec::Lebesgue { n };
    let big = rearrangement_grid(f.grid())?;
    let fs = increasing_rearrangement_on(f, mu, &big)?;
    let (af, gap_f) = apply(exec, kind, f, out)?;
    let (afs, gap_s) = apply(exec, kind, &fs, out)?;
    let levels = if lambdas.is_empty() {
        interior_levels(&[&af, &afs], 32)
    } else {
        lambdas.to_vec()
    };
    let pair = |m: Vec<crate::rearrange::LevelSetMass>| -> Vec<(f64, f64)> {
        m.into_iter().map(|m| (m.mass, m.error_bound)).collect()
    };
    let lhs = pair(closed_sublevel_masses(&af, &levels, mu)?);
    let rhs = pair(closed_sublevel_masses(&afs, &levels, mu)?);
    let tag = kind.tag();
    let comparison = ComparisonReport::from_masses(
        format!("|{{{tag} f <= l}}| <= |{{{tag} f_* <= l}}|"),
        &levels,
        &lhs,
        &rhs,
    );
    let polar_identity = if matches!(kind, TransformKind::Polar) {
        polar_identity_check(exec, f, &af, &levels)?
    } else {
        Vec::new()
    };
    Ok(TransformReport {
        transform: tag,
        comparison,
        polar_identity,
        max_truncation_gap: gap_f.max(gap_s),
        rearranged_grid: big.axes().to_vec(),
    })
}
