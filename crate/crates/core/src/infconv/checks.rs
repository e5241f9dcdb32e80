use serde::{Deserialize, Serialize};

use crate::base::{GridFunction, MeasureSpec};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::rearrange::{closed_superlevel_masses, increasing_rearrangement, sublevel_masses};

use super::cost::{CostSpec, HopfLaxKernel};
use super::engine::{hopf_lax_with, inf_convolution_auto};
use super::set::{enlarge_with, SetOnGrid};

/// One level of a comparison `lhs ≤ rhs + slack`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub lambda: f64,
    pub mass_lhs: f64,
    pub mass_rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Human-readable statement of the compared quantities.
    pub form: String,
    pub rows: Vec<ComparisonRow>,
    pub pass: bool,
    pub max_slack: f64,
}

impl ComparisonReport {
    pub fn from_masses(form: impl Into<String>, lambdas: &[f64], lhs: &[(f64, f64)], rhs: &[(f64, f64)]) -> Self {
        let rows: Vec<ComparisonRow> = lambdas
            .iter()
            .zip(lhs.iter().zip(rhs))
            .map(|(&lambda, (&(ml, el), &(mr, er)))| {
                let slack = el + er;
                ComparisonRow {
                    lambda,
                    mass_lhs: ml,
                    mass_rhs: mr,
                    slack,
                    pass: ml <= mr + slack,
                }
            })
            .collect();
        let pass = rows.iter().all(|r| r.pass);
        let max_slack = rows.iter().map(|r| r.slack).fold(0.0, f64::max);
        ComparisonReport {
            form: form.into(),
            rows,
            pass,
            max_slack,
        }
    }

    /// Whether `|lhs − rhs| ≤ slack` at every level.
    pub fn equal_within_slack(&self) -> bool {
        self.rows.iter().all(|r| (r.mass_lhs - r.mass_rhs).abs() <= r.slack)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }
}

/// `count` levels strictly between the smallest minimum of `fs` and the
/// smallest boundary value of `fs`, so that every compared sublevel set stays
/// inside the box.
pub fn interior_levels(fs: &[&GridFunction], count: usize) -> Vec<f64> {
    let lo = fs.iter().map(|f| f.min_value()).fold(f64::INFINITY, f64::min);
    let hi = fs
        .iter()
        .flat_map(|f| f.grid().boundary_nodes().into_iter().map(move |i| f.values()[i]))
        .fold(f64::INFINITY, f64::min);
    let hi = if hi > lo { hi } else { lo + 1.0 };
    (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64)
        .collect()
}

fn supported_pair(mu: MeasureSpec, cost: &CostSpec) -> Result<()> {
    match (mu, cost) {
        (MeasureSpec::Lebesgue { .. }, CostSpec::Distance { .. } | CostSpec::HopfLax { .. }) => Ok(()),
        (MeasureSpec::Gaussian1D, CostSpec::Distance { .. }) => Ok(()),
        (m, c) => Err(Error::Unsupported(format!(
            "{m:?} with {} cost is not a certified isoperimetric pair",
            match c {
                CostSpec::HopfLax { .. } => "Hopf-Lax",
                CostSpec::InnerProduct { .. } => "inner-product",
                CostSpec::Distance { .. } => "distance",
            }
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTheoremReport {
    /// `μ({Q f_* < λ}) ≤ μ({Q f < λ})`.
    pub sublevel: ComparisonReport,
    /// `μ({Q f ≥ λ}) ≤ μ({Q f_* ≥ λ})`.
    pub superlevel: ComparisonReport,
    pub rearranged_from: String,
}

impl ComparisonTheoremReport {
    pub fn pass(&self) -> bool {
        self.sublevel.pass && self.superlevel.pass
    }
}

/// Both level-set comparisons between `Q_φ f` and `Q_φ f_*` on `lambdas`
/// (or on [`interior_levels`] when `lambdas` is empty, 64 levels).
pub fn comparison_theorem_check(
    f: &GridFunction,
    cost: &CostSpec,
    mu: MeasureSpec,
    lambdas: &[f64],
) -> Result<ComparisonTheoremReport> {
    comparison_theorem_check_with(Execution::default(), f, cost, mu, lambdas)
}

pub fn comparison_theorem_check_with(
    exec: Execution,
    f: &GridFunction,
    cost: &CostSpec,
    mu: MeasureSpec,
    lambdas: &[f64],
) -> Result<ComparisonTheoremReport> {
    comparison_at(exec, f, cost, mu, |fs: [&GridFunction; 3]| {
        if lambdas.is_empty() {
            interior_levels(&fs, 64)
        } else {
            lambdas.to_vec()
        }
    })
}

/// As [`comparison_theorem_check_with`] on `count` interior levels.
pub fn comparison_theorem_check_levels(
    exec: Execution,
    f: &GridFunction,
    cost: &CostSpec,
    mu: MeasureSpec,
    count: usize,
) -> Result<ComparisonTheoremReport> {
    comparison_at(exec, f, cost, mu, |fs: [&GridFunction; 3]| interior_levels(&fs, count))
}

fn comparison_at<L: FnOnce([&GridFunction; 3]) -> Vec<f64>>(
    exec: Execution,
    f: &GridFunction,
    cost: &CostSpec,
    mu: MeasureSpec,
    choose: L,
) -> Result<ComparisonTheoremReport> {
    supported_pair(mu, cost)?;
    mu.check_grid(f.grid())?;
    let fs = increasing_rearrangement(f, mu)?;
    let q = inf_convolution_auto(exec, f, cost)?;
    let qs = inf_convolution_auto(exec, &fs, cost)?;
    let levels = choose([f, &q, &qs]);
    let pair = |v: Vec<crate::rearrange::LevelSetMass>| -> Vec<(f64, f64)> {
        v.into_iter().map(|m| (m.mass, m.error_bound)).collect()
    };
    let sub_q = pair(sublevel_masses(&q, &levels, mu)?);
    let sub_qs = pair(sublevel_masses(&qs, &levels, mu)?);
    let sup_q = pair(closed_superlevel_masses(&q, &levels, mu)?);
    let sup_qs = pair(closed_superlevel_masses(&qs, &levels, mu)?);
    Ok(ComparisonTheoremReport {
        sublevel: ComparisonReport::from_masses("mu{Qf_* < l} <= mu{Qf < l}", &levels, &sub_qs, &sub_q),
        superlevel: ComparisonReport::from_masses("mu{Qf >= l} <= mu{Qf_* >= l}", &levels, &sup_q, &sup_qs),
        rearranged_from: format!("increasing_rearrangement({mu:?}) on the input grid"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfLaxComparison {
    pub t: f64,
    /// `|{v_t < λ}| ≤ |{u_t < λ}|`.
    pub report: ComparisonReport,
}

/// Sublevel comparison of `u_t = Q_t f` and `v_t = Q_t f_*` for every `t`,
/// `levels` interior levels per time.
pub fn hopf_lax_comparison(
    exec: Execution,
    f: &GridFunction,
    g: &HopfLaxKernel,
    times: &[f64],
    levels: usize,
    mu: MeasureSpec,
) -> Result<Vec<HopfLaxComparison>> {
    supported_pair(mu, &CostSpec::HopfLax { g: g.clone(), t: 1.0 })?;
    let fs = increasing_rearrangement(f, mu)?;
    let per_t = map_slice(exec, times, |&t| -> Result<HopfLaxComparison> {
        let u = hopf_lax_with(Execution::Sequential, f, g, t)?;
        let v = hopf_lax_with(Execution::Sequential, &fs, g, t)?;
        let lambdas = interior_levels(&[f, &u, &v], levels);
        let mu_u: Vec<_> = sublevel_masses(&u, &lambdas, mu)?
            .into_iter()
            .map(|m| (m.mass, m.error_bound))
            .collect();
        let mu_v: Vec<_> = sublevel_masses(&v, &lambdas, mu)?
            .into_iter()
            .map(|m| (m.mass, m.error_bound))
            .collect();
        Ok(HopfLaxComparison {
            t,
            report: ComparisonReport::from_masses("|{v_t < l}| <= |{u_t < l}|", &lambdas, &mu_v, &mu_u),
        })
    });
    per_t.into_iter().collect()
}

/// Farey rationals `p/q` with `q ≤ d` and `|p/q| ≤ range`, sorted.
pub fn farey_rationals(d: usize, range: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for q in 1..=d as i64 {
        let pmax = (range * q as f64).floor() as i64;
        for p in -pmax..=pmax {
            out.push(p as f64 / q as f64);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionLevel {
    pub denominator: usize,
    pub rationals: usize,
    /// Nodes of the union not in `{Q f < λ}`; must be zero.
    pub union_excess: usize,
    /// Nodes of `{Q f < λ}` not covered by the union.
    pub residual: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub lambda: f64,
    pub sublevel_nodes: usize,
    pub boundary_components: usize,
    pub levels: Vec<DecompositionLevel>,
}

impl DecompositionReport {
    pub fn union_inside(&self) -> bool {
        self.levels.iter().all(|l| l.union_excess == 0)
    }

    pub fn residual_nonincreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].residual <= w[0].residual)
    }

    /// Residual at the largest budget per sublevel-boundary component.
    pub fn final_residual_per_component(&self) -> f64 {
        let r = self.levels.last().map(|l| l.residual).unwrap_or(0) as f64;
        if self.boundary_components == 0 {
            r
        } else {
            r / self.boundary_components as f64
        }
    }
}

fn boundary_components(set: &SetOnGrid) -> usize {
    let grid = set.grid();
    if grid.dim() == 1 {
        let m = set.mask();
        let mut c = m.windows(2).filter(|w| w[0] != w[1]).count();
        // Components touching the box ends are bounded by the box face as well.
        c += (m[0] as usize) + (*m.last().unwrap() as usize);
        c
    } else {
        (0..grid.len())
            .filter(|&i| set.contains(i) && set.boundary_layer(i))
            .count()
    }
}

/// Compares `{Q f < λ}` with `∪_{q₁ + q₂ < λ} {f < q₁}_{φ, q₂}` over Farey
/// rationals of each denominator budget in `denominators`.
pub fn decomposition_check(
    f: &GridFunction,
    cost: &CostSpec,
    lambda: f64,
    denominators: &[usize],
) -> Result<DecompositionReport> {
    decomposition_check_with(Execution::default(), f, cost, lambda, denominators)
}

pub fn decomposition_check_with(
    exec: Execution,
    f: &GridFunction,
    cost: &CostSpec,
    lambda: f64,
    denominators: &[usize],
) -> Result<DecompositionReport> {
    cost.validate()?;
    let grid = f.grid();
    let q = inf_convolution_auto(exec, f, cost)?;
    let sub = SetOnGrid::from_predicate(grid, |i| q.values()[i] < lambda);
    let fmin = f.min_value();
    let pts = grid.points();
    let corners = [0, grid.len() - 1];
    let mut cmin = cost.radial(0.0).unwrap_or(f64::INFINITY);
    for &a in &corners {
        for &b in &corners {
            cmin = cmin.min(cost.eval(&pts[a], &pts[b]));
        }
    }
    // q₁ ranges over (min f, λ − min φ) and q₂ over [min φ, λ − min f).
    let range = [fmin, cmin, lambda - fmin, lambda - cmin]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        + 1.0;
    let mut levels = Vec::with_capacity(denominators.len());
    for &d in denominators {
        let rats = farey_rationals(d, range);
        let mut union = SetOnGrid::empty(grid);
        for &q1 in rats.iter().filter(|&&q1| q1 > fmin) {
            let cap = lambda - q1;
            let k = rats.partition_point(|&r| r < cap);
            if k == 0 {
                continue;
            }
            let q2 = rats[k - 1];
            let a = SetOnGrid::from_predicate(grid, |i| f.values()[i] < q1);
            union.union_with(&enlarge_with(exec, &a, cost, q2)?);
        }
        let excess = (0..grid.len())
            .filter(|&i| union.contains(i) && !sub.contains(i))
            .count();
        let residual = (0..grid.len())
            .filter(|&i| sub.contains(i) && !union.contains(i))
            .count();
        levels.push(DecompositionLevel {
            denominator: d,
            rationals: rats.len(),
            union_excess: excess,
            residual,
        });
    }
    Ok(DecompositionReport {
        lambda,
        sublevel_nodes: sub.count(),
        boundary_components: boundary_components(&sub),
        levels,
    })
}
