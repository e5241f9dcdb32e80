//! Seeded harnesses for the nine acceptance criteria, shared by the
//! `acceptance` test target and the `verify-all` command.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base::{
    random_grid1d, random_grid_nd, random_profile, ConvexProfile, Grid, GridFunction, MeasureSpec, Quadratic,
    RandomConvexSpec,
};
use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::extremizer::{gaussian_distance, search_restarts, SearchConfig};
use crate::flow::{
    cordero_residual, flow_trace, integrand_identity_check, product_functional, BesselFlow, CorderoConfig, DualKind,
    FlowConfig,
};
use crate::infconv::{
    comparison_theorem_check_with, decomposition_check_with, hopf_lax_comparison, interior_levels, CostSpec,
    HopfLaxKernel,
};
use crate::rearrange::{
    enlargement_lipschitz_check, increasing_rearrangement, lipschitz_estimate, lipschitz_estimate_below,
};
use crate::special::sphere_area_squared;
use crate::transforms::{santalo_set_check, transform_comparison_check_with, SupportBody2D, TransformKind};

const LEB1: MeasureSpec = MeasureSpec::Lebesgue { n: 1 };

/// Slope excess allowed for the rearranged function, in units of the grid spacing.
pub const LIPSCHITZ_SLACK: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Divides every instance count by 8.
    pub fast: bool,
    #[serde(skip)]
    pub exec: Execution,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig {
            seed,
            fast: false,
            exec: Execution::default(),
        }
    }

    pub fn fast(mut self, fast: bool) -> Self {
        self.fast = fast;
        self
    }

    pub fn count(&self, full: usize) -> usize {
        if self.fast {
            (full / 8).max(1)
        } else {
            full
        }
    }

    fn instance_seed(&self, criterion: u64, i: usize) -> u64 {
        self.seed
            .wrapping_mul(1_000_003)
            .wrapping_add(criterion * 100_000 + i as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub pass: bool,
    pub instances: usize,
    pub summary: String,
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip)]
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {}: {} ({} instances; {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.instances,
            self.summary
        )
    }
}

struct Builder {
    id: usize,
    title: &'static str,
    start: Instant,
    metrics: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Builder {
    fn new(id: usize, title: &'static str) -> Self {
        Builder {
            id,
            title,
            start: Instant::now(),
            metrics: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    fn metric(&mut self, k: &str, v: f64) {
        self.metrics.insert(k.to_string(), v);
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn finish(self, instances: usize, ok_summary: String) -> CriterionReport {
        let pass = self.failures.is_empty();
        let summary = if pass {
            ok_summary
        } else {
            let mut s = self.failures[..self.failures.len().min(3)].join("; ");
            if self.failures.len() > 3 {
                s.push_str(&format!("; {} more", self.failures.len() - 3));
            }
            s
        };
        CriterionReport {
            id: self.id,
            title: self.title.to_string(),
            pass,
            instances,
            summary,
            metrics: self.metrics,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn random_line_function(seed: u64, grid: &Grid) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let spec = RandomConvexSpec::new(seed)
        .with_knots(rng.random_range(2..5))
        .with_asymmetry(rng.random_range(0.0..2.0))
        .with_translation(vec![rng.random_range(-1.5..1.5)]);
    random_grid1d(&spec, grid)
}

/// Level-set comparison of `Q_φ f` and `Q_φ f_*` in both forms.
pub fn criterion_level_sets(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(1, "inf-convolution level-set comparison, both forms");
    let n = cfg.count(500);
    let grid = Grid::line(-8.0, 8.0, 321).expect("grid");
    let costs = [CostSpec::distance(), CostSpec::quadratic(0.1), CostSpec::quadratic(1.0)];
    let results = map_indexed(cfg.exec, n, |i| -> Result<(bool, f64)> {
        let f = random_line_function(cfg.instance_seed(1, i), &grid)?;
        let mut ok = true;
        let mut slack = 0.0f64;
        for c in &costs {
            let r = comparison_theorem_check_with(Execution::Sequential, &f, c, LEB1, &[])?;
            ok &= r.pass() && r.sublevel.rows.len() == 64;
            slack = slack.max(r.sublevel.max_slack).max(r.superlevel.max_slack);
        }
        Ok((ok, slack))
    });
    let mut max_slack = 0.0f64;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((ok, s)) => {
                b.require(ok, format!("instance {i} violates a comparison"));
                max_slack = max_slack.max(s);
            }
            Err(e) => b.require(false, format!("instance {i}: {e}")),
        }
    }
    let secs = b.start.elapsed().as_secs_f64();
    b.metric("max_slack", max_slack);
    b.metric("max_slack_over_h", max_slack / grid.max_spacing());
    b.require(secs < 60.0, format!("took {secs:.1} s"));
    b.finish(
        n,
        format!(
            "3 costs x 64 levels each, slack <= {:.2} h",
            max_slack / grid.max_spacing()
        ),
    )
}

/// Union-of-enlargements decomposition against the sublevel set of `Q_φ f`.
pub fn criterion_decomposition(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(2, "union-of-enlargements decomposition of sublevel sets");
    let n = cfg.count(50);
    let grid = Grid::line(-4.0, 4.0, 161).expect("grid");
    let dens = [4, 8, 16, 32];
    let results = map_indexed(cfg.exec, n, |i| -> Result<_> {
        let f = random_line_function(cfg.instance_seed(2, i), &grid)?;
        let lambda = interior_levels(&[&f], 3)[1];
        decomposition_check_with(Execution::Sequential, &f, &CostSpec::distance(), lambda, &dens)
    });
    let mut worst = 0.0f64;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(r) => {
                b.require(r.union_inside(), format!("instance {i}: union leaves the sublevel set"));
                b.require(
                    r.residual_nonincreasing(),
                    format!("instance {i}: residual grows with D"),
                );
                let per = r.final_residual_per_component();
                b.require(per <= 2.0, format!("instance {i}: {per} residual cells per component"));
                worst = worst.max(per);
            }
            Err(e) => b.require(false, format!("instance {i}: {e}")),
        }
    }
    b.metric("max_residual_per_component_d32", worst);
    b.finish(
        n,
        format!("D = 4..32, worst {worst} cells per boundary component at D = 32"),
    )
}

fn quad_form(g: &Grid, a: [[f64; 2]; 2]) -> GridFunction {
    GridFunction::from_fn(g.clone(), |p| {
        0.5 * (a[0][0] * p[0] * p[0] + 2.0 * a[0][1] * p[0] * p[1] + a[1][1] * p[1] * p[1])
    })
    .expect("finite quadratic form")
}

/// Legendre and polar transforms compared with those of the rearrangement.
pub fn criterion_transforms(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(3, "Legendre and polar transforms of f versus f_*");
    let n = cfg.count(200);
    let g = Grid::centered_cube(2, 3.0, 25).expect("grid");
    let out = Grid::centered_cube(2, 2.0, 25).expect("grid");
    let kinds = [TransformKind::Legendre, TransformKind::Polar];
    let results = map_indexed(cfg.exec, n, |i| -> Result<bool> {
        let seed = cfg.instance_seed(3, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = RandomConvexSpec::new(seed)
            .with_knots(rng.random_range(2..5))
            .with_curvature(rng.random_range(0.0..1.0))
            .with_asymmetry(rng.random_range(0.0..3.0));
        let f = random_grid_nd(&spec, &g)?;
        let mut ok = true;
        for k in &kinds {
            ok &= transform_comparison_check_with(Execution::Sequential, &f, k, &[], &out)?.pass();
        }
        Ok(ok)
    });
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(ok) => b.require(ok, format!("instance {i} violates a transform comparison")),
            Err(e) => b.require(false, format!("instance {i}: {e}")),
        }
    }
    // Unimodular quadratic forms are equality cases.
    let big = Grid::centered_cube(2, 4.0, 41).expect("grid");
    let eq_out = Grid::centered_cube(2, 3.0, 41).expect("grid");
    let (c, s) = (0.6f64.cos(), 0.6f64.sin());
    let forms = [
        [[1.0, 0.0], [0.0, 1.0]],
        [[2.0, 0.0], [0.0, 0.5]],
        // Rotation of diag(1.5, 1/1.5).
        [
            [1.5 * c * c + s * s / 1.5, (1.5 - 1.0 / 1.5) * c * s],
            [(1.5 - 1.0 / 1.5) * c * s, 1.5 * s * s + c * c / 1.5],
        ],
    ];
    let mut equalities = 0;
    for a in forms {
        let f = quad_form(&big, a);
        for k in &kinds {
            match transform_comparison_check_with(cfg.exec, &f, k, &[], &eq_out) {
                Ok(r) => {
                    let eq = r.pass() && r.comparison.equal_within_slack();
                    b.require(eq, format!("{} of det-1 form {a:?} is not an equality case", k.tag()));
                    equalities += eq as usize;
                }
                Err(e) => b.require(false, format!("det-1 form: {e}")),
            }
        }
    }
    b.metric("equality_cases", equalities as f64);
    b.finish(
        n,
        format!("2 transforms each; {equalities}/6 unimodular equality cases"),
    )
}

/// `|K||K°| ≤ π²` and `|K°| ≤ |(K*)°|` for random symmetric bodies.
pub fn criterion_santalo_sets(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(4, "set-level Blaschke-Santalo for symmetric planar bodies");
    let n = cfg.count(100);
    let mut max_product = 0.0f64;
    for i in 0..n {
        let seed = cfg.instance_seed(4, i);
        let sigma = 0.1 + 0.4 * (i % 5) as f64 / 4.0;
        match SupportBody2D::random(seed, 256, sigma) {
            Ok(k) => {
                let r = santalo_set_check(&k);
                b.require(r.product <= PI * PI + 1e-3, format!("body {i}: product {}", r.product));
                b.require(
                    r.polar_area <= r.rearranged_polar_area + 1e-3,
                    format!(
                        "body {i}: |K°| = {} > |(K*)°| = {}",
                        r.polar_area, r.rearranged_polar_area
                    ),
                );
                max_product = max_product.max(r.product);
            }
            Err(e) => b.require(false, format!("body {i}: {e}")),
        }
    }
    let disc = SupportBody2D::disc(1.0, 8192).expect("disc");
    let gap = (santalo_set_check(&disc).product - PI * PI).abs();
    b.require(gap < 1e-6, format!("disc misses pi^2 by {gap:e}"));
    b.metric("max_product", max_product);
    b.metric("disc_gap", gap);
    b.finish(n, format!("max |K||K°| = {max_product:.6}, disc gap {gap:.1e}"))
}

/// Hopf-Lax sublevel comparison over a time grid.
pub fn criterion_hopf_lax(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(5, "Hopf-Lax solutions from f and f_*");
    let n = cfg.count(100);
    let grid = Grid::line(-8.0, 8.0, 321).expect("grid");
    let times = [0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.0];
    let g = HopfLaxKernel::Quadratic;
    let results = map_indexed(cfg.exec, n, |i| -> Result<bool> {
        let f = random_line_function(cfg.instance_seed(5, i), &grid)?;
        let reps = hopf_lax_comparison(Execution::Sequential, &f, &g, &times, 64, LEB1)?;
        Ok(reps.iter().all(|r| r.report.pass && r.report.rows.len() == 64))
    });
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(ok) => b.require(ok, format!("instance {i} violates the comparison")),
            Err(e) => b.require(false, format!("instance {i}: {e}")),
        }
    }
    // A translated even function has the same sublevel masses as its rearrangement.
    let mut equalities = 0;
    for (k, c) in [-1.3, 0.4, 2.1].into_iter().enumerate() {
        let psi = match random_profile(&RandomConvexSpec::new(cfg.instance_seed(5, 1000 + k))) {
            Ok(p) => p,
            Err(e) => {
                b.require(false, format!("profile: {e}"));
                continue;
            }
        };
        let f = GridFunction::from_fn(grid.clone(), |p| psi.eval((p[0] - c).abs())).expect("finite");
        match hopf_lax_comparison(cfg.exec, &f, &g, &times, 64, LEB1) {
            Ok(reps) => {
                let eq = reps.iter().all(|r| r.report.pass && r.report.equal_within_slack());
                b.require(eq, format!("translation by {c} is not an equality case"));
                equalities += eq as usize;
            }
            Err(e) => b.require(false, format!("translated instance: {e}")),
        }
    }
    b.finish(
        n,
        format!("8 times x 64 levels; {equalities}/3 translated equality cases"),
    )
}

/// Lipschitz preservation and the enlargement characterization of the constant.
pub fn criterion_lipschitz(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(6, "Lipschitz constant of f_* and the enlargement characterization");
    let n = cfg.count(500);
    let grid = Grid::line(-6.0, 6.0, 241).expect("grid");
    let h = grid.max_spacing();
    let eps: Vec<f64> = (1..=12).map(|k| 2.0 * k as f64 * h).collect();
    let results = map_indexed(cfg.exec, n, |i| -> Result<(f64, bool, bool)> {
        let f = random_line_function(cfg.instance_seed(6, i), &grid)?;
        let fs = increasing_rearrangement(&f, LEB1)?;
        // Past the lowest boundary value the box clips one side of every sublevel set.
        let inside = f
            .grid()
            .boundary_nodes()
            .iter()
            .map(|&i| f.values()[i])
            .fold(f64::INFINITY, f64::min);
        let (l, ls) = (lipschitz_estimate(&f)?, lipschitz_estimate_below(&fs, inside));
        let lambdas = interior_levels(&[&f], 24);
        let holds = enlargement_lipschitz_check(&f, l, &eps, &lambdas)?.holds();
        // Sharpness on the lower half of the range, where every enlargement stays in the box.
        // By convexity the slope only grows past `mid`, so 0.9 times the slope below it must fail.
        let lo = f.min_value();
        let mid = 0.5 * (lo + inside);
        let low: Vec<f64> = (1..=12).map(|k| lo + (mid - lo) * k as f64 / 12.0).collect();
        let fails = !enlargement_lipschitz_check(&f, 0.9 * lipschitz_estimate_below(&f, mid), &eps, &low)?.holds();
        Ok(((ls - l) / h, holds, fails))
    });
    let mut worst = f64::NEG_INFINITY;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((excess, holds, fails)) => {
                b.require(
                    excess <= LIPSCHITZ_SLACK,
                    format!("instance {i}: Lip(f_*) exceeds Lip(f) by {excess:.3} h"),
                );
                b.require(holds, format!("instance {i}: inclusion fails at L"));
                b.require(fails, format!("instance {i}: inclusion survives 0.9 L"));
                worst = worst.max(excess);
            }
            Err(e) => b.require(false, format!("instance {i}: {e}")),
        }
    }
    b.metric("max_lipschitz_excess_over_h", worst);
    b.finish(
        n,
        format!("Lip(f_*) - Lip(f) <= {worst:+.3} h (allowed {LIPSCHITZ_SLACK} h)"),
    )
}

fn gaussian_flow_error(n: usize) -> f64 {
    let mut worst = 0.0f64;
    for &t in &[0.01, 0.1, 1.0, 10.0, 50.0] {
        let flow = BesselFlow::new(&Quadratic, n, t).expect("valid flow");
        for k in 0..=40 {
            let r = 0.125 * k as f64;
            let want = r * r / (2.0 * (1.0 + 2.0 * t)) + 0.5 * n as f64 * (1.0 + 2.0 * t).ln();
            worst = worst.max((flow.value(r) - want).abs());
        }
    }
    worst
}

/// Closed forms, conservation, monotonicity and limits of the Bessel flow.
pub fn criterion_flow(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(7, "Bessel flow closed forms, conservation and monotonicity");
    let err1 = gaussian_flow_error(1);
    b.require(err1 < 1e-6, format!("Gaussian flow off by {err1:e} (n = 1)"));
    b.metric("gaussian_error_n1", err1);
    let mut worst_res = 0.0f64;
    for n in 1..=2 {
        for &t in &[0.2, 1.0] {
            match cordero_residual(&Quadratic, n, t, &CorderoConfig::default()) {
                Ok(r) => {
                    b.require(
                        r.residual < 1e-4,
                        format!("Gaussian residual {} (n = {n}, t = {t})", r.residual),
                    );
                    worst_res = worst_res.max(r.residual);
                }
                Err(e) => b.require(false, format!("Gaussian residual: {e}")),
            }
        }
    }
    b.metric("gaussian_cordero_residual", worst_res);

    let count = cfg.count(100);
    let times = [0.0, 0.05, 0.2, 0.5, 1.0, 2.0];
    let flow_cfg = FlowConfig {
        residuals: false,
        samples: 5,
        ..FlowConfig::default()
    };
    let jobs = count * 3;
    let results = map_indexed(cfg.exec, jobs, |j| -> Result<(f64, f64, f64, bool)> {
        let (i, n) = (j / 3, j % 3 + 1);
        let psi = random_profile(&RandomConvexSpec::new(cfg.instance_seed(7, i)))?;
        let tr = flow_trace(&psi, n, &times, DualKind::Legendre, &flow_cfg, Execution::Sequential)?;
        let excess = tr
            .products()
            .iter()
            .map(|p| p - (2.0 * PI).powi(n as i32))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((tr.max_mass_drift(), tr.max_alpha_drop(), excess, tr.verdicts.pass()))
    });
    let (mut drift, mut drop, mut excess) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for (j, r) in results.into_iter().enumerate() {
        match r {
            Ok((d, a, e, ok)) => {
                b.require(
                    ok,
                    format!(
                        "profile {} n = {}: drift {d:e}, drop {a:e}, excess {e:e}",
                        j / 3,
                        j % 3 + 1
                    ),
                );
                drift = drift.max(d);
                drop = drop.max(a);
                excess = excess.max(e);
            }
            Err(e) => b.require(false, format!("profile {} n = {}: {e}", j / 3, j % 3 + 1)),
        }
    }
    b.metric("max_mass_drift", drift);
    b.metric("max_alpha_drop", drop);
    b.metric("max_product_excess", excess);

    // Residual against its tolerance model on seeded profiles.
    let rcount = cfg.count(20);
    let res = map_indexed(cfg.exec, rcount, |i| -> Result<bool> {
        let psi = random_profile(&RandomConvexSpec::new(cfg.instance_seed(7, 500 + i)))?;
        Ok(cordero_residual(&psi, 1 + i % 2, 0.5, &CorderoConfig::default())?.pass())
    });
    for (i, r) in res.into_iter().enumerate() {
        match r {
            Ok(ok) => b.require(ok, format!("residual of profile {i} exceeds its tolerance")),
            Err(e) => b.require(false, format!("residual of profile {i}: {e}")),
        }
    }

    // Large-time limit of the normalized product.
    let mut limit_gap = 0.0f64;
    let limit_profiles: Vec<ConvexProfile> = (0..3)
        .filter_map(|i| random_profile(&RandomConvexSpec::new(cfg.instance_seed(7, 900 + i))).ok())
        .chain(ConvexProfile::linear(1.0).ok())
        .collect();
    for psi in &limit_profiles {
        for n in 1..=2 {
            let state = crate::flow::flow_state(psi, n, 50.0, DualKind::Legendre, &flow_cfg);
            match state {
                Ok(s) => {
                    let bound = (2.0 * PI).powi(n as i32);
                    let gap = (bound - s.product()) / bound;
                    b.require(
                        gap.abs() <= 0.01,
                        format!("product at t = 50 is {:.3}% off (n = {n})", 100.0 * gap),
                    );
                    limit_gap = limit_gap.max(gap.abs());
                }
                Err(e) => b.require(false, format!("t = 50 state: {e}")),
            }
        }
    }
    b.metric("limit_gap_t50", limit_gap);
    b.finish(
        count * 3,
        format!(
            "Gaussian error {err1:.1e}, residual {worst_res:.1e}, drift {drift:.1e}, alpha drop {drop:.1e}, t=50 gap {:.2}%",
            100.0 * limit_gap
        ),
    )
}

/// Extremizer search for the Legendre product, and the polar property checks.
pub fn criterion_extremizer(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(8, "radial extremizer search");
    let restarts = if cfg.fast { 2 } else { 8 };
    let budget = cfg.count(5000);
    let base = SearchConfig {
        budget,
        seed: cfg.instance_seed(8, 0),
        ..SearchConfig::default()
    };
    let mut summary = Vec::new();
    for n in 1..=2 {
        let target = if n == 1 { 0.99 } else { 0.98 } * (2.0 * PI).powi(n as i32);
        match search_restarts(&SearchConfig { n, ..base.clone() }, restarts, cfg.exec) {
            Ok(r) => {
                let bound = (2.0 * PI).powi(n as i32);
                b.require(
                    r.value >= target,
                    format!("n = {n}: best {:.5} below {target:.5}", r.value),
                );
                b.require(
                    r.value <= bound + 1e-4,
                    format!("n = {n}: {} exceeds the bound", r.value),
                );
                b.require(
                    r.history.windows(2).all(|w| w[1] >= w[0]),
                    format!("n = {n}: history decreases"),
                );
                b.metric(&format!("legendre_value_n{n}"), r.value);
                summary.push(format!("n={n}: {:.4}% of (2pi)^n", 100.0 * r.value / bound));
                if n == 1 {
                    match gaussian_distance(&r.profile, 1, 3.0) {
                        Ok(d) => {
                            b.require(d <= 0.05, format!("profile is {d:.4} from r^2/2 on [0, 3]"));
                            b.metric("gaussian_distance_n1", d);
                            summary.push(format!("sup |psi - r^2/2| = {d:.4}"));
                        }
                        Err(e) => b.require(false, format!("distance: {e}")),
                    }
                }
            }
            Err(e) => b.require(false, format!("n = {n}: {e}")),
        }
    }
    let polar_cfg = SearchConfig {
        kind: DualKind::Polar,
        budget: cfg.count(1500),
        ..base
    };
    let reference = product_functional(&Quadratic, 1, DualKind::Polar).unwrap_or(f64::NAN);
    match search_restarts(&polar_cfg, restarts.min(4), cfg.exec) {
        Ok(r) => {
            b.require(r.history.windows(2).all(|w| w[1] >= w[0]), "polar history decreases");
            b.require(
                r.value >= reference,
                format!("polar best {:.5} below the value {reference:.5} at r^2/2", r.value),
            );
            b.metric("polar_value_n1", r.value);
            b.metric("polar_reference_n1", reference);
            summary.push(format!("polar {:.4} vs {reference:.4} at r^2/2", r.value));
        }
        Err(e) => b.require(false, format!("polar search: {e}")),
    }
    b.finish(restarts, summary.join(", "))
}

/// Pointwise square identity on random strictly convex windows.
pub fn criterion_identity(cfg: &VerifyConfig) -> CriterionReport {
    let mut b = Builder::new(9, "pointwise square identity of the monotonicity integrand");
    let n = cfg.count(1000);
    let results = map_indexed(cfg.exec, n, |i| -> Result<(f64, f64)> {
        let seed = cfg.instance_seed(9, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_profile(&RandomConvexSpec::new(seed))?;
        let q = rng.random_range(1e-3..2.0);
        let eps = rng.random_range(0.0..0.1);
        let lo = rng.random_range(0.01..1.0);
        let hi = lo + rng.random_range(0.5..4.0);
        let h = (hi - lo) / 256.0;
        let r: Vec<f64> = (0..=256).map(|k| lo + h * k as f64).collect();
        let v: Vec<f64> = r.iter().map(|&x| psi.eval(x) + 0.5 * q * x * x).collect();
        let rep = integrand_identity_check(&r, &v, (lo, hi), eps)?;
        Ok((rep.max_deviation, rep.min_rhs))
    });
    let (mut dev, mut rhs) = (0.0f64, f64::INFINITY);
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((d, m)) => {
                b.require(d < 1e-12, format!("window {i}: deviation {d:e}"));
                b.require(m >= 0.0, format!("window {i}: negative right-hand side {m:e}"));
                dev = dev.max(d);
                rhs = rhs.min(m);
            }
            Err(e) => b.require(false, format!("window {i}: {e}")),
        }
    }
    b.metric("max_deviation", dev);
    b.metric("min_rhs", rhs);
    b.finish(n, format!("max relative deviation {dev:.1e}, min rhs {rhs:.1e}"))
}

pub type Criterion = fn(&VerifyConfig) -> CriterionReport;

pub const CRITERIA: [Criterion; 9] = [
    criterion_level_sets,
    criterion_decomposition,
    criterion_transforms,
    criterion_santalo_sets,
    criterion_hopf_lax,
    criterion_lipschitz,
    criterion_flow,
    criterion_extremizer,
    criterion_identity,
];

pub fn verify_all(cfg: &VerifyConfig) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| c(cfg)).collect()
}

/// `(nω_n)²`, re-exported for report headers.
pub fn sphere_factor(n: usize) -> f64 {
    sphere_area_squared(n)
}
