//! Command implementations. Each resolves its settings first, rejects unknown
//! config keys, then computes and writes its artifacts.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isorearr::extremizer::{search_restarts, SearchConfig};
use isorearr::flow::{flow_trace, DualKind, FlowConfig};
use isorearr::infconv::{
    comparison_theorem_check_levels, hopf_lax_comparison, interior_levels, ComparisonReport,
    CostSpec, HopfLaxKernel, MonotoneMap,
};
use isorearr::rearrange::{increasing_rearrangement, sublevel_masses, LevelSetMass};
use isorearr::report::{
    comparison_csv, criteria_csv, flow_csv, profile_csv, rearrangement_csv, to_json, LinePlot,
    Series,
};
use isorearr::serial::Document;
use isorearr::transforms::{
    legendre_profile, polar_profile, polar_profile_scan, transform_comparison_check_with,
    TransformKind,
};
use isorearr::verify::{verify_all, VerifyConfig};
use isorearr::{
    random_grid1d, random_grid_nd, random_profile, ConvexProfile, Execution, Grid, GridFunction,
    MeasureSpec, Quadratic, RadialPotential, RandomConvexSpec,
};

use crate::run::Run;
use crate::settings::{RealList, Settings};
use crate::{Command, Common};

const DEFAULT_SEED: u64 = 1;

/// Shared per-run values resolved from [`Common`].
struct Ctx {
    seed: u64,
    fast: bool,
    exec: Execution,
}

impl Ctx {
    fn scale(&self, full: usize, floor: usize) -> usize {
        if self.fast {
            (full / 8).max(floor)
        } else {
            full
        }
    }

    /// Odd node count, scaled by `--fast`.
    fn nodes(&self, full: usize, floor: usize) -> usize {
        self.scale(full, floor) | 1
    }
}

pub fn execute(command: Command, common: &Common, s: &mut Settings, run: &mut Run) -> Result<()> {
    let ctx = Ctx {
        seed: s.get("seed", common.seed, DEFAULT_SEED)?,
        fast: s.switch("fast", common.fast)?,
        exec: if s.switch("sequential", common.sequential)? {
            Execution::Sequential
        } else {
            Execution::default()
        },
    };
    run.seeds.push(ctx.seed);
    match command {
        Command::Rearrange { args, .. } => rearrange(&ctx, args, s, run),
        Command::Infconv { args, .. } => infconv(&ctx, args, s, run),
        Command::HjCompare { args, .. } => hj_compare(&ctx, args, s, run),
        Command::Legendre { args, .. } => legendre(&ctx, args, s, run),
        Command::Polar { args, .. } => polar(&ctx, args, s, run),
        Command::TransformCompare { args, .. } => transform_compare(&ctx, args, s, run),
        Command::SantaloFlow { args, .. } => santalo_flow(&ctx, args, s, run),
        Command::Extremize { args, .. } => extremize(&ctx, args, s, run),
        Command::VerifyAll { .. } => verify(&ctx, s, run),
    }
}

fn svg(run: &Run, plot: LinePlot) -> String {
    plot.to_svg(run.timestamp.as_deref())
}

fn measure(name: &str, dim: usize) -> Result<MeasureSpec> {
    match name {
        "lebesgue" => Ok(MeasureSpec::Lebesgue { n: dim }),
        "gaussian" if dim == 1 => Ok(MeasureSpec::Gaussian1D),
        "gaussian" => {
            bail!("field `measure`: the Gaussian measure is only available in dimension 1")
        }
        other => {
            bail!("field `measure`: unknown measure {other:?} (expected lebesgue or gaussian)")
        }
    }
}

fn comparison_plot(title: &str, r: &ComparisonReport) -> LinePlot {
    LinePlot::new(
        title,
        "lambda",
        "mass",
        vec![
            Series::new(
                "lhs",
                r.rows.iter().map(|x| (x.lambda, x.mass_lhs)).collect(),
            ),
            Series::new(
                "rhs",
                r.rows.iter().map(|x| (x.lambda, x.mass_rhs)).collect(),
            ),
        ],
    )
}

/// Random convex function on `[-w, w]` with random translation and asymmetry.
fn random_line(seed: u64, w: f64, nodes: usize) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let spec = RandomConvexSpec::new(seed)
        .with_knots(rng.random_range(2..5))
        .with_asymmetry(rng.random_range(0.0..2.0))
        .with_translation(vec![rng.random_range(-0.2 * w..0.2 * w)]);
    Ok(random_grid1d(&spec, &Grid::line(-w, w, nodes)?)?)
}

#[derive(Args, Debug)]
pub struct RearrangeArgs {
    /// Dimension of the grid (1 or 2).
    #[arg(long)]
    dim: Option<usize>,
    /// Nodes per axis.
    #[arg(long)]
    nodes: Option<usize>,
    /// Half width of the box.
    #[arg(long)]
    half_width: Option<f64>,
    /// lebesgue or gaussian (dimension 1 only).
    #[arg(long)]
    measure: Option<String>,
    /// Number of interior levels.
    #[arg(long)]
    lambda_grid: Option<usize>,
}

fn rearrange(ctx: &Ctx, a: RearrangeArgs, s: &mut Settings, run: &mut Run) -> Result<()> {
    let dim = s.get("dim", a.dim, 1usize)?;
    if !(1..=2).contains(&dim) {
        bail!("field `dim`: expected 1 or 2, got {dim}");
    }
    let nodes = s.get("nodes", a.nodes, if dim == 1 { 401 } else { 61 })?;
    let w = s.get("half-width", a.half_width, 4.0)?;
    let mu = measure(&s.get("measure", a.measure, "lebesgue".to_string())?, dim)?;
    let count = s.get("lambda-grid", a.lambda_grid, 64usize)?;
    s.finish()?;
    let nodes = ctx.nodes(nodes, 17);
    let f = if dim == 1 {
        random_line(ctx.seed, w, nodes)?
    } else {
        random_grid_nd(
            &RandomConvexSpec::new(ctx.seed).with_asymmetry(1.5),
            &Grid::centered_cube(2, w, nodes)?,
        )?
    };
    let fs = increasing_rearrangement(&f, mu)?;
    let levels = interior_levels(&[&f], count);
    let (mf, ms) = (
        sublevel_masses(&f, &levels, mu)?,
        sublevel_masses(&fs, &levels, mu)?,
    );
    let pair = |m: &[LevelSetMass]| {
        m.iter()
            .map(|m| (m.mass, m.error_bound))
            .collect::<Vec<_>>()
    };
    let rep =
        ComparisonReport::from_masses("mu{f < l} = mu{f_* < l}", &levels, &pair(&mf), &pair(&ms));
    let equal = rep.equal_within_slack();
    run.write("input.json", &Document::from(&f).to_json()?)?;
    run.write("rearranged.json", &Document::from(&fs).to_json()?)?;
    run.write("masses.csv", &rearrangement_csv(&mf, &ms)?)?;
    run.write(
        "masses.svg",
        &svg(run, comparison_plot("sublevel masses of f and f_*", &rep)),
    )?;
    run.verdict("equimeasurable", equal);
    Ok(())
}

#[derive(Args, Debug)]
pub struct InfconvArgs {
    /// distance or quadratic.
    #[arg(long)]
    cost: Option<String>,
    /// Time of the quadratic Hopf-Lax cost.
    #[arg(long)]
    t: Option<f64>,
    /// Number of interior levels.
    #[arg(long)]
    lambda_grid: Option<usize>,
    /// lebesgue or gaussian.
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
}

fn infconv(ctx: &Ctx, a: InfconvArgs, s: &mut Settings, run: &mut Run) -> Result<()> {
    let cost_name = s.get("cost", a.cost, "distance".to_string())?;
    let t = s.get("t", a.t, 1.0)?;
    let count = s.get("lambda-grid", a.lambda_grid, 64usize)?;
    let mu = measure(&s.get("measure", a.measure, "lebesgue".to_string())?, 1)?;
    let nodes = s.get("nodes", a.nodes, 321usize)?;
    let w = s.get("half-width", a.half_width, 8.0)?;
    s.finish()?;
    let cost = match cost_name.as_str() {
        "distance" => CostSpec::distance(),
        "quadratic" => CostSpec::quadratic(t),
        other => bail!("field `cost`: unknown cost {other:?} (expected distance or quadratic)"),
    };
    let f = random_line(ctx.seed, w, ctx.nodes(nodes, 41))?;
    let rep = comparison_theorem_check_levels(ctx.exec, &f, &cost, mu, count)?;
    run.write("sublevel.csv", &comparison_csv(&rep.sublevel)?)?;
    run.write("superlevel.csv", &comparison_csv(&rep.superlevel)?)?;
    run.write("report.json", &to_json(&rep)?)?;
    run.write(
        "sublevel.svg",
        &svg(run, comparison_plot(&rep.sublevel.form, &rep.sublevel)),
    )?;
    run.verdict("sublevel comparison", rep.sublevel.pass);
    run.verdict("superlevel comparison", rep.superlevel.pass);
    Ok(())
}

#[derive(Args, Debug)]
pub struct HopfLaxArgs {
    /// Comma-separated times.
    #[arg(long)]
    t: Option<RealList>,
    /// Number of interior levels per time.
    #[arg(long)]
    lambda_grid: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
}

fn hj_compare(ctx: &Ctx, a: HopfLaxArgs, s: &mut Settings, run: &mut Run) -> Result<()> {
    let times = s.get("t", a.t, RealList(vec![0.5]))?.0;
    let count = s.get("lambda-grid", a.lambda_grid, 64usize)?;
    let nodes = s.get("nodes", a.nodes, 321usize)?;
    let w = s.get("half-width", a.half_width, 8.0)?;
    s.finish()?;
    let f = random_line(ctx.seed, w, ctx.nodes(nodes, 41))?;
    let reps = hopf_lax_comparison(
        ctx.exec,
        &f,
        &HopfLaxKernel::Quadratic,
        &times,
        count,
        MeasureSpec::Lebesgue { n: 1 },
    )?;
    for (k, r) in reps.iter().enumerate() {
        run.write(&format!("t{k}.csv"), &comparison_csv(&r.report)?)?;
        run.verdict(format!("t = {}", r.t), r.report.pass);
    }
    run.write("report.json", &to_json(&reps)?)?;
    if let Some(r) = reps.first() {
        let title = format!("sublevel masses at t = {}", r.t);
        run.write("t0.svg", &svg(run, comparison_plot(&title, &r.report)))?;
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct RadialArgs {
    /// gaussian, linear, random or a path to a profile JSON document.
    #[arg(long)]
    profile: Option<String>,
    /// Slope of the linear profile.
    #[arg(long)]
    slope: Option<f64>,
    /// Number of sample points.
    #[arg(long)]
    samples: Option<usize>,
    /// Largest sampled argument.
    #[arg(long)]
    max: Option<f64>,
}

enum Profile {
    Gaussian,
    Piecewise(ConvexProfile),
}

fn profile(seed: u64, name: &str, slope: f64) -> Result<Profile> {
    Ok(match name {
        "gaussian" => Profile::Gaussian,
        "linear" => Profile::Piecewise(ConvexProfile::linear(slope)?),
        "random" => Profile::Piecewise(random_profile(&RandomConvexSpec::new(seed))?),
        path => {
            let text = std::fs::read_to_string(PathBuf::from(path)).map_err(|e| {
                anyhow!("field `profile`: {path:?} is not a known profile or a readable file: {e}")
            })?;
            Profile::Piecewise(Document::from_json(&text)?.into_profile()?)
        }
    })
}

/// Piecewise-linear profile for the exact radial transforms; r²/2 is interpolated.
fn piecewise(p: Profile) -> Result<ConvexProfile> {
    match p {
        Profile::Gaussian => Ok(ConvexProfile::quadratic_interpolant(8.0, 257)?),
        Profile::Piecewise(c) => Ok(c),
    }
}

fn radial_settings(
    a: RadialArgs,
    s: &mut Settings,
    ctx: &Ctx,
) -> Result<(ConvexProfile, Vec<f64>)> {
    let name = s.get("profile", a.profile, "random".to_string())?;
    let slope = s.get("slope", a.slope, 1.0)?;
    let samples = s.get("samples", a.samples, 401usize)?;
    let max = s.get("max", a.max, 4.0)?;
    s.finish()?;
    if max.is_nan() || max <= 0.0 || samples < 2 {
        bail!("field `max` must be positive and `samples` at least 2");
    }
    let psi = piecewise(profile(ctx.seed, &name, slope)?)?;
    let samples = ctx.scale(samples, 9);
    let xs = (0..samples)
        .map(|k| max * k as f64 / (samples - 1) as f64)
        .collect();
    Ok((psi, xs))
}

fn radial_csv(xs: &[f64], a: &[f64], b: &[f64], cols: [&str; 3]) -> String {
    let mut out = format!("{},{},{}\n", cols[0], cols[1], cols[2]);
    for ((x, u), v) in xs.iter().zip(a).zip(b) {
        out.push_str(&format!("{x:?},{u:?},{v:?}\n"));
    }
    out
}

fn legendre(ctx: &Ctx, a: RadialArgs, s: &mut Settings, run: &mut Run) -> Result<()> {
    let (psi, ps) = radial_settings(a, s, ctx)?;
    let conj = legendre_profile(&psi);
    let lp: Vec<f64> = ps.iter().map(|&p| conj.eval(p)).collect();
    // Fenchel-Young on a product grid, with equality at the chord slopes.
    let rs: Vec<f64> = (0..=64)
        .map(|k| psi.last_radius() * 1.5 * k as f64 / 64.0)
        .collect();
    let mut young = f64::INFINITY;
    for &r in &rs {
        for (&p, &l) in ps.iter().zip(&lp) {
            if l.is_finite() {
                young = young.min(psi.eval(r) + l - r * p);
            }
        }
    }
    let mut gap = 0.0f64;
    for &r in psi.radii().iter().skip(1) {
        let p = psi.right_slope(r);
        if p <= conj.domain_end {
            gap = gap.max((psi.eval(r) + conj.eval(p) - r * p).abs() / (1.0 + r * p));
        }
    }
    let psi_vals: Vec<f64> = ps.iter().map(|&r| psi.eval(r)).collect();
    run.write("profile.json", &Document::from(&psi).to_json()?)?;
    run.write("conjugate.json", &to_json(&conj)?)?;
    run.write(
        "legendre.csv",
        &radial_csv(&ps, &psi_vals, &lp, ["x", "profile", "legendre"]),
    )?;
    let finite = |v: &[f64]| {
        ps.iter()
            .zip(v)
            .map(|(&x, &y)| (x, y))
            .filter(|p| p.1.is_finite())
            .collect()
    };
    run.write(
        "legendre.svg",
        &svg(
            run,
            LinePlot::new(
                "profile and Legendre conjugate",
                "x",
                "value",
                vec![
                    Series::new("profile", finite(&psi_vals)),
                    Series::new("conjugate", finite(&lp)),
                ],
            ),
        ),
    )?;
    run.verdict("Fenchel-Young inequality", young >= -1e-12);
    run.verdict("equality at chord slopes", gap <= 1e-12);
    Ok(())
}

fn polar(ctx: &Ctx, a: RadialArgs, s: &mut Settings, run: &mut Run) -> Result<()> {
    let (psi, rs) = radial_settings(a, s, ctx)?;
    let exact = polar_profile(&psi, &rs);
    let s_max = 64.0 * (1.0 + psi.last_radius());
    let scan = polar_profile_scan(&psi, &rs, s_max, 4096);
    let mut below = true;
    let mut dev = 0.0f64;
    for ((&r, &e), &v) in rs.iter().zip(&exact).zip(&scan.values) {
        // The scan is a lower bound; it is sharp unless the sup sits past s_max.
        below &= v <= e + 1e-9 * (1.0 + e.abs());
        if e.is_finite() && !scan.truncated.contains(&r) {
            dev = dev.max((e - v) / (1.0 + e.abs()));
        }
    }
    let psi_vals: Vec<f64> = rs.iter().map(|&r| psi.eval(r)).collect();
    run.write("profile.json", &Document::from(&psi).to_json()?)?;
    run.write(
        "polar.csv",
        &radial_csv(&rs, &exact, &scan.values, ["r", "polar", "scan"]),
    )?;
    run.write(
        "polar.svg",
        &svg(
            run,
            LinePlot::new(
                "profile and polar",
                "r",
                "value",
                vec![
                    Series::new("profile", rs.iter().copied().zip(psi_vals).collect()),
                    Series::new(
                        "polar",
                        rs.iter().copied().zip(exact.iter().copied()).collect(),
                    ),
                ],
            ),
        ),
    )?;
    run.verdict("scan stays below the exact polar", below);
    run.verdict("scan agrees with the exact polar", dev <= 1e-6);
    Ok(())
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// legendre, polar or t.
    #[arg(long)]
    transform: Option<String>,
    /// For the T-transform: identity, cube or linear:<slope>.
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
    /// Half width of the output grid.
    #[arg(long)]
    out_half_width: Option<f64>,
}

fn parse_rho(name: &str) -> Result<MonotoneMap> {
    match name {
        "identity" => Ok(MonotoneMap::Identity),
        "cube" => Ok(MonotoneMap::Cube),
        other => match other.strip_prefix("linear:").map(str::parse::<f64>) {
            Some(Ok(slope)) => {
                let m = MonotoneMap::Linear { slope };
                m.validate()?;
                Ok(m)
            }
            _ => bail!("field `rho`: expected identity, cube or linear:<slope>, got {other:?}"),
        },
    }
}

fn transform_compare(ctx: &Ctx, a: TransformArgs, s: &mut Settings, run: &mut Run) -> Result<()> {
    let name = s.get("transform", a.transform, "legendre".to_string())?;
    let rho = s.get("rho", a.rho, "identity".to_string())?;
    let nodes = s.get("nodes", a.nodes, 25usize)?;
    let w = s.get("half-width", a.half_width, 3.0)?;
    let wo = s.get("out-half-width", a.out_half_width, 2.0)?;
    s.finish()?;
    let kind = match name.as_str() {
        "legendre" => TransformKind::Legendre,
        "polar" => TransformKind::Polar,
        "t" => TransformKind::T {
            rho: parse_rho(&rho)?,
        },
        other => {
            bail!("field `transform`: unknown transform {other:?} (expected legendre, polar or t)")
        }
    };
    let nodes = ctx.nodes(nodes, 9);
    let spec = RandomConvexSpec::new(ctx.seed)
        .with_knots(3)
        .with_curvature(0.5)
        .with_asymmetry(2.0);
    let f = random_grid_nd(&spec, &Grid::centered_cube(2, w, nodes)?)?;
    let rep = transform_comparison_check_with(
        ctx.exec,
        &f,
        &kind,
        &[],
        &Grid::centered_cube(2, wo, nodes)?,
    )?;
    run.write("comparison.csv", &comparison_csv(&rep.comparison)?)?;
    run.write("report.json", &to_json(&rep)?)?;
    run.write(
        "comparison.svg",
        &svg(run, comparison_plot(&rep.comparison.form, &rep.comparison)),
    )?;
    run.verdict(
        format!("{} level-set comparison", kind.tag()),
        rep.comparison.pass,
    );
    if !rep.polar_identity.is_empty() {
        run.verdict(
            "polar level-set identity",
            rep.polar_identity.iter().all(|r| r.pass()),
        );
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    /// gaussian, linear, random or a path to a profile JSON document.
    #[arg(long)]
    profile: Option<String>,
    /// Slope of the linear profile.
    #[arg(long)]
    slope: Option<f64>,
    /// Dimension, 1 to 3.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated times starting at 0.
    #[arg(long)]
    times: Option<RealList>,
    /// legendre or polar.
    #[arg(long)]
    kind: Option<String>,
    /// Evaluate the first-order residual at every positive time (true or false).
    #[arg(long)]
    residuals: Option<bool>,
}

fn dual_kind(name: &str) -> Result<DualKind> {
    match name {
        "legendre" => Ok(DualKind::Legendre),
        "polar" => Ok(DualKind::Polar),
        other => bail!("field `kind`: unknown dual {other:?} (expected legendre or polar)"),
    }
}

fn santalo_flow(ctx: &Ctx, a: FlowArgs, s: &mut Settings, run: &mut Run) -> Result<()> {
    let name = s.get("profile", a.profile, "gaussian".to_string())?;
    let slope = s.get("slope", a.slope, 1.0)?;
    let n = s.get("n", a.n, 1usize)?;
    let times = s
        .get(
            "times",
            a.times,
            RealList(vec![0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0]),
        )?
        .0;
    let kind = dual_kind(&s.get("kind", a.kind, "legendre".to_string())?)?;
    let residuals = s.get("residuals", a.residuals, true)?;
    s.finish()?;
    let cfg = FlowConfig {
        residuals,
        ..FlowConfig::default()
    };
    let p = profile(ctx.seed, &name, slope)?;
    let psi: &dyn RadialPotential = match &p {
        Profile::Gaussian => &Quadratic,
        Profile::Piecewise(c) => c,
    };
    let tr = flow_trace(psi, n, &times, kind, &cfg, ctx.exec)?;
    run.write("flow.csv", &flow_csv(&tr)?)?;
    run.write("flow.json", &to_json(&tr)?)?;
    let alpha = tr.states.iter().map(|st| (st.t, st.alpha)).collect();
    run.write(
        "alpha.svg",
        &svg(
            run,
            LinePlot::new("alpha(t)", "t", "alpha", vec![Series::new("alpha", alpha)]),
        ),
    )?;
    let v = &tr.verdicts;
    run.verdict("mass conserved", v.mass_conserved);
    // Monotonicity and the bound are claims about the Legendre dual only.
    if kind == DualKind::Legendre {
        run.verdict("alpha nondecreasing", v.alpha_monotone);
        run.verdict("product bounded", v.product_bounded);
    }
    if let Some(c) = v.cordero {
        run.verdict("residual within tolerance", c);
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct ExtremizeArgs {
    #[arg(long)]
    n: Option<usize>,
    /// legendre or polar.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    knots: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    /// Objective evaluations per restart.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
}

fn extremize(ctx: &Ctx, a: ExtremizeArgs, s: &mut Settings, run: &mut Run) -> Result<()> {
    let d = SearchConfig::default();
    let cfg = SearchConfig {
        n: s.get("n", a.n, d.n)?,
        kind: dual_kind(&s.get("kind", a.kind, "legendre".to_string())?)?,
        knots: s.get("knots", a.knots, d.knots)?,
        radius: s.get("radius", a.radius, d.radius)?,
        budget: ctx.scale(s.get("budget", a.budget, d.budget)?, 50),
        seed: ctx.seed,
        ..d
    };
    let restarts = ctx.scale(s.get("restarts", a.restarts, 4usize)?, 1);
    s.finish()?;
    let res = search_restarts(&cfg, restarts, ctx.exec)?;
    run.seeds = (0..restarts as u64).map(|i| ctx.seed + i).collect();
    run.write("result.json", &to_json(&res)?)?;
    run.write("profile.csv", &profile_csv(&res, cfg.radius, 200)?)?;
    let rs: Vec<f64> = (0..=200).map(|k| cfg.radius * k as f64 / 200.0).collect();
    run.write(
        "profile.svg",
        &svg(
            run,
            LinePlot::new(
                "best profile against r^2/2",
                "r",
                "value",
                vec![
                    Series::new(
                        "best",
                        rs.iter().map(|&r| (r, res.profile.eval(r))).collect(),
                    ),
                    Series::new("r^2/2", rs.iter().map(|&r| (r, 0.5 * r * r)).collect()),
                ],
            ),
        ),
    )?;
    let hist = res
        .history
        .iter()
        .enumerate()
        .map(|(k, &v)| (k as f64, v))
        .collect();
    run.write(
        "history.svg",
        &svg(
            run,
            LinePlot::new(
                "best value",
                "accepted step",
                "value",
                vec![Series::new("value", hist)],
            ),
        ),
    )?;
    run.verdict(
        "history nondecreasing",
        res.history.windows(2).all(|w| w[1] >= w[0]),
    );
    run.verdict("unit mass", res.normalization_residual <= 1e-9);
    if cfg.kind == DualKind::Legendre {
        run.verdict(
            "below (2pi)^n",
            res.value <= (2.0 * PI).powi(cfg.n as i32) + 1e-6,
        );
    }
    Ok(())
}

fn verify(ctx: &Ctx, s: &mut Settings, run: &mut Run) -> Result<()> {
    s.finish()?;
    let cfg = VerifyConfig {
        seed: ctx.seed,
        fast: ctx.fast,
        exec: ctx.exec,
    };
    let reports = verify_all(&cfg);
    for r in &reports {
        run.verdict(format!("criterion {}: {}", r.id, r.title), r.pass);
        run.timings
            .insert(format!("criterion_{}_seconds", r.id), r.seconds);
    }
    run.write("verify.json", &to_json(&reports)?)?;
    run.write("verify.csv", &criteria_csv(&reports)?)?;
    Ok(())
}
