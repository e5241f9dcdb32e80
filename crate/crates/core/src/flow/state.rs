use serde::{Deserialize, Serialize};

use crate::base::RadialPotential;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::special::sphere_area_squared;

use super::cordero::{cordero_residual, CorderoConfig, CorderoReport};
use super::functional::{
    check_dimension, dual_mass, extent, radial_mass, weighted_integral, DualKind, QUAD_REL_TOL, TAIL_LEVEL,
};
use super::kernel::{BesselFlow, KernelConfig};
use crate::quad::adaptive_split;

/// Relative drift allowed in `m(t)`.
pub const MASS_TOL: f64 = 1e-5;
/// Allowed decrease of `α` between consecutive times.
pub const ALPHA_TOL: f64 = 1e-6;
/// Slack on the normalized product bound `(2π)^n`.
pub const PRODUCT_TOL: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub kernel: KernelConfig,
    /// `Ψ_t` is sampled on `[0, sample_radius]`.
    pub sample_radius: f64,
    pub samples: usize,
    /// Evaluate the Cordero residual at every positive time.
    pub residuals: bool,
    pub cordero: CorderoConfig,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            kernel: KernelConfig::default(),
            sample_radius: 4.0,
            samples: 33,
            residuals: true,
            cordero: CorderoConfig::default(),
        }
    }
}

/// `Ψ_t` and its dual at one time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowState {
    pub t: f64,
    pub n: usize,
    pub radii: Vec<f64>,
    pub psi: Vec<f64>,
    pub slopes: Vec<f64>,
    /// `AΨ_t` at `slopes`.
    pub dual: Vec<f64>,
    pub mass: f64,
    /// `∫ e^{−AΨ_t} r^{n−1} dr`.
    pub alpha: f64,
    /// `α'(t)` from the square form of the integrand; `None` at `t = 0` or for the polar dual.
    pub alpha_rate: Option<f64>,
    /// Smallest `Ψ_t''` over the samples; `None` at `t = 0`.
    pub min_curvature: Option<f64>,
}

impl FlowState {
    pub fn product(&self) -> f64 {
        sphere_area_squared(self.n) * self.mass * self.alpha
    }
}

fn sample_radii(cfg: &FlowConfig) -> Vec<f64> {
    let k = cfg.samples.max(2);
    (0..k).map(|i| cfg.sample_radius * i as f64 / (k - 1) as f64).collect()
}

fn slope_grid(top: f64, k: usize) -> Vec<f64> {
    let k = k.max(2);
    (0..k).map(|i| top * i as f64 / (k - 1) as f64).collect()
}

/// State at `t = 0`, from the exact profile integrals.
fn initial_state<P: RadialPotential + ?Sized>(
    psi: &P,
    n: usize,
    kind: DualKind,
    cfg: &FlowConfig,
) -> Result<FlowState> {
    let radii = sample_radii(cfg);
    let values: Vec<f64> = radii.iter().map(|&r| psi.value(r)).collect();
    let top = psi.slope(cfg.sample_radius).min(psi.terminal_slope());
    let slopes = slope_grid(top, cfg.samples);
    let dual = slopes
        .iter()
        .map(|&p| match kind {
            DualKind::Legendre => psi.legendre(p),
            DualKind::Polar => psi.polar(p),
        })
        .collect();
    Ok(FlowState {
        t: 0.0,
        n,
        radii,
        psi: values,
        slopes,
        dual,
        mass: radial_mass(psi, n)?,
        alpha: dual_mass(psi, n, kind)?,
        alpha_rate: None,
        min_curvature: None,
    })
}

/// `∫₀^∞ e^{−LΨ_t(p)} p^{n−1} dp`, written in `s = (Ψ_t')^{-1}(p)` as
/// `∫₀^∞ e^{−(sΨ_t'(s) − Ψ_t(s))} Ψ_t'(s)^{n−1} Ψ_t''(s) ds`; also returns the
/// rate `∫ (p − sΨ_t'')²/s² e^{−LΨ_t(p)} p^{n−1} ds`.
fn legendre_integrals(flow: &BesselFlow<'_>, n: usize) -> Result<(f64, f64)> {
    let upper = parametric_extent(flow, n)?;
    let mut pts: Vec<f64> = flow.breakpoints().to_vec();
    pts.extend((0..).map(|k| 2f64.powi(k)).take_while(|&x| x < upper));
    pts.retain(|&b| b > 0.0 && b < upper);
    pts.push(0.0);
    pts.push(upper);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut alpha = |s: f64| {
        let j = flow.jet(s);
        (-(s * j.slope - j.value)).exp() * j.slope.powi(n as i32 - 1) * j.curvature
    };
    let mut a = adaptive_split(&mut alpha, &pts, 1e-15, QUAD_REL_TOL)?;
    // Past `upper` the profile is affine to working precision: LΨ_t and the
    // slope are frozen, the curvature vanishes and the rate integrand is p²/s².
    let end = flow.jet(upper);
    let end_weight = (-(upper * end.slope - end.value)).exp() * end.slope.powi(n as i32 - 1);
    let mut tail_rate = 0.0;
    if flow.terminal_slope().is_finite() {
        a += (flow.terminal_slope() - end.slope).max(0.0) * end_weight;
        tail_rate = end.slope * end.slope / upper * end_weight;
    }
    let mut rate = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let j = flow.jet(s);
        let q = (j.slope - s * j.curvature) / s;
        q * q * (-(s * j.slope - j.value)).exp() * j.slope.powi(n as i32 - 1)
    };
    let r = adaptive_split(&mut rate, &pts, 1e-15, QUAD_REL_TOL)?;
    Ok((a, r + tail_rate))
}

/// Radius past which the parametric integrands are treated as tails: either
/// the conjugate exponent has grown by [`TAIL_LEVEL`] or, for a finite terminal
/// slope, `Ψ_t'` is within `1e-13` of it relative. In dimension `n ≥ 2` the
/// slope converges only like `c/s²`, so the search is capped at
/// `1024·(1 + R + √t)` with `R` the last breakpoint; the frozen-slope tail
/// terms are then off by `O(c²/S³)`.
fn parametric_extent(flow: &BesselFlow<'_>, n: usize) -> Result<f64> {
    let s_inf = flow.terminal_slope();
    let base = -flow.value(0.0);
    let reach = flow.breakpoints().iter().copied().fold(0.0, f64::max);
    let cap = 1024.0 * (1.0 + reach + flow.t().sqrt());
    let mut s = 1.0f64;
    for _ in 0..60 {
        let j = flow.jet(s);
        let conj = s * j.slope - j.value;
        if conj - (n as f64 - 1.0) * j.slope.max(1.0).ln() >= base + TAIL_LEVEL {
            return Ok(s);
        }
        if s_inf.is_finite() && (s_inf - j.slope <= 1e-13 * s_inf || s >= cap) {
            return Ok(s);
        }
        s *= 2.0;
    }
    Err(Error::Numerical("conjugate integral does not converge".into()))
}

/// `Ψ_t`, `AΨ_t`, `m(t)` and `α(t)` computed from the kernel at time `t`.
pub fn flow_state<P: RadialPotential + ?Sized>(
    psi: &P,
    n: usize,
    t: f64,
    kind: DualKind,
    cfg: &FlowConfig,
) -> Result<FlowState> {
    check_dimension(n)?;
    if t == 0.0 {
        return initial_state(psi, n, kind, cfg);
    }
    let flow = BesselFlow::new(psi, n, t)?.with_config(cfg.kernel);
    let radii = sample_radii(cfg);
    let jets: Vec<_> = radii.iter().map(|&r| flow.jet(r)).collect();
    let min_curvature = jets[1..].iter().map(|j| j.curvature).fold(f64::INFINITY, f64::min);
    if !(min_curvature > 0.0) {
        return Err(Error::Numerical(format!(
            "Ψ_t lost strict convexity at t = {t}: curvature {min_curvature:e}"
        )));
    }
    let top = jets.last().expect("samples").slope;
    let slopes = slope_grid(top, cfg.samples);
    let dual = slopes
        .iter()
        .map(|&p| match kind {
            DualKind::Legendre => flow.legendre(p),
            DualKind::Polar => flow.polar(p),
        })
        .collect();
    let value = |r: f64| flow.value(r);
    let upper = extent(value, n)?;
    let mass = weighted_integral(value, n, flow.breakpoints(), upper)?;
    let (alpha, alpha_rate) = match kind {
        DualKind::Legendre => {
            let (a, r) = legendre_integrals(&flow, n)?;
            (a, Some(r))
        }
        DualKind::Polar => {
            let polar = |r: f64| flow.polar(r);
            let upper = extent(polar, n)?;
            (weighted_integral(polar, n, &[], upper)?, None)
        }
    };
    Ok(FlowState {
        t,
        n,
        radii,
        psi: jets.iter().map(|j| j.value).collect(),
        slopes,
        dual,
        mass,
        alpha,
        alpha_rate,
        min_curvature: Some(min_curvature),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowVerdicts {
    pub mass_conserved: bool,
    /// Always true for the polar dual, for which no monotonicity is claimed.
    pub alpha_monotone: bool,
    pub product_bounded: bool,
    /// `None` when no residual was evaluated.
    pub cordero: Option<bool>,
}

impl FlowVerdicts {
    pub fn pass(&self) -> bool {
        self.mass_conserved && self.alpha_monotone && self.product_bounded && self.cordero != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowTrace {
    pub n: usize,
    pub kind: DualKind,
    pub times: Vec<f64>,
    pub states: Vec<FlowState>,
    pub residuals: Vec<Option<CorderoReport>>,
    pub verdicts: FlowVerdicts,
}

impl FlowTrace {
    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.states[0].mass;
        self.states.iter().map(|s| (s.mass - m0).abs() / m0).fold(0.0, f64::max)
    }

    /// Largest `α(t_k) − α(t_{k+1})`, or 0 when `α` never decreases.
    pub fn max_alpha_drop(&self) -> f64 {
        self.states
            .windows(2)
            .map(|w| w[0].alpha - w[1].alpha)
            .fold(0.0, f64::max)
    }

    /// `(nω_n)² m(t) α(t)` per time.
    pub fn products(&self) -> Vec<f64> {
        self.states.iter().map(FlowState::product).collect()
    }
}

/// Evaluates the flow at each time of `times`, which must increase strictly from 0.
pub fn flow_trace<P: RadialPotential + ?Sized>(
    psi: &P,
    n: usize,
    times: &[f64],
    kind: DualKind,
    cfg: &FlowConfig,
    exec: Execution,
) -> Result<FlowTrace> {
    check_dimension(n)?;
    if times.first() != Some(&0.0) || times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "t-grid must start at 0 and increase strictly".into(),
        ));
    }
    let work = map_indexed(exec, times.len(), |i| {
        let t = times[i];
        let state = flow_state(psi, n, t, kind, cfg)?;
        let residual = if cfg.residuals && t > 0.0 && kind == DualKind::Legendre {
            Some(cordero_residual(psi, n, t, &cfg.cordero)?)
        } else {
            None
        };
        Ok::<_, Error>((state, residual))
    });
    let mut states = Vec::with_capacity(times.len());
    let mut residuals = Vec::with_capacity(times.len());
    for w in work {
        let (s, r): (FlowState, Option<CorderoReport>) = w?;
        states.push(s);
        residuals.push(r);
    }
    let bound = (2.0 * std::f64::consts::PI).powi(n as i32) + PRODUCT_TOL;
    let m0 = states[0].mass;
    let verdicts = FlowVerdicts {
        mass_conserved: states.iter().all(|s| (s.mass - m0).abs() <= MASS_TOL * m0),
        alpha_monotone: kind == DualKind::Polar || states.windows(2).all(|w| w[1].alpha >= w[0].alpha - ALPHA_TOL),
        product_bounded: kind == DualKind::Polar || states.iter().all(|s| s.product() <= bound),
        cordero: if residuals.iter().any(Option::is_some) {
            Some(residuals.iter().flatten().all(CorderoReport::pass))
        } else {
            None
        },
    };
    Ok(FlowTrace {
        n,
        kind,
        times: times.to_vec(),
        states,
        residuals,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{ConvexProfile, Quadratic};

    fn quick() -> FlowConfig {
        FlowConfig {
            residuals: false,
            samples: 9,
            ..FlowConfig::default()
        }
    }

    #[test]
    fn gaussian_is_stationary() {
        let times = [0.0, 0.1, 1.0, 10.0];
        for n in 1..=3 {
            let tr = flow_trace(
                &Quadratic,
                n,
                &times,
                DualKind::Legendre,
                &quick(),
                Execution::default(),
            )
            .unwrap();
            let a0 = tr.states[0].alpha;
            for s in &tr.states {
                assert!((s.alpha - a0).abs() < 1e-6, "n={n} t={}: {} vs {a0}", s.t, s.alpha);
                if let Some(rate) = s.alpha_rate {
                    assert!(rate.abs() < 1e-9);
                }
            }
            assert!(tr.verdicts.pass());
        }
    }

    #[test]
    fn linear_profile_increases_towards_the_bound() {
        let psi = ConvexProfile::linear(1.0).unwrap();
        let times = [0.0, 0.25, 1.0, 4.0];
        let tr = flow_trace(&psi, 1, &times, DualKind::Legendre, &quick(), Execution::default()).unwrap();
        assert!(tr.verdicts.pass(), "{:?}", tr.verdicts);
        let prods = tr.products();
        assert!(prods.windows(2).all(|w| w[1] > w[0]));
        assert!(*prods.last().unwrap() < 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn alpha_rate_matches_finite_difference() {
        let psi = ConvexProfile::new(vec![0.0, 0.7, 1.4], vec![0.0, 0.3, 1.3], 2.2).unwrap();
        for n in 1..=2 {
            let (t, dt) = (0.4, 1e-3);
            let s = flow_state(&psi, n, t, DualKind::Legendre, &quick()).unwrap();
            let up = flow_state(&psi, n, t + dt, DualKind::Legendre, &quick()).unwrap();
            let dn = flow_state(&psi, n, t - dt, DualKind::Legendre, &quick()).unwrap();
            let fd = (up.alpha - dn.alpha) / (2.0 * dt);
            let rate = s.alpha_rate.unwrap();
            assert!(rate > 0.0);
            assert!((fd - rate).abs() < 1e-5 * (1.0 + rate), "n={n}: {fd} vs {rate}");
        }
    }

    #[test]
    fn rejects_bad_time_grids() {
        let cfg = quick();
        assert!(flow_trace(
            &Quadratic,
            1,
            &[0.1, 0.2],
            DualKind::Legendre,
            &cfg,
            Execution::Sequential
        )
        .is_err());
        assert!(flow_trace(
            &Quadratic,
            1,
            &[0.0, 0.2, 0.2],
            DualKind::Legendre,
            &cfg,
            Execution::Sequential
        )
        .is_err());
    }
}
