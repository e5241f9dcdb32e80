//! Finite-difference check of the evolution of `V = LΨ_t`,
//! `∂_t V = −1/V'' + p² − (n−1)p/V'`, and of the pointwise square identity
//! behind the monotonicity of `α`.

use serde::{Deserialize, Serialize};

use crate::base::RadialPotential;
use crate::error::{Error, Result};

use super::kernel::{BesselFlow, KernelConfig};

/// Second differences below this are treated as a loss of strict convexity.
pub const CURVATURE_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorderoConfig {
    /// Slopes are taken as `Ψ_t'(s)` for `s` evenly spaced in this window.
    pub window: (f64, f64),
    pub nodes: usize,
    /// Step in the slope variable.
    pub h: f64,
    /// Step in time, capped at `t/4` so the coarse stencil stays at positive times.
    pub dt: f64,
    /// Absolute part of the tolerance, covering the quadrature noise amplified by `1/h²`.
    pub floor: f64,
    pub kernel: KernelConfig,
}

impl Default for CorderoConfig {
    fn default() -> Self {
        CorderoConfig {
            window: (0.3, 2.0),
            nodes: 9,
            h: 1e-2,
            dt: 1e-3,
            floor: 1e-7,
            kernel: KernelConfig::default(),
        }
    }
}

/// Residual of the evolution equation on a slope window.
///
/// `residual` is the sup norm at steps `(h, Δt)`. The error of a
/// second-order stencil at `(h, Δt)` is a third of the change when both steps
/// are doubled, so `tolerance` is the sup of that change plus `floor`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorderoReport {
    pub t: f64,
    pub slopes: Vec<f64>,
    pub residual: f64,
    pub coarse_residual: f64,
    pub tolerance: f64,
}

impl CorderoReport {
    pub fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }
}

struct Stencil {
    dt_v: f64,
    d1: f64,
    d2: f64,
}

impl Stencil {
    fn residual(&self, p: f64, n: usize) -> Result<f64> {
        if self.d2 < CURVATURE_FLOOR {
            return Err(Error::Numerical(format!(
                "second difference {:e} of the conjugate at p = {p} is below the floor",
                self.d2
            )));
        }
        let rhs = -1.0 / self.d2 + p * p - (n as f64 - 1.0) * p / self.d1;
        Ok(self.dt_v - rhs)
    }
}

pub fn cordero_residual<P: RadialPotential + ?Sized>(
    psi: &P,
    n: usize,
    t: f64,
    cfg: &CorderoConfig,
) -> Result<CorderoReport> {
    let dt = cfg.dt.min(0.25 * t);
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("residual needs t > 0, got {t}")));
    }
    let mk = |tau: f64| BesselFlow::new(psi, n, tau).map(|f| f.with_config(cfg.kernel));
    let now = mk(t)?;
    let flows = [mk(t - 2.0 * dt)?, mk(t - dt)?, mk(t + dt)?, mk(t + 2.0 * dt)?];
    let (lo, hi) = cfg.window;
    let k = cfg.nodes.max(1);
    let mut slopes = Vec::with_capacity(k);
    let (mut fine, mut coarse, mut change) = (0.0f64, 0.0f64, 0.0f64);
    let h = cfg.h;
    for i in 0..k {
        let s = if k == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (k - 1) as f64
        };
        let p = now.jet(s).slope;
        if !(p > 2.0 * h) || p + 2.0 * h >= now.terminal_slope() {
            return Err(Error::InvalidArgument(format!(
                "slope {p} at s = {s} leaves no room for the stencil"
            )));
        }
        slopes.push(p);
        let v = |f: &BesselFlow<'_>, q: f64| f.legendre(q);
        let c = v(&now, p);
        let (m1, p1) = (v(&now, p - h), v(&now, p + h));
        let (m2, p2) = (v(&now, p - 2.0 * h), v(&now, p + 2.0 * h));
        let [b2, b1, a1, a2] = [&flows[0], &flows[1], &flows[2], &flows[3]].map(|f| v(f, p));
        let f = Stencil {
            dt_v: (a1 - b1) / (2.0 * dt),
            d1: (p1 - m1) / (2.0 * h),
            d2: (p1 - 2.0 * c + m1) / (h * h),
        }
        .residual(p, n)?;
        let g = Stencil {
            dt_v: (a2 - b2) / (4.0 * dt),
            d1: (p2 - m2) / (4.0 * h),
            d2: (p2 - 2.0 * c + m2) / (4.0 * h * h),
        }
        .residual(p, n)?;
        fine = fine.max(f.abs());
        coarse = coarse.max(g.abs());
        change = change.max((g - f).abs());
    }
    Ok(CorderoReport {
        t,
        slopes,
        residual: fine,
        coarse_residual: coarse,
        tolerance: change + cfg.floor,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `|lhs − rhs|` relative to `1/V'' + 2r/V' + r²V''/V'²`.
    pub max_deviation: f64,
    /// Smallest value of `(rV'' − V')²/(V''V'²)`.
    pub min_rhs: f64,
    pub nodes: usize,
}

/// Checks `1/V'' − 2r/V' + r²V''/V'² = (rV'' − V')²/(V''V'²)` at the interior
/// nodes of a uniform grid `r` lying in `window`, with `V` replaced by
/// `V + εr`. Derivatives are central differences.
pub fn integrand_identity_check(r: &[f64], v: &[f64], window: (f64, f64), eps: f64) -> Result<IdentityReport> {
    if r.len() != v.len() || r.len() < 3 {
        return Err(Error::InvalidArgument(
            "identity check needs at least 3 matching samples".into(),
        ));
    }
    let h = r[1] - r[0];
    if !(h > 0.0) || r.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::InvalidGrid(
            "identity check needs a uniform increasing grid".into(),
        ));
    }
    let ve: Vec<f64> = r.iter().zip(v).map(|(&x, &y)| y + eps * x).collect();
    let mut max_deviation = 0.0f64;
    let mut min_rhs = f64::INFINITY;
    let mut nodes = 0;
    for i in 1..r.len() - 1 {
        let x = r[i];
        if x < window.0 || x > window.1 {
            continue;
        }
        let d1 = (ve[i + 1] - ve[i - 1]) / (2.0 * h);
        let d2 = (ve[i + 1] - 2.0 * ve[i] + ve[i - 1]) / (h * h);
        if !(d1 > 0.0 && d2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "V' = {d1:e}, V'' = {d2:e} at r = {x}: both must be positive"
            )));
        }
        let terms = [1.0 / d2, 2.0 * x / d1, x * x * d2 / (d1 * d1)];
        let lhs = terms[0] - terms[1] + terms[2];
        let rhs = (x * d2 - d1).powi(2) / (d2 * d1 * d1);
        max_deviation = max_deviation.max((lhs - rhs).abs() / terms.iter().sum::<f64>());
        min_rhs = min_rhs.min(rhs);
        nodes += 1;
    }
    if nodes == 0 {
        return Err(Error::InvalidArgument("no interior node inside the window".into()));
    }
    Ok(IdentityReport {
        max_deviation,
        min_rhs,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::random::{random_profile, RandomConvexSpec};
    use crate::base::{ConvexProfile, Quadratic};

    #[test]
    fn gaussian_residual_in_one_and_two_dimensions() {
        for n in 1..=2 {
            for &t in &[0.2, 1.0] {
                let rep = cordero_residual(&Quadratic, n, t, &CorderoConfig::default()).unwrap();
                assert!(rep.residual < 1e-4, "n={n} t={t}: {}", rep.residual);
                assert!(rep.pass());
            }
        }
    }

    #[test]
    fn second_order_convergence() {
        let psi = ConvexProfile::new(vec![0.0, 0.6, 1.2], vec![0.0, 0.2, 1.0], 2.4).unwrap();
        let cfg = CorderoConfig {
            h: 0.08,
            dt: 0.04,
            nodes: 5,
            ..CorderoConfig::default()
        };
        let coarse = cordero_residual(&psi, 1, 0.5, &cfg).unwrap();
        let fine = cordero_residual(
            &psi,
            1,
            0.5,
            &CorderoConfig {
                h: 0.04,
                dt: 0.02,
                ..cfg
            },
        )
        .unwrap();
        let ratio = coarse.residual / fine.residual;
        assert!(ratio > 2.0, "ratio {ratio}");
        assert!(fine.pass());
    }

    #[test]
    fn residual_passes_its_tolerance_on_random_profiles() {
        for seed in 0..3 {
            let psi = random_profile(&RandomConvexSpec::new(seed)).unwrap();
            let rep = cordero_residual(&psi, 2, 0.5, &CorderoConfig::default()).unwrap();
            assert!(rep.pass(), "{rep:?}");
        }
    }

    #[test]
    fn identity_examples() {
        let r: Vec<f64> = (0..101).map(|i| 0.05 + 0.02 * i as f64).collect();
        let v: Vec<f64> = r.iter().map(|x| 0.5 * x * x + x).collect();
        let rep = integrand_identity_check(&r, &v, (0.1, 2.0), 0.0).unwrap();
        assert!(rep.max_deviation < 1e-12);
        let t = 0.7;
        let g: Vec<f64> = r.iter().map(|x| (1.0 + 2.0 * t) * x * x / 2.0 - 0.3).collect();
        let rep = integrand_identity_check(&r, &g, (0.1, 2.0), 0.0).unwrap();
        assert!(rep.min_rhs.abs() < 1e-12 && rep.max_deviation < 1e-10);
        assert!(integrand_identity_check(&r, &r.iter().map(|x| -x).collect::<Vec<_>>(), (0.1, 2.0), 0.0).is_err());
    }

    #[test]
    fn regularized_random_convex_samples_have_nonnegative_rhs() {
        for seed in 0..20 {
            let psi = random_profile(&RandomConvexSpec::new(seed)).unwrap();
            let r: Vec<f64> = (0..200).map(|i| 0.013 * i as f64).collect();
            // A strictly convex perturbation keeps second differences positive on linear pieces.
            let v: Vec<f64> = r.iter().map(|&x| psi.eval(x) + 1e-3 * x * x).collect();
            let rep = integrand_identity_check(&r, &v, (0.05, 2.5), 1e-3).unwrap();
            assert!(rep.min_rhs >= 0.0);
            assert!(rep.max_deviation < 1e-9);
        }
    }
}
