//! Radial heat kernel for the generator `f'' + (n−1)f'/r`.
//!
//! With `z = rs/2t`, the kernel restricted to radial functions is
//! `(4πt)^{−n/2} e^{−(r−s)²/4t} ∫_{S^{n−1}} e^{z(cos θ − 1)} dσ(θ)`; the
//! angular moments below carry the extra factors needed for first and
//! second derivatives in `r`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::base::RadialPotential;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::special::{bessel_i0_scaled, bessel_i1_scaled, bessel_i2_scaled, exp_moments, gamma};

use super::functional::check_dimension;

/// `B_j(z) = ∫_{S^{n−1}} (1 − cos θ)^j e^{−z(1 − cos θ)} dσ` for `j = 0, 1, 2`.
///
/// The kernel moments are written in `W = 1 − cos θ` because `s cos θ − r =
/// (s − r) − sW` keeps every term of the variance at the scale of `t`; the
/// cosine moments would cancel at the scale of `r²`.
pub fn angular_defects(n: usize, z: f64) -> [f64; 3] {
    match n {
        1 => {
            let e = (-2.0 * z).exp();
            [1.0 + e, 2.0 * e, 4.0 * e]
        }
        2 => circle_defects(z),
        3 => exp_moments(z, 2.0).map(|v| 2.0 * PI * v),
        _ => unreachable!("dimension checked by callers"),
    }
}

const CIRCLE_ASYMPTOTIC: f64 = 25.0;

fn circle_defects(z: f64) -> [f64; 3] {
    if z <= CIRCLE_ASYMPTOTIC {
        let (i0, i1, i2) = (bessel_i0_scaled(z), bessel_i1_scaled(z), bessel_i2_scaled(z));
        return [2.0 * PI * i0, 2.0 * PI * (i0 - i1), PI * (3.0 * i0 - 4.0 * i1 + i2)];
    }
    // 2∫₀² W^{j−1/2} (2 − W)^{−1/2} e^{−zW} dW with (1 − W/2)^{−1/2} expanded;
    // the dropped end of the range is O(e^{−2z}).
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        let a = j as f64 + 0.5;
        let mut term = gamma(a) * z.powf(-a);
        let mut sum = term;
        for k in 0..200 {
            let kf = k as f64;
            let next = term * (kf + 0.5) / (2.0 * (kf + 1.0)) * (a + kf) / z;
            if next >= term || next < 1e-18 * sum {
                break;
            }
            term = next;
            sum += term;
        }
        *o = std::f64::consts::SQRT_2 * sum;
    }
    out
}

/// Quadrature settings for one kernel integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Gauss-Legendre panels across the integration window.
    pub panels: usize,
    pub order: usize,
    /// The window keeps `s` where the log-integrand is within this of its maximum.
    pub window_drop: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            panels: 32,
            order: 16,
            window_drop: 50.0,
        }
    }
}

/// Value and first two derivatives of `Ψ_t` at a radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

/// `Ψ_t = −log P_t(e^{−Ψ})`, evaluated on demand from the initial profile.
pub struct BesselFlow<'a> {
    psi: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    breakpoints: Vec<f64>,
    terminal_slope: f64,
    t: f64,
    n: usize,
    cfg: KernelConfig,
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..90 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Root of a monotone `f` on `[a, b]` with `f(a) ≥ 0 > f(b)` or the reverse.
fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa_pos = f(a) >= 0.0;
    for _ in 0..70 {
        let m = 0.5 * (a + b);
        if (f(m) >= 0.0) == fa_pos {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

impl<'a> BesselFlow<'a> {
    pub fn new<P: RadialPotential + ?Sized>(psi: &'a P, n: usize, t: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("flow time must be positive, got {t}")));
        }
        if !(psi.terminal_slope() > 0.0) {
            return Err(Error::InvalidProfile(
                "the Bessel flow needs a super-linear profile".into(),
            ));
        }
        Ok(BesselFlow {
            psi: Box::new(move |r| psi.value(r)),
            breakpoints: psi.breakpoints(),
            terminal_slope: psi.terminal_slope(),
            t,
            n,
            cfg: KernelConfig::default(),
        })
    }

    pub fn with_config(mut self, cfg: KernelConfig) -> Self {
        self.cfg = cfg;
        self
    }

    /// `P_s` applied to this flow's output; used to test the semigroup law.
    pub fn then(&self, s: f64) -> Result<BesselFlow<'_>> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("flow time must be positive, got {s}")));
        }
        Ok(BesselFlow {
            psi: Box::new(move |r| self.value(r)),
            breakpoints: Vec::new(),
            terminal_slope: self.terminal_slope,
            t: s,
            n: self.n,
            cfg: self.cfg,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `lim Ψ_t'` at infinity, inherited from the initial profile.
    pub fn terminal_slope(&self) -> f64 {
        self.terminal_slope
    }

    pub fn value(&self, r: f64) -> f64 {
        self.jet(r).value
    }

    pub fn jet(&self, r: f64) -> Jet {
        let (t, n) = (self.t, self.n);
        let four_t = 4.0 * t;
        let psi = &self.psi;
        let expo = |s: f64| -psi(s) - (r - s) * (r - s) / four_t;
        // The exponent is concave and decreasing beyond r.
        let s_star = if r > 0.0 { golden_max(expo, 0.0, r) } else { 0.0 };
        let e_star = expo(s_star).max(expo(0.0)).max(expo(r));
        let drop = self.cfg.window_drop;
        let level = |s: f64| expo(s) - (e_star - drop);
        let lo = if level(0.0) >= 0.0 {
            0.0
        } else {
            bisect(level, 0.0, s_star)
        };
        let far = r.max(s_star) + (four_t * drop).sqrt() + 1e-12;
        let hi = if level(far) >= 0.0 {
            far
        } else {
            bisect(level, s_star, far)
        };

        let mut cuts = vec![lo];
        cuts.extend(self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        let width = hi - lo;
        let (x, w) = gauss_legendre(self.cfg.order);
        let (mut u0, mut u1, mut u2) = (0.0, 0.0, 0.0);
        for piece in cuts.windows(2) {
            let (a, b) = (piece[0], piece[1]);
            let panels = ((self.cfg.panels as f64 * (b - a) / width).ceil() as usize).max(2);
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let c = a + (p as f64 + 0.5) * h;
                for (xi, wi) in x.iter().zip(w) {
                    let s = c + 0.5 * h * xi;
                    let weight = 0.5 * h * wi * s.powi(n as i32 - 1) * (expo(s) - e_star).exp();
                    let [b0, b1, b2] = angular_defects(n, r * s / (2.0 * t));
                    let d = s - r;
                    u0 += weight * b0;
                    u1 += weight * (d * b0 - s * b1);
                    u2 += weight * (d * d * b0 - 2.0 * d * s * b1 + s * s * b2);
                }
            }
        }
        let mean = u1 / u0;
        let var = u2 / u0 - mean * mean;
        let log_c = -0.5 * n as f64 * (PI * four_t).ln();
        Jet {
            value: -(log_c + e_star + u0.ln()),
            slope: -mean / (2.0 * t),
            curvature: 1.0 / (2.0 * t) - var / (four_t * t),
        }
    }

    /// `(s, LΨ_t(p))` with `Ψ_t'(s) = p`; `None` when `p` is at or beyond the
    /// terminal slope, where the conjugate is `+∞`.
    pub fn legendre_point(&self, p: f64) -> Option<(f64, f64)> {
        if p <= 0.0 {
            return Some((0.0, -self.value(0.0)));
        }
        if p >= self.terminal_slope {
            return None;
        }
        let mut hi = 1.0;
        let mut tries = 0;
        while self.jet(hi).slope <= p {
            hi *= 2.0;
            tries += 1;
            if tries > 50 {
                return None;
            }
        }
        let (mut a, mut b) = (0.0, hi);
        let mut s = 0.5 * (a + b);
        for _ in 0..100 {
            let j = self.jet(s);
            let g = j.slope - p;
            if g > 0.0 {
                b = s;
            } else {
                a = s;
            }
            let newton = s - g / j.curvature;
            let next = if j.curvature > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - s).abs() <= 1e-14 * (1.0 + s) {
                s = next;
                break;
            }
            s = next;
        }
        Some((s, p * s - self.value(s)))
    }

    pub fn legendre(&self, p: f64) -> f64 {
        self.legendre_point(p).map_or(f64::INFINITY, |(_, v)| v)
    }

    /// `Ψ_t°(r) = sup_s (rs − 1)/Ψ_t(s)`. `Ψ_t > 0` everywhere, and the ratio
    /// of the positive linear numerator to the convex denominator is
    /// quasi-concave on `s > 1/r`.
    pub fn polar(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let ratio = |s: f64| (r * s - 1.0) / self.value(s);
        let start = 1.0 / r;
        let mut hi = 2.0 * start;
        let mut doublings = 0;
        while ratio(2.0 * hi) > ratio(hi) {
            hi *= 2.0;
            doublings += 1;
            if doublings > 40 {
                return ratio(hi).max(r / self.terminal_slope);
            }
        }
        let s = golden_max(ratio, start, 2.0 * hi);
        ratio(s).max(0.0)
    }
}

/// `Ψ_t` sampled at `radii`.
pub fn bessel_semigroup<P: RadialPotential + ?Sized>(psi: &P, t: f64, n: usize, radii: &[f64]) -> Result<Vec<f64>> {
    let flow = BesselFlow::new(psi, n, t)?;
    Ok(radii.iter().map(|&r| flow.value(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{ConvexProfile, Quadratic};

    fn gaussian_closed_form(r: f64, t: f64, n: usize) -> f64 {
        r * r / (2.0 * (1.0 + 2.0 * t)) + 0.5 * n as f64 * (1.0 + 2.0 * t).ln()
    }

    #[test]
    fn gaussian_profile_in_every_dimension() {
        for n in 1..=3 {
            for &t in &[0.01, 0.3, 2.0, 50.0] {
                let flow = BesselFlow::new(&Quadratic, n, t).unwrap();
                for &r in &[0.0, 0.4, 1.7, 5.0] {
                    let j = flow.jet(r);
                    let want = gaussian_closed_form(r, t, n);
                    assert!(
                        (j.value - want).abs() < 1e-9,
                        "n={n} t={t} r={r}: {} vs {want}",
                        j.value
                    );
                    assert!((j.slope - r / (1.0 + 2.0 * t)).abs() < 1e-8);
                    assert!((j.curvature - 1.0 / (1.0 + 2.0 * t)).abs() < 1e-7);
                }
            }
        }
    }

    fn azimuthal(z: f64) -> [f64; 3] {
        let (x, w) = gauss_legendre(64);
        let mut q = [0.0; 3];
        for (xi, wi) in x.iter().zip(w) {
            let d = 1.0 - (PI * (xi + 1.0)).cos();
            for (j, qj) in q.iter_mut().enumerate() {
                *qj += PI * wi * d.powi(j as i32) * (-z * d).exp();
            }
        }
        q
    }

    #[test]
    fn circle_moments_against_azimuthal_quadrature() {
        for &z in &[0.0, 0.3, 2.0, 7.5] {
            let (a, q) = (angular_defects(2, z), azimuthal(z));
            for j in 0..3 {
                assert!((a[j] - q[j]).abs() < 1e-12 * (1.0 + q[j]), "z={z} j={j}");
            }
        }
    }

    #[test]
    fn circle_asymptotic_branch_is_continuous() {
        let below = circle_defects(CIRCLE_ASYMPTOTIC);
        let above = circle_defects(CIRCLE_ASYMPTOTIC * (1.0 + 1e-14));
        for j in 0..3 {
            assert!((below[j] - above[j]).abs() < 1e-11 * below[j], "j={j}");
        }
    }

    #[test]
    fn sphere_moments_integrate_the_cap() {
        // ∫_{−1}^{1} (1 − x) e^{−z(1 − x)} dx at z = 0 is 2.
        assert!((angular_defects(3, 0.0)[1] - 4.0 * PI).abs() < 1e-13);
        assert!((angular_defects(3, 0.0)[0] - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn semigroup_law() {
        let psi = ConvexProfile::new(vec![0.0, 0.8, 1.6], vec![0.0, 0.4, 1.6], 2.5).unwrap();
        for n in 1..=3 {
            let first = BesselFlow::new(&psi, n, 0.2).unwrap();
            let composed = first.then(0.3).unwrap();
            let direct = BesselFlow::new(&psi, n, 0.5).unwrap();
            for &r in &[0.0, 0.9, 2.2] {
                assert!((composed.value(r) - direct.value(r)).abs() < 1e-5, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn small_time_recovers_the_profile() {
        let psi = ConvexProfile::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 2.0], 3.0).unwrap();
        let flow = BesselFlow::new(&psi, 2, 1e-7).unwrap();
        for &r in &[0.5, 1.5, 2.5, 4.0] {
            assert!((flow.value(r) - psi.eval(r)).abs() < 1e-3);
        }
    }

    #[test]
    fn conjugate_and_polar_of_gaussian_flow() {
        let t = 0.5;
        let flow = BesselFlow::new(&Quadratic, 1, t).unwrap();
        let c = 0.5 * (1.0 + 2.0 * t).ln();
        for &p in &[0.0, 0.3, 1.2] {
            let want = (1.0 + 2.0 * t) * p * p / 2.0 - c;
            assert!((flow.legendre(p) - want).abs() < 1e-9);
        }
        // Oracle: dense scan of (rs − 1)/Ψ_t(s) with the closed form.
        let r = 1.3;
        let scan = (1..200_000)
            .map(|k| {
                let s = k as f64 * 1e-4;
                (r * s - 1.0) / gaussian_closed_form(s, t, 1)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((flow.polar(r) - scan).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(BesselFlow::new(&Quadratic, 4, 1.0).is_err());
        assert!(BesselFlow::new(&Quadratic, 1, 0.0).is_err());
    }
}
