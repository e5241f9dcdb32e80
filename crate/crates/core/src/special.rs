//! Special functions: the standard normal distribution, unit-ball volumes,
//! and exponentially scaled modified Bessel functions of the first kind.

use libm::erfc;
use statrs::function::erf::erfc_inv;
pub use statrs::function::gamma::gamma;
use std::f64::consts::{PI, SQRT_2};

/// Standard normal cdf Φ.
pub fn normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * erfc(-x / SQRT_2)
    }
}

/// Standard normal density φ.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Φ⁻¹ on `[0, 1]`, with `Φ⁻¹(0) = −∞` and `Φ⁻¹(1) = +∞`.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        // One Newton step on Φ(x) = p sharpens the statrs inverse.
        let x = -SQRT_2 * erfc_inv(2.0 * p);
        let d = normal_pdf(x);
        if d > 0.0 {
            x - (normal_cdf(x) - p) / d
        } else {
            x
        }
    }
}

/// ω_n, the volume of the unit ball of ℝⁿ.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

/// (nω_n)², the squared surface area of the unit sphere.
pub fn sphere_area_squared(n: usize) -> f64 {
    let s = n as f64 * unit_ball_volume(n);
    s * s
}

const SERIES_LIMIT: f64 = 25.0;

/// `e^{−z} I_ν(z)` for small integer `ν` and `z ≥ 0`.
fn bessel_scaled(nu: u32, z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z <= SERIES_LIMIT {
        let q = 0.25 * z * z;
        let mut term = (1..=nu).fold(1.0, |acc, k| acc * 0.5 * z / k as f64);
        let mut sum = term;
        let mut k = 1.0;
        loop {
            term *= q / (k * (k + nu as f64));
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        sum * (-z).exp()
    } else {
        let mu = 4.0 * (nu * nu) as f64;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            let odd = 2.0 * k - 1.0;
            let next = -term * (mu - odd * odd) / (k * 8.0 * z);
            if next.abs() >= term.abs() || next.abs() < 1e-17 {
                break;
            }
            term = next;
            sum += term;
            k += 1.0;
        }
        sum / (2.0 * PI * z).sqrt()
    }
}

/// `∫₀^Δ u^i e^{−mu} du` for `i = 0, 1, 2`, `m ≥ 0`.
pub fn exp_moments(m: f64, delta: f64) -> [f64; 3] {
    let x = m * delta;
    if x < 2.0 {
        // Alternating series; its largest term is below e², so at most a few digits cancel.
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let mut term = delta.powi(i as i32 + 1);
            let mut sum = 0.0;
            for k in 0..60 {
                sum += term / (i + k + 1) as f64;
                term *= -x / (k + 1) as f64;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            *o = sum;
        }
        out
    } else {
        let e = (-x).exp();
        let i0 = -(-x).exp_m1() / m;
        let i1 = (i0 - delta * e) / m;
        let i2 = (2.0 * i1 - delta * delta * e) / m;
        [i0, i1, i2]
    }
}

/// `e^{−z} I₀(z)`.
pub fn bessel_i0_scaled(z: f64) -> f64 {
    bessel_scaled(0, z)
}

/// `e^{−z} I₁(z)`.
pub fn bessel_i1_scaled(z: f64) -> f64 {
    bessel_scaled(1, z)
}

/// `e^{−z} I₂(z)`.
pub fn bessel_i2_scaled(z: f64) -> f64 {
    bessel_scaled(2, z)
}
