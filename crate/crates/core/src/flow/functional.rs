use serde::{Deserialize, Serialize};

use crate::base::RadialPotential;
use crate::error::{Error, Result};
use crate::quad::adaptive_split;
use crate::special::sphere_area_squared;

/// Integrals are cut where the exponent, net of the `r^{n−1}` weight, exceeds
/// this level; convexity bounds the dropped tail by `e^{−TAIL_LEVEL}` times a
/// moment of an exponential.
pub const TAIL_LEVEL: f64 = 60.0;
pub const QUAD_REL_TOL: f64 = 1e-10;
const QUAD_ABS_TOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DualKind {
    Legendre,
    Polar,
}

pub fn check_dimension(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "radial dimension must be 1, 2 or 3, got {n}"
        )))
    }
}

/// Smallest `R = 2^k ≥ 1` with `g(R) − (n−1) ln R ≥ g(0) + TAIL_LEVEL`.
pub fn extent<G: Fn(f64) -> f64>(g: G, n: usize) -> Result<f64> {
    let base = g(0.0);
    let mut r = 1.0f64;
    for _ in 0..60 {
        if g(r) - (n as f64 - 1.0) * r.ln() >= base + TAIL_LEVEL {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::Numerical(
        "radial integral does not converge: exponent grows too slowly".into(),
    ))
}

/// `∫₀^upper e^{−g(r)} r^{n−1} dr`, split at `breaks`.
pub fn weighted_integral<G: Fn(f64) -> f64>(g: G, n: usize, breaks: &[f64], upper: f64) -> Result<f64> {
    let mut pts = vec![0.0];
    pts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < upper));
    pts.push(upper);
    pts.sort_by(f64::total_cmp);
    let mut f = |r: f64| {
        let v = g(r);
        if v == f64::INFINITY {
            0.0
        } else {
            (-v).exp() * r.powi(n as i32 - 1)
        }
    };
    adaptive_split(&mut f, &pts, QUAD_ABS_TOL, QUAD_REL_TOL)
}

/// `m = ∫₀^∞ e^{−Ψ} r^{n−1} dr`.
pub fn radial_mass<P: RadialPotential + ?Sized>(psi: &P, n: usize) -> Result<f64> {
    check_dimension(n)?;
    let upper = extent(|r| psi.value(r), n)?;
    weighted_integral(|r| psi.value(r), n, &psi.breakpoints(), upper)
}

/// `∫₀^∞ e^{−AΨ} r^{n−1} dr` for `A` the Legendre or polar transform.
pub fn dual_mass<P: RadialPotential + ?Sized>(psi: &P, n: usize, kind: DualKind) -> Result<f64> {
    check_dimension(n)?;
    let s_inf = psi.terminal_slope();
    match kind {
        DualKind::Legendre => {
            if !(s_inf > 0.0) {
                return Err(Error::InvalidProfile(
                    "Legendre integral needs a positive terminal slope".into(),
                ));
            }
            let upper = if s_inf.is_finite() {
                s_inf
            } else {
                extent(|p| psi.legendre(p), n)?
            };
            weighted_integral(|p| psi.legendre(p), n, &psi.dual_breakpoints(), upper)
        }
        DualKind::Polar => {
            let upper = extent(|r| psi.polar(r), n)?;
            weighted_integral(|r| psi.polar(r), n, &[], upper)
        }
    }
}

/// `(nω_n)² ∫₀^∞ e^{−Ψ} r^{n−1} dr · ∫₀^∞ e^{−AΨ} r^{n−1} dr`.
pub fn product_functional<P: RadialPotential + ?Sized>(psi: &P, n: usize, kind: DualKind) -> Result<f64> {
    if !(psi.terminal_slope() > 0.0) {
        return Err(Error::InvalidProfile(
            "Ψ must be super-linear (positive terminal slope)".into(),
        ));
    }
    Ok(sphere_area_squared(n) * radial_mass(psi, n)? * dual_mass(psi, n, kind)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{ConvexProfile, Quadratic};
    use std::f64::consts::PI;

    #[test]
    fn gaussian_equality_cases() {
        let v1 = product_functional(&Quadratic, 1, DualKind::Legendre).unwrap();
        assert!((v1 - 2.0 * PI).abs() < 1e-6);
        let v2 = product_functional(&Quadratic, 2, DualKind::Legendre).unwrap();
        assert!((v2 - 4.0 * PI * PI).abs() < 1e-5);
        let p2 = product_functional(&Quadratic, 2, DualKind::Polar).unwrap();
        assert!((p2 - 4.0 * PI * PI).abs() < 1e-5);
    }

    #[test]
    fn linear_profile_in_one_dimension() {
        // ∫ e^{−r} = 1 and Lr is the indicator of [0, 1].
        let v = product_functional(&ConvexProfile::linear(1.0).unwrap(), 1, DualKind::Legendre).unwrap();
        assert!((v - 4.0).abs() < 1e-9);
    }

    #[test]
    fn piecewise_profile_stays_below_the_bound() {
        let p = ConvexProfile::new(vec![0.0, 0.5, 1.5], vec![0.0, 0.1, 1.0], 2.0).unwrap();
        for n in 1..=3 {
            let v = product_functional(&p, n, DualKind::Legendre).unwrap();
            assert!(v <= (2.0 * PI).powi(n as i32) + 1e-9);
        }
    }

    #[test]
    fn flat_profile_is_rejected() {
        let p = ConvexProfile::new(vec![0.0, 1.0], vec![0.0, 0.0], 0.0).unwrap();
        assert!(product_functional(&p, 1, DualKind::Legendre).is_err());
        assert!(check_dimension(4).is_err());
    }
}
