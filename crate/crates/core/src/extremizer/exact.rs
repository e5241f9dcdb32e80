//! Closed-form radial integrals for piecewise-linear profiles: on every
//! piece both `Ψ` and `LΨ` are affine, so each integral is a sum of
//! `∫ e^{−(c + m s)} s^{n−1} ds`.

use crate::base::ConvexProfile;
use crate::error::{Error, Result};
use crate::flow::functional::check_dimension;
use crate::special::{exp_moments, sphere_area_squared};

/// `∫_a^b e^{−(c + m s)} s^{n−1} ds` with `m ≥ 0`; `b` may be `+∞` when `m > 0`.
fn piece(c: f64, m: f64, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let j = n - 1;
    let scale = (-(c + m * a)).exp();
    let mom = if b == f64::INFINITY {
        [1.0 / m, 1.0 / (m * m), 2.0 / (m * m * m)]
    } else {
        exp_moments(m, b - a)
    };
    // (a + u)^j expanded binomially.
    let poly = match j {
        0 => mom[0],
        1 => a * mom[0] + mom[1],
        _ => a * a * mom[0] + 2.0 * a * mom[1] + mom[2],
    };
    scale * poly
}

pub fn profile_mass(psi: &ConvexProfile, n: usize) -> Result<f64> {
    check_dimension(n)?;
    if !psi.is_superlinear() {
        return Err(Error::InvalidProfile(
            "mass of a profile needs a positive terminal slope".into(),
        ));
    }
    let (r, v) = (psi.radii(), psi.values());
    let slopes = psi.chord_slopes();
    let mut total = 0.0;
    for (k, &m) in slopes.iter().enumerate() {
        total += piece(v[k] - m * r[k], m, r[k], r[k + 1], n);
    }
    let last = r.len() - 1;
    let m = psi.terminal();
    total += piece(v[last] - m * r[last], m, r[last], f64::INFINITY, n);
    Ok(total)
}

/// `∫₀^{s_∞} e^{−LΨ(p)} p^{n−1} dp`, with `LΨ(p) = p r_k − Ψ(r_k)` between
/// consecutive slopes.
pub fn profile_legendre_mass(psi: &ConvexProfile, n: usize) -> Result<f64> {
    check_dimension(n)?;
    if !psi.is_superlinear() {
        return Err(Error::InvalidProfile(
            "conjugate mass needs a positive terminal slope".into(),
        ));
    }
    let (r, v) = (psi.radii(), psi.values());
    let mut ends = psi.chord_slopes();
    ends.push(psi.terminal());
    let mut lo = 0.0;
    let mut total = 0.0;
    for (k, &hi) in ends.iter().enumerate() {
        total += piece(-v[k], r[k], lo, hi, n);
        lo = hi;
    }
    Ok(total)
}

/// The normalized Legendre product `(nω_n)² ∫e^{−Ψ} r^{n−1} ∫e^{−LΨ} r^{n−1}` in closed form.
pub fn legendre_product_exact(psi: &ConvexProfile, n: usize) -> Result<f64> {
    Ok(sphere_area_squared(n) * profile_mass(psi, n)? * profile_legendre_mass(psi, n)?)
}
