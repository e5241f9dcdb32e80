use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SLOPE_TOL: f64 = 1e-12;

/// Radial potential `Ψ : [0, ∞) → [0, ∞)`, convex and nondecreasing with `Ψ(0) = 0`.
///
/// Implemented exactly by [`ConvexProfile`] and [`Quadratic`]; the Bessel flow
/// also produces evaluable potentials through this trait.
pub trait RadialPotential: Sync {
    fn value(&self, r: f64) -> f64;
    /// Right derivative at `r`.
    fn slope(&self, r: f64) -> f64;
    /// Points where `Ψ'` jumps; quadrature panels are split there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Points where `LΨ` has kinks.
    fn dual_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// `lim Ψ'(r)` as `r → ∞`; `+∞` for super-linear growth faster than linear.
    fn terminal_slope(&self) -> f64;
    /// `LΨ(p) = sup_{s ≥ 0} ps − Ψ(s)`.
    fn legendre(&self, p: f64) -> f64;
    /// `Ψ°(r) = sup_{s > 0} (rs − 1)/Ψ(s)`.
    fn polar(&self, r: f64) -> f64;
}

/// The exact profile `r²/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quadratic;

impl RadialPotential for Quadratic {
    fn value(&self, r: f64) -> f64 {
        0.5 * r * r
    }
    fn slope(&self, r: f64) -> f64 {
        r
    }
    fn terminal_slope(&self) -> f64 {
        f64::INFINITY
    }
    fn legendre(&self, p: f64) -> f64 {
        0.5 * p.max(0.0).powi(2)
    }
    fn polar(&self, r: f64) -> f64 {
        0.5 * r.max(0.0).powi(2)
    }
}

/// Piecewise-linear convex nondecreasing profile with `Ψ(0) = 0`, extended
/// linearly with slope `terminal_slope` past the last knot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    terminal_slope: f64,
}

impl ConvexProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, terminal_slope: f64) -> Result<Self> {
        let p = ConvexProfile {
            radii,
            values,
            terminal_slope,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds a profile from knot radii and the slope on each segment
    /// `[r_i, r_{i+1}]`; the terminal slope continues past the last knot.
    pub fn from_slopes(radii: Vec<f64>, slopes: &[f64], terminal_slope: f64) -> Result<Self> {
        if slopes.len() + 1 != radii.len() {
            return Err(Error::InvalidProfile(format!(
                "{} slopes for {} knots",
                slopes.len(),
                radii.len()
            )));
        }
        let mut values = Vec::with_capacity(radii.len());
        values.push(0.0);
        for (i, s) in slopes.iter().enumerate() {
            let v = values[i] + s * (radii[i + 1] - radii[i]);
            values.push(v);
        }
        ConvexProfile::new(radii, values, terminal_slope)
    }

    /// Builds a profile from nonnegative slope increments: segment `i` has slope
    /// `Σ_{j ≤ i} increments[j]` and the terminal slope is the full sum.
    pub fn from_increments(radii: Vec<f64>, increments: &[f64]) -> Result<Self> {
        if increments.len() != radii.len() {
            return Err(Error::InvalidProfile(format!(
                "{} increments for {} knots",
                increments.len(),
                radii.len()
            )));
        }
        if let Some(d) = increments.iter().find(|d| !(**d >= 0.0)) {
            return Err(Error::InvalidProfile(format!("negative slope increment {d}")));
        }
        let mut acc = 0.0;
        let mut slopes = Vec::with_capacity(increments.len());
        for d in increments {
            acc += d;
            slopes.push(acc);
        }
        let terminal = slopes.pop().unwrap_or(0.0);
        ConvexProfile::from_slopes(radii, &slopes, terminal)
    }

    /// `Ψ(r) = a·r`.
    pub fn linear(a: f64) -> Result<Self> {
        ConvexProfile::new(vec![0.0, 1.0], vec![0.0, a], a)
    }

    /// Piecewise-linear interpolant of `r²/2` on `knots` equal segments of `[0, r_max]`.
    pub fn quadratic_interpolant(r_max: f64, knots: usize) -> Result<Self> {
        let k = knots.max(1);
        let radii: Vec<f64> = (0..=k).map(|i| r_max * i as f64 / k as f64).collect();
        let values = radii.iter().map(|r| 0.5 * r * r).collect();
        let terminal = r_max + 0.5 * r_max / k as f64;
        ConvexProfile::new(radii, values, terminal)
    }

    fn validate(&self) -> Result<()> {
        let (r, v) = (&self.radii, &self.values);
        if r.len() < 2 || r.len() != v.len() {
            return Err(Error::InvalidProfile(format!(
                "need at least 2 knots with matching values, got {} radii and {} values",
                r.len(),
                v.len()
            )));
        }
        if r.iter().chain(v).any(|x| !x.is_finite()) || self.terminal_slope.is_nan() {
            return Err(Error::InvalidProfile("non-finite knot data".into()));
        }
        if r[0] != 0.0 || v[0] != 0.0 {
            return Err(Error::InvalidProfile("first knot must be (0, 0)".into()));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile("knot radii must increase".into()));
        }
        let slopes = self.chord_slopes();
        let mut prev = 0.0;
        for (i, &s) in slopes.iter().enumerate() {
            let tol = SLOPE_TOL * (1.0 + s.abs().max(prev));
            if s < -tol || s < prev - tol {
                return Err(Error::InvalidProfile(format!(
                    "chord slope {s} on segment {i} breaks monotone convexity"
                )));
            }
            prev = s;
        }
        let tol = SLOPE_TOL * (1.0 + prev);
        if !(self.terminal_slope.is_finite() && self.terminal_slope >= prev - tol) {
            return Err(Error::InvalidProfile(format!(
                "terminal slope {} below last chord slope {prev}",
                self.terminal_slope
            )));
        }
        Ok(())
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn knot_count(&self) -> usize {
        self.radii.len()
    }

    pub fn last_radius(&self) -> f64 {
        *self.radii.last().expect("validated")
    }

    pub fn chord_slopes(&self) -> Vec<f64> {
        self.radii
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, v)| (v[1] - v[0]) / (r[1] - r[0]))
            .collect()
    }

    pub fn is_superlinear(&self) -> bool {
        self.terminal_slope > 0.0
    }

    /// Segment index containing `r` (the last index means the linear extension).
    fn segment(&self, r: f64) -> usize {
        match self.radii.binary_search_by(|x| x.partial_cmp(&r).expect("finite")) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        if r == f64::INFINITY {
            return if self.terminal_slope > 0.0 {
                f64::INFINITY
            } else {
                *self.values.last().unwrap()
            };
        }
        let k = self.segment(r);
        let last = self.radii.len() - 1;
        if k >= last {
            return self.values[last] + self.terminal_slope * (r - self.radii[last]);
        }
        let (r0, r1) = (self.radii[k], self.radii[k + 1]);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }

    pub fn right_slope(&self, r: f64) -> f64 {
        let k = self.segment(r.max(0.0));
        let last = self.radii.len() - 1;
        if k >= last {
            self.terminal_slope
        } else {
            (self.values[k + 1] - self.values[k]) / (self.radii[k + 1] - self.radii[k])
        }
    }

    /// The profile `r ↦ Ψ(λr)`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale {lambda} must be positive")));
        }
        ConvexProfile::new(
            self.radii.iter().map(|r| r / lambda).collect(),
            self.values.clone(),
            self.terminal_slope * lambda,
        )
    }

    /// Exact conjugate `sup_{s ≥ 0} ps − Ψ(s)`: `+∞` above the terminal slope,
    /// otherwise attained at the first knot whose right slope reaches `p`.
    pub fn legendre_at(&self, p: f64) -> f64 {
        if p > self.terminal_slope {
            return f64::INFINITY;
        }
        let slopes = self.chord_slopes();
        let k = slopes.iter().position(|&s| s >= p).unwrap_or(slopes.len());
        p * self.radii[k] - self.values[k]
    }

    /// Exact polar `sup_{s > 0} (rs − 1)/Ψ(s)`. On each linear piece the ratio is
    /// monotone in `s`, so the sup is taken over knots and the `s → ∞` limit.
    pub fn polar_at(&self, r: f64) -> f64 {
        let mut best = if self.terminal_slope > 0.0 {
            r / self.terminal_slope
        } else if r > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        for (&s, &v) in self.radii.iter().zip(&self.values).skip(1) {
            let num = r * s - 1.0;
            let term = if v > 0.0 {
                num / v
            } else if num > 0.0 {
                f64::INFINITY
            } else if num == 0.0 {
                0.0
            } else {
                continue;
            };
            best = best.max(term);
        }
        if r <= 0.0 {
            0.0
        } else {
            best.max(0.0)
        }
    }
}

impl RadialPotential for ConvexProfile {
    fn value(&self, r: f64) -> f64 {
        self.eval(r)
    }
    fn slope(&self, r: f64) -> f64 {
        self.right_slope(r)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.radii[1..].to_vec()
    }
    fn dual_breakpoints(&self) -> Vec<f64> {
        self.chord_slopes()
    }
    fn terminal_slope(&self) -> f64 {
        self.terminal_slope
    }
    fn legendre(&self, p: f64) -> f64 {
        self.legendre_at(p)
    }
    fn polar(&self, r: f64) -> f64 {
        self.polar_at(r)
    }
}

impl ConvexProfile {
    pub fn terminal(&self) -> f64 {
        self.terminal_slope
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_extension_past_last_knot() {
        let p = ConvexProfile::new(vec![0.0, 1.0], vec![0.0, 1.0], 3.0).unwrap();
        assert_eq!(p.eval(2.0), 4.0);
        assert_eq!(p.eval(0.5), 0.5);
    }

    #[test]
    fn rejects_concave_and_decreasing_profiles() {
        assert!(ConvexProfile::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 3.0], 5.0).is_err());
        assert!(ConvexProfile::new(vec![0.0, 1.0], vec![0.0, -1.0], 1.0).is_err());
        assert!(ConvexProfile::new(vec![0.0, 1.0], vec![0.0, 1.0], 0.5).is_err());
        assert!(ConvexProfile::new(vec![0.5, 1.0], vec![0.0, 1.0], 2.0).is_err());
    }

    #[test]
    fn increments_give_nondecreasing_slopes() {
        let p = ConvexProfile::from_increments(vec![0.0, 1.0, 2.5], &[0.5, 0.0, 1.0]).unwrap();
        assert_eq!(p.chord_slopes(), vec![0.5, 0.5]);
        assert_eq!(p.terminal(), 1.5);
    }

    #[test]
    fn conjugate_of_linear_is_indicator() {
        let p = ConvexProfile::linear(1.0).unwrap();
        assert_eq!(p.legendre_at(0.3), 0.0);
        assert_eq!(p.legendre_at(1.0), 0.0);
        assert_eq!(p.legendre_at(1.2), f64::INFINITY);
        assert_eq!(p.polar_at(2.0), 2.0);
        assert_eq!(p.polar_at(0.0), 0.0);
    }

    #[test]
    fn scaling_composes_argument() {
        let p = ConvexProfile::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 3.0], 4.0).unwrap();
        let q = p.scaled(2.0).unwrap();
        for r in [0.0, 0.2, 0.7, 1.3, 5.0] {
            assert!((q.eval(r) - p.eval(2.0 * r)).abs() < 1e-12);
        }
    }
}
