use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::{dot, Grid, GridFunction, Point};
use super::profile::{ConvexProfile, RadialPotential};
use crate::error::{Error, Result};

/// Parameters of the seeded convex-instance generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomConvexSpec {
    pub seed: u64,
    /// Knots of a profile, or supporting lines per side / direction of a grid function.
    pub knots: usize,
    /// Upper bound of each random slope increment.
    pub slope_scale: f64,
    /// Relative extra steepness of the left half-line (1D) or anisotropy of the
    /// quadratic part (nD).
    pub asymmetry: f64,
    /// Location of the minimum (1D translation; first coordinates in nD).
    pub translation: Vec<f64>,
    /// Weight of an added quadratic form; zero keeps the function piecewise linear.
    pub curvature: f64,
}

impl RandomConvexSpec {
    pub fn new(seed: u64) -> Self {
        RandomConvexSpec {
            seed,
            knots: 4,
            slope_scale: 1.0,
            asymmetry: 0.0,
            translation: Vec::new(),
            curvature: 0.0,
        }
    }

    pub fn with_knots(mut self, k: usize) -> Self {
        self.knots = k;
        self
    }

    pub fn with_translation(mut self, c: Vec<f64>) -> Self {
        self.translation = c;
        self
    }

    pub fn with_slope_scale(mut self, s: f64) -> Self {
        self.slope_scale = s;
        self
    }

    pub fn with_asymmetry(mut self, a: f64) -> Self {
        self.asymmetry = a;
        self
    }

    pub fn with_curvature(mut self, c: f64) -> Self {
        self.curvature = c;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.knots < 1 {
            return Err(Error::InvalidArgument("knot count must be at least 1".into()));
        }
        if !(self.slope_scale > 0.0 && self.slope_scale.is_finite()) {
            return Err(Error::InvalidArgument("slope scale must be positive".into()));
        }
        if !(self.asymmetry >= 0.0 && self.curvature >= 0.0) {
            return Err(Error::InvalidArgument(
                "asymmetry and curvature must be nonnegative".into(),
            ));
        }
        if self.translation.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("translation must be finite".into()));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn shift(&self, k: usize) -> f64 {
        self.translation.get(k).copied().unwrap_or(0.0)
    }
}

/// Floor on the terminal slope of generated profiles.
pub const TERMINAL_SLOPE_FLOOR: f64 = 0.05;

/// Random profile with `spec.knots + 1` knots (the origin included).
pub fn random_profile(spec: &RandomConvexSpec) -> Result<ConvexProfile> {
    spec.validate()?;
    let mut rng = spec.rng();
    let mut radii = vec![0.0];
    for _ in 0..spec.knots {
        let step: f64 = rng.random_range(0.2..1.0);
        radii.push(radii.last().unwrap() + step);
    }
    let mut increments: Vec<f64> = (0..radii.len())
        .map(|_| rng.random_range(0.0..spec.slope_scale))
        .collect();
    let total: f64 = increments.iter().sum();
    if total < TERMINAL_SLOPE_FLOOR {
        *increments.last_mut().unwrap() += TERMINAL_SLOPE_FLOOR - total;
    }
    ConvexProfile::from_increments(radii, &increments)
}

/// Supporting lines `(slope, intercept)` of a 1D convex function with
/// minimum 0 at the origin: kinks on each side with increasing |slope|.
fn random_lines_1d(spec: &RandomConvexSpec, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let mut lines = Vec::new();
    for side in [1.0, -1.0] {
        let stretch = if side < 0.0 { 1.0 + spec.asymmetry } else { 1.0 };
        let mut y = 0.0;
        let mut g = 0.0;
        let mut slope = 0.0;
        for j in 0..spec.knots {
            let lo = if j == 0 { 0.1 * spec.slope_scale } else { 0.0 };
            slope += stretch * rng.random_range(lo..spec.slope_scale);
            lines.push((side * slope, g - slope * y));
            let step: f64 = rng.random_range(0.3..1.5);
            y += step;
            g += slope * step;
        }
    }
    lines
}

/// Samples `g(x − c)` on a 1D grid, where `g` is a random max of supporting lines.
pub fn random_grid1d(spec: &RandomConvexSpec, grid: &Grid) -> Result<GridFunction> {
    spec.validate()?;
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: grid.dim(),
        });
    }
    let mut rng = spec.rng();
    let lines = random_lines_1d(spec, &mut rng);
    let c = spec.shift(0);
    GridFunction::from_fn(grid.clone(), |p| {
        let y = p[0] - c;
        let lin = lines
            .iter()
            .map(|(a, b)| a * y + b)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        lin + 0.5 * spec.curvature * y * y
    })
}

/// Samples an even convex function of `x − c` with minimum 0 at `c`:
/// a max of symmetric slabs `|⟨a_j, y⟩| − b_j` plus an optional random
/// quadratic form. With zero translation the result lies in Cvx₀.
pub fn random_grid_nd(spec: &RandomConvexSpec, grid: &Grid) -> Result<GridFunction> {
    spec.validate()?;
    let n = grid.dim();
    let mut rng = spec.rng();
    let mut slabs: Vec<(Point, f64)> = Vec::new();
    for j in 0..spec.knots {
        let mut a = [0.0; 3];
        for c in a.iter_mut().take(n) {
            *c = rng.random_range(-1.0..1.0);
        }
        let len = dot(&a, &a).sqrt().max(1e-3);
        let mag: f64 = spec.slope_scale * rng.random_range(0.2..1.0);
        for c in a.iter_mut() {
            *c *= mag / len;
        }
        let b = if j == 0 { 0.0 } else { rng.random_range(0.0..1.0) * mag };
        slabs.push((a, b));
    }
    let mut q = [[0.0; 3]; 3];
    if spec.curvature > 0.0 {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let ratio = 1.0 + spec.asymmetry * rng.random_range(0.0..1.0);
        let mut diag = [1.0; 3];
        diag[0] = ratio;
        diag[1] = 1.0 / ratio;
        for (k, d) in diag.iter().enumerate().take(n) {
            q[k][k] = spec.curvature * d;
        }
        if n >= 2 {
            let (s, c) = theta.sin_cos();
            let (d0, d1) = (q[0][0], q[1][1]);
            q[0][0] = c * c * d0 + s * s * d1;
            q[1][1] = s * s * d0 + c * c * d1;
            q[0][1] = c * s * (d0 - d1);
            q[1][0] = q[0][1];
        }
    }
    let shift: Point = [spec.shift(0), spec.shift(1), spec.shift(2)];
    GridFunction::from_fn(grid.clone(), move |p| {
        let y = [p[0] - shift[0], p[1] - shift[1], p[2] - shift[2]];
        let lin = slabs.iter().map(|(a, b)| dot(a, &y).abs() - b).fold(0.0, f64::max);
        let mut quad = 0.0;
        for i in 0..n {
            for k in 0..n {
                quad += 0.5 * y[i] * q[i][k] * y[k];
            }
        }
        lin + quad
    })
}

/// Samples `Ψ(‖x‖)` on a grid symmetric about the origin.
pub fn make_radial<P: RadialPotential + ?Sized>(profile: &P, grid: &Grid) -> Result<GridFunction> {
    if !grid.is_symmetric() {
        return Err(Error::InvalidGrid(
            "radial functions need a box symmetric about the origin".into(),
        ));
    }
    GridFunction::from_fn(grid.clone(), |p| profile.value(dot(p, p).sqrt()))
}
