use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::base::Grid;
use crate::error::{Error, Result};
use crate::infconv::{enlarge, CostSpec, MonotoneMap, SetOnGrid};

/// Relative tolerance for `h(θ) = h(θ + π)`.
const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric convex body in the plane given by support values on
/// `M` uniformly spaced angles `θ_j = 2πj/M`.
///
/// The body is `K = ∩_j {x : ⟨x, u_j⟩ ≤ h_j}`, so `K° = conv{u_j / h_j}` exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyPairs", into = "BodyPairs")]
pub struct SupportBody2D {
    support: Vec<f64>,
}

/// Serialized form: `[angle, support]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BodyPairs {
    pub pairs: Vec<[f64; 2]>,
}

impl From<SupportBody2D> for BodyPairs {
    fn from(b: SupportBody2D) -> Self {
        BodyPairs {
            pairs: (0..b.len()).map(|j| [b.angle(j), b.support[j]]).collect(),
        }
    }
}

impl TryFrom<BodyPairs> for SupportBody2D {
    type Error = Error;
    fn try_from(p: BodyPairs) -> Result<Self> {
        let m = p.pairs.len();
        for (j, pair) in p.pairs.iter().enumerate() {
            if (pair[0] - TAU * j as f64 / m as f64).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("angle {j} is not on the uniform grid")));
            }
        }
        SupportBody2D::new(p.pairs.iter().map(|q| q[1]).collect())
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull, collinear points dropped.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

impl SupportBody2D {
    pub fn new(support: Vec<f64>) -> Result<Self> {
        let m = support.len();
        if m < 8 || !m.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "need an even number M >= 8 of angles, got {m}"
            )));
        }
        if let Some(j) = support.iter().position(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "support value {} at angle {j} must be positive and finite",
                support[j]
            )));
        }
        for j in 0..m / 2 {
            let (a, b) = (support[j], support[j + m / 2]);
            if (a - b).abs() > SYMMETRY_TOL * a.max(b) {
                return Err(Error::InvalidArgument(format!("h(θ) ≠ h(θ + π) at angle {j}")));
            }
        }
        Ok(SupportBody2D { support })
    }

    /// Samples `h` on the first half-turn and mirrors it.
    pub fn from_fn<F: Fn(f64) -> f64>(m: usize, h: F) -> Result<Self> {
        Self::mirrored(m, (0..m / 2).map(|j| h(TAU * j as f64 / m as f64)).collect())
    }

    fn mirrored(m: usize, half: Vec<f64>) -> Result<Self> {
        if !m.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "need an even number of angles, got {m}"
            )));
        }
        let mut support = half.clone();
        support.extend_from_slice(&half);
        SupportBody2D::new(support)
    }

    pub fn disc(radius: f64, m: usize) -> Result<Self> {
        Self::from_fn(m, |_| radius)
    }

    /// Ellipse with semi-axes `a` (x) and `b` (y).
    pub fn ellipse(a: f64, b: f64, m: usize) -> Result<Self> {
        Self::from_fn(m, |t| (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt())
    }

    /// `[−1, 1]²`; exact when `M` is a multiple of 4.
    pub fn square(m: usize) -> Result<Self> {
        Self::from_fn(m, |t| t.cos().abs() + t.sin().abs())
    }

    /// Log-normal support values, mirrored to keep the body symmetric.
    pub fn random(seed: u64, m: usize, sigma: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let law = LogNormal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(format!("log-normal spread: {e}")))?;
        let half = (0..m / 2).map(|_| law.sample(&mut rng)).collect();
        Self::mirrored(m, half)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.len() as f64
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    fn direction(&self, j: usize) -> [f64; 2] {
        let (s, c) = self.angle(j).sin_cos();
        [c, s]
    }

    /// Vertices of `K°` (counter-clockwise), the hull of `u_j / h_j`.
    pub fn polar_vertices(&self) -> Vec<[f64; 2]> {
        let pts = (0..self.len())
            .map(|j| {
                let u = self.direction(j);
                [u[0] / self.support[j], u[1] / self.support[j]]
            })
            .collect();
        convex_hull(pts)
    }

    /// Vertices of `K`, dual to the edges of `K°`: `⟨v, a⟩ = ⟨v, b⟩ = 1`.
    pub fn vertices(&self) -> Vec<[f64; 2]> {
        let q = self.polar_vertices();
        let n = q.len();
        (0..n)
            .map(|i| {
                let (a, b) = (q[i], q[(i + 1) % n]);
                let det = a[0] * b[1] - a[1] * b[0];
                [(b[1] - a[1]) / det, (a[0] - b[0]) / det]
            })
            .collect()
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices())
    }

    pub fn polar_area(&self) -> f64 {
        shoelace(&self.polar_vertices())
    }

    /// `h_K(x) = max_v ⟨x, v⟩` over the vertices of `K`.
    pub fn support_at(&self, x: [f64; 2]) -> f64 {
        self.vertices()
            .iter()
            .map(|v| x[0] * v[0] + x[1] * v[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether `x ∈ K`, tested against the facets of `K`.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.polar_vertices().iter().all(|q| x[0] * q[0] + x[1] * q[1] <= 1.0)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        SupportBody2D::new(self.support.iter().map(|h| lambda * h).collect())
    }
}

/// Support values of `K°` on the same angles: `h°(θ_k) = max_j ⟨u_k, u_j⟩ / h_j`,
/// taken over the hull vertices of `K°`.
pub fn polar_body(k: &SupportBody2D) -> Result<SupportBody2D> {
    let q = k.polar_vertices();
    let support = (0..k.len())
        .map(|i| {
            let u = k.direction(i);
            q.iter()
                .map(|p| u[0] * p[0] + u[1] * p[1])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    SupportBody2D::new(support)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SantaloSetReport {
    pub area: f64,
    pub polar_area: f64,
    /// `|K*|`, the disc of the same area.
    pub rearranged_area: f64,
    /// `|(K*)°| = π² / |K|`.
    pub rearranged_polar_area: f64,
    pub product: f64,
    /// `π² − |K||K°|`.
    pub equality_gap: f64,
    pub polar_comparison: bool,
    pub product_bound: bool,
}

impl SantaloSetReport {
    pub fn pass(&self) -> bool {
        self.polar_comparison && self.product_bound
    }
}

/// `|K°| ≤ |(K*)°|` and `|K||K°| ≤ π²` from exact polygon areas.
pub fn santalo_set_check(k: &SupportBody2D) -> SantaloSetReport {
    let area = k.area();
    let polar_area = k.polar_area();
    let bound = PI * PI;
    let tol = 1e-12 * bound;
    let rearranged_polar_area = bound / area;
    let product = area * polar_area;
    SantaloSetReport {
        area,
        polar_area,
        rearranged_area: area,
        rearranged_polar_area,
        product,
        equality_gap: bound - product,
        polar_comparison: polar_area <= rearranged_polar_area * (1.0 + 1e-12),
        product_bound: product <= bound + tol,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarComplementReport {
    pub epsilon: f64,
    /// `ρ⁻¹(ε)`.
    pub scale: f64,
    /// Nodes where `(K_{φ,−ε})ᶜ` and `ρ⁻¹(ε)K°` disagree.
    pub mismatches: usize,
    /// Relative shrinkage `κ` of the grid-sampled support, so that the sampled
    /// complement lies in `ρ⁻¹(ε)K° / (1 − κ)`.
    pub band: f64,
    /// Of those, nodes outside that band and more than one cell layer from the boundary of `ρ⁻¹(ε)K°`.
    pub outside_layer: usize,
    pub cells: usize,
}

impl PolarComplementReport {
    pub fn pass(&self) -> bool {
        self.outside_layer == 0
    }
}

/// Compares the complement of the inner-product enlargement of `K` at level
/// `−ε` with the dilate `ρ⁻¹(ε)K°` on a 2D grid.
pub fn polar_complement_check(
    k: &SupportBody2D,
    rho: &MonotoneMap,
    eps: f64,
    grid: &Grid,
) -> Result<PolarComplementReport> {
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: grid.dim(),
        });
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    let cost = CostSpec::InnerProduct { rho: rho.clone() };
    cost.validate()?;
    let pts = grid.points();
    let body = SetOnGrid::from_predicate(grid, |i| k.contains([pts[i][0], pts[i][1]]));
    let complement = enlarge(&body, &cost, -eps)?.complement();
    let scale = rho.inverse(eps);
    let verts = k.vertices();
    let target = SetOnGrid::from_predicate(grid, |i| {
        let x = pts[i];
        verts
            .iter()
            .map(|v| x[0] * v[0] + x[1] * v[1])
            .fold(f64::NEG_INFINITY, f64::max)
            <= scale
    });
    // Every point of K lies within h√2 of a grid node of K once its inradius
    // exceeds that, so the sampled support is at least (1 − κ) times the true one.
    let h = grid.max_spacing();
    let kappa = std::f64::consts::SQRT_2 * h / k.support().iter().copied().fold(f64::INFINITY, f64::min);
    if kappa >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "grid spacing {h} is too coarse for a body of inradius below {}",
            std::f64::consts::SQRT_2 * h
        )));
    }
    let diff = complement.symmetric_difference(&target);
    let support = |x: &[f64]| {
        verts
            .iter()
            .map(|v| x[0] * v[0] + x[1] * v[1])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let outside_layer = diff
        .iter()
        .filter(|&&i| !target.boundary_layer(i))
        .filter(|&&i| !complement.contains(i) || support(&pts[i]) > scale / (1.0 - kappa))
        .count();
    Ok(PolarComplementReport {
        epsilon: eps,
        scale,
        band: kappa,
        mismatches: diff.len(),
        outside_layer,
        cells: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_and_cross_polytope() {
        let k = SupportBody2D::square(64).unwrap();
        assert!((k.area() - 4.0).abs() < 1e-12);
        assert!((k.polar_area() - 2.0).abs() < 1e-12);
        let r = santalo_set_check(&k);
        assert!(r.pass());
        assert!((r.product - 8.0).abs() < 1e-11);
    }

    #[test]
    fn disc_polar_and_equality() {
        let m = 8192;
        let k = SupportBody2D::disc(2.0, m).unwrap();
        let p = polar_body(&k).unwrap();
        for h in p.support() {
            assert!((h - 0.5).abs() < 1e-12);
        }
        let r = santalo_set_check(&k);
        let exact = (m as f64).powi(2) * (PI / m as f64).sin().powi(2);
        assert!((r.product - exact).abs() < 1e-9);
        assert!(r.pass() && r.equality_gap < 1e-6);
    }

    #[test]
    fn ellipse_is_nearly_an_equality_case() {
        let k = SupportBody2D::ellipse(2.0, 0.5, 8192).unwrap();
        let r = santalo_set_check(&k);
        assert!((r.area - PI).abs() < 1e-5);
        assert!((r.polar_area - PI).abs() < 1e-5);
        assert!(r.pass() && r.equality_gap < 5e-6);
    }

    #[test]
    fn polar_is_inverse_homogeneous() {
        let k = SupportBody2D::random(7, 64, 0.3).unwrap();
        for lambda in [2.0, 0.5, 8.0] {
            let lhs = polar_body(&k.scaled(lambda).unwrap()).unwrap();
            let rhs = polar_body(&k).unwrap().scaled(1.0 / lambda).unwrap();
            assert_eq!(lhs.support(), rhs.support());
        }
    }

    #[test]
    fn random_bodies_satisfy_santalo() {
        for seed in 0..50 {
            let k = SupportBody2D::random(seed, 128, 0.3).unwrap();
            assert!(santalo_set_check(&k).pass(), "seed {seed}");
        }
    }

    #[test]
    fn rejects_bad_bodies() {
        assert!(SupportBody2D::new(vec![1.0; 6]).is_err());
        let mut h = vec![1.0; 8];
        h[1] = 0.0;
        assert!(SupportBody2D::new(h).is_err());
        let mut h = vec![1.0; 8];
        h[1] = 2.0;
        assert!(SupportBody2D::new(h).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let k = SupportBody2D::ellipse(1.0, 2.0, 16).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert!(s.contains("pairs"));
        let back: SupportBody2D = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn polar_complement_claim_on_square() {
        let k = SupportBody2D::square(16).unwrap();
        let grid = Grid::centered_cube(2, 1.5, 41).unwrap();
        for (rho, eps) in [(MonotoneMap::Identity, 0.8), (MonotoneMap::Cube, 0.3)] {
            let r = polar_complement_check(&k, &rho, eps, &grid).unwrap();
            assert!(r.pass(), "{r:?}");
        }
    }
}
