use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::ConvexProfile;
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::flow::functional::check_dimension;
use crate::flow::{product_functional, DualKind};
use crate::special::gamma;

use super::exact::{legendre_product_exact, profile_mass};

/// Lower bound on the terminal slope kept throughout a search.
pub const TERMINAL_FLOOR: f64 = 0.05;

/// `Ψ(λ·)` with `∫₀^∞ e^{−Ψ(λr)} r^{n−1} dr = 1`, i.e. `λ = m^{1/n}`.
pub fn normalize_profile(psi: &ConvexProfile, n: usize) -> Result<ConvexProfile> {
    let m = profile_mass(psi, n)?;
    psi.scaled(m.powf(1.0 / n as f64))
}

/// `∫₀^∞ e^{−r²/2} r^{n−1} dr = 2^{n/2−1} Γ(n/2)`.
pub fn gaussian_mass(n: usize) -> f64 {
    2f64.powf(0.5 * n as f64 - 1.0) * gamma(0.5 * n as f64)
}

/// Rescales `psi` so its mass equals that of `r²/2`, the form in which it is
/// compared with the Gaussian equality case.
pub fn gaussian_scale(psi: &ConvexProfile, n: usize) -> Result<ConvexProfile> {
    let m = profile_mass(psi, n)?;
    psi.scaled((m / gaussian_mass(n)).powf(1.0 / n as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub kind: DualKind,
    /// Segments of the knot grid `r_k = k·radius/knots`.
    pub knots: usize,
    pub radius: f64,
    /// Evaluations of the functional per restart.
    pub budget: usize,
    pub initial_step: f64,
    pub grow: f64,
    pub shrink: f64,
    pub seed: u64,
    /// The search stops once every coordinate step is below this.
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n: 1,
            kind: DualKind::Legendre,
            knots: 16,
            radius: 4.0,
            budget: 5000,
            initial_step: 0.25,
            grow: 1.5,
            shrink: 0.5,
            seed: 0,
            tolerance: 1e-9,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        check_dimension(self.n)?;
        if self.budget == 0 || self.knots == 0 {
            return Err(Error::InvalidArgument(
                "search needs a positive budget and knot count".into(),
            ));
        }
        if !(self.tolerance > 0.0 && self.radius > 0.0 && self.initial_step > 0.0) {
            return Err(Error::InvalidArgument(
                "tolerance, radius and step must be positive".into(),
            ));
        }
        if !(self.grow >= 1.0 && self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidArgument(
                "steps must grow by ≥ 1 and shrink by a factor in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    fn radii(&self) -> Vec<f64> {
        (0..=self.knots)
            .map(|k| self.radius * k as f64 / self.knots as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub seed: u64,
    /// Best profile, normalized to unit mass.
    pub profile: ConvexProfile,
    /// Slope increments on the knot grid of the best iterate.
    pub increments: Vec<f64>,
    pub value: f64,
    /// Best value after each accepted step, starting with the initial point.
    pub history: Vec<f64>,
    pub evaluations: usize,
    /// `|∫ e^{−Ψ*} r^{n−1} dr − 1|`.
    pub normalization_residual: f64,
}

fn objective(cfg: &SearchConfig, radii: &[f64], inc: &[f64]) -> Result<f64> {
    let psi = ConvexProfile::from_increments(radii.to_vec(), inc)?;
    match cfg.kind {
        DualKind::Legendre => legendre_product_exact(&psi, cfg.n),
        DualKind::Polar => product_functional(&psi, cfg.n, DualKind::Polar),
    }
}

/// Projection onto nonnegative increments with total at least the floor.
fn project(inc: &mut [f64]) {
    for d in inc.iter_mut() {
        *d = d.max(0.0);
    }
    let total: f64 = inc.iter().sum();
    if total < TERMINAL_FLOOR {
        *inc.last_mut().expect("nonempty") += TERMINAL_FLOOR - total;
    }
}

fn initial_increments(cfg: &SearchConfig) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h = cfg.radius / cfg.knots as f64;
    // Around the interpolant of r²/2, whose increments are all h.
    let mut inc: Vec<f64> = (0..=cfg.knots).map(|_| h * rng.random_range(0.0..2.0)).collect();
    project(&mut inc);
    inc
}

/// Coordinate search over the slope increments of `start`, accepting strict improvements only.
pub fn search_from(cfg: &SearchConfig, start: Vec<f64>) -> Result<SearchResult> {
    cfg.validate()?;
    let radii = cfg.radii();
    if start.len() != radii.len() {
        return Err(Error::InvalidArgument(format!(
            "{} increments for {} knots",
            start.len(),
            radii.len()
        )));
    }
    let mut inc = start;
    project(&mut inc);
    let mut best = objective(cfg, &radii, &inc)?;
    let mut evaluations = 1;
    let mut history = vec![best];
    let mut steps = vec![cfg.initial_step; inc.len()];
    'outer: while evaluations < cfg.budget {
        if steps.iter().all(|&s| s < cfg.tolerance) {
            break;
        }
        for k in 0..inc.len() {
            let mut moved = false;
            for dir in [1.0, -1.0] {
                if evaluations >= cfg.budget {
                    break 'outer;
                }
                let mut trial = inc.clone();
                trial[k] += dir * steps[k];
                project(&mut trial);
                if trial == inc {
                    continue;
                }
                let v = objective(cfg, &radii, &trial)?;
                evaluations += 1;
                if v > best {
                    best = v;
                    inc = trial;
                    history.push(best);
                    moved = true;
                    break;
                }
            }
            steps[k] *= if moved { cfg.grow } else { cfg.shrink };
        }
    }
    let raw = ConvexProfile::from_increments(radii, &inc)?;
    let profile = normalize_profile(&raw, cfg.n)?;
    let normalization_residual = (profile_mass(&profile, cfg.n)? - 1.0).abs();
    Ok(SearchResult {
        seed: cfg.seed,
        profile,
        increments: inc,
        value: best,
        history,
        evaluations,
        normalization_residual,
    })
}

pub fn search_extremizer(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    search_from(cfg, initial_increments(cfg))
}

/// Independent searches from seeds `cfg.seed, cfg.seed + 1, …`; the best value
/// wins, ties going to the lower seed.
pub fn search_restarts(cfg: &SearchConfig, restarts: usize, exec: Execution) -> Result<SearchResult> {
    let seeds: Vec<u64> = (0..restarts.max(1) as u64).map(|i| cfg.seed + i).collect();
    let results = map_slice(exec, &seeds, |&seed| {
        search_extremizer(&SearchConfig { seed, ..cfg.clone() })
    });
    let mut best: Option<SearchResult> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// `sup_{r ∈ [0, r_max]} |Ψ(r) − r²/2|` on a dense grid, after rescaling `psi` to the Gaussian mass.
pub fn gaussian_distance(psi: &ConvexProfile, n: usize, r_max: f64) -> Result<f64> {
    let g = gaussian_scale(psi, n)?;
    Ok((0..=3000)
        .map(|i| {
            let r = r_max * i as f64 / 3000.0;
            (g.eval(r) - 0.5 * r * r).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn normalization_examples() {
        let r = ConvexProfile::linear(1.0).unwrap();
        let same = normalize_profile(&r, 1).unwrap();
        assert!((same.eval(2.0) - 2.0).abs() < 1e-15);
        let two = normalize_profile(&ConvexProfile::linear(2.0).unwrap(), 1).unwrap();
        for &x in &[0.5, 1.0, 3.0] {
            assert!((two.eval(x) - x).abs() < 1e-14);
        }
    }

    #[test]
    fn normalization_keeps_the_product() {
        let psi = ConvexProfile::new(vec![0.0, 0.4, 1.1], vec![0.0, 0.3, 1.4], 3.5).unwrap();
        for n in 1..=3 {
            let norm = normalize_profile(&psi, n).unwrap();
            assert!((profile_mass(&norm, n).unwrap() - 1.0).abs() < 1e-9);
            for kind in [DualKind::Legendre, DualKind::Polar] {
                let before = product_functional(&psi, n, kind).unwrap();
                let after = product_functional(&norm, n, kind).unwrap();
                assert!((before - after).abs() < 1e-7, "n={n} {kind:?}");
            }
        }
    }

    #[test]
    fn gaussian_masses() {
        assert!((gaussian_mass(1) - (PI / 2.0).sqrt()).abs() < 1e-14);
        assert!((gaussian_mass(2) - 1.0).abs() < 1e-14);
        assert!((gaussian_mass(3) - (PI / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn short_search_improves_monotonically() {
        let cfg = SearchConfig {
            budget: 400,
            ..SearchConfig::default()
        };
        let res = search_extremizer(&cfg).unwrap();
        assert!(res.history.windows(2).all(|w| w[1] > w[0]));
        assert!(res.value <= 2.0 * PI + 1e-4);
        assert!(res.normalization_residual < 1e-9);
        assert_eq!(res, search_extremizer(&cfg).unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(search_extremizer(&SearchConfig {
            budget: 0,
            ..SearchConfig::default()
        })
        .is_err());
        assert!(search_extremizer(&SearchConfig {
            n: 5,
            ..SearchConfig::default()
        })
        .is_err());
        assert!(search_extremizer(&SearchConfig {
            tolerance: 0.0,
            ..SearchConfig::default()
        })
        .is_err());
    }
}
