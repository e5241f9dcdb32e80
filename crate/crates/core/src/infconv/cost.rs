use serde::{Deserialize, Serialize};

use crate::base::{grid::distance, grid::dot, ConvexProfile, Point};
use crate::error::{Error, Result};

/// A nondecreasing map `ℝ → ℝ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneMap {
    Identity,
    /// `y ↦ a·y` with `a > 0`.
    Linear {
        slope: f64,
    },
    /// `y ↦ y³`.
    Cube,
    /// Piecewise-linear interpolation of a nondecreasing table, continued
    /// with the end-segment slopes.
    Table {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

impl MonotoneMap {
    pub fn table(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::InvalidArgument(
                "monotone table needs at least 2 matching points".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) || ys.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument(
                "monotone table must have increasing xs and nondecreasing ys".into(),
            ));
        }
        Ok(MonotoneMap::Table { xs, ys })
    }

    pub fn label(&self) -> String {
        match self {
            MonotoneMap::Identity => "identity".into(),
            MonotoneMap::Linear { slope } => format!("linear({slope})"),
            MonotoneMap::Cube => "cube".into(),
            MonotoneMap::Table { xs, .. } => format!("table({} points)", xs.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MonotoneMap::Linear { slope } if !(*slope > 0.0 && slope.is_finite()) => Err(Error::InvalidArgument(
                format!("linear map slope {slope} must be positive"),
            )),
            MonotoneMap::Table { xs, ys } => MonotoneMap::table(xs.clone(), ys.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            MonotoneMap::Identity => y,
            MonotoneMap::Linear { slope } => slope * y,
            MonotoneMap::Cube => y * y * y,
            MonotoneMap::Table { xs, ys } => {
                let n = xs.len();
                let k = xs.partition_point(|&x| x <= y).clamp(1, n - 1) - 1;
                let s = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
                if s == 0.0 {
                    ys[k]
                } else {
                    ys[k] + s * (y - xs[k])
                }
            }
        }
    }

    /// Generalized inverse `inf{y : ρ(y) ≥ ε}`.
    pub fn inverse(&self, eps: f64) -> f64 {
        match self {
            MonotoneMap::Identity => eps,
            MonotoneMap::Linear { slope } => eps / slope,
            MonotoneMap::Cube => eps.cbrt(),
            MonotoneMap::Table { xs, ys } => {
                let n = xs.len();
                let s0 = (ys[1] - ys[0]) / (xs[1] - xs[0]);
                if eps <= ys[0] {
                    return if s0 > 0.0 {
                        xs[0] - (ys[0] - eps) / s0
                    } else {
                        f64::NEG_INFINITY
                    };
                }
                for k in 0..n - 1 {
                    if ys[k + 1] >= eps {
                        let s = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
                        return xs[k] + (eps - ys[k]) / s;
                    }
                }
                let s = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
                if s > 0.0 {
                    xs[n - 1] + (eps - ys[n - 1]) / s
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn is_strictly_increasing(&self) -> bool {
        match self {
            MonotoneMap::Table { ys, .. } => ys.windows(2).all(|w| w[1] > w[0]),
            _ => true,
        }
    }
}

/// The transport cost `G` of a Hopf-Lax family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HopfLaxKernel {
    /// `G(r) = r²/2`, handled by the lower-envelope fast path.
    Quadratic,
    Profile {
        profile: ConvexProfile,
    },
}

impl HopfLaxKernel {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            HopfLaxKernel::Quadratic => 0.5 * r * r,
            HopfLaxKernel::Profile { profile } => profile.eval(r),
        }
    }

    /// Lipschitz constant of `G` on `[0, r]`.
    pub fn modulus(&self, r: f64) -> f64 {
        match self {
            HopfLaxKernel::Quadratic => r,
            HopfLaxKernel::Profile { profile } => profile.right_slope(r),
        }
    }
}

/// Cost families `φ(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    /// `t·G(‖x − y‖ / t)`.
    HopfLax { g: HopfLaxKernel, t: f64 },
    /// `−ρ(⟨x, y⟩)`.
    InnerProduct { rho: MonotoneMap },
    /// `α(‖x − y‖)`.
    Distance { alpha: MonotoneMap },
}

impl CostSpec {
    pub fn quadratic(t: f64) -> Self {
        CostSpec::HopfLax {
            g: HopfLaxKernel::Quadratic,
            t,
        }
    }

    pub fn distance() -> Self {
        CostSpec::Distance {
            alpha: MonotoneMap::Identity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CostSpec::HopfLax { t, .. } if !(*t > 0.0 && t.is_finite()) => Err(Error::InvalidArgument(format!(
                "Hopf-Lax time t = {t} must be positive"
            ))),
            CostSpec::HopfLax { .. } => Ok(()),
            CostSpec::InnerProduct { rho } => {
                rho.validate()?;
                if rho.eval(0.0) != 0.0 || !rho.is_strictly_increasing() {
                    return Err(Error::InvalidArgument(
                        "inner-product cost needs an increasing ρ with ρ(0) = 0".into(),
                    ));
                }
                Ok(())
            }
            CostSpec::Distance { alpha } => alpha.validate(),
        }
    }

    /// Radial part `c(d)` for costs depending on `‖x − y‖` only.
    pub fn radial(&self, d: f64) -> Option<f64> {
        match self {
            CostSpec::HopfLax { g, t } => Some(t * g.eval(d / t)),
            CostSpec::Distance { alpha } => Some(alpha.eval(d)),
            CostSpec::InnerProduct { .. } => None,
        }
    }

    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        match self {
            CostSpec::InnerProduct { rho } => -rho.eval(dot(x, y)),
            _ => self.radial(distance(x, y)).expect("radial cost"),
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, CostSpec::InnerProduct { .. })
    }
}
