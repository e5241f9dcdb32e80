use crate::base::{Grid, GridFunction};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};

use super::cost::{CostSpec, HopfLaxKernel};

/// Brute-force discrete inf-convolution: `out(x) = min_y f(y) + φ(x, y)` over
/// every finite in-grid node `y`.
pub fn inf_convolution(f: &GridFunction, cost: &CostSpec, out: &Grid) -> Result<GridFunction> {
    inf_convolution_with(Execution::default(), f, cost, out)
}

pub fn inf_convolution_with(exec: Execution, f: &GridFunction, cost: &CostSpec, out: &Grid) -> Result<GridFunction> {
    cost.validate()?;
    if out.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: out.dim(),
        });
    }
    let grid = f.grid();
    let sources: Vec<_> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, v)| (grid.point(i), *v))
        .collect();
    if sources.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let values = map_indexed(exec, out.len(), |i| {
        let x = out.point(i);
        sources
            .iter()
            .map(|(y, v)| v + cost.eval(&x, y))
            .fold(f64::INFINITY, f64::min)
    });
    GridFunction::new(out.clone(), values)
}

/// `out[i] = min_j f[j] + w·(x_i − y_j)²` by the lower envelope of parabolas.
/// `ys` and `xs` must be sorted; infinite `f[j]` are skipped.
pub fn lower_envelope_1d(ys: &[f64], fs: &[f64], xs: &[f64], w: f64, out: &mut [f64]) {
    let mut v: Vec<usize> = Vec::with_capacity(ys.len());
    let mut z: Vec<f64> = Vec::with_capacity(ys.len() + 1);
    let meet =
        |j: usize, k: usize| ((fs[k] + w * ys[k] * ys[k]) - (fs[j] + w * ys[j] * ys[j])) / (2.0 * w * (ys[k] - ys[j]));
    for q in 0..ys.len() {
        if !fs[q].is_finite() {
            continue;
        }
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.clear();
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let s = meet(p, q);
                    if s <= *z.last().unwrap() {
                        v.pop();
                        z.pop();
                        if v.is_empty() {
                            continue;
                        }
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    if v.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (i, &x) in xs.iter().enumerate() {
        while k + 1 < v.len() && z[k + 1] < x {
            k += 1;
        }
        let j = v[k];
        let d = x - ys[j];
        out[i] = fs[j] + w * d * d;
    }
}

/// Separable quadratic inf-convolution `min_y f(y) + ‖x − y‖²·w` on `f`'s grid.
pub fn quadratic_envelope(exec: Execution, f: &GridFunction, w: f64) -> Result<GridFunction> {
    let grid = f.grid().clone();
    let mut values = f.values().to_vec();
    let dim = grid.dim();
    for axis in 0..dim {
        let ax = grid.axes()[axis];
        let coords: Vec<f64> = (0..ax.nodes).map(|i| ax.coord(i)).collect();
        let stride: usize = grid.axes()[axis + 1..].iter().map(|a| a.nodes).product();
        let lines = grid.len() / ax.nodes;
        let line_start = |l: usize| (l / stride) * stride * ax.nodes + l % stride;
        let src = values.clone();
        let rows = map_indexed(exec, lines, |l| {
            let start = line_start(l);
            let fs: Vec<f64> = (0..ax.nodes).map(|k| src[start + k * stride]).collect();
            let mut out = vec![0.0; ax.nodes];
            lower_envelope_1d(&coords, &fs, &coords, w, &mut out);
            out
        });
        for (l, row) in rows.into_iter().enumerate() {
            let start = line_start(l);
            for (k, v) in row.into_iter().enumerate() {
                values[start + k * stride] = v;
            }
        }
    }
    GridFunction::new(grid, values)
}

/// Hopf-Lax evolution `min_y f(y) + t·G(‖x − y‖/t)` on `f`'s grid; quadratic
/// `G` uses the lower-envelope path, other kernels the brute-force oracle.
pub fn hopf_lax(f: &GridFunction, g: &HopfLaxKernel, t: f64) -> Result<GridFunction> {
    hopf_lax_with(Execution::default(), f, g, t)
}

pub fn hopf_lax_with(exec: Execution, f: &GridFunction, g: &HopfLaxKernel, t: f64) -> Result<GridFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Hopf-Lax time t = {t} must be positive"
        )));
    }
    match g {
        HopfLaxKernel::Quadratic => quadratic_envelope(exec, f, 0.5 / t),
        HopfLaxKernel::Profile { .. } => {
            inf_convolution_with(exec, f, &CostSpec::HopfLax { g: g.clone(), t }, f.grid())
        }
    }
}

/// Inf-convolution on `f`'s own grid, dispatching quadratic Hopf-Lax costs to
/// the fast path.
pub fn inf_convolution_auto(exec: Execution, f: &GridFunction, cost: &CostSpec) -> Result<GridFunction> {
    match cost {
        CostSpec::HopfLax { g, t } => hopf_lax_with(exec, f, g, *t),
        _ => inf_convolution_with(exec, f, cost, f.grid()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::ConvexProfile;
    use proptest::prelude::*;

    fn line(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(Grid::line(lo, hi, n).unwrap(), |p| f(p[0])).unwrap()
    }

    #[test]
    fn quadratic_hopf_lax_of_quadratic() {
        let f = line(-6.0, 6.0, 601, |x| 0.5 * x * x);
        let u = hopf_lax(&f, &HopfLaxKernel::Quadratic, 1.0).unwrap();
        for (i, &v) in u.values().iter().enumerate() {
            let x = u.grid().point(i)[0];
            if x.abs() < 4.0 {
                assert!((v - 0.25 * x * x).abs() < 1e-3, "x={x}");
            }
        }
    }

    #[test]
    fn zero_cost_gives_constant_minimum() {
        let f = line(-2.0, 2.0, 41, |x| (x - 0.5).powi(2) + 1.0);
        let zero = ConvexProfile::new(vec![0.0, 1.0], vec![0.0, 0.0], 0.0).unwrap();
        let u = hopf_lax(&f, &HopfLaxKernel::Profile { profile: zero }, 1.0).unwrap();
        assert!(u.values().iter().all(|&v| v == f.min_value()));
    }

    #[test]
    fn distance_cost_fixes_one_lipschitz_function() {
        let f = line(-3.0, 3.0, 61, f64::abs);
        let q = inf_convolution(&f, &CostSpec::distance(), f.grid()).unwrap();
        for (a, b) in q.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_equivariance() {
        let g = Grid::line(-4.0, 6.0, 101).unwrap();
        let f = GridFunction::from_fn(g.clone(), |p| p[0].abs()).unwrap();
        let f2 = GridFunction::from_fn(g.clone(), |p| (p[0] - 2.0).abs()).unwrap();
        let u = hopf_lax(&f, &HopfLaxKernel::Quadratic, 1.0).unwrap();
        let u2 = hopf_lax(&f2, &HopfLaxKernel::Quadratic, 1.0).unwrap();
        for i in 20..60 {
            assert!((u2.values()[i + 20] - u.values()[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn small_time_is_close_to_identity() {
        let f = line(-2.0, 2.0, 401, |x| x.abs() + 0.3 * x);
        let u = hopf_lax(&f, &HopfLaxKernel::Quadratic, 1e-3).unwrap();
        // Deviation is at most t·L²/2 for an L-Lipschitz f.
        let bound = 1e-3 * 1.3f64.powi(2) / 2.0 + 1e-12;
        for (a, b) in u.values().iter().zip(f.values()) {
            assert!(b - a <= bound && a <= b);
        }
    }

    #[test]
    fn rejects_nonpositive_time() {
        let f = line(0.0, 1.0, 3, |x| x);
        assert!(hopf_lax(&f, &HopfLaxKernel::Quadratic, 0.0).is_err());
    }

    fn values_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(prop_oneof![8 => -5.0f64..5.0, 1 => Just(f64::INFINITY)], n)
            .prop_filter("one finite value", |v| v.iter().any(|x| x.is_finite()))
    }

    proptest! {
        #[test]
        fn fast_path_matches_oracle_2d(vals in values_strategy(13 * 11), t in 0.05f64..3.0) {
            let g = Grid::new(vec![
                crate::base::Axis::new(-2.0, 1.0, 13).unwrap(),
                crate::base::Axis::new(-1.0, 2.0, 11).unwrap(),
            ]).unwrap();
            let f = GridFunction::new(g.clone(), vals).unwrap();
            let fast = hopf_lax(&f, &HopfLaxKernel::Quadratic, t).unwrap();
            let slow = inf_convolution(&f, &CostSpec::quadratic(t), &g).unwrap();
            for (a, b) in fast.values().iter().zip(slow.values()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn monotone_and_upper_bounded(vals in values_strategy(40), bump in proptest::collection::vec(0.0f64..2.0, 40)) {
            let g = Grid::line(-3.0, 3.0, 40).unwrap();
            let f = GridFunction::new(g.clone(), vals.clone()).unwrap();
            let bigger: Vec<f64> = vals.iter().zip(&bump).map(|(v, b)| v + b).collect();
            let f2 = GridFunction::new(g.clone(), bigger).unwrap();
            let cost = CostSpec::distance();
            let q = inf_convolution(&f, &cost, &g).unwrap();
            let q2 = inf_convolution(&f2, &cost, &g).unwrap();
            for i in 0..g.len() {
                prop_assert!(q.values()[i] <= q2.values()[i]);
                let x = g.point(i);
                for j in 0..g.len() {
                    let bound = vals[j] + cost.eval(&x, &g.point(j));
                    prop_assert!(q.values()[i] <= bound);
                }
            }
        }
    }
}
