use serde::{Deserialize, Serialize};

use crate::base::{ConvexProfile, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};

/// Exact conjugate of a [`ConvexProfile`]: piecewise linear on
/// `[0, terminal slope]` with breakpoints at the chord slopes, `+∞` beyond.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugateProfile {
    pub slopes: Vec<f64>,
    pub values: Vec<f64>,
    pub domain_end: f64,
}

impl ConjugateProfile {
    pub fn eval(&self, p: f64) -> f64 {
        let p = p.max(0.0);
        if p > self.domain_end {
            return f64::INFINITY;
        }
        let k = self.slopes.partition_point(|&s| s <= p);
        if k == 0 {
            return self.values[0];
        }
        if k == self.slopes.len() {
            return *self.values.last().unwrap();
        }
        let (s0, s1) = (self.slopes[k - 1], self.slopes[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        v0 + (v1 - v0) * (p - s0) / (s1 - s0)
    }
}

/// `LΨ(p) = sup_{s ≥ 0} ps − Ψ(s)` for the piecewise-linear extension of Ψ,
/// built by slope/breakpoint exchange.
pub fn legendre_profile(psi: &ConvexProfile) -> ConjugateProfile {
    let mut slopes = vec![0.0];
    for s in psi.chord_slopes().into_iter().chain(std::iter::once(psi.terminal())) {
        if s > *slopes.last().unwrap() {
            slopes.push(s);
        }
    }
    let values = slopes.iter().map(|&p| psi.legendre_at(p)).collect();
    ConjugateProfile {
        slopes,
        values,
        domain_end: psi.terminal(),
    }
}

/// `LΨ` sampled on `slope_grid`.
pub fn legendre_profile_samples(psi: &ConvexProfile, slope_grid: &[f64]) -> Vec<f64> {
    let c = legendre_profile(psi);
    slope_grid.iter().map(|&p| c.eval(p)).collect()
}

/// `s(x) = max_j x·y_j + a_j` at sorted `xs` for sorted distinct slopes `ys`;
/// lines with `a_j = −∞` are excluded. Upper envelope plus a monotone pointer.
pub fn max_affine_1d(ys: &[f64], a: &[f64], xs: &[f64], out: &mut [f64]) {
    let mut hull: Vec<usize> = Vec::with_capacity(ys.len());
    // Line b is dominated by a and c when the a/c crossing is left of the a/b crossing.
    let useless = |i: usize, j: usize, k: usize| (a[i] - a[k]) * (ys[j] - ys[i]) <= (a[i] - a[j]) * (ys[k] - ys[i]);
    for k in 0..ys.len() {
        if a[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 && useless(hull[hull.len() - 2], hull[hull.len() - 1], k) {
            hull.pop();
        }
        hull.push(k);
    }
    if hull.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::NEG_INFINITY);
        return;
    }
    let val = |j: usize, x: f64| x * ys[j] + a[j];
    let mut p = 0;
    for (o, &x) in out.iter_mut().zip(xs) {
        while p + 1 < hull.len() && val(hull[p + 1], x) >= val(hull[p], x) {
            p += 1;
        }
        *o = val(hull[p], x);
    }
}

fn reject_bad_input(f: &GridFunction) -> Result<()> {
    if let Some(i) = f.values().iter().position(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::InvalidArgument(format!(
            "-inf at node {i} is not a valid transform input"
        )));
    }
    Ok(())
}

/// Discrete conjugate `sup_y ⟨x, y⟩ − f(y)` on `out`, as iterated 1D
/// max-affine envelopes, one axis at a time.
pub fn legendre_grid(f: &GridFunction, out: &Grid) -> Result<GridFunction> {
    legendre_grid_with(Execution::default(), f, out)
}

pub fn legendre_grid_with(exec: Execution, f: &GridFunction, out: &Grid) -> Result<GridFunction> {
    reject_bad_input(f)?;
    let n = f.dim();
    if out.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: out.dim(),
        });
    }
    let in_axes = f.grid().axes();
    let out_axes = out.axes();
    let mut shape: Vec<usize> = in_axes.iter().map(|a| a.nodes).collect();
    let mut data: Vec<f64> = f.values().iter().map(|v| -v).collect();
    for axis in (0..n).rev() {
        let ys: Vec<f64> = (0..in_axes[axis].nodes).map(|i| in_axes[axis].coord(i)).collect();
        let xs: Vec<f64> = (0..out_axes[axis].nodes).map(|i| out_axes[axis].coord(i)).collect();
        let stride: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let lines = outer * stride;
        let (n_in, n_out) = (ys.len(), xs.len());
        let src = &data;
        let rows = map_indexed(exec, lines, |l| {
            let (o, s) = (l / stride, l % stride);
            let base = o * n_in * stride + s;
            let a: Vec<f64> = (0..n_in).map(|k| src[base + k * stride]).collect();
            let mut row = vec![0.0; n_out];
            max_affine_1d(&ys, &a, &xs, &mut row);
            row
        });
        let mut next = vec![0.0; outer * n_out * stride];
        for (l, row) in rows.into_iter().enumerate() {
            let (o, s) = (l / stride, l % stride);
            let base = o * n_out * stride + s;
            for (k, v) in row.into_iter().enumerate() {
                next[base + k * stride] = v;
            }
        }
        data = next;
        shape[axis] = n_out;
    }
    if data.contains(&f64::NEG_INFINITY) {
        return Err(Error::EmptyDomain);
    }
    GridFunction::new(out.clone(), data)
}

/// Brute-force `O(N·M)` conjugate, the oracle for [`legendre_grid`].
pub fn legendre_bruteforce(f: &GridFunction, out: &Grid) -> Result<GridFunction> {
    reject_bad_input(f)?;
    let src: Vec<_> = (0..f.len())
        .filter(|&i| f.values()[i].is_finite())
        .map(|i| (f.grid().point(i), f.values()[i]))
        .collect();
    if src.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let values = (0..out.len())
        .map(|i| {
            let x = out.point(i);
            src.iter()
                .map(|(y, v)| crate::base::grid::dot(&x, y) - v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    GridFunction::new(out.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Axis;
    use proptest::prelude::*;

    #[test]
    fn self_dual_quadratic_profile() {
        let psi = ConvexProfile::quadratic_interpolant(6.0, 600).unwrap();
        let c = legendre_profile(&psi);
        for &p in &[0.0, 0.5, 1.3, 2.7, 4.0] {
            assert!((c.eval(p) - 0.5 * p * p).abs() < 1e-4, "p={p}");
        }
    }

    #[test]
    fn linear_profile_conjugate_is_an_indicator() {
        let c = legendre_profile(&ConvexProfile::linear(1.0).unwrap());
        assert_eq!(c.eval(0.4), 0.0);
        assert_eq!(c.eval(1.0), 0.0);
        assert_eq!(c.eval(1.01), f64::INFINITY);
    }

    #[test]
    fn quartic_profile_against_dense_sup() {
        let k = 2000;
        let radii: Vec<f64> = (0..=k).map(|i| 3.0 * i as f64 / k as f64).collect();
        let values: Vec<f64> = radii.iter().map(|r| r.powi(4) / 4.0).collect();
        let psi = ConvexProfile::new(radii, values, 27.0).unwrap();
        let c = legendre_profile(&psi);
        for &p in &[0.3, 1.0, 2.0, 8.0] {
            let dense = (0..=200_000)
                .map(|i| {
                    let s = 3.0 * i as f64 / 200_000.0;
                    p * s - s.powi(4) / 4.0
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let closed = 0.75 * p.powf(4.0 / 3.0);
            assert!((c.eval(p) - dense).abs() < 1e-4);
            assert!((dense - closed).abs() < 1e-6);
        }
    }

    #[test]
    fn conjugate_of_origin_indicator_is_zero() {
        let g = Grid::centered_cube(2, 1.0, 11).unwrap();
        let o = g.origin_index().unwrap();
        let vals = (0..g.len()).map(|i| if i == o { 0.0 } else { f64::INFINITY }).collect();
        let f = GridFunction::new(g.clone(), vals).unwrap();
        let l = legendre_grid(&f, &Grid::centered_cube(2, 3.0, 7).unwrap()).unwrap();
        assert!(l.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn anisotropic_quadratic() {
        let g = Grid::centered_cube(2, 6.0, 241).unwrap();
        let f = GridFunction::from_fn(g, |p| 0.5 * (p[0] * p[0] + 2.0 * p[1] * p[1])).unwrap();
        let out = Grid::centered_cube(2, 2.0, 41).unwrap();
        let l = legendre_grid(&f, &out).unwrap();
        for i in 0..out.len() {
            let x = out.point(i);
            let want = 0.5 * (x[0] * x[0] + 0.5 * x[1] * x[1]);
            assert!((l.values()[i] - want).abs() < 2e-3);
        }
    }

    #[test]
    fn biconjugate_recovers_convex_function() {
        let g = Grid::line(-3.0, 3.0, 301).unwrap();
        let f = GridFunction::from_fn(g.clone(), |p| (p[0] - 0.5).abs() + 0.3 * p[0] * p[0]).unwrap();
        let dual = Grid::line(-6.0, 6.0, 4001).unwrap();
        let ll = legendre_grid(&legendre_grid(&f, &dual).unwrap(), &g).unwrap();
        // A dual slope lands within dp/2 of each discrete subgradient interval.
        let tol = 0.5 * dual.max_spacing() * g.max_spacing();
        for (a, b) in ll.values().iter().zip(f.values()) {
            assert!(*a <= b + 1e-12);
            assert!(b - a <= tol);
        }
    }

    proptest! {
        #[test]
        fn factorized_matches_bruteforce(
            vals in proptest::collection::vec(prop_oneof![6 => -3.0f64..3.0, 1 => Just(f64::INFINITY)], 9 * 7 * 5),
        ) {
            prop_assume!(vals.iter().any(|v| v.is_finite()));
            let g = Grid::new(vec![
                Axis::new(-1.0, 1.0, 9).unwrap(),
                Axis::new(-2.0, 0.5, 7).unwrap(),
                Axis::new(0.0, 1.0, 5).unwrap(),
            ]).unwrap();
            let f = GridFunction::new(g, vals).unwrap();
            let out = Grid::new(vec![
                Axis::new(-2.0, 2.0, 6).unwrap(),
                Axis::new(-1.0, 3.0, 5).unwrap(),
                Axis::new(-1.0, 1.0, 4).unwrap(),
            ]).unwrap();
            let fast = legendre_grid(&f, &out).unwrap();
            let slow = legendre_bruteforce(&f, &out).unwrap();
            for (a, b) in fast.values().iter().zip(slow.values()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn order_reversal(
            vals in proptest::collection::vec(-3.0f64..3.0, 30),
            bump in proptest::collection::vec(0.0f64..1.0, 30),
        ) {
            let g = Grid::line(-2.0, 2.0, 30).unwrap();
            let f = GridFunction::new(g.clone(), vals.clone()).unwrap();
            let big = GridFunction::new(g.clone(), vals.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
            let out = Grid::line(-4.0, 4.0, 41).unwrap();
            let lf = legendre_grid(&f, &out).unwrap();
            let lg = legendre_grid(&big, &out).unwrap();
            for (a, b) in lg.values().iter().zip(lf.values()) {
                prop_assert!(a <= b);
            }
        }
    }
}
