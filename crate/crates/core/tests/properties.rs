//! Seeded property tests for the module invariants.

use std::f64::consts::PI;

use proptest::prelude::*;

use isorearr::extremizer::{search_from, SearchConfig};
use isorearr::flow::{product_functional, DualKind};
use isorearr::infconv::{enlarge, interior_levels, CostSpec, MonotoneMap, SetOnGrid};
use isorearr::rearrange::{
    decreasing_rearrangement, exp_integral, increasing_rearrangement, layer_cake_exp_integral,
    lipschitz_estimate, lipschitz_estimate_below, sublevel_mass, superlevel_mass,
};
use isorearr::special::{normal_cdf, normal_quantile};
use isorearr::transforms::{
    legendre_grid, polar_body, polar_complement_check, polar_identity_check, polar_transform,
    t_transform, SupportBody2D,
};
use isorearr::{
    make_radial, random_grid1d, random_grid_nd, random_profile, ConvexProfile, Execution, Grid,
    GridFunction, MeasureSpec, RandomConvexSpec,
};

const LEB1: MeasureSpec = MeasureSpec::Lebesgue { n: 1 };

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn line_instance(seed: u64, shift: f64, asym: f64) -> GridFunction {
    let spec = RandomConvexSpec::new(seed)
        .with_asymmetry(asym)
        .with_translation(vec![shift]);
    random_grid1d(&spec, &Grid::line(-5.0, 5.0, 201).unwrap()).unwrap()
}

/// Largest `|x|` over nodes where `inside` holds.
fn extent(f: &GridFunction, inside: impl Fn(f64) -> bool) -> f64 {
    let g = f.grid();
    (0..f.len())
        .filter(|&i| inside(f.values()[i]))
        .map(|i| g.point(i)[0].abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn generated_chord_slopes_are_nondecreasing(seed in any::<u64>(), knots in 1usize..8) {
        let p = random_profile(&RandomConvexSpec::new(seed).with_knots(knots)).unwrap();
        let c = p.chord_slopes();
        prop_assert!(c.iter().all(|&s| s >= 0.0));
        prop_assert!(c.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(p.terminal() >= *c.last().unwrap());
    }

    #[test]
    fn radial_samples_are_even(seed in any::<u64>(), dim in 1usize..3) {
        let p = random_profile(&RandomConvexSpec::new(seed)).unwrap();
        let g = Grid::centered_cube(dim, 2.0, 21).unwrap();
        let f = make_radial(&p, &g).unwrap();
        for i in 0..g.len() {
            let j = g.mirror_index(i).unwrap();
            prop_assert_eq!(f.values()[i], f.values()[j]);
        }
    }

    #[test]
    fn rearrangement_is_equimeasurable(seed in any::<u64>(), shift in -1.0..1.0f64, asym in 0.0..2.0f64) {
        let f = line_instance(seed, shift, asym);
        let fd = decreasing_rearrangement(&f, LEB1).unwrap();
        for &l in &interior_levels(&[&f], 64) {
            let a = superlevel_mass(&f, l, LEB1).unwrap();
            let b = superlevel_mass(&fd, l, LEB1).unwrap();
            prop_assert!((a.mass - b.mass).abs() <= a.error_bound + b.error_bound, "lambda {}", l);
        }
    }

    #[test]
    fn rearranged_level_sets_are_centred_balls(seed in any::<u64>(), shift in -1.0..1.0f64) {
        let f = line_instance(seed, shift, 1.0);
        let h = f.grid().max_spacing();
        let fd = decreasing_rearrangement(&f, LEB1).unwrap();
        let fi = increasing_rearrangement(&f, LEB1).unwrap();
        let mut last = 0.0;
        for &l in &interior_levels(&[&f], 32) {
            // {f > λ}* = {f* > λ}
            let m = superlevel_mass(&f, l, LEB1).unwrap().mass;
            let r = extent(&fd, |v| v > l);
            prop_assert!(m == 0.0 || (r - LEB1.rearranged_extent(f.grid(), m)).abs() <= h);
            // {f_* < λ} = {f < λ}*, nested in λ.
            let m = sublevel_mass(&f, l, LEB1).unwrap().mass;
            let r = extent(&fi, |v| v < l);
            prop_assert!((r - LEB1.rearranged_extent(f.grid(), m)).abs() <= h);
            prop_assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn rearrangement_does_not_raise_the_slope(seed in any::<u64>(), shift in -1.0..1.0f64, asym in 0.0..2.0f64) {
        let f = line_instance(seed, shift, asym);
        let inside = f.grid().boundary_nodes().iter().map(|&i| f.values()[i]).fold(f64::INFINITY, f64::min);
        let fi = increasing_rearrangement(&f, LEB1).unwrap();
        let slack = isorearr::verify::LIPSCHITZ_SLACK * f.grid().max_spacing();
        prop_assert!(lipschitz_estimate_below(&fi, inside) <= lipschitz_estimate(&f).unwrap() + slack);
    }

    #[test]
    fn layer_cake_matches_cell_sum(seed in any::<u64>(), shift in -1.0..1.0f64) {
        let f = line_instance(seed, shift, 0.5);
        let direct = exp_integral(&f, LEB1).unwrap();
        let layered = layer_cake_exp_integral(&f, LEB1, 256).unwrap();
        prop_assert!((direct - layered).abs() <= 0.01 * direct);
    }

    #[test]
    fn gaussian_enlargements_beat_half_lines(
        cuts in proptest::collection::vec(-3.0..3.0f64, 2..7),
        eps in 0.05..1.0f64,
    ) {
        let g = Grid::line(-6.0, 6.0, 1201).unwrap();
        let mut cuts = cuts;
        cuts.sort_by(f64::total_cmp);
        let inside = |x: f64| cuts.chunks(2).any(|c| c.len() == 2 && x >= c[0] && x <= c[1]);
        let a = SetOnGrid::from_predicate(&g, |i| inside(g.point(i)[0]));
        prop_assume!(!a.is_empty());
        let masses = MeasureSpec::Gaussian1D.cell_masses(&g).unwrap();
        let gamma = |s: &SetOnGrid| (0..g.len()).filter(|&i| s.contains(i)).map(|i| masses[i]).sum::<f64>();
        let grown = enlarge(&a, &CostSpec::distance(), eps).unwrap();
        // One cell of mass lost on each side of each interval.
        let tol = 2.0 * cuts.len() as f64 * g.max_spacing() * 0.4;
        prop_assert!(gamma(&grown) >= normal_cdf(normal_quantile(gamma(&a)) + eps) - tol);
    }

    #[test]
    fn t_transform_is_nonnegative(seed in any::<u64>()) {
        let g = Grid::centered_cube(2, 2.0, 17).unwrap();
        let f = random_grid_nd(&RandomConvexSpec::new(seed).with_curvature(0.3), &g).unwrap();
        for rho in [MonotoneMap::Identity, MonotoneMap::Cube, MonotoneMap::Linear { slope: 2.0 }] {
            let t = t_transform(&f, &rho, &g).unwrap();
            prop_assert!(t.values().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn biconjugate_recovers_convex_samples(seed in any::<u64>(), shift in -0.5..0.5f64) {
        let g = Grid::line(-3.0, 3.0, 121).unwrap();
        let spec = RandomConvexSpec::new(seed).with_asymmetry(1.0).with_translation(vec![shift]);
        let f = random_grid1d(&spec, &g).unwrap();
        let lip = lipschitz_estimate(&f).unwrap();
        let slopes = Grid::line(-lip - 0.1, lip + 0.1, 4001).unwrap();
        let ll = legendre_grid(&legendre_grid(&f, &slopes).unwrap(), &g).unwrap();
        // A slope off the grid by δ misses along a whole linear piece.
        let tol = slopes.max_spacing() * 6.0;
        for i in 0..g.len() {
            prop_assert!(ll.values()[i] <= f.values()[i] + 1e-9);
            prop_assert!(f.values()[i] - ll.values()[i] <= tol, "node {}: {}", i, f.values()[i] - ll.values()[i]);
        }
    }

    #[test]
    fn polar_level_sets_match_scaled_legendre(seed in any::<u64>()) {
        let g = Grid::centered_cube(2, 3.0, 25).unwrap();
        let f = random_grid_nd(&RandomConvexSpec::new(seed).with_curvature(0.5), &g).unwrap();
        let out = Grid::centered_cube(2, 1.5, 25).unwrap();
        let p = polar_transform(&f, &out).unwrap();
        let rows = polar_identity_check(Execution::Sequential, &f, &p.function, &[0.5, 1.0, 2.0]).unwrap();
        prop_assert!(rows.iter().all(|r| r.pass()));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn polar_body_is_inverse_homogeneous(seed in any::<u64>(), lambda in 0.2..5.0f64) {
        let k = SupportBody2D::random(seed, 64, 0.3).unwrap();
        let a = polar_body(&k.scaled(lambda).unwrap()).unwrap();
        let b = polar_body(&k).unwrap().scaled(1.0 / lambda).unwrap();
        for (x, y) in a.support().iter().zip(b.support()) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn polar_complement_within_one_layer(seed in any::<u64>(), eps in 0.1..2.0f64) {
        let k = SupportBody2D::random(seed, 64, 0.3).unwrap();
        let g = Grid::centered_cube(2, 4.0, 41).unwrap();
        for rho in [MonotoneMap::Identity, MonotoneMap::Cube] {
            prop_assert!(polar_complement_check(&k, &rho, eps, &g).unwrap().pass());
        }
    }

    #[test]
    fn extremizer_iterates_stay_admissible(incs in proptest::collection::vec(0.0..3.0f64, 8)) {
        let radii: Vec<f64> = (0..8).map(|k| 0.5 * k as f64).collect();
        let p = ConvexProfile::from_increments(radii, &incs).unwrap();
        let c = p.chord_slopes();
        prop_assert!(c.windows(2).all(|w| w[1] >= w[0]) && c[0] >= 0.0);
    }
}

#[test]
fn legendre_product_is_bounded_on_seeded_profiles() {
    for seed in 0..500u64 {
        let p = random_profile(&RandomConvexSpec::new(seed)).unwrap();
        for n in 1..=2 {
            let v = product_functional(&p, n, DualKind::Legendre).unwrap();
            assert!(
                v <= (2.0 * PI).powi(n as i32) + 1e-5,
                "seed {seed}, n = {n}: {v}"
            );
        }
    }
}

#[test]
fn search_is_monotone_and_locally_stationary() {
    let cfg = SearchConfig {
        n: 1,
        knots: 8,
        budget: 3000,
        seed: 4,
        ..SearchConfig::default()
    };
    let first = isorearr::extremizer::search_extremizer(&cfg).unwrap();
    assert!(first.history.windows(2).all(|w| w[1] >= w[0]));
    assert!(first.value <= 2.0 * PI + 1e-4);
    let again = search_from(&cfg, first.increments.clone()).unwrap();
    assert!(again.history.windows(2).all(|w| w[1] >= w[0]));
    let gain = again.value - first.value;
    assert!(gain < 1e-3, "restart gained {gain}");
}
