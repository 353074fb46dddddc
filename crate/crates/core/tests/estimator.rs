use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supnorm_adapt::estimator::{cdf_estimate, project_measure, project_spline, sup_distance_to_ecdf, Sample};
use supnorm_adapt::{DyadicPiecewisePoly, ProjectionKernel, SplineOrder};

fn random_sample(seed: u64, n: usize, lo: f64, hi: f64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sample::new((0..n).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

#[test]
fn haar_density_is_histogram() {
    let s = random_sample(1, 500, -1.3, 2.2);
    let j = 3;
    let d = project_measure(&s, &s.uniform_weights(), j, &ProjectionKernel::haar()).unwrap();
    for k in -12..20i64 {
        let (a, b) = (k as f64 / 8.0, (k + 1) as f64 / 8.0);
        let count = s.xs().iter().filter(|&&x| x >= a && x < b).count();
        let want = 8.0 * count as f64 / 500.0;
        assert!((d.density.eval((a + b) / 2.0) - want).abs() < 1e-12);
    }
}

#[test]
fn empirical_projection_has_unit_mass() {
    for r in 1..=4 {
        let kern = ProjectionKernel::new(SplineOrder::new(r).unwrap()).unwrap();
        let s = random_sample(2 + r as u64, 300, 0.0, 1.0);
        for j in [0, 2, 5] {
            let d = project_measure(&s, &s.uniform_weights(), j, &kern).unwrap();
            let c = cdf_estimate(&d);
            assert!(
                (c.total_mass - 1.0).abs() < 10.0 * kern.tail_tol(),
                "r={r} j={j}: {}",
                c.total_mass
            );
            assert!((d.density.integral() - 1.0).abs() < 10.0 * kern.tail_tol());
        }
    }
}

#[test]
fn haar_cdf_at_knots_counts_points_below() {
    let s = random_sample(9, 200, 0.0, 1.0);
    let d = project_measure(&s, &s.uniform_weights(), 4, &ProjectionKernel::haar()).unwrap();
    let c = cdf_estimate(&d);
    for k in 0..=16 {
        let t = k as f64 / 16.0;
        let want = s.count_lt(t) as f64 / 200.0;
        assert!((c.eval(t) - want).abs() < 1e-13);
    }
}

fn grid_distance(c: &supnorm_adapt::CdfEstimate, s: &Sample, points: usize) -> f64 {
    let (lo, hi) = c.cdf.support();
    let (lo, hi) = (lo - 0.1, hi + 0.1);
    let mut best = 0.0f64;
    for i in 0..=points {
        let t = lo + (hi - lo) * i as f64 / points as f64;
        best = best.max((c.eval(t) - s.ecdf(t)).abs());
    }
    for &x in s.xs() {
        let below = s.count_lt(x) as f64 / s.len() as f64;
        best = best.max((c.eval(x) - below).abs()).max((c.eval(x) - s.ecdf(x)).abs());
    }
    best
}

#[test]
fn ecdf_distance_matches_dense_grid() {
    for (seed, r, j) in [(11u64, 1u32, 3u32), (12, 2, 2), (13, 3, 3), (14, 4, 1)] {
        let kern = ProjectionKernel::new(SplineOrder::new(r).unwrap()).unwrap();
        let s = random_sample(seed, 40, 0.0, 1.0);
        let c = cdf_estimate(&project_measure(&s, &s.uniform_weights(), j, &kern).unwrap());
        let exact = sup_distance_to_ecdf(&c, &s);
        let grid = grid_distance(&c, &s, 1_000_000);
        assert!(exact >= grid - 1e-12, "exact {exact} below grid {grid}");
        assert!(exact - grid < 1e-9, "r={r}: exact {exact} vs grid {grid}");
        assert!(exact > 0.0);
    }
}

#[test]
fn haar_nesting() {
    let s = random_sample(21, 400, -0.5, 1.5);
    let kern = ProjectionKernel::haar();
    let fine = project_measure(&s, &s.uniform_weights(), 6, &kern).unwrap();
    for jc in [0, 2, 5] {
        let direct = project_measure(&s, &s.uniform_weights(), jc, &kern).unwrap();
        let again = project_spline(&fine.density, jc, &kern).unwrap();
        assert!(again.difference(&direct.density).sup_norm().value < 1e-8);
    }
}

#[test]
fn spline_projection_is_idempotent() {
    for r in 2..=4 {
        let kern = ProjectionKernel::with_tail_tol(SplineOrder::new(r).unwrap(), 1e-13).unwrap();
        let s = random_sample(30 + r as u64, 100, 0.0, 1.0);
        let d = project_measure(&s, &s.uniform_weights(), 3, &kern).unwrap();
        let again = project_spline(&d.density, 3, &kern).unwrap();
        let err = again.difference(&d.density).sup_norm().value;
        assert!(err < 1e-8 * d.density.sup_norm().value, "r={r}: {err}");
    }
}

fn random_spline(rng: &mut ChaCha8Rng, level: u32, cells: usize) -> DyadicPiecewisePoly {
    let cells = (0..cells)
        .map(|_| {
            [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ]
        })
        .collect();
    DyadicPiecewisePoly::new(level, -3, cells).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_linear_in_weights(seed in 0u64..1000, r in 1u32..=4, j in 0u32..5) {
        let kern = ProjectionKernel::new(SplineOrder::new(r).unwrap()).unwrap();
        let s = random_sample(seed, 30, -1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        let w: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sum: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a + b).collect();
        let pw = project_measure(&s, &w, j, &kern).unwrap().density;
        let pv = project_measure(&s, &v, j, &kern).unwrap().density;
        let ps = project_measure(&s, &sum, j, &kern).unwrap().density;
        let combined = DyadicPiecewisePoly::combine(&[(1.0, &pw), (1.0, &pv)]);
        prop_assert!(combined.difference(&ps).sup_norm().value < 1e-12 * (1.0 + ps.sup_norm().value));
    }

    #[test]
    fn projection_bounded_by_operator_norm(seed in 0u64..1000, r in 1u32..=4, j in 0u32..3, extra in 1u32..3) {
        let kern = ProjectionKernel::new(SplineOrder::new(r).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_spline(&mut rng, j + extra, 12);
        let p = project_spline(&f, j, &kern).unwrap();
        prop_assert!(p.sup_norm().value <= kern.op_norm_bound() * f.sup_norm().value + 1e-9);
    }
}
