use std::f64::consts::PI;

use proptest::prelude::*;
use sgbounds::manifold::SpaceSpec;
use sgbounds::quadrature::{integrate, Tolerance};
use sgbounds::volumes::{
    ball_volume_curved, exact_grassmann_ball, exact_grassmann_ball_with_samples, log_ball_volume, log_sphere_volume,
    log_vol, log_vol_grassmann, log_vol_stiefel, BallMethod, BallModel,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn sphere_ratio_oracles() {
    // V_{1,n} is S^{2n-1}; G_{1,n} is S^{2n-1}/S^1.
    for n in 1..=12 {
        let sphere = log_sphere_volume(2 * n);
        assert!((log_vol_stiefel(1, n).unwrap() - sphere).abs() <= 1e-12);
        if n >= 2 {
            let expected = sphere - log_sphere_volume(2);
            assert!((log_vol_grassmann(1, n).unwrap() - expected).abs() <= 1e-12);
        }
    }
    assert!(rel(log_vol_stiefel(2, 2).unwrap().exp(), 4.0 * PI.powi(3)) <= 1e-12);
    assert!(rel(log_vol_grassmann(1, 3).unwrap().exp(), PI * PI / 2.0) <= 1e-12);
}

#[test]
fn unitary_recursion() {
    for n in 1..=20 {
        let sum: f64 = (1..=n).map(|i| log_sphere_volume(2 * i)).sum();
        assert!((log_vol_stiefel(n, n).unwrap() - sum).abs() <= 1e-10 * sum.abs().max(1.0));
    }
}

#[test]
fn sphere_ball_small_cases() {
    assert!((log_sphere_volume(1) - 2f64.ln()).abs() <= 1e-15);
    assert!((log_ball_volume(1) - 2f64.ln()).abs() <= 1e-15);
    assert!((log_ball_volume(2) - PI.ln()).abs() <= 1e-15);
}

#[test]
fn curved_ball_matches_independent_quadrature() {
    let model = BallModel::new(1.0, 2).unwrap();
    for r in [0.1, 0.8, 2.0, 3.0] {
        let direct = integrate(|t| 2.0 * PI * t.sin(), &[0.0, r], Tolerance::relative(1e-13)).unwrap();
        assert!(rel(ball_volume_curved(model, r).unwrap().exp(), direct.value) <= 1e-10);
        assert!(rel(ball_volume_curved(model, r).unwrap().exp(), 2.0 * PI * (1.0 - r.cos())) <= 1e-10);
    }
    let four = BallModel::new(4.0, 2).unwrap();
    assert!(rel(ball_volume_curved(four, PI / 6.0).unwrap().exp(), PI / 4.0) <= 1e-12);
}

#[test]
fn envelope_brackets_exact_volume() {
    for (k, n) in [(1, 2), (1, 3), (2, 4)] {
        let d = SpaceSpec::grassmann(k, n).unwrap().real_dimension();
        for r in [0.1, 0.4, 0.7, 1.0] {
            let exact = exact_grassmann_ball(k, n, r, BallMethod::Deterministic, 0).unwrap();
            let lower = ball_volume_curved(BallModel::new(4.0, d).unwrap(), r).unwrap();
            let upper = ball_volume_curved(BallModel::flat(d), r).unwrap();
            let slack = 1e-8;
            assert!(lower <= exact.log_volume + slack, "({k},{n}) r={r}: {lower} > {}", exact.log_volume);
            assert!(exact.log_volume <= upper + slack, "({k},{n}) r={r}: {} > {upper}", exact.log_volume);
        }
    }
}

#[test]
fn full_radius_recovers_total() {
    for (k, n) in [(1, 3), (2, 4)] {
        let r = (k as f64).sqrt() * PI / 2.0;
        let full = exact_grassmann_ball(k, n, r, BallMethod::Deterministic, 0).unwrap();
        let total = log_vol(SpaceSpec::grassmann(k, n).unwrap());
        assert!(rel(full.log_volume.exp(), total.exp()) <= 1e-6);
    }
    // G_{1,2} is the sphere of radius 1/2.
    let full = exact_grassmann_ball(1, 2, PI / 2.0, BallMethod::Deterministic, 0).unwrap();
    assert!(rel(full.log_volume.exp(), PI) <= 1e-8);
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let det = exact_grassmann_ball(2, 4, 0.5, BallMethod::Deterministic, 0).unwrap();
    let mc = exact_grassmann_ball_with_samples(2, 4, 0.5, BallMethod::MonteCarlo, 42, 10_000_000).unwrap();
    let value = det.log_volume.exp();
    let estimate = mc.log_volume.exp();
    let se = mc.rel_error * estimate;
    assert!((estimate - value).abs() <= 3.0 * se, "mc {estimate} ± {se}, quadrature {value}");
    assert!(mc.significant_digits <= 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_shrinks_balls(d in 1usize..40, k1 in 0.0f64..4.0, dk in 0.0f64..4.0, t in 0.01f64..0.99) {
        let m1 = BallModel::new(k1, d).unwrap();
        let m2 = BallModel::new(k1 + dk, d).unwrap();
        let r = t * m2.max_radius().min(10.0);
        prop_assert!(ball_volume_curved(m2, r).unwrap() <= ball_volume_curved(m1, r).unwrap() + 1e-10);
    }

    #[test]
    fn balls_grow_with_radius(d in 1usize..40, kappa in 0.0f64..4.0, t1 in 0.01f64..0.98, dt in 0.005f64..0.02) {
        let m = BallModel::new(kappa, d).unwrap();
        let rmax = m.max_radius().min(10.0);
        let (a, b) = (t1 * rmax, (t1 + dt) * rmax);
        let (va, vb) = (ball_volume_curved(m, a).unwrap(), ball_volume_curved(m, b).unwrap());
        prop_assert!(va <= vb);
        // Near the antipode the remaining volume is below one ulp of the total.
        if t1 + dt <= 0.8 {
            prop_assert!(va < vb);
        }
    }

    #[test]
    fn exact_rank_one_grows_with_radius(n in 2usize..8, r1 in 0.05f64..1.4) {
        let a = exact_grassmann_ball(1, n, r1, BallMethod::Deterministic, 0).unwrap();
        let b = exact_grassmann_ball(1, n, r1 + 0.05, BallMethod::Deterministic, 0).unwrap();
        prop_assert!(a.log_volume < b.log_volume);
    }

    #[test]
    fn volumes_are_finite(k in 1usize..64, extra in 0usize..4000) {
        let n = 2 * k + extra;
        prop_assert!(log_vol_stiefel(k, n).unwrap().is_finite());
        prop_assert!(log_vol_grassmann(k, n).unwrap().is_finite());
    }
}
