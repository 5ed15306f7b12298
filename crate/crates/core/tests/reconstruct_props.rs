mod common;

use circinv_core::reconstruct::{stability_sample, MIN_SEPARATION};
use circinv_core::{
    invariant_analytic, lift_normal, make_circle, reconstruct, stability_estimate, Curve, PeriodicFn,
    ReconstructionProblem, StabilityConfig, TraceEntry,
};
use proptest::prelude::*;

use common::{near_circle, rng};

fn non_increasing_after_first(trace: &[TraceEntry]) -> bool {
    trace.windows(2).skip(1).all(|w| w[1].residual <= w[0].residual)
}

fn round_trip(truth: &Curve, r: f64) -> (Curve, Vec<TraceEntry>) {
    let target = invariant_analytic(truth, r).unwrap();
    let out = reconstruct(&ReconstructionProblem::new(target).unwrap()).unwrap();
    (out.curve, out.trace)
}

#[test]
fn recovers_circle_from_larger_circle_start() {
    let truth = make_circle(1.0, 32, 512).unwrap();
    let target = invariant_analytic(&truth, 1.0).unwrap();
    let mut problem = ReconstructionProblem::new(target).unwrap();
    problem.init = make_circle(1.05, 32, 512).unwrap();
    let out = reconstruct(&problem).unwrap();
    assert!(out.curve.sup_distance(&truth) <= 1e-8);
    assert!(non_increasing_after_first(&out.trace));
}

#[test]
fn synthetic_round_trips_at_three_radii() {
    for (seed, r) in [(31, 0.8), (32, 1.0), (33, 1.2)] {
        let mut g = rng(seed);
        let truth = near_circle(&mut g, 0.02, 0, &[r]);
        let (curve, trace) = round_trip(&truth, r);
        let err = curve.sup_distance(&truth);
        assert!(err <= 1e-6, "r = {r}: {err:e}");
        assert!(curve.is_normalized(1e-8));
        assert!(trace.len() <= 50);
        assert!(non_increasing_after_first(&trace), "{trace:?}");
    }
}

#[test]
fn noisy_target_error_scales_with_noise() {
    let r = 1.0;
    let mut g = rng(41);
    let truth = near_circle(&mut g, 0.02, 0, &[r]);
    let mut target = invariant_analytic(&truth, r).unwrap();
    let noise = 1e-4 * r * r;
    // smooth, deterministic perturbation of the data
    let bump = PeriodicFn::from_fn(target.grid_size(), |x| noise * (3.0 * x + 0.4).sin());
    target.values = target.values.add(&bump).unwrap();
    let problem = ReconstructionProblem::new(target).unwrap();
    let curve = match reconstruct(&problem) {
        Ok(out) => out.curve,
        Err(f) => f.last.expect("iterate inside the admissible neighborhood"),
    };
    let c_hat = stability_estimate(&StabilityConfig {
        n_pairs: 8,
        ..StabilityConfig::default()
    })
    .unwrap()
    .c_hat;
    let err = curve.sup_distance(&truth);
    assert!(err <= 10.0 * noise / c_hat, "{err:e} vs {:e}", 10.0 * noise / c_hat);
}

#[test]
fn small_stability_run_is_positive_and_reproducible() {
    let cfg = StabilityConfig {
        n_pairs: 10,
        seed: 3,
        ..StabilityConfig::default()
    };
    let a = stability_estimate(&cfg).unwrap();
    let b = stability_estimate(&cfg).unwrap();
    assert!(a.c_hat > 0.0);
    assert_eq!(a.pairs, b.pairs);
    assert_eq!(a.pairs.len(), 10);
    assert!(a.pairs.iter().all(|s| s.delta_curve >= MIN_SEPARATION));
    let min = a.pairs.iter().map(|s| s.ratio()).fold(f64::INFINITY, f64::min);
    assert_eq!(min, a.c_hat);
}

#[test]
fn stability_rejects_zero_pairs() {
    let cfg = StabilityConfig {
        n_pairs: 0,
        ..StabilityConfig::default()
    };
    assert_eq!(stability_estimate(&cfg).unwrap_err().kind(), "parameter");
}

#[test]
fn small_mode_two_normal_bump_has_bounded_ratio() {
    // linear regime: ratio approaches ‖I'[σ]‖_1 / ‖σ‖_1 with I' = diag(d_j) on the circle
    let circle = make_circle(1.0, 32, 512).unwrap();
    let a = PeriodicFn::from_real_basis(&[-1e-4, 0.0, 0.0, 1e-4, 0.0], 512);
    let bumped = circle
        .perturbed(&lift_normal(&a, &circle).unwrap().to_vector_field(), 1.0)
        .unwrap();
    let s = stability_sample(&circle, &bumped, 1.0, 1).unwrap();
    assert!(s.delta_curve > 0.0);
    assert!(s.ratio() > 0.05, "{}", s.ratio());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn reconstructions_are_normalized_with_monotone_trace(seed in any::<u64>()) {
        let mut g = rng(seed);
        let truth = near_circle(&mut g, 0.02, 0, &[1.0]);
        let (curve, trace) = round_trip(&truth, 1.0);
        prop_assert!(curve.is_normalized(1e-8));
        prop_assert!(non_increasing_after_first(&trace));
        prop_assert!(curve.sup_distance(&truth) <= 1e-6);
    }
}
