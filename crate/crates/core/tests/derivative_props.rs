mod common;

use std::f64::consts::PI;

use circinv_core::derivative::{constraint_null_space, singular_values};
use circinv_core::{
    assemble_operator, circle_derivative, frechet_derivative, frechet_derivative_tangent, injectivity_margin,
    invariant_analytic, lift_normal, lift_normal_unchecked, make_circle, sine_inequality_check, spectrum_d, Basis,
    Curve, PeriodicFn, Spectrum, VectorField,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use common::{near_circle, random_field, rng};

/// Sup-norm relative error of the central difference at step `eps`.
fn fd_error(c: &Curve, r: f64, sigma: &VectorField, exact: &PeriodicFn, eps: f64) -> f64 {
    let plus = invariant_analytic(&c.perturbed(sigma, eps).unwrap(), r).unwrap();
    let minus = invariant_analytic(&c.perturbed(sigma, -eps).unwrap(), r).unwrap();
    let fd = plus.values.sub(&minus.values).unwrap().scale(0.5 / eps);
    fd.sub(exact).unwrap().sup_norm() / exact.sup_norm()
}

fn random_constrained_normal(g: &mut rand_chacha::ChaCha8Rng, modes: usize, m: usize) -> PeriodicFn {
    let z = constraint_null_space(modes);
    let y: Vec<f64> = (0..z.ncols()).map(|_| g.gen_range(-1.0..1.0)).collect();
    let x = &z * DVector::from_vec(y);
    PeriodicFn::from_real_basis(x.as_slice(), m)
}

#[test]
fn lifted_mode_two_at_unit_circle() {
    let c = make_circle(1.0, 32, 512).unwrap();
    let a = PeriodicFn::from_fn(512, |x| (2.0 * x).cos());
    let out = frechet_derivative_tangent(&c, 1.0, &lift_normal_unchecked(&a, &c)).unwrap();
    let d2 = -(3f64.sqrt()) / 2.0;
    for (i, v) in out.samples().iter().enumerate() {
        assert!((v - d2 * (2.0 * c.grid_angle(i)).cos()).abs() < 1e-12);
    }
}

#[test]
fn finite_differences_on_perturbed_circle() {
    let mut g = rng(21);
    let c = near_circle(&mut g, 0.05, 0, &[1.0]);
    let sigma = random_field(&mut g, 8);
    let exact = frechet_derivative(&c, 1.0, &sigma).unwrap();
    assert!(fd_error(&c, 1.0, &sigma, &exact, 1e-4) <= 1e-6);
}

#[test]
fn circle_operator_is_diagonal() {
    let c = make_circle(1.0, 16, 256).unwrap();
    let op = assemble_operator(&c, 1.0, Basis::Normal { modes: 16 }).unwrap();
    let diag = Spectrum::new(16, PI / 3.0).real_basis_diagonal();
    let expected = DMatrix::from_diagonal(&DVector::from_vec(diag));
    assert!((&op.entries - expected).amax() <= 1e-8);
    let mut off = op.entries.clone();
    off.fill_diagonal(0.0);
    assert!(off.amax() <= 1e-8);
}

#[test]
fn unconstrained_circle_operator_has_two_null_directions() {
    let c = make_circle(1.0, 16, 256).unwrap();
    let op = assemble_operator(&c, 1.0, Basis::Normal { modes: 16 }).unwrap();
    let sv = singular_values(&op.entries);
    assert!(sv[0] < 1e-8 && sv[1] < 1e-8 && sv[2] > 1e-2);
    assert!(injectivity_margin(&op, true).unwrap() > 0.01);
}

#[test]
fn operator_and_margin_move_continuously_off_the_circle() {
    let mut g = rng(13);
    let amp = 0.02;
    let circle = make_circle(1.0, 32, 512).unwrap();
    let c = near_circle(&mut g, amp, 2, &[1.0]);
    let basis = Basis::Normal { modes: 32 };
    let op0 = assemble_operator(&circle, 1.0, basis).unwrap();
    let op1 = assemble_operator(&c, 1.0, basis).unwrap();
    let gap = *singular_values(&(&op1.entries - &op0.entries)).last().unwrap();
    assert!(gap <= 10.0 * amp, "{gap}");
    let m0 = injectivity_margin(&op0, true).unwrap();
    let m1 = injectivity_margin(&op1, true).unwrap();
    assert!(m1 > 0.0 && (m1 - m0).abs() <= 0.5 * m0, "{m0} {m1}");
}

#[test]
fn sine_inequality_near_pi() {
    let delta = 1e-3;
    let th = PI - delta;
    // sin(2θ) − 2 sin θ = −sin 2δ − 2 sin δ = −4δ + O(δ³)
    let d2 = spectrum_d(2, th);
    assert!(d2 != 0.0 && (d2 + 4.0 * delta).abs() < 1e-8);
    let rep = sine_inequality_check(&[th], 2).unwrap();
    assert!(rep.all_nonzero && rep.min_abs_d > 0.0);
    assert!(sine_inequality_check(&[th], 1).is_err());
}

#[test]
fn derivative_outside_two_crossing_neighborhood_fails() {
    let c = make_circle(1.0, 8, 64).unwrap();
    assert!(frechet_derivative(&c, 1.9, &VectorField::zero()).is_ok());
    let err = frechet_derivative(&c, 2.1, &VectorField::zero()).unwrap_err();
    assert_eq!(err.kind(), "topology");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn central_differences_converge_quadratically(seed in any::<u64>()) {
        let mut g = rng(seed);
        let c = near_circle(&mut g, 0.05, 0, &[1.0]);
        let sigma = random_field(&mut g, 8);
        let exact = frechet_derivative(&c, 1.0, &sigma).unwrap();
        let e3 = fd_error(&c, 1.0, &sigma, &exact, 1e-3);
        let e4 = fd_error(&c, 1.0, &sigma, &exact, 1e-4);
        let slope = (e3 / e4).log10();
        prop_assert!((slope - 2.0).abs() <= 0.1, "slope {}", slope);
        prop_assert!(e4 <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn circle_formula_matches_general_formula(seed in any::<u64>(), r in 0.3f64..1.9) {
        let mut g = rng(seed);
        let c = make_circle(1.0, 16, 256).unwrap();
        let a = random_constrained_normal(&mut g, 12, 256);
        let field = lift_normal(&a, &c).unwrap();
        let general = frechet_derivative_tangent(&c, r, &field).unwrap();
        let theta = (1.0 - r * r / 2.0).acos();
        let special = circle_derivative(&a, theta);
        prop_assert!(general.sub(&special).unwrap().sup_norm() <= 1e-9);
    }

    #[test]
    fn tangential_directions_vanish_at_circle(seed in any::<u64>()) {
        let mut g = rng(seed);
        let c = make_circle(1.0, 16, 256).unwrap();
        let b = random_constrained_normal(&mut g, 10, 256);
        let (tx, ty) = c.tangent_coeffs();
        let sigma = VectorField {
            coeff_x: circinv_core::fourier::multiply(b.coeffs(), &tx),
            coeff_y: circinv_core::fourier::multiply(b.coeffs(), &ty),
        };
        prop_assert!(frechet_derivative(&c, 1.0, &sigma).unwrap().sup_norm() <= 1e-9);
    }

    #[test]
    fn spectrum_is_even_with_exact_translation_zeros(j in 2i64..200, theta in 0.01f64..3.13) {
        prop_assert_eq!(spectrum_d(j, theta), spectrum_d(-j, theta));
        prop_assert_eq!(spectrum_d(1, theta), 0.0);
        prop_assert_eq!(spectrum_d(-1, theta), 0.0);
    }

    #[test]
    fn derivative_is_linear(seed in any::<u64>(), s in -3.0f64..3.0) {
        let mut g = rng(seed);
        let c = near_circle(&mut g, 0.03, 0, &[1.0]);
        let u = random_field(&mut g, 6);
        let v = random_field(&mut g, 6);
        let sum = VectorField {
            coeff_x: u.coeff_x.iter().zip(&v.coeff_x).map(|(a, b)| a * s + b).collect(),
            coeff_y: u.coeff_y.iter().zip(&v.coeff_y).map(|(a, b)| a * s + b).collect(),
        };
        let lhs = frechet_derivative(&c, 1.0, &sum).unwrap();
        let rhs = frechet_derivative(&c, 1.0, &u).unwrap().scale(s).add(&frechet_derivative(&c, 1.0, &v).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().sup_norm() <= 1e-12 * (1.0 + lhs.sup_norm()));
    }
}
