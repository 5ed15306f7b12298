//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.

use std::f64::consts::PI;
use std::time::Instant;

use circinv_core::derivative::singular_values;
use circinv_core::io;
use circinv_core::reconstruct::{random_admissible_curve, PerturbationSpec};
use circinv_core::VectorField;
use circinv_core::{
    assemble_operator, frechet_derivative, injectivity_margin, invariance_suite, invariant_analytic,
    invariant_oracle_profile, make_circle, reconstruct, sine_inequality_check, spectrum_d, stability_estimate, Basis,
    ReconstructionProblem, Spectrum, StabilityConfig, Transforms, Vec2,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Smooth random vector field with modes up to `band`, coefficients decaying like 1/j².
fn random_field(rng: &mut ChaCha8Rng, band: usize) -> VectorField {
    let mut draw = || {
        let mut c = vec![Complex64::new(0.0, 0.0); 2 * band + 1];
        c[band] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in 1..=band {
            let w = 1.0 / (j * j) as f64;
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
            c[band + j] = z;
            c[band - j] = z.conj();
        }
        c
    };
    let coeff_x = draw();
    let coeff_y = draw();
    VectorField { coeff_x, coeff_y }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn perturbation(amplitude: f64) -> PerturbationSpec {
    PerturbationSpec::new(amplitude, 8)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let radii = [0.5, 1.0, 1.5];
    let mut g = rng(101);
    let mut worst = 0.0_f64;
    let mut ok = true;
    for _ in 0..50 {
        let c = random_admissible_curve(&mut g, &perturbation(0.05), &radii).expect("admissible curve");
        for r in radii {
            let a = invariant_analytic(&c, r).expect("analytic profile");
            let o = invariant_oracle_profile(&c, r).expect("oracle profile");
            let rel = max_abs_diff(a.values.samples(), &o) / (r * r);
            worst = worst.max(rel);
            ok &= rel <= 1e-6;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        ok && secs <= 60.0,
        format!("worst |analytic − oracle|/r² = {worst:.2e} (≤ 1e-6), {secs:.1} s (≤ 60 s)"),
    )
}

fn circle_closed_form() -> Outcome {
    let lens = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
    let c = make_circle(1.0, 32, 512).expect("circle");
    let prof = invariant_analytic(&c, 1.0).expect("profile");
    let v = prof.values.samples();
    let dev = v.iter().fold(0.0_f64, |m, x| m.max((x - lens).abs()));
    let spread = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
    let oracle = invariant_oracle_profile(&c, 1.0).expect("oracle");
    let oracle_dev = oracle.iter().fold(0.0_f64, |m, x| m.max((x - lens).abs()));
    outcome(
        dev <= 1e-8 && spread <= 1e-8 && oracle_dev <= 1e-6,
        format!("|I − lens| = {dev:.2e}, spread {spread:.2e} (≤ 1e-8); polygon cross-check {oracle_dev:.2e}"),
    )
}

fn derivative_check() -> Outcome {
    let mut g = rng(303);
    let steps = [1e-2, 1e-3, 1e-4];
    let (mut worst_slope, mut worst_err) = (2.0_f64, 0.0_f64);
    let mut ok = true;
    for _ in 0..20 {
        let c = random_admissible_curve(&mut g, &perturbation(0.05), &[1.0]).expect("admissible curve");
        let sigma = random_field(&mut g, 8);
        let exact = frechet_derivative(&c, 1.0, &sigma).expect("derivative");
        let errs: Vec<f64> = steps
            .iter()
            .map(|&eps| {
                let plus = invariant_analytic(&c.perturbed(&sigma, eps).unwrap(), 1.0).unwrap();
                let minus = invariant_analytic(&c.perturbed(&sigma, -eps).unwrap(), 1.0).unwrap();
                let fd = plus.values.sub(&minus.values).unwrap().scale(0.5 / eps);
                fd.sub(&exact).unwrap().sup_norm() / exact.sup_norm()
            })
            .collect();
        // least-squares slope of log err against log ε
        let xs: Vec<f64> = steps.iter().map(|e| e.log10()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.log10()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = num / den;
        if (slope - 2.0).abs() > (worst_slope - 2.0).abs() {
            worst_slope = slope;
        }
        worst_err = worst_err.max(errs[2]);
        ok &= (slope - 2.0).abs() <= 0.1 && errs[2] <= 1e-6;
    }
    outcome(
        ok,
        format!("worst slope {worst_slope:.3} (2 ± 0.1), worst relative error at ε=1e-4 {worst_err:.2e} (≤ 1e-6)"),
    )
}

fn spectral_reproduction() -> Outcome {
    let n = 32;
    let theta = PI / 3.0;
    let c = make_circle(1.0, n, 512).expect("circle");
    let op = assemble_operator(&c, 1.0, Basis::Normal { modes: n }).expect("operator");
    // d_0 exactly as stated; the other entries from the closed form
    let mut diag = Spectrum::new(n, theta).real_basis_diagonal();
    diag[0] = 2.0 * (1.0 - theta.sin());
    let mut worst = 0.0_f64;
    let mut worst_nonzero_mode = 0.0_f64;
    for (i, &d) in diag.iter().enumerate() {
        for k in 0..op.entries.ncols() {
            let want = if i == k { d } else { 0.0 };
            let e = (op.entries[(i, k)] - want).abs();
            worst = worst.max(e);
            if i != 0 || k != 0 {
                worst_nonzero_mode = worst_nonzero_mode.max(e);
            }
        }
    }
    let tangential = assemble_operator(&c, 1.0, Basis::Tangential { modes: n }).expect("operator");
    let tang = tangential.entries.amax();
    let d0 = op.entries[(0, 0)];
    outcome(
        worst <= 1e-8 && tang <= 1e-9,
        format!(
            "max entry deviation {worst:.2e} (≤ 1e-8); without (0,0) {worst_nonzero_mode:.2e}; \
             operator (0,0) = {d0:.10} vs stated 2(1−sin θ) = {:.10}, 2θ − 2 sin θ = {:.10}; \
             tangential {tang:.2e} (≤ 1e-9)",
            2.0 * (1.0 - theta.sin()),
            spectrum_d(0, theta),
        ),
    )
}

fn kernel_injectivity() -> Outcome {
    let c = make_circle(1.0, 32, 512).expect("circle");
    let op = assemble_operator(&c, 1.0, Basis::Normal { modes: 32 }).expect("operator");
    let sv = singular_values(&op.entries);
    let small = sv.iter().filter(|&&s| s < 1e-8).count();
    let margin = injectivity_margin(&op, true).expect("margin");
    let thetas: Vec<f64> = (0..100).map(|i| 0.05 + (PI - 0.1) * (i as f64 + 0.5) / 100.0).collect();
    let sine = sine_inequality_check(&thetas, 64).expect("sine check");
    outcome(
        small == 2 && margin >= 0.01 && sine.all_nonzero,
        format!(
            "{small} singular values < 1e-8 (want 2); constrained margin {margin:.4} (≥ 0.01); \
             min |d_j| over grid {:.2e} at j={}, θ={:.3}",
            sine.min_abs_d, sine.j_at_min, sine.theta_at_min
        ),
    )
}

fn stability() -> Outcome {
    let start = Instant::now();
    let run = |grid_size| {
        stability_estimate(&StabilityConfig {
            grid_size,
            ..StabilityConfig::default()
        })
        .expect("stability estimate")
        .c_hat
    };
    let coarse = run(256);
    let fine = run(512);
    let secs = start.elapsed().as_secs_f64();
    let rel = (coarse - fine).abs() / coarse.max(fine);
    outcome(
        coarse > 0.0 && fine > 0.0 && rel <= 0.5 && secs <= 120.0,
        format!("ĉ = {coarse:.5} (M=256), {fine:.5} (M=512), relative gap {rel:.3} (≤ 0.5), {secs:.1} s (≤ 120 s)"),
    )
}

fn round_trip() -> Outcome {
    let mut g = rng(707);
    let (mut worst, mut most_iters) = (0.0_f64, 0usize);
    let mut ok = true;
    for _ in 0..20 {
        let truth = random_admissible_curve(&mut g, &perturbation(0.02), &[1.0]).expect("admissible curve");
        let target = invariant_analytic(&truth, 1.0).expect("target");
        match reconstruct(&ReconstructionProblem::new(target).expect("problem")) {
            Ok(out) => {
                let err = out.curve.sup_distance(&truth);
                let monotone = out.trace.windows(2).skip(1).all(|w| w[1].residual <= w[0].residual);
                worst = worst.max(err);
                most_iters = most_iters.max(out.trace.len());
                ok &= err <= 1e-6 && out.trace.len() <= 50 && monotone;
            }
            Err(f) => {
                ok = false;
                worst = f64::INFINITY;
                eprintln!("reconstruction failed: {}", f.error);
            }
        }
    }
    outcome(
        ok,
        format!("worst ‖Δγ‖_∞ {worst:.2e} (≤ 1e-6), at most {most_iters} iterations (≤ 50)"),
    )
}

fn invariance() -> Outcome {
    let mut g = rng(808);
    let r = 1.0;
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let t = Transforms {
            angle: g.gen_range(-PI..PI),
            translation: Vec2::new(g.gen_range(-5.0..5.0), g.gen_range(-5.0..5.0)),
            shift: g.gen_range(1..512),
            scale: g.gen_range(0.5..3.0),
        };
        let c = random_admissible_curve(&mut g, &perturbation(0.05), &[r, r / t.scale]).expect("admissible curve");
        worst = worst.max(invariance_suite(&c, r, &t).expect("suite").max());
    }
    outcome(worst <= 1e-9, format!("worst deviation {worst:.2e} (≤ 1e-9)"))
}

fn artifacts() -> Vec<String> {
    let mut g = rng(909);
    let c = random_admissible_curve(&mut g, &perturbation(0.02), &[1.0]).expect("admissible curve");
    let prof = invariant_analytic(&c, 1.0).expect("profile");
    let op = assemble_operator(&make_circle(1.0, 8, 64).unwrap(), 1.0, Basis::Normal { modes: 8 }).unwrap();
    let stab = stability_estimate(&StabilityConfig {
        n_pairs: 6,
        seed: 5,
        ..StabilityConfig::default()
    })
    .expect("stability");
    let rec = reconstruct(&ReconstructionProblem::new(prof.clone()).unwrap()).expect("reconstruction");
    vec![
        io::profile_csv(&prof),
        io::profile_json(&prof),
        io::spectrum_csv(&Spectrum::new(32, PI / 3.0)),
        io::operator_csv(&op),
        io::operator_header_json(&op),
        io::stability_csv(&stab),
        io::stability_json(&stab),
        io::trace_json(&rec.trace),
        rec.curve.to_json(),
    ]
}

fn determinism() -> Outcome {
    let pool = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
    };
    let first = artifacts();
    let again = artifacts();
    let single = pool(1).install(artifacts);
    let four = pool(4).install(artifacts);
    let same = first == again && first == single && first == four;
    let bytes: usize = first.iter().map(String::len).sum();
    outcome(
        same,
        format!(
            "{} artifacts ({bytes} bytes) identical across repeats and 1/4-thread pools",
            first.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("circle closed form", circle_closed_form),
        ("derivative check", derivative_check),
        ("spectral reproduction", spectral_reproduction),
        ("kernel and injectivity", kernel_injectivity),
        ("stability estimate", stability),
        ("reconstruction round-trip", round_trip),
        ("invariance suite", invariance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!(
            "[{tag}] {} {name}: {} [{:.1} s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
