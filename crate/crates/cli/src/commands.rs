//! One function per subcommand. Each returns the artifacts to write and a
//! one-line summary; checks that miss their tolerance come back as a failure
//! alongside the artifacts.

use std::f64::consts::PI;
use std::fmt::Write as _;

use circinv_core::derivative::singular_values;
use circinv_core::fourier::grid_angle;
use circinv_core::io;
use circinv_core::reconstruct::{random_admissible_curve, PerturbationSpec};
use circinv_core::{
    assemble_operator, frechet_derivative, injectivity_margin, invariance_suite, invariant_analytic,
    invariant_oracle_profile, make_circle, reconstruct, sine_inequality_check, stability_estimate, theta_circle, Basis,
    Curve, Error, ReconstructionProblem, Result, Spectrum, StabilityConfig, Transforms, Vec2, VectorField,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::settings::{Command, Settings};

/// Agreement required of oracle-compare, relative to r².
pub const ORACLE_TOL: f64 = 1e-6;
/// Agreement required of every invariance check.
pub const INVARIANCE_TOL: f64 = 1e-9;
/// Relative finite-difference error required at the smallest step.
pub const FD_TOL: f64 = 1e-6;
/// Singular values below this count as kernel.
pub const KERNEL_TOL: f64 = 1e-8;
const FD_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const MAX_RANDOM_MODE: usize = 8;

pub struct Report {
    pub summary: String,
    pub details: Value,
    pub artifacts: Vec<(&'static str, String)>,
    pub failure: Option<Error>,
}

impl Report {
    fn ok(summary: String, details: Value, artifacts: Vec<(&'static str, String)>) -> Self {
        Self {
            summary,
            details,
            artifacts,
            failure: None,
        }
    }

    /// Turn the report into a failure unless `pass`.
    fn check(mut self, pass: bool, op: &'static str, msg: impl FnOnce() -> String) -> Self {
        if !pass {
            self.failure = Some(Error::Consistency { op, msg: msg() });
        }
        self
    }
}

pub fn run(command: Command, s: &Settings) -> Result<Report> {
    match command {
        Command::Invariant => invariant(s),
        Command::OracleCompare => oracle_compare(s),
        Command::DerivativeCheck => derivative_check(s),
        Command::Spectrum => spectrum(s),
        Command::Injectivity => injectivity(s),
        Command::Reconstruct => run_reconstruct(s),
        Command::Stability => stability(s),
        Command::InvarianceSuite => invariance(s, &mut rng(s)),
    }
}

fn rng(s: &Settings) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(s.seed)
}

/// The --curve file, normalized; otherwise a random admissible curve for `radii`.
fn input_curve(s: &Settings, g: &mut ChaCha8Rng, radii: &[f64]) -> Result<Curve> {
    if let Some(path) = &s.curve {
        return Curve::load(path)?.normalize();
    }
    if s.amplitude == 0.0 {
        return make_circle(1.0, s.modes, s.grid);
    }
    let spec = PerturbationSpec {
        amplitude: s.amplitude,
        min_mode: 0,
        max_mode: MAX_RANDOM_MODE.min(s.modes),
        n_modes: s.modes,
        grid_size: s.grid,
    };
    random_admissible_curve(g, &spec, radii)
}

fn invariant(s: &Settings) -> Result<Report> {
    let curve = input_curve(s, &mut rng(s), &[s.r])?;
    let prof = invariant_analytic(&curve, s.r)?;
    let v = prof.values.samples();
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = prof.values.mean();
    Ok(Report::ok(
        format!(
            "invariant r={} M={}: min {lo:.12} max {hi:.12} mean {mean:.12}",
            s.r,
            v.len()
        ),
        json!({ "min": lo, "max": hi, "mean": mean }),
        vec![
            ("profile.csv", io::profile_csv(&prof)),
            ("profile.json", io::profile_json(&prof)),
            ("curve.json", curve.to_json()),
        ],
    ))
}

fn oracle_compare(s: &Settings) -> Result<Report> {
    let curve = input_curve(s, &mut rng(s), &[s.r])?;
    let prof = invariant_analytic(&curve, s.r)?;
    let oracle = invariant_oracle_profile(&curve, s.r)?;
    let mut csv = String::from("phi,analytic,oracle,diff\n");
    let mut worst = 0.0_f64;
    for (i, (a, o)) in prof.values.samples().iter().zip(&oracle).enumerate() {
        worst = worst.max((a - o).abs());
        writeln!(csv, "{},{a},{o},{}", grid_angle(i, oracle.len()), a - o).unwrap();
    }
    let tol = ORACLE_TOL * s.r * s.r;
    let pass = worst <= tol;
    let rel = if pass { "≤" } else { ">" };
    Ok(Report::ok(
        format!("max_abs_diff {worst:.3e} {rel} {tol:.1e} (1e-6·r², r={})", s.r),
        json!({ "max_abs_diff": worst, "tolerance": tol }),
        vec![("oracle.csv", csv)],
    )
    .check(pass, "cli::oracle_compare", || {
        format!("max_abs_diff {worst:e} exceeds {tol:e}")
    }))
}

/// Smooth random field with modes up to `band`, weights 1/max(1, j)².
fn random_field(g: &mut ChaCha8Rng, band: usize, m: usize) -> VectorField {
    let coef = |g: &mut ChaCha8Rng| -> Vec<(f64, f64)> {
        (0..=band)
            .map(|_| (g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)))
            .collect()
    };
    let (cx, cy) = (coef(g), coef(g));
    let eval = |c: &[(f64, f64)], phi: f64| -> f64 {
        c.iter()
            .enumerate()
            .map(|(j, (a, b))| {
                let w = 1.0 / (j.max(1) as f64).powi(2);
                let t = j as f64 * phi;
                w * (a * t.cos() + b * t.sin())
            })
            .sum()
    };
    let pts: Vec<Vec2> = (0..m)
        .map(|i| {
            let phi = grid_angle(i, m);
            Vec2::new(eval(&cx, phi), eval(&cy, phi))
        })
        .collect();
    VectorField::from_samples(&pts, band)
}

fn derivative_check(s: &Settings) -> Result<Report> {
    let mut g = rng(s);
    let curve = input_curve(s, &mut g, &[s.r])?;
    let sigma = random_field(&mut g, MAX_RANDOM_MODE.min(s.modes), s.grid);
    let exact = frechet_derivative(&curve, s.r, &sigma)?;
    let mut csv = String::from("eps,rel_error\n");
    let mut errs = Vec::new();
    for eps in FD_STEPS {
        let plus = invariant_analytic(&curve.perturbed(&sigma, eps)?, s.r)?;
        let minus = invariant_analytic(&curve.perturbed(&sigma, -eps)?, s.r)?;
        let fd = plus.values.sub(&minus.values)?.scale(0.5 / eps);
        let e = fd.sub(&exact)?.sup_norm() / exact.sup_norm();
        writeln!(csv, "{eps},{e}").unwrap();
        errs.push(e);
    }
    // least-squares slope of log error against log step
    let xs: Vec<f64> = FD_STEPS.iter().map(|e| e.log10()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.log10()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = num / den;
    let last = errs[errs.len() - 1];
    let mut dcsv = String::from("phi,derivative\n");
    for (i, v) in exact.samples().iter().enumerate() {
        writeln!(dcsv, "{},{v}", grid_angle(i, s.grid)).unwrap();
    }
    let pass = (slope - 2.0).abs() <= 0.1 && last <= FD_TOL;
    Ok(Report::ok(
        format!("derivative-check: slope {slope:.3}, relative error {last:.3e} at eps=1e-4"),
        json!({ "slope": slope, "rel_errors": errs }),
        vec![("fd.csv", csv), ("derivative.csv", dcsv)],
    )
    .check(pass, "cli::derivative_check", || {
        format!("slope {slope} or error {last:e} outside 2 ± 0.1, {FD_TOL:e}")
    }))
}

fn spectrum(s: &Settings) -> Result<Report> {
    let theta = theta_circle(s.r, 1.0)?;
    let sp = Spectrum::new(s.modes, theta);
    let rest = (2..=s.modes as i64)
        .map(|j| sp.get(j).abs())
        .fold(f64::INFINITY, f64::min);
    let summary = if s.modes >= 2 {
        format!(
            "spectrum θ={theta:.6} N={}: d_0 {:.12}, min |d_j| over 2≤|j|≤N {rest:.3e}",
            s.modes,
            sp.get(0)
        )
    } else {
        format!("spectrum θ={theta:.6} N={}: d_0 {:.12}", s.modes, sp.get(0))
    };
    Ok(Report::ok(
        summary,
        json!({ "theta": theta, "d_0": sp.get(0), "min_abs_d": if s.modes >= 2 { json!(rest) } else { Value::Null } }),
        vec![("spectrum.csv", io::spectrum_csv(&sp))],
    ))
}

fn injectivity(s: &Settings) -> Result<Report> {
    let curve = input_curve(s, &mut rng(s), &[s.r])?;
    let op = assemble_operator(&curve, s.r, Basis::Normal { modes: s.modes })?;
    let sv = singular_values(&op.entries);
    let kernel = sv.iter().filter(|&&v| v < KERNEL_TOL).count();
    let margin = injectivity_margin(&op, true)?;
    let theta = theta_circle(s.r, 1.0)?;
    let mut detail = json!({ "kernel_dim": kernel, "constrained_margin": margin });
    let mut line = format!("injectivity: {kernel} singular values below 1e-8, constrained margin {margin:.6}");
    if s.modes >= 2 {
        let sine = sine_inequality_check(&[theta], s.modes as i64)?;
        write!(line, ", min |d_j| {:.3e} at j={}", sine.min_abs_d, sine.j_at_min).unwrap();
        detail["min_abs_d"] = json!(sine.min_abs_d);
    }
    let mut svcsv = String::from("index,singular_value\n");
    for (i, v) in sv.iter().enumerate() {
        writeln!(svcsv, "{i},{v}").unwrap();
    }
    Ok(Report::ok(
        line,
        detail,
        vec![
            ("operator.csv", io::operator_csv(&op)),
            ("operator.json", io::operator_header_json(&op)),
            ("singular_values.csv", svcsv),
        ],
    ))
}

fn run_reconstruct(s: &Settings) -> Result<Report> {
    let truth = input_curve(s, &mut rng(s), &[s.r])?;
    let target = invariant_analytic(&truth, s.r)?;
    let mut problem = ReconstructionProblem::new(target)?;
    problem.max_iter = s.max_iter;
    let (curve, trace, failure) = match reconstruct(&problem) {
        Ok(out) => (Some(out.curve), out.trace, None),
        Err(f) => (f.last, f.trace, Some(f.error)),
    };
    let residual = trace.last().map_or(f64::NAN, |t| t.residual);
    let err = curve.as_ref().map_or(f64::NAN, |c| c.sup_distance(&truth));
    let mut artifacts = vec![("trace.json", io::trace_json(&trace)), ("truth.json", truth.to_json())];
    if let Some(c) = &curve {
        artifacts.push(("reconstructed.json", c.to_json()));
    }
    Ok(Report {
        summary: format!(
            "reconstruct: {} iterations, final residual {residual:.3e}, sup error {err:.3e}",
            trace.len().saturating_sub(1)
        ),
        details: json!({ "iterations": trace.len().saturating_sub(1), "residual": residual, "sup_error": err }),
        artifacts,
        failure,
    })
}

fn stability(s: &Settings) -> Result<Report> {
    let report = stability_estimate(&StabilityConfig {
        n_pairs: s.pairs,
        amplitude: s.amplitude,
        r: s.r,
        k: s.k,
        seed: s.seed,
        max_mode: MAX_RANDOM_MODE.min(s.modes),
        n_modes: s.modes,
        grid_size: s.grid,
    })?;
    Ok(Report::ok(
        format!(
            "stability: ĉ {:.6} over {} pairs (k={}, r={})",
            report.c_hat, report.n_pairs, s.k, s.r
        ),
        json!({ "c_hat": report.c_hat }),
        vec![
            ("stability.csv", io::stability_csv(&report)),
            ("stability.json", io::stability_json(&report)),
        ],
    ))
}

fn invariance(s: &Settings, g: &mut ChaCha8Rng) -> Result<Report> {
    let t = Transforms {
        angle: g.gen_range(-PI..PI),
        translation: Vec2::new(g.gen_range(-5.0..5.0), g.gen_range(-5.0..5.0)),
        shift: g.gen_range(1..s.grid),
        scale: g.gen_range(0.5..3.0),
    };
    let curve = input_curve(s, g, &[s.r, s.r / t.scale])?;
    let rep = invariance_suite(&curve, s.r, &t)?;
    let worst = rep.max();
    let verdict = |x: f64| if x <= INVARIANCE_TOL { "pass" } else { "FAIL" };
    Ok(Report::ok(
        format!(
            "invariance: rigid {:.2e} {}, reparam {:.2e} {}, scaling {:.2e} {} (tol 1e-9)",
            rep.rigid,
            verdict(rep.rigid),
            rep.reparam,
            verdict(rep.reparam),
            rep.scaling,
            verdict(rep.scaling)
        ),
        json!({
            "rigid": rep.rigid,
            "reparam": rep.reparam,
            "scaling": rep.scaling,
            "transforms": {
                "angle": t.angle,
                "translation": [t.translation.x, t.translation.y],
                "shift": t.shift,
                "scale": t.scale,
            },
        }),
        Vec::new(),
    )
    .check(worst <= INVARIANCE_TOL, "cli::invariance_suite", || {
        format!("deviation {worst:e} exceeds {INVARIANCE_TOL:e}")
    }))
}
