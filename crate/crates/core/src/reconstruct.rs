//! Recover a near-circular curve from its invariant by damped Gauss–Newton,
//! and measure the stability constant `‖ΔI‖_k / ‖Δγ‖_k` empirically.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{lift_normal, make_circle, Curve, VectorField};
use crate::derivative::{assemble_operator, constraint_matrix, spectrum_d, Basis};
use crate::error::{Error, Result};
use crate::fourier::{self, PeriodicFn};
use crate::geometry::Vec2;
use crate::invariant::{check_two_crossings, invariant_analytic, theta_circle, InvariantProfile};

const MAX_HALVINGS: usize = 5;
const STAGNATION_RATIO: f64 = 0.99;
const STAGNATION_STEPS: usize = 5;

/// Inputs of one inversion.
#[derive(Debug, Clone)]
pub struct ReconstructionProblem {
    pub target: InvariantProfile,
    pub r: f64,
    pub init: Curve,
    pub max_iter: usize,
    /// stop once the grid sup-norm of `target − I_r[γ]` is at most this
    pub tol_residual: f64,
    /// initial step length in (0, 1]
    pub damping: f64,
    /// normal-field modes solved for; defaults to the curve's band
    pub modes: usize,
}

impl ReconstructionProblem {
    /// Unit-circle start, 50 iterations, residual tolerance `1e-11·r²`, full steps.
    pub fn new(target: InvariantProfile) -> Result<Self> {
        let n = target.n_modes;
        let m = target.grid_size();
        let r = target.r;
        Ok(Self {
            init: make_circle(1.0, n, m)?,
            r,
            max_iter: 50,
            tol_residual: 1e-11 * r * r,
            damping: 1.0,
            modes: n,
            target,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub residual: f64,
    pub step_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub curve: Curve,
    pub trace: Vec<TraceEntry>,
}

/// A failed inversion, with the last iterate that still lay in the
/// two-crossing neighborhood.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct ReconstructFailure {
    #[source]
    pub error: Error,
    pub last: Option<Curve>,
    pub trace: Vec<TraceEntry>,
}

impl From<Error> for ReconstructFailure {
    fn from(error: Error) -> Self {
        Self {
            error,
            last: None,
            trace: Vec::new(),
        }
    }
}

fn residual(target: &PeriodicFn, curve: &Curve, r: f64) -> Result<(PeriodicFn, f64)> {
    let now = invariant_analytic(curve, r)?;
    let res = target.sub(&now.values)?;
    let sup = res.sup_norm();
    Ok((res, sup))
}

/// Solve `min ‖J x − b‖` over `x` with `a(0) = ȧ(0) = 0`, where columns of `J`
/// are first rescaled by the circle eigenvalues `1/|d_j|`.
fn constrained_step(j: &DMatrix<f64>, b: &DVector<f64>, modes: usize, theta: f64) -> DVector<f64> {
    let dim = 2 * modes + 1;
    let scale = DVector::from_iterator(
        dim,
        (0..dim).map(|i| {
            let mode = i.div_ceil(2) as i64;
            let d = spectrum_d(mode, theta).abs();
            if d > 1e-3 {
                1.0 / d
            } else {
                1.0
            }
        }),
    );
    let d = DMatrix::from_diagonal(&scale);
    let c = constraint_matrix(modes) * &d;
    let eig = SymmetricEigen::new(c.transpose() * &c);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let z = DMatrix::from_fn(dim, dim - 2, |i, k| eig.eigenvectors[(i, order[k])]);
    let jz = j * &d * &z;
    let svd = jz.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max();
    let y = svd.solve(b, eps).expect("both factors computed");
    d * z * y
}

/// Damped Gauss–Newton in normal-field coordinates. Each step solves the
/// linearized system with the two base-point constraints, lifts the normal
/// update to a tangent field and renormalizes. Steps that increase the
/// residual are halved up to five times.
#[allow(clippy::result_large_err)]
pub fn reconstruct(problem: &ReconstructionProblem) -> std::result::Result<Reconstruction, ReconstructFailure> {
    const OP: &str = "reconstruct::reconstruct";
    let r = problem.r;
    let modes = problem.modes;
    let n = problem.init.n_modes();
    let m = problem.init.grid_size();
    if problem.target.grid_size() != m {
        return Err(Error::param(
            OP,
            format!(
                "target grid {} does not match curve grid {m}",
                problem.target.grid_size()
            ),
        )
        .into());
    }
    if !(problem.damping > 0.0 && problem.damping <= 1.0) {
        return Err(Error::param(OP, format!("damping {} not in (0, 1]", problem.damping)).into());
    }
    if modes == 0 || 2 * modes >= m {
        return Err(Error::param(OP, format!("cannot solve for {modes} modes on grid {m}")).into());
    }
    let theta = theta_circle(r, 1.0).unwrap_or(std::f64::consts::FRAC_PI_2);
    let target = &problem.target.values;

    let mut curve = problem.init.normalize()?;
    let (mut res, mut sup) = residual(target, &curve, r)?;
    let mut trace = vec![TraceEntry {
        iter: 0,
        residual: sup,
        step_norm: 0.0,
    }];
    let fail = |error: Error, last: &Curve, trace: &Vec<TraceEntry>| ReconstructFailure {
        error,
        last: Some(last.clone()),
        trace: trace.clone(),
    };
    let mut slow_steps = 0;

    for iter in 1..=problem.max_iter {
        if sup <= problem.tol_residual {
            return Ok(Reconstruction { curve, trace });
        }
        let op = assemble_operator(&curve, r, Basis::Normal { modes }).map_err(|e| fail(e, &curve, &trace))?;
        let b = DVector::from_vec(res.real_basis(modes));
        let x = constrained_step(&op.entries, &b, modes, theta);
        let a = PeriodicFn::from_real_basis(x.as_slice(), m);
        let field = lift_normal(&a, &curve).map_err(|e| fail(e, &curve, &trace))?;
        let full = field.to_vector_field();
        let sigma = VectorField {
            coeff_x: fourier::resize_band(&full.coeff_x, n),
            coeff_y: fourier::resize_band(&full.coeff_y, n),
        };

        let mut t = problem.damping;
        let mut accepted = None;
        let mut last_err = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = curve
                .perturbed(&sigma, t)
                .and_then(|c| c.normalize())
                .and_then(|c| residual(target, &c, r).map(|(res, sup)| (c, res, sup)));
            match trial {
                Ok((c, new_res, new_sup)) if new_sup < sup => {
                    accepted = Some((c, new_res, new_sup));
                    break;
                }
                Ok(_) => {}
                Err(e) => last_err = Some(e),
            }
            t *= 0.5;
        }
        let Some((next, new_res, new_sup)) = accepted else {
            let error = match last_err {
                Some(e @ Error::Topology { .. }) => e,
                _ => Error::NonConvergence {
                    op: OP,
                    msg: format!("no decrease from residual {sup:.3e} after {MAX_HALVINGS} step halvings"),
                },
            };
            return Err(fail(error, &curve, &trace));
        };
        let step_norm = next.sup_distance(&curve);
        if new_sup > STAGNATION_RATIO * sup {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
        curve = next;
        res = new_res;
        sup = new_sup;
        trace.push(TraceEntry {
            iter,
            residual: sup,
            step_norm,
        });
        if slow_steps >= STAGNATION_STEPS {
            return Err(fail(
                Error::NonConvergence {
                    op: OP,
                    msg: format!("residual stagnated at {sup:.3e}"),
                },
                &curve,
                &trace,
            ));
        }
    }
    if sup <= problem.tol_residual {
        return Ok(Reconstruction { curve, trace });
    }
    Err(fail(
        Error::Convergence {
            op: OP,
            iterations: problem.max_iter,
            msg: format!("residual {sup:.3e} above {:.3e}", problem.tol_residual),
        },
        &curve,
        &trace,
    ))
}

/// Shape of random near-circular test curves.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbationSpec {
    /// bound on the sup-norm of the radial perturbation
    pub amplitude: f64,
    pub min_mode: usize,
    pub max_mode: usize,
    pub n_modes: usize,
    pub grid_size: usize,
}

impl PerturbationSpec {
    pub fn new(amplitude: f64, max_mode: usize) -> Self {
        Self {
            amplitude,
            min_mode: 0,
            max_mode,
            n_modes: 32,
            grid_size: 512,
        }
    }
}

/// Random radial profile `a(φ) = Σ (α_j cos jφ + β_j sin jφ)/max(1, j)²`,
/// α, β uniform in [−1, 1], rescaled so that `sup |a|` is a uniform fraction
/// in [0.25, 1] of the amplitude.
pub fn random_radial_profile(rng: &mut impl Rng, spec: &PerturbationSpec) -> PeriodicFn {
    let mut real = vec![0.0; 2 * spec.max_mode + 1];
    for j in spec.min_mode..=spec.max_mode {
        let w = 1.0 / (j.max(1) as f64).powi(2);
        let alpha: f64 = rng.gen_range(-1.0..=1.0);
        let beta: f64 = rng.gen_range(-1.0..=1.0);
        if j == 0 {
            real[0] = w * alpha;
        } else {
            real[2 * j - 1] = w * alpha;
            real[2 * j] = w * beta;
        }
    }
    let fraction: f64 = rng.gen_range(0.25..=1.0);
    let a = PeriodicFn::from_real_basis(&real, spec.grid_size);
    let sup = a.sup_norm();
    if sup == 0.0 {
        return a;
    }
    a.scale(spec.amplitude * fraction / sup)
}

/// Normalized `circle + a(φ)·(cos φ, sin φ)`.
pub fn perturbed_circle(a: &PeriodicFn, n_modes: usize) -> Result<Curve> {
    let m = a.grid_size();
    let pts: Vec<Vec2> = (0..m)
        .map(|i| {
            let phi = fourier::grid_angle(i, m);
            let rho = 1.0 + a.samples()[i];
            Vec2::new(rho * phi.cos(), rho * phi.sin())
        })
        .collect();
    Curve::from_samples(&pts, n_modes)?.normalize()
}

/// A random normalized perturbed circle whose disks of every given radius
/// cross it exactly twice; redraws up to 20 times.
pub fn random_admissible_curve(rng: &mut impl Rng, spec: &PerturbationSpec, radii: &[f64]) -> Result<Curve> {
    let mut last = None;
    for _ in 0..20 {
        let a = random_radial_profile(rng, spec);
        let drawn = perturbed_circle(&a, spec.n_modes)
            .and_then(|c| radii.iter().try_for_each(|&r| check_two_crossings(&c, r)).map(|_| c));
        match drawn {
            Ok(c) => return Ok(c),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// One sampled pair of curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilitySample {
    pub delta_invariant: f64,
    pub delta_curve: f64,
}

impl StabilitySample {
    pub fn ratio(&self) -> f64 {
        self.delta_invariant / self.delta_curve
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub pairs: Vec<StabilitySample>,
    pub c_hat: f64,
    pub k: u32,
    pub n_pairs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct StabilityConfig {
    pub n_pairs: usize,
    pub amplitude: f64,
    pub r: f64,
    pub k: u32,
    pub seed: u64,
    pub max_mode: usize,
    pub n_modes: usize,
    pub grid_size: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            n_pairs: 200,
            amplitude: 0.02,
            r: 1.0,
            k: 1,
            seed: 0,
            max_mode: 8,
            n_modes: 32,
            grid_size: 512,
        }
    }
}

/// Pairs with `‖Δγ‖_k` below this are not distinct enough to form a ratio.
pub const MIN_SEPARATION: f64 = 1e-8;

/// `‖I_r[γ] − I_r[γ̃]‖_k` and `‖γ − γ̃‖_k` for one pair.
pub fn stability_sample(a: &Curve, b: &Curve, r: f64, k: u32) -> Result<StabilitySample> {
    let ia = invariant_analytic(a, r)?;
    let ib = invariant_analytic(b, r)?;
    Ok(StabilitySample {
        delta_invariant: ia.values.sub(&ib.values)?.ck_norm(k),
        delta_curve: a.ck_distance(b, k),
    })
}

/// Sample random pairs of admissible curves and report the smallest ratio
/// `‖ΔI‖_k / ‖Δγ‖_k`.
pub fn stability_estimate(cfg: &StabilityConfig) -> Result<StabilityReport> {
    const OP: &str = "reconstruct::stability_estimate";
    if cfg.n_pairs == 0 {
        return Err(Error::param(OP, "n_pairs must be positive"));
    }
    let spec = PerturbationSpec {
        amplitude: cfg.amplitude,
        min_mode: 0,
        max_mode: cfg.max_mode,
        n_modes: cfg.n_modes,
        grid_size: cfg.grid_size,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut curves = Vec::with_capacity(cfg.n_pairs);
    for _ in 0..cfg.n_pairs {
        let mut tries = 0;
        loop {
            let a = random_admissible_curve(&mut rng, &spec, &[cfg.r])?;
            let b = random_admissible_curve(&mut rng, &spec, &[cfg.r])?;
            if a.ck_distance(&b, cfg.k) >= MIN_SEPARATION {
                curves.push((a, b));
                break;
            }
            tries += 1;
            if tries >= 20 {
                return Err(Error::Geometry {
                    op: OP,
                    msg: "could not draw a distinct pair".into(),
                });
            }
        }
    }
    let pairs = curves
        .par_iter()
        .map(|(a, b)| stability_sample(a, b, cfg.r, cfg.k))
        .collect::<Result<Vec<_>>>()?;
    let c_hat = pairs.iter().map(StabilitySample::ratio).fold(f64::INFINITY, f64::min);
    Ok(StabilityReport {
        pairs,
        c_hat,
        k: cfg.k,
        n_pairs: cfg.n_pairs,
        seed: cfg.seed,
    })
}
