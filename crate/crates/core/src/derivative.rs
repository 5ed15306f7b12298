//! First variation of the invariant, the convolution operator it reduces to
//! at the circle, its Fourier eigenvalues, and discrete injectivity margins.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{lift_normal_unchecked, Curve, TangentField, VectorField};
use crate::error::{Error, Result};
use crate::fourier::{self, PeriodicFn};
use crate::geometry::Vec2;
use crate::invariant::{check_two_crossings, intersection_pairs, IntersectionPair};

/// Denominators below this multiple of `r²` mean the crossings are no longer transversal.
pub const NEAR_SINGULAR: f64 = 1e-10;

/// Per-center geometry of the crossings.
#[derive(Debug, Clone)]
struct Site {
    pair: IntersectionPair,
    /// γ(p) − γ(φ)
    u: Vec2,
    /// γ(m) − γ(φ)
    w: Vec2,
    vp: Vec2,
    vm: Vec2,
    /// ⟨γ̇(p), u⟩, ⟨γ̇(m), w⟩
    den_p: f64,
    den_m: f64,
    /// `s·r² / √(r⁴ − ⟨u, w⟩²)` with `s` the orientation of the inside arc
    arc_factor: f64,
    /// `∫_m^p e^{ijψ} γ̇^⊥(ψ) dψ` for j = 0..=band, per coordinate
    moments_x: Vec<Complex64>,
    moments_y: Vec<Complex64>,
}

/// Everything about `(γ, r)` that the derivative needs, so that applying it
/// to a direction costs only series evaluations.
#[derive(Debug, Clone)]
pub struct DerivativeContext {
    curve: Curve,
    r: f64,
    band: usize,
    sites: Vec<Site>,
}

impl DerivativeContext {
    /// Precompute crossings and integral moments for directions of at most
    /// `band` Fourier modes.
    pub fn new(curve: &Curve, r: f64, band: usize) -> Result<Self> {
        const OP: &str = "derivative::frechet_derivative";
        check_two_crossings(curve, r)?;
        let pairs = intersection_pairs(curve, r)?;
        let (nx, ny) = curve.normal_coeffs();
        let n = curve.n_modes();
        let r2 = r * r;
        let sites = (0..curve.grid_size())
            .into_par_iter()
            .map(|i| {
                let phi = curve.grid_angle(i);
                let pair = pairs[i];
                let center = curve.evaluate(phi);
                let (gp, vp) = curve.pos_d1(pair.p);
                let (gm, vm) = curve.pos_d1(pair.m);
                let u = gp - center;
                let w = gm - center;
                let den_p = vp.dot(u);
                let den_m = vm.dot(w);
                let uw = u.dot(w);
                let root = (r2 * r2 - uw * uw).max(0.0).sqrt();
                let worst = den_p.abs().min(den_m.abs()).min(root);
                if worst < NEAR_SINGULAR * r2 {
                    return Err(Error::NearSingular {
                        op: OP,
                        msg: format!("denominator {worst:.3e} at φ = {phi:.6}"),
                    });
                }
                let s = if u.cross(w) < 0.0 { -1.0 } else { 1.0 };
                let (moments_x, moments_y) = moments(&nx, &ny, n, band, pair);
                Ok(Site {
                    pair,
                    u,
                    w,
                    vp,
                    vm,
                    den_p,
                    den_m,
                    arc_factor: s * r2 / root,
                    moments_x,
                    moments_y,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            curve: curve.clone(),
            r,
            band,
            sites,
        })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn pairs(&self) -> Vec<IntersectionPair> {
        self.sites.iter().map(|s| s.pair).collect()
    }

    /// `I_r'[γ](σ)` on the grid.
    pub fn apply(&self, sigma: &VectorField) -> Result<PeriodicFn> {
        if sigma.n_modes() > self.band {
            return Err(Error::param(
                "derivative::frechet_derivative",
                format!(
                    "direction has {} modes, context built for {}",
                    sigma.n_modes(),
                    self.band
                ),
            ));
        }
        let m = self.curve.grid_size();
        let k = sigma.n_modes();
        let at_grid = sigma.sample(m);
        let values = self
            .sites
            .iter()
            .zip(&at_grid)
            .map(|(site, &s0)| {
                let integral = {
                    let mut acc =
                        sigma.coeff_x[k].re * site.moments_x[0].re + sigma.coeff_y[k].re * site.moments_y[0].re;
                    for j in 1..=k {
                        acc += 2.0
                            * (sigma.coeff_x[k + j] * site.moments_x[j] + sigma.coeff_y[k + j] * site.moments_y[j]).re;
                    }
                    acc
                };
                let sp = sigma.eval(site.pair.p);
                let sm = sigma.eval(site.pair.m);
                let (u, w) = (site.u, site.w);
                let dp = (s0 - sp).dot(u) / site.den_p;
                let dm = (s0 - sm).dot(w) / site.den_m;
                let chord = 2.0 * integral - s0.cross(u - w) + u.cross(sp) - w.cross(sm) + u.cross(site.vp) * dp
                    - w.cross(site.vm) * dm;
                let d_inner = dp * site.vp.dot(w) + (sp - s0).dot(w) + u.dot(sm - s0) + dm * u.dot(site.vm);
                0.5 * (chord - site.arc_factor * d_inner)
            })
            .collect();
        Ok(PeriodicFn::from_samples(values))
    }
}

/// `∫_m^p e^{ijψ} n(ψ) dψ` for j = 0..=band, exact for the trigonometric
/// polynomial `n` with modes −N..N.
fn moments(
    nx: &[Complex64],
    ny: &[Complex64],
    n: usize,
    band: usize,
    pair: IntersectionPair,
) -> (Vec<Complex64>, Vec<Complex64>) {
    // E[k + n] = ∫_m^p e^{ikψ} dψ for k = −n..=band+n
    let len = band + 2 * n + 1;
    let zp = Complex64::from_polar(1.0, pair.p);
    let zm = Complex64::from_polar(1.0, pair.m);
    let mut ep = Complex64::from_polar(1.0, -(n as f64) * pair.p);
    let mut em = Complex64::from_polar(1.0, -(n as f64) * pair.m);
    let mut e = Vec::with_capacity(len);
    for idx in 0..len {
        let k = idx as i64 - n as i64;
        if k == 0 {
            e.push(Complex64::new(pair.p - pair.m, 0.0));
        } else {
            e.push((ep - em) / Complex64::new(0.0, k as f64));
        }
        ep *= zp;
        em *= zm;
    }
    let mut mx = vec![Complex64::new(0.0, 0.0); band + 1];
    let mut my = vec![Complex64::new(0.0, 0.0); band + 1];
    for j in 0..=band {
        let (mut ax, mut ay) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for l in 0..=2 * n {
            // mode (l − n) of n times e^{ijψ} integrates to E[j + l − n]
            let ek = e[j + l];
            ax += nx[l] * ek;
            ay += ny[l] * ek;
        }
        mx[j] = ax;
        my[j] = ay;
    }
    (mx, my)
}

/// `I_r'[γ](σ)` for a raw perturbation field.
pub fn frechet_derivative(curve: &Curve, r: f64, sigma: &VectorField) -> Result<PeriodicFn> {
    DerivativeContext::new(curve, r, sigma.n_modes())?.apply(sigma)
}

/// `I_r'[γ](a γ̇^⊥ + b γ̇)`.
pub fn frechet_derivative_tangent(curve: &Curve, r: f64, field: &TangentField) -> Result<PeriodicFn> {
    frechet_derivative(curve, r, &field.to_vector_field())
}

/// `∫_{φ−θ}^{φ+θ} a − 2 sin(θ) a(φ)`, applied mode by mode.
pub fn circle_derivative(a: &PeriodicFn, theta: f64) -> PeriodicFn {
    let n = a.n_modes() as i64;
    let coeffs = a
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| c * spectrum_d(idx as i64 - n, theta))
        .collect();
    PeriodicFn::from_coeffs(coeffs, a.grid_size())
}

/// Eigenvalue of the circle operator on `e^{ijφ}`: `2 sin(jθ)/j − 2 sin θ`,
/// with `2θ − 2 sin θ` for `j = 0` and exactly zero for `j = ±1`.
pub fn spectrum_d(j: i64, theta: f64) -> f64 {
    match j {
        0 => 2.0 * theta - 2.0 * theta.sin(),
        1 | -1 => 0.0,
        _ => {
            let jf = j as f64;
            2.0 * (jf * theta).sin() / jf - 2.0 * theta.sin()
        }
    }
}

/// The circle eigenvalues `d_j` for `|j| ≤ n`.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub theta: f64,
    /// d_0 ..= d_n; `d_{−j} = d_j`
    pub d: Vec<f64>,
}

impl Spectrum {
    pub fn new(n: usize, theta: f64) -> Self {
        Self {
            theta,
            d: (0..=n as i64).map(|j| spectrum_d(j, theta)).collect(),
        }
    }

    pub fn get(&self, j: i64) -> f64 {
        self.d[j.unsigned_abs() as usize]
    }

    /// Eigenvalue attached to each entry of the real basis 0, 1c, 1s, 2c, ….
    pub fn real_basis_diagonal(&self) -> Vec<f64> {
        let mut out = vec![self.d[0]];
        for &dj in &self.d[1..] {
            out.push(dj);
            out.push(dj);
        }
        out
    }
}

/// Smallest `|d_j|` seen by [`sine_inequality_check`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SineReport {
    pub min_abs_d: f64,
    pub theta_at_min: f64,
    pub j_at_min: i64,
    /// every `d_j`, `2 ≤ |j| ≤ j_max`, was nonzero
    pub all_nonzero: bool,
}

/// Evaluate `|d_j| = (2/|j|)·|sin(jθ) − j sin θ|` for `2 ≤ |j| ≤ j_max` over
/// the given angles and report the minimum.
pub fn sine_inequality_check(thetas: &[f64], j_max: i64) -> Result<SineReport> {
    const OP: &str = "derivative::sine_inequality_check";
    if j_max < 2 {
        return Err(Error::param(OP, "j_max must be at least 2"));
    }
    if let Some(t) = thetas.iter().find(|t| !(**t > 0.0 && **t < std::f64::consts::PI)) {
        return Err(Error::param(OP, format!("θ = {t} outside (0, π)")));
    }
    let mut report = SineReport {
        min_abs_d: f64::INFINITY,
        theta_at_min: f64::NAN,
        j_at_min: 0,
        all_nonzero: true,
    };
    for &theta in thetas {
        // d_{−j} = d_j
        for j in 2..=j_max {
            let d = spectrum_d(j, theta).abs();
            if d == 0.0 {
                report.all_nonzero = false;
            }
            if d < report.min_abs_d {
                report.min_abs_d = d;
                report.theta_at_min = theta;
                report.j_at_min = j;
            }
        }
    }
    Ok(report)
}

/// Input basis of an [`OperatorMatrix`]: real Fourier modes 0, 1c, 1s, …,
/// `modes`c, `modes`s of a scalar field placed along the normal (completed
/// tangentially so the direction is tangent to the normalized curve space)
/// or along the tangent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Basis {
    Normal { modes: usize },
    Tangential { modes: usize },
}

impl Basis {
    pub fn modes(&self) -> usize {
        match *self {
            Basis::Normal { modes } | Basis::Tangential { modes } => modes,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.modes() + 1
    }

    /// Column labels "0", "1c", "1s", ….
    pub fn labels(&self) -> Vec<String> {
        let mut out = vec!["0".to_string()];
        for j in 1..=self.modes() {
            out.push(format!("{j}c"));
            out.push(format!("{j}s"));
        }
        out
    }
}

/// Dense matrix of the linearized invariant. Columns follow the basis;
/// rows are the real Fourier coefficients 0, 1c, 1s, … of the output.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub entries: DMatrix<f64>,
    pub basis: Basis,
    pub r: f64,
}

/// The direction attached to one basis column.
pub fn basis_direction(curve: &Curve, basis: Basis, column: usize) -> VectorField {
    let mut real = vec![0.0; basis.dim()];
    real[column] = 1.0;
    let f = PeriodicFn::from_real_basis(&real, curve.grid_size());
    match basis {
        Basis::Normal { .. } => lift_normal_unchecked(&f, curve).to_vector_field(),
        Basis::Tangential { .. } => {
            let (tx, ty) = curve.tangent_coeffs();
            VectorField {
                coeff_x: fourier::multiply(f.coeffs(), &tx),
                coeff_y: fourier::multiply(f.coeffs(), &ty),
            }
        }
    }
}

/// Apply the derivative to every basis direction.
pub fn assemble_operator(curve: &Curve, r: f64, basis: Basis) -> Result<OperatorMatrix> {
    let dim = basis.dim();
    if 2 * basis.modes() >= curve.grid_size() {
        return Err(Error::param(
            "derivative::assemble_operator",
            format!("{} modes not resolved by grid {}", basis.modes(), curve.grid_size()),
        ));
    }
    let dirs: Vec<VectorField> = (0..dim).map(|c| basis_direction(curve, basis, c)).collect();
    let band = dirs.iter().map(|d| d.n_modes()).max().unwrap_or(0);
    let ctx = DerivativeContext::new(curve, r, band)?;
    let cols = dirs
        .par_iter()
        .map(|d| ctx.apply(d).map(|out| out.real_basis(basis.modes())))
        .collect::<Result<Vec<_>>>()?;
    let entries = DMatrix::from_fn(dim, dim, |i, j| cols[j][i]);
    Ok(OperatorMatrix { entries, basis, r })
}

/// The two rows `a(0)` and `ȧ(0)` on the real basis up to `modes`.
pub fn constraint_matrix(modes: usize) -> DMatrix<f64> {
    let dim = 2 * modes + 1;
    let mut c = DMatrix::zeros(2, dim);
    c[(0, 0)] = 1.0;
    for j in 1..=modes {
        c[(0, 2 * j - 1)] = 1.0;
        c[(1, 2 * j)] = j as f64;
    }
    c
}

/// Orthonormal basis (columns) of `{a : a(0) = ȧ(0) = 0}` in real coordinates.
pub fn constraint_null_space(modes: usize) -> DMatrix<f64> {
    let c = constraint_matrix(modes);
    let dim = c.ncols();
    let eig = SymmetricEigen::new(c.transpose() * &c);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let keep = dim.saturating_sub(c.nrows());
    DMatrix::from_fn(dim, keep, |i, k| eig.eigenvectors[(i, order[k])])
}

/// Singular values in ascending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Smallest singular value of the operator, optionally restricted to normal
/// fields with `a(0) = ȧ(0) = 0`.
pub fn injectivity_margin(op: &OperatorMatrix, constrained: bool) -> Result<f64> {
    if !constrained {
        return Ok(singular_values(&op.entries)[0]);
    }
    match op.basis {
        Basis::Normal { modes } => {
            let z = constraint_null_space(modes);
            Ok(singular_values(&(&op.entries * z))[0])
        }
        Basis::Tangential { .. } => Err(Error::param(
            "derivative::injectivity_margin",
            "constraints apply to the normal basis only",
        )),
    }
}
