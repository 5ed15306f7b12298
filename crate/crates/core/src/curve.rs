//! Closed planar curves as truncated Fourier series, normalization into the
//! constant-speed, base-point-pinned curve space, curvature and the
//! normal/tangential decomposition of perturbation fields.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, grid_angle, PeriodicFn, TWO_PI};
use crate::geometry::{min_nonadjacent_edge_distance, Vec2};

/// Default tolerance for the speed and base-point conditions.
pub const TOL_NORMALIZED: f64 = 1e-8;
/// Tolerance on `a(0)` and `ȧ(0)` when lifting a normal field.
pub const TOL_LIFT: f64 = 1e-8;

/// Position and first two derivatives at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub pos: Vec2,
    pub d1: Vec2,
    pub d2: Vec2,
}

/// A closed planar curve `γ(φ) = Σ_{|j|≤N} c_j e^{ijφ}` in each coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    coeff_x: Vec<Complex64>,
    coeff_y: Vec<Complex64>,
    n_modes: usize,
    grid_size: usize,
    speed: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveFile {
    n_modes: usize,
    coeff_x: Vec<[f64; 2]>,
    coeff_y: Vec<[f64; 2]>,
    grid_size: usize,
}

impl Curve {
    /// Build from coefficient vectors (modes `-N..=N`). Coefficients must be
    /// Hermitian-symmetric to round-off; they are symmetrized exactly.
    pub fn new(coeff_x: Vec<Complex64>, coeff_y: Vec<Complex64>, grid_size: usize) -> Result<Self> {
        const OP: &str = "curve_core::Curve";
        if coeff_x.len() != coeff_y.len() || coeff_x.len() % 2 == 0 {
            return Err(Error::param(OP, "coefficient vectors must have equal odd length 2N+1"));
        }
        let n = (coeff_x.len() - 1) / 2;
        if grid_size <= 2 * n {
            return Err(Error::param(
                OP,
                format!("grid_size {grid_size} does not resolve {n} modes"),
            ));
        }
        let coeff_x = hermitian(coeff_x).ok_or_else(|| Error::param(OP, "coeff_x is not Hermitian"))?;
        let coeff_y = hermitian(coeff_y).ok_or_else(|| Error::param(OP, "coeff_y is not Hermitian"))?;
        let mut curve = Self {
            coeff_x,
            coeff_y,
            n_modes: n,
            grid_size,
            speed: 0.0,
        };
        curve.speed = curve.length() / TWO_PI;
        Ok(curve)
    }

    /// Project uniform samples `(x_i, y_i)` at `φ_i = 2πi/M` onto `n_modes` modes.
    pub fn from_samples(points: &[Vec2], n_modes: usize) -> Result<Self> {
        let m = points.len();
        if m <= 2 * n_modes {
            return Err(Error::param(
                "curve_core::Curve",
                format!("{m} samples cannot resolve {n_modes} modes"),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        Self::new(fourier::dft(&xs, n_modes), fourier::dft(&ys, n_modes), m)
    }

    /// Sample a parametric closure on the `grid_size` grid and project.
    pub fn from_fn(grid_size: usize, n_modes: usize, f: impl Fn(f64) -> Vec2) -> Result<Self> {
        let pts: Vec<Vec2> = (0..grid_size).map(|i| f(grid_angle(i, grid_size))).collect();
        Self::from_samples(&pts, n_modes)
    }

    pub fn coeff_x(&self) -> &[Complex64] {
        &self.coeff_x
    }

    pub fn coeff_y(&self) -> &[Complex64] {
        &self.coeff_y
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// `c_γ = length / 2π`; the constant speed of a normalized curve.
    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn grid_angle(&self, i: usize) -> f64 {
        grid_angle(i, self.grid_size)
    }

    pub fn evaluate(&self, phi: f64) -> Vec2 {
        Vec2::new(
            fourier::eval_series(&self.coeff_x, phi),
            fourier::eval_series(&self.coeff_y, phi),
        )
    }

    pub fn evaluate_d1(&self, phi: f64) -> Vec2 {
        self.pos_d1(phi).1
    }

    pub fn evaluate_d2(&self, phi: f64) -> Vec2 {
        self.jet(phi).d2
    }

    /// Position and velocity in one pass.
    pub fn pos_d1(&self, phi: f64) -> (Vec2, Vec2) {
        let n = self.n_modes;
        let z = Complex64::from_polar(1.0, phi);
        let mut zj = Complex64::new(1.0, 0.0);
        let mut pos = Vec2::new(self.coeff_x[n].re, self.coeff_y[n].re);
        let mut d1 = Vec2::ZERO;
        for j in 1..=n {
            zj *= z;
            let cx = self.coeff_x[n + j] * zj;
            let cy = self.coeff_y[n + j] * zj;
            let jf = j as f64;
            pos += Vec2::new(2.0 * cx.re, 2.0 * cy.re);
            // d/dφ Re(c e^{ijφ}) = -j Im(c e^{ijφ})
            d1 += Vec2::new(-2.0 * jf * cx.im, -2.0 * jf * cy.im);
        }
        (pos, d1)
    }

    pub fn jet(&self, phi: f64) -> Jet {
        let n = self.n_modes;
        let z = Complex64::from_polar(1.0, phi);
        let mut zj = Complex64::new(1.0, 0.0);
        let mut pos = Vec2::new(self.coeff_x[n].re, self.coeff_y[n].re);
        let mut d1 = Vec2::ZERO;
        let mut d2 = Vec2::ZERO;
        for j in 1..=n {
            zj *= z;
            let cx = self.coeff_x[n + j] * zj;
            let cy = self.coeff_y[n + j] * zj;
            let jf = j as f64;
            pos += Vec2::new(2.0 * cx.re, 2.0 * cy.re);
            d1 += Vec2::new(-2.0 * jf * cx.im, -2.0 * jf * cy.im);
            d2 += Vec2::new(-2.0 * jf * jf * cx.re, -2.0 * jf * jf * cy.re);
        }
        Jet { pos, d1, d2 }
    }

    /// Positions on the `k`-point uniform grid.
    pub fn sample_points(&self, k: usize) -> Vec<Vec2> {
        let xs = fourier::synthesize(&self.coeff_x, k);
        let ys = fourier::synthesize(&self.coeff_y, k);
        xs.into_iter().zip(ys).map(|(x, y)| Vec2::new(x, y)).collect()
    }

    /// Samples of the `order`-th derivative on the `k`-point grid.
    pub fn sample_derivative(&self, order: u32, k: usize) -> Vec<Vec2> {
        let xs = fourier::synthesize(&fourier::derivative_coeffs(&self.coeff_x, order), k);
        let ys = fourier::synthesize(&fourier::derivative_coeffs(&self.coeff_y, order), k);
        xs.into_iter().zip(ys).map(|(x, y)| Vec2::new(x, y)).collect()
    }

    /// Points on the evaluation grid.
    pub fn points(&self) -> Vec<Vec2> {
        self.sample_points(self.grid_size)
    }

    fn quadrature_grid(&self) -> usize {
        // exact for the band-2N integrands below, and never coarser than the grid
        (4 * self.n_modes + 4).max(self.grid_size)
    }

    /// Curve length; spectrally accurate trapezoid rule on `|γ̇|`.
    pub fn length(&self) -> f64 {
        let k = 8 * self.quadrature_grid();
        let v = self.sample_derivative(1, k);
        TWO_PI * v.iter().map(|d| d.norm()).sum::<f64>() / k as f64
    }

    /// Enclosed signed area `½∮ (x dy − y dx)`, positive for counter-clockwise curves.
    pub fn signed_area(&self) -> f64 {
        let k = self.quadrature_grid();
        let p = self.sample_points(k);
        let v = self.sample_derivative(1, k);
        0.5 * TWO_PI * p.iter().zip(&v).map(|(p, v)| p.cross(*v)).sum::<f64>() / k as f64
    }

    /// Signed curvature `det(γ̇, γ̈) / |γ̇|³`, +1/R on a counter-clockwise
    /// circle of radius R. On a normalized curve `|γ̇| = c_γ`.
    pub fn curvature(&self, phi: f64) -> f64 {
        let j = self.jet(phi);
        j.d1.cross(j.d2) / j.d1.norm().powi(3)
    }

    /// Coefficients of `κ_γ c_γ = det(γ̇, γ̈) / c_γ²` (band 2N).
    pub fn curvature_speed_coeffs(&self) -> Vec<Complex64> {
        let dx = fourier::derivative_coeffs(&self.coeff_x, 1);
        let dy = fourier::derivative_coeffs(&self.coeff_y, 1);
        let ddx = fourier::derivative_coeffs(&self.coeff_x, 2);
        let ddy = fourier::derivative_coeffs(&self.coeff_y, 2);
        let a = fourier::multiply(&dx, &ddy);
        let b = fourier::multiply(&dy, &ddx);
        let c2 = self.speed * self.speed;
        a.iter().zip(&b).map(|(p, q)| (p - q) / c2).collect()
    }

    /// Coefficients of the unnormalized normal `γ̇^⊥ = (ẏ, −ẋ)`.
    pub fn normal_coeffs(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let dx = fourier::derivative_coeffs(&self.coeff_x, 1);
        let dy = fourier::derivative_coeffs(&self.coeff_y, 1);
        (dy, dx.iter().map(|c| -c).collect())
    }

    pub fn tangent_coeffs(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        (
            fourier::derivative_coeffs(&self.coeff_x, 1),
            fourier::derivative_coeffs(&self.coeff_y, 1),
        )
    }

    fn map_coeffs(&self, f: impl Fn(Complex64, Complex64) -> (Complex64, Complex64)) -> Self {
        let (cx, cy): (Vec<_>, Vec<_>) = self.coeff_x.iter().zip(&self.coeff_y).map(|(&x, &y)| f(x, y)).unzip();
        let mut out = Self {
            coeff_x: cx,
            coeff_y: cy,
            n_modes: self.n_modes,
            grid_size: self.grid_size,
            speed: 0.0,
        };
        out.speed = out.length() / TWO_PI;
        out
    }

    /// Rigid motion: rotate counter-clockwise by `angle` about the origin, then translate.
    pub fn rigid_motion(&self, angle: f64, translation: Vec2) -> Self {
        let (s, c) = angle.sin_cos();
        let mut out = self.map_coeffs(|x, y| (x * c - y * s, x * s + y * c));
        out.coeff_x[out.n_modes] += translation.x;
        out.coeff_y[out.n_modes] += translation.y;
        out
    }

    pub fn scaled(&self, t: f64) -> Self {
        let mut out = self.map_coeffs(|x, y| (x * t, y * t));
        out.speed = self.speed * t.abs();
        out
    }

    /// `γ ∘ Φ` with `Φ(φ) = φ + shift`.
    pub fn reparam_shift(&self, shift: f64) -> Self {
        let n = self.n_modes as i64;
        let cx = self
            .coeff_x
            .iter()
            .enumerate()
            .map(|(k, &c)| c * Complex64::from_polar(1.0, (k as i64 - n) as f64 * shift))
            .collect();
        let cy = self
            .coeff_y
            .iter()
            .enumerate()
            .map(|(k, &c)| c * Complex64::from_polar(1.0, (k as i64 - n) as f64 * shift))
            .collect();
        let mut out = Self {
            coeff_x: cx,
            coeff_y: cy,
            ..self.clone()
        };
        out.speed = self.speed;
        out
    }

    /// `γ(−φ)`: same trace, opposite orientation.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.coeff_x.reverse();
        out.coeff_y.reverse();
        out
    }

    /// `γ + t·σ`; the band grows to cover `σ`. Fails if the grid can no longer
    /// resolve the sum.
    pub fn perturbed(&self, field: &VectorField, t: f64) -> Result<Self> {
        let n = self.n_modes.max(field.n_modes());
        let mut cx = fourier::resize_band(&self.coeff_x, n);
        let mut cy = fourier::resize_band(&self.coeff_y, n);
        let fx = fourier::resize_band(&field.coeff_x, n);
        let fy = fourier::resize_band(&field.coeff_y, n);
        for k in 0..cx.len() {
            cx[k] += fx[k] * t;
            cy[k] += fy[k] * t;
        }
        Self::new(cx, cy, self.grid_size)
    }

    /// Re-express on a different band and grid (zero-padding or truncation).
    pub fn with_resolution(&self, n_modes: usize, grid_size: usize) -> Result<Self> {
        Self::new(
            fourier::resize_band(&self.coeff_x, n_modes),
            fourier::resize_band(&self.coeff_y, n_modes),
            grid_size,
        )
    }

    /// Discrete C^k distance: max over orders `0..=k` of the grid sup-norm of
    /// `|γ^{(j)} − γ̃^{(j)}|`.
    pub fn ck_distance(&self, other: &Curve, k: u32) -> f64 {
        let n = self.n_modes.max(other.n_modes);
        let m = self.grid_size.max(other.grid_size);
        let dx: Vec<Complex64> = fourier::resize_band(&self.coeff_x, n)
            .iter()
            .zip(fourier::resize_band(&other.coeff_x, n))
            .map(|(a, b)| a - b)
            .collect();
        let dy: Vec<Complex64> = fourier::resize_band(&self.coeff_y, n)
            .iter()
            .zip(fourier::resize_band(&other.coeff_y, n))
            .map(|(a, b)| a - b)
            .collect();
        (0..=k)
            .map(|order| {
                let xs = fourier::synthesize(&fourier::derivative_coeffs(&dx, order), m);
                let ys = fourier::synthesize(&fourier::derivative_coeffs(&dy, order), m);
                xs.iter().zip(&ys).fold(0.0_f64, |acc, (x, y)| acc.max(x.hypot(*y)))
            })
            .fold(0.0, f64::max)
    }

    /// Grid sup-norm of `γ − γ̃`.
    pub fn sup_distance(&self, other: &Curve) -> f64 {
        self.ck_distance(other, 0)
    }

    /// Max relative deviation of `|γ̇|` from `c_γ` on an oversampled grid.
    pub fn speed_deviation(&self) -> f64 {
        let v = self.sample_derivative(1, 2 * self.quadrature_grid());
        v.iter().fold(0.0_f64, |m, d| m.max((d.norm() - self.speed).abs())) / self.speed
    }

    /// Largest violation of `γ(0) = (1,0)` and `γ̇(0) ∥ (0,1)`, `γ̇_y(0) > 0`.
    pub fn base_point_deviation(&self) -> f64 {
        let (p, v) = self.pos_d1(0.0);
        let dir = if v.y > 0.0 { v.x.abs() / v.norm() } else { 1.0 };
        (p - Vec2::new(1.0, 0.0)).norm().max(dir)
    }

    /// Whether all normalization conditions hold to `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        self.speed_deviation() <= tol && self.base_point_deviation() <= tol
    }

    /// Fails with an embedding error when two non-adjacent edges of the
    /// grid polygon come closer than `1e-9·c_γ`.
    pub fn check_embedded(&self) -> Result<()> {
        let pts = self.points();
        let sep = min_nonadjacent_edge_distance(&pts);
        if sep < 1e-9 * self.speed {
            return Err(Error::Embedding {
                op: "curve_core::check_embedded",
                msg: format!("non-adjacent polygon edges {sep:.3e} apart"),
            });
        }
        Ok(())
    }

    /// Reparameterize to constant speed (arclength rescaled to period 2π),
    /// orient counter-clockwise and move rigidly so that `γ(0) = (1, 0)` and
    /// `γ̇(0) = (0, c_γ)`. Band and grid are preserved.
    pub fn normalize(&self) -> Result<Curve> {
        const OP: &str = "curve_core::normalize";
        let m = self.grid_size;
        let fine = 8 * m;
        let speeds: Vec<f64> = self.sample_derivative(1, fine).iter().map(|d| d.norm()).collect();
        let v_max = speeds.iter().cloned().fold(0.0, f64::max);
        let v_min = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(v_max > 0.0) || v_min < 1e-12 * v_max {
            return Err(Error::DegenerateCurve {
                op: OP,
                msg: format!("speed vanishes (min {v_min:.3e}, max {v_max:.3e})"),
            });
        }
        self.check_embedded().map_err(|e| match e {
            Error::Embedding { msg, .. } => Error::Embedding { op: OP, msg },
            other => other,
        })?;
        let (src, speeds) = if self.signed_area() < 0.0 {
            let rev = self.reversed();
            let s = rev.sample_derivative(1, fine).iter().map(|d| d.norm()).collect();
            (rev, s)
        } else {
            (self.clone(), speeds)
        };

        let arclen = ArclengthMap::new(&src, speeds);
        let pts: Vec<Vec2> = (0..m)
            .map(|i| {
                let psi = arclen.inverse(&src, arclen.total * i as f64 / m as f64);
                src.evaluate(psi)
            })
            .collect();
        let reparam = Curve::from_samples(&pts, self.n_modes)?;

        let (p0, v0) = reparam.pos_d1(0.0);
        let angle = PI / 2.0 - v0.y.atan2(v0.x);
        let moved = reparam.rigid_motion(angle, Vec2::ZERO);
        let p0 = p0.rotate(angle);
        Ok(moved.rigid_motion(0.0, Vec2::new(1.0, 0.0) - p0))
    }

    pub fn to_json(&self) -> String {
        let file = CurveFile {
            n_modes: self.n_modes,
            coeff_x: self.coeff_x.iter().map(|c| [c.re, c.im]).collect(),
            coeff_y: self.coeff_y.iter().map(|c| [c.re, c.im]).collect(),
            grid_size: self.grid_size,
        };
        serde_json::to_string_pretty(&file).expect("curve serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        const OP: &str = "curve_core::from_json";
        let file: CurveFile = serde_json::from_str(text).map_err(|e| Error::Format {
            op: OP,
            msg: e.to_string(),
        })?;
        if file.coeff_x.len() != 2 * file.n_modes + 1 || file.coeff_y.len() != 2 * file.n_modes + 1 {
            return Err(Error::Format {
                op: OP,
                msg: format!("expected {} coefficients per coordinate", 2 * file.n_modes + 1),
            });
        }
        let cx = file.coeff_x.iter().map(|c| Complex64::new(c[0], c[1])).collect();
        let cy = file.coeff_y.iter().map(|c| Complex64::new(c[0], c[1])).collect();
        Self::new(cx, cy, file.grid_size)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io("curve_core::load", e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io("curve_core::save", e))
    }
}

fn hermitian(mut c: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = (c.len() - 1) / 2;
    let scale = c.iter().fold(1.0_f64, |m, v| m.max(v.norm()));
    for j in 0..=n {
        let a = c[n + j];
        let b = c[n - j].conj();
        if (a - b).norm() > 1e-10 * scale {
            return None;
        }
        let avg = (a + b) * 0.5;
        c[n + j] = avg;
        c[n - j] = avg.conj();
    }
    c[n].im = 0.0;
    Some(c)
}

/// Cumulative arclength of a curve and its inverse.
struct ArclengthMap {
    total: f64,
    /// trapezoid cumulative arclength at `ψ_k = 2πk/K`, k = 0..=K
    cumulative: Vec<f64>,
    /// PCHIP slopes dψ/ds at the nodes
    slopes: Vec<f64>,
    /// zero-mean part of the speed, integrated: s(ψ) = total·ψ/2π + G(ψ)
    anti: Vec<Complex64>,
}

impl ArclengthMap {
    fn new(curve: &Curve, speeds: Vec<f64>) -> Self {
        let k = speeds.len();
        let h = TWO_PI / k as f64;
        let mut cumulative = Vec::with_capacity(k + 1);
        cumulative.push(0.0);
        for i in 0..k {
            let next = cumulative[i] + 0.5 * h * (speeds[i] + speeds[(i + 1) % k]);
            cumulative.push(next);
        }
        let total = cumulative[k];
        let psi: Vec<f64> = (0..=k).map(|i| h * i as f64).collect();
        let slopes = pchip_slopes(&cumulative, &psi);

        // the speed is analytic; its spectrum decays fast, so cap and trim the band
        let band = (k / 2 - 1).min(16 * curve.n_modes.max(4));
        let mut coeffs = fourier::dft(&speeds, band);
        let c0 = coeffs[band].re.abs();
        let mut keep = band;
        while keep > 1 && coeffs[band + keep].norm() < 1e-18 * c0 {
            keep -= 1;
        }
        coeffs = fourier::resize_band(&coeffs, keep);
        let anti = fourier::antiderivative_coeffs(&coeffs);
        Self {
            total,
            cumulative,
            slopes,
            anti,
        }
    }

    fn arclength(&self, psi: f64) -> f64 {
        self.total * psi / TWO_PI + fourier::eval_series(&self.anti, psi)
    }

    /// `ψ` with `s(ψ) = target`: monotone cubic interpolation on the
    /// trapezoid table, then Newton on the spectral arclength.
    fn inverse(&self, curve: &Curve, target: f64) -> f64 {
        let s = &self.cumulative;
        let k = s.len() - 1;
        let h = TWO_PI / k as f64;
        let idx = match s.binary_search_by(|v| v.partial_cmp(&target).unwrap()) {
            Ok(i) => i.min(k - 1),
            Err(i) => i.saturating_sub(1).min(k - 1),
        };
        let (s0, s1) = (s[idx], s[idx + 1]);
        let ds = s1 - s0;
        let t = if ds > 0.0 { (target - s0) / ds } else { 0.0 };
        let (p0, p1) = (h * idx as f64, h * (idx + 1) as f64);
        let (m0, m1) = (self.slopes[idx] * ds, self.slopes[idx + 1] * ds);
        let t2 = t * t;
        let t3 = t2 * t;
        let mut psi =
            (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1;
        for _ in 0..8 {
            let v = curve.evaluate_d1(psi).norm();
            let step = (self.arclength(psi) - target) / v;
            psi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        psi
    }
}

/// Fritsch–Carlson slopes for monotone cubic Hermite interpolation of `y(x)`.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut d = vec![0.0; n];
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d
}

/// The constant-speed circle of radius `radius`, placed so that
/// `γ(0) = (1, 0)` and `γ̇(0) = (0, radius)`.
pub fn make_circle(radius: f64, n_modes: usize, grid_size: usize) -> Result<Curve> {
    const OP: &str = "curve_core::make_circle";
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::param(OP, format!("radius must be positive, got {radius}")));
    }
    if n_modes < 1 {
        return Err(Error::param(OP, "n_modes must be at least 1"));
    }
    if grid_size < 4 * n_modes {
        return Err(Error::param(
            OP,
            format!("grid_size {grid_size} < 4·n_modes = {}", 4 * n_modes),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut cx = vec![zero; 2 * n_modes + 1];
    let mut cy = vec![zero; 2 * n_modes + 1];
    let n = n_modes;
    cx[n] = Complex64::new(1.0 - radius, 0.0);
    cx[n + 1] = Complex64::new(radius / 2.0, 0.0);
    cx[n - 1] = Complex64::new(radius / 2.0, 0.0);
    cy[n + 1] = Complex64::new(0.0, -radius / 2.0);
    cy[n - 1] = Complex64::new(0.0, radius / 2.0);
    let mut c = Curve::new(cx, cy, grid_size)?;
    c.speed = radius;
    Ok(c)
}

/// A band-limited vector field along S¹, e.g. a curve perturbation σ.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub coeff_x: Vec<Complex64>,
    pub coeff_y: Vec<Complex64>,
}

impl VectorField {
    pub fn zero() -> Self {
        Self {
            coeff_x: vec![Complex64::new(0.0, 0.0)],
            coeff_y: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn from_samples(points: &[Vec2], n_modes: usize) -> Self {
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        Self {
            coeff_x: fourier::dft(&xs, n_modes),
            coeff_y: fourier::dft(&ys, n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        (self.coeff_x.len() - 1) / 2
    }

    pub fn eval(&self, phi: f64) -> Vec2 {
        Vec2::new(
            fourier::eval_series(&self.coeff_x, phi),
            fourier::eval_series(&self.coeff_y, phi),
        )
    }

    pub fn derivative(&self) -> Self {
        Self {
            coeff_x: fourier::derivative_coeffs(&self.coeff_x, 1),
            coeff_y: fourier::derivative_coeffs(&self.coeff_y, 1),
        }
    }

    pub fn sample(&self, m: usize) -> Vec<Vec2> {
        let xs = fourier::synthesize(&self.coeff_x, m);
        let ys = fourier::synthesize(&self.coeff_y, m);
        xs.into_iter().zip(ys).map(|(x, y)| Vec2::new(x, y)).collect()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            coeff_x: self.coeff_x.iter().map(|c| c * t).collect(),
            coeff_y: self.coeff_y.iter().map(|c| c * t).collect(),
        }
    }

    /// `a·u + b·v` for scalar series `a, b` and vector series `u, v`.
    fn combine(
        a: &[Complex64],
        u: &(Vec<Complex64>, Vec<Complex64>),
        b: &[Complex64],
        v: &(Vec<Complex64>, Vec<Complex64>),
    ) -> Self {
        let ax = fourier::multiply(a, &u.0);
        let ay = fourier::multiply(a, &u.1);
        let bx = fourier::multiply(b, &v.0);
        let by = fourier::multiply(b, &v.1);
        let n = fourier::modes_of(&ax).max(fourier::modes_of(&bx));
        let add = |p: &[Complex64], q: &[Complex64]| -> Vec<Complex64> {
            fourier::resize_band(p, n)
                .iter()
                .zip(fourier::resize_band(q, n))
                .map(|(x, y)| x + y)
                .collect()
        };
        Self {
            coeff_x: add(&ax, &bx),
            coeff_y: add(&ay, &by),
        }
    }
}

/// A perturbation `σ = a·γ̇^⊥ + b·γ̇` along a base curve.
#[derive(Debug, Clone)]
pub struct TangentField {
    pub a: PeriodicFn,
    pub b: PeriodicFn,
    pub base: Curve,
}

impl TangentField {
    /// The field as a band-limited vector series.
    pub fn to_vector_field(&self) -> VectorField {
        let normal = self.base.normal_coeffs();
        let tangent = self.base.tangent_coeffs();
        VectorField::combine(self.a.coeffs(), &normal, self.b.coeffs(), &tangent)
    }

    /// Sup-norm over the grid of the tangent-space conditions:
    /// `ḃ − ḃ(0) + a κ_γ c_γ`, `a(0)`, `b(0)`, `ȧ(0)`.
    ///
    /// With the clockwise `⊥` and counter-clockwise orientation (κ > 0 on the
    /// circle) the constant-speed constraint `⟨σ̇, γ̇⟩ = const` reads
    /// `ḃ = ḃ(0) − a κ c`.
    pub fn tangent_residual(&self) -> f64 {
        let m = self.base.grid_size();
        let db = self.b.derivative();
        let db0 = db.eval(0.0);
        let kc = fourier::synthesize(&self.base.curvature_speed_coeffs(), m);
        let a = self.a.samples();
        let mut worst = 0.0_f64;
        for i in 0..m {
            worst = worst.max((db.samples()[i] - db0 + a[i] * kc[i]).abs());
        }
        let da0 = self.a.derivative().eval(0.0);
        worst
            .max(self.a.eval(0.0).abs())
            .max(self.b.eval(0.0).abs())
            .max(da0.abs())
    }
}

/// Split a sampled field into normal and tangential parts:
/// `a = ⟨σ, γ̇^⊥⟩/|γ̇|²`, `b = ⟨σ, γ̇⟩/|γ̇|²` at each grid point.
pub fn tangent_decompose(base: &Curve, sigma: &[Vec2]) -> Result<TangentField> {
    let m = base.grid_size();
    if sigma.len() != m {
        return Err(Error::param(
            "curve_core::tangent_decompose",
            format!("expected {m} samples, got {}", sigma.len()),
        ));
    }
    let v = base.sample_derivative(1, m);
    let (a, b): (Vec<f64>, Vec<f64>) = sigma
        .iter()
        .zip(&v)
        .map(|(s, d)| {
            let q = d.norm_sq();
            (s.dot(d.perp()) / q, s.dot(*d) / q)
        })
        .unzip();
    Ok(TangentField {
        a: PeriodicFn::from_samples(a),
        b: PeriodicFn::from_samples(b),
        base: base.clone(),
    })
}

/// Reassemble `a·γ̇^⊥ + b·γ̇` on the grid.
pub fn tangent_reassemble(field: &TangentField) -> Vec<Vec2> {
    let m = field.base.grid_size();
    let v = field.base.sample_derivative(1, m);
    v.iter()
        .enumerate()
        .map(|(i, d)| d.perp() * field.a.samples()[i] + *d * field.b.samples()[i])
        .collect()
}

/// Complete a normal field `a` with `a(0) = ȧ(0) = 0` into a tangent vector
/// of the normalized curve space at `base`:
/// `b(φ) = ḃ(0)φ − ∫₀^φ a κ c`, with `ḃ(0) = (1/2π)∫₀^{2π} a κ c` forced by
/// periodicity of `b`. On the unit circle `κ c = 1`.
pub fn lift_normal(a: &PeriodicFn, base: &Curve) -> Result<TangentField> {
    let scale = a.sup_norm().max(1.0);
    let a0 = a.eval(0.0);
    let da0 = a.derivative().eval(0.0);
    if a0.abs() > TOL_LIFT * scale || da0.abs() > TOL_LIFT * scale {
        return Err(Error::Domain {
            op: "curve_core::lift_normal",
            msg: format!("need a(0) = ȧ(0) = 0, got a(0) = {a0:.3e}, ȧ(0) = {da0:.3e}"),
        });
    }
    Ok(lift_normal_unchecked(a, base))
}

/// [`lift_normal`] without the `a(0) = ȧ(0) = 0` check; used to build
/// operator columns for the unconstrained basis.
pub fn lift_normal_unchecked(a: &PeriodicFn, base: &Curve) -> TangentField {
    let f = fourier::multiply(a.coeffs(), &base.curvature_speed_coeffs());
    // ∫₀^φ f = f̂₀ φ + G(φ), G(0) = 0, so b = ḃ(0)φ − f̂₀φ − G = −G.
    let g = fourier::antiderivative_coeffs(&f);
    let b: Vec<Complex64> = g.iter().map(|c| -c).collect();
    TangentField {
        a: a.clone(),
        b: PeriodicFn::from_coeffs(b, base.grid_size()),
        base: base.clone(),
    }
}

/// `ḃ(0)` used by [`lift_normal`]: the mean of `a κ c`.
pub fn lift_slope_at_zero(a: &PeriodicFn, base: &Curve) -> f64 {
    let f = fourier::multiply(a.coeffs(), &base.curvature_speed_coeffs());
    f[fourier::modes_of(&f)].re
}
