//! Truncated Fourier series on S¹ and the sampled periodic functions built on them.
//!
//! A band-limited coefficient vector stores modes `-n..=n` at indices `0..=2n`
//! (mode `j` lives at index `j + n`). All real-valued functions are kept
//! Hermitian-symmetric, `c_{-j} = conj(c_j)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// `φ_i = 2πi/m`.
#[inline]
pub fn grid_angle(i: usize, m: usize) -> f64 {
    TWO_PI * i as f64 / m as f64
}

#[inline]
pub(crate) fn modes_of(coeffs: &[Complex64]) -> usize {
    debug_assert!(coeffs.len() % 2 == 1);
    (coeffs.len() - 1) / 2
}

/// Unit roots `e^{2πik/m}` computed directly (no recurrence drift).
pub(crate) fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m).map(|k| Complex64::from_polar(1.0, grid_angle(k, m))).collect()
}

/// Fourier coefficients of uniform samples, modes `-n..=n`.
///
/// When `n == m/2` (full band, even `m`) the Nyquist coefficient is split
/// evenly between `±m/2`, which keeps samples exactly reproducible.
pub fn dft(samples: &[f64], n: usize) -> Vec<Complex64> {
    let m = samples.len();
    assert!(m > 0 && 2 * n <= m, "band {n} not resolved by {m} samples");
    let roots = roots_of_unity(m);
    let scale = 1.0 / m as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for j in 0..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &s) in samples.iter().enumerate() {
            // e^{-ijφ_i}
            acc += roots[(m - (j * i) % m) % m] * s;
        }
        let mut c = acc * scale;
        if 2 * j == m {
            c = Complex64::new(c.re * 0.5, 0.0);
        }
        out[n + j] = c;
        out[n - j] = c.conj();
    }
    out[n] = Complex64::new(out[n].re, 0.0);
    out
}

/// Evaluate a real Hermitian series at `m` uniform grid points.
pub fn synthesize(coeffs: &[Complex64], m: usize) -> Vec<f64> {
    let n = modes_of(coeffs);
    let roots = roots_of_unity(m);
    (0..m)
        .map(|i| {
            let mut acc = coeffs[n].re;
            for j in 1..=n {
                acc += 2.0 * (coeffs[n + j] * roots[(j * i) % m]).re;
            }
            acc
        })
        .collect()
}

/// Evaluate a real Hermitian series at an arbitrary angle.
pub fn eval_series(coeffs: &[Complex64], phi: f64) -> f64 {
    let n = modes_of(coeffs);
    let z = Complex64::from_polar(1.0, phi);
    let mut zj = Complex64::new(1.0, 0.0);
    let mut acc = coeffs[n].re;
    for j in 1..=n {
        zj *= z;
        acc += 2.0 * (coeffs[n + j] * zj).re;
    }
    acc
}

/// Coefficients of the `order`-th derivative.
pub fn derivative_coeffs(coeffs: &[Complex64], order: u32) -> Vec<Complex64> {
    let n = modes_of(coeffs) as i64;
    coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let j = k as i64 - n;
            c * Complex64::new(0.0, j as f64).powu(order)
        })
        .collect()
}

/// Coefficients of the product of two series (band `n_a + n_b`).
pub fn multiply(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let na = modes_of(a);
    let nb = modes_of(b);
    let n = na + nb;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for (ka, &ca) in a.iter().enumerate() {
        if ca == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (kb, &cb) in b.iter().enumerate() {
            out[ka + kb] += ca * cb;
        }
    }
    out
}

/// Zero-pad or truncate to band `n`.
pub fn resize_band(coeffs: &[Complex64], n: usize) -> Vec<Complex64> {
    let old = modes_of(coeffs);
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    let keep = old.min(n);
    for j in 0..=keep {
        out[n + j] = coeffs[old + j];
        out[n - j] = coeffs[old - j];
    }
    out
}

/// Periodic antiderivative of the zero-mean part, normalized to vanish at 0.
///
/// For `f = c_0 + g` this returns `G` with `G' = g`, `G(0) = 0`, so that
/// `∫₀^φ f = c_0 φ + G(φ)`.
pub fn antiderivative_coeffs(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = modes_of(coeffs) as i64;
    let mut out: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let j = k as i64 - n;
            if j == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                c / Complex64::new(0.0, j as f64)
            }
        })
        .collect();
    let at_zero: f64 = out.iter().map(|c| c.re).sum();
    out[n as usize] = Complex64::new(-at_zero, 0.0);
    out
}

/// Coefficients in the real basis `1, cos φ, sin φ, cos 2φ, sin 2φ, …` up to mode `k`.
pub fn to_real_basis(coeffs: &[Complex64], k: usize) -> Vec<f64> {
    let n = modes_of(coeffs);
    let mut out = Vec::with_capacity(2 * k + 1);
    out.push(coeffs[n].re);
    for j in 1..=k {
        if j <= n {
            out.push(2.0 * coeffs[n + j].re);
            out.push(-2.0 * coeffs[n + j].im);
        } else {
            out.push(0.0);
            out.push(0.0);
        }
    }
    out
}

/// Inverse of [`to_real_basis`]; `real.len()` must be odd.
pub fn from_real_basis(real: &[f64]) -> Vec<Complex64> {
    assert!(real.len() % 2 == 1);
    let k = (real.len() - 1) / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
    out[k] = Complex64::new(real[0], 0.0);
    for j in 1..=k {
        let c = Complex64::new(real[2 * j - 1], -real[2 * j]) * 0.5;
        out[k + j] = c;
        out[k - j] = c.conj();
    }
    out
}

/// A real function on S¹ held both as `m` uniform samples and as its
/// Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFn {
    samples: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl PeriodicFn {
    /// Full-band interpolant of the samples (modes up to `m/2`).
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let n = samples.len() / 2;
        let coeffs = dft(&samples, n);
        Self { samples, coeffs }
    }

    /// Band-limited projection of the samples onto modes `-n..=n`; the stored
    /// samples are re-synthesized from the truncated coefficients.
    pub fn from_samples_truncated(samples: &[f64], n: usize) -> Self {
        let coeffs = dft(samples, n);
        Self::from_coeffs(coeffs, samples.len())
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>, m: usize) -> Self {
        let samples = synthesize(&coeffs, m);
        Self { samples, coeffs }
    }

    /// Sample a closure on the `m`-point grid and interpolate.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::from_samples((0..m).map(|i| f(grid_angle(i, m))).collect())
    }

    pub fn zeros(m: usize) -> Self {
        Self::from_coeffs(vec![Complex64::new(0.0, 0.0)], m)
    }

    /// From coefficients in the real cosine/sine basis.
    pub fn from_real_basis(real: &[f64], m: usize) -> Self {
        Self::from_coeffs(from_real_basis(real), m)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n_modes(&self) -> usize {
        modes_of(&self.coeffs)
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn eval(&self, phi: f64) -> f64 {
        eval_series(&self.coeffs, phi)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(derivative_coeffs(&self.coeffs, 1), self.grid_size())
    }

    /// Mean value over one period.
    pub fn mean(&self) -> f64 {
        self.coeffs[self.n_modes()].re
    }

    pub fn real_basis(&self, k: usize) -> Vec<f64> {
        to_real_basis(&self.coeffs, k)
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Discrete C^k norm: max over derivative orders `0..=k` of the sup-norm
    /// on the sample grid, derivatives taken spectrally.
    pub fn ck_norm(&self, k: u32) -> f64 {
        (0..=k)
            .map(|order| {
                let d = derivative_coeffs(&self.coeffs, order);
                synthesize(&d, self.grid_size())
                    .into_iter()
                    .fold(0.0_f64, |m, v| m.max(v.abs()))
            })
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * t).collect(),
            coeffs: self.coeffs.iter().map(|c| c * t).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid_size() != other.grid_size() {
            return Err(Error::param(
                "fourier::PeriodicFn",
                format!("grid mismatch: {} vs {}", self.grid_size(), other.grid_size()),
            ));
        }
        let n = self.n_modes().max(other.n_modes());
        let a = resize_band(&self.coeffs, n);
        let b = resize_band(&other.coeffs, n);
        let coeffs = a
            .iter()
            .zip(&b)
            .map(|(x, y)| Complex64::new(f(x.re, y.re), f(x.im, y.im)))
            .collect();
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&x, &y)| f(x, y))
            .collect();
        Ok(Self { samples, coeffs })
    }

    /// Shift by `s` grid steps: `g(φ_i) = f(φ_{i+s})`.
    pub fn shift_grid(&self, s: usize) -> Self {
        let m = self.grid_size();
        let samples = (0..m).map(|i| self.samples[(i + s) % m]).collect();
        let n = self.n_modes() as i64;
        let shift = grid_angle(s % m, m);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * Complex64::from_polar(1.0, (k as i64 - n) as f64 * shift))
            .collect();
        Self { samples, coeffs }
    }
}
