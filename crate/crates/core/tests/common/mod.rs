#![allow(dead_code)]

use circinv_core::reconstruct::{random_admissible_curve, PerturbationSpec};
use circinv_core::{Curve, VectorField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized near-circle with radial modes `min_mode..=max_mode`.
pub fn near_circle(rng: &mut ChaCha8Rng, amplitude: f64, min_mode: usize, radii: &[f64]) -> Curve {
    near_circle_with_band(rng, amplitude, min_mode, radii, 32)
}

pub fn near_circle_with_band(
    rng: &mut ChaCha8Rng,
    amplitude: f64,
    min_mode: usize,
    radii: &[f64],
    n_modes: usize,
) -> Curve {
    let spec = PerturbationSpec {
        min_mode,
        n_modes,
        ..PerturbationSpec::new(amplitude, 8)
    };
    random_admissible_curve(rng, &spec, radii).expect("admissible curve")
}

/// Smooth random vector field with modes up to `band`, coefficients decaying like 1/j².
pub fn random_field(rng: &mut ChaCha8Rng, band: usize) -> VectorField {
    let draw = |rng: &mut ChaCha8Rng| {
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
    let coeff_x = draw(rng);
    let coeff_y = draw(rng);
    VectorField { coeff_x, coeff_y }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
