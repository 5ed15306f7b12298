//! Fixtures shared by the benchmarks. Deterministic, no RNG.

use circinv_core::reconstruct::perturbed_circle;
use circinv_core::{Curve, PeriodicFn, Vec2, VectorField};

/// Normalized circle with a fixed mode-3 and mode-5 radial ripple.
pub fn rippled_circle(n_modes: usize, grid_size: usize) -> Curve {
    let a = PeriodicFn::from_fn(grid_size, |x| 0.02 * (3.0 * x).cos() + 0.01 * (5.0 * x).sin());
    perturbed_circle(&a, n_modes).expect("fixture curve is admissible")
}

/// A smooth vector field with a handful of low modes.
pub fn smooth_field(grid_size: usize) -> VectorField {
    let pts: Vec<Vec2> = (0..grid_size)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / grid_size as f64;
            Vec2::new(0.3 * (2.0 * t).cos() - 0.1, 0.2 * t.sin() + 0.05 * (4.0 * t).cos())
        })
        .collect();
    VectorField::from_samples(&pts, 8)
}
