//! Circular integral invariants of closed planar curves.
//!
//! For a simple closed curve `γ` and radius `r`, `I_r[γ](φ)` is the area of the
//! disk of radius `r` about `γ(φ)` that lies inside the curve. This crate
//! computes it two ways (a chord/arc formula driven by the crossing
//! parameters, and an exact disk-polygon oracle), linearizes it, analyses the
//! linearization at the circle, and inverts it near the circle.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod derivative;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod invariant;
pub mod io;
pub mod quadrature;
pub mod reconstruct;

pub use curve::{
    lift_normal, lift_normal_unchecked, make_circle, tangent_decompose, tangent_reassemble, Curve, Jet, TangentField,
    VectorField,
};
pub use derivative::{
    assemble_operator, circle_derivative, frechet_derivative, frechet_derivative_tangent, injectivity_margin,
    sine_inequality_check, spectrum_d, Basis, DerivativeContext, OperatorMatrix, SineReport, Spectrum,
};
pub use error::{Error, Result};
pub use fourier::PeriodicFn;
pub use geometry::Vec2;
pub use invariant::{
    intersection_count, intersection_params, invariance_suite, invariant_analytic, invariant_oracle,
    invariant_oracle_profile, theta_circle, CrossingCount, IntersectionPair, InvarianceReport, InvariantProfile,
    Transforms,
};
pub use reconstruct::{
    reconstruct, stability_estimate, PerturbationSpec, ReconstructFailure, Reconstruction, ReconstructionProblem,
    StabilityConfig, StabilityReport, TraceEntry,
};
