//! The circular integral invariant `I_r[γ](φ) = area(B_r(γ(φ)) ∩ inn γ)`:
//! intersection parameters, the analytic chord/arc formula, and an
//! independent polygon oracle.

use rayon::prelude::*;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::fourier::{PeriodicFn, TWO_PI};
use crate::geometry::{disk_polygon_area, polygon_signed_area, Vec2};
use crate::quadrature;

/// Newton stopping threshold on `|g|`, relative to `r²`.
pub const TOL_ROOT: f64 = 1e-12;
/// Absolute tolerance of the chord integral.
pub const TOL_CHORD: f64 = 1e-14;
const MAX_NEWTON: usize = 50;
const ARCCOS_SLACK: f64 = 1e-12;
const TANGENCY: f64 = 1e-10;

/// Half-width of the arc of a radius-`big_r` circle cut out by a disk of
/// radius `r` centered on it: `arccos(1 − r²/(2R²))`.
pub fn theta_circle(r: f64, big_r: f64) -> Result<f64> {
    const OP: &str = "invariant::theta_circle";
    if !(r > 0.0) || !(big_r > 0.0) {
        return Err(Error::param(
            OP,
            format!("radii must be positive (r = {r}, R = {big_r})"),
        ));
    }
    if r >= 2.0 * big_r {
        return Err(Error::Domain {
            op: OP,
            msg: format!(
                "r = {r} ≥ 2R = {}: the disk swallows the circle and the invariant is constant",
                2.0 * big_r
            ),
        });
    }
    Ok((1.0 - r * r / (2.0 * big_r * big_r)).acos())
}

/// Parameters of the circle/curve crossings before (`m`) and after (`p`)
/// the center parameter, lifted so that `φ − π < m < φ < p < φ + π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionPair {
    pub m: f64,
    pub p: f64,
}

/// Solve `|γ(d) − γ(φ)|² = r²` for the forward and backward crossings by
/// Newton's method, seeded from `hint` or from the circle value `φ ± θ`.
pub fn intersection_params(
    curve: &Curve,
    r: f64,
    phi: f64,
    hint: Option<IntersectionPair>,
) -> Result<IntersectionPair> {
    const OP: &str = "invariant::intersection_params";
    if !(r > 0.0) {
        return Err(Error::param(OP, format!("r must be positive, got {r}")));
    }
    let (m0, p0) = match hint {
        Some(h) => (h.m, h.p),
        None => {
            let th = theta_circle(r, curve.speed()).map_err(|_| Error::Topology {
                op: OP,
                msg: format!("r = {r} exceeds the curve diameter scale"),
            })?;
            (phi - th, phi + th)
        }
    };
    let center = curve.evaluate(phi);
    let p = newton_root(curve, center, r, p0)?;
    let m = newton_root(curve, center, r, m0)?;
    if !(p > phi && p < phi + std::f64::consts::PI) {
        return Err(Error::Topology {
            op: OP,
            msg: format!("forward crossing p = {p:.6} outside (φ, φ+π) at φ = {phi:.6}"),
        });
    }
    if !(m < phi && m > phi - std::f64::consts::PI) {
        return Err(Error::Topology {
            op: OP,
            msg: format!("backward crossing m = {m:.6} outside (φ−π, φ) at φ = {phi:.6}"),
        });
    }
    Ok(IntersectionPair { m, p })
}

fn newton_root(curve: &Curve, center: Vec2, r: f64, seed: f64) -> Result<f64> {
    let tol = TOL_ROOT * r * r;
    let mut d = seed;
    for it in 0..MAX_NEWTON {
        let (pos, vel) = curve.pos_d1(d);
        let u = pos - center;
        let g = u.norm_sq() - r * r;
        let dg = 2.0 * u.dot(vel);
        if g.abs() <= tol {
            // one more step takes the root to machine precision
            if dg != 0.0 {
                let step = g / dg;
                if step.abs() < 1e-6 {
                    d -= step;
                }
            }
            return Ok(d);
        }
        if dg == 0.0 || !dg.is_finite() {
            return Err(Error::Convergence {
                op: "invariant::intersection_params",
                iterations: it,
                msg: format!("vanishing derivative at d = {d:.6}"),
            });
        }
        d -= g / dg;
    }
    Err(Error::Convergence {
        op: "invariant::intersection_params",
        iterations: MAX_NEWTON,
        msg: format!("|g| above {tol:.1e} from seed {seed:.6}"),
    })
}

/// Number of transversal crossings of the circle `|x − γ(φ)| = r` with the
/// curve, and whether any crossing was nearly tangential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingCount {
    pub count: usize,
    pub unreliable: bool,
}

/// Counts circle/curve crossings from a cached fine sampling of the curve.
pub struct IntersectionCounter<'a> {
    curve: &'a Curve,
    r: f64,
    fine: Vec<Vec2>,
}

impl<'a> IntersectionCounter<'a> {
    pub fn new(curve: &'a Curve, r: f64) -> Self {
        Self {
            curve,
            r,
            fine: curve.sample_points(8 * curve.grid_size()),
        }
    }

    /// Count at an arbitrary center parameter.
    pub fn count(&self, phi: f64) -> CrossingCount {
        let k = self.fine.len();
        let center = self.curve.evaluate(phi);
        let h = TWO_PI / k as f64;
        // start the scan at the fine sample at or after φ
        let start = (phi.rem_euclid(TWO_PI) / h).ceil() as usize;
        let r2 = self.r * self.r;
        // same sign as |x − center| − r
        let dist = |j: usize| (self.fine[(start + j) % k] - center).norm_sq() - r2;
        let psi = |j: usize| (start + j) as f64 * h;
        let mut count = 0;
        let mut unreliable = false;
        let mut prev = dist(0);
        for j in 1..=k {
            let cur = if j == k { -r2 } else { dist(j) };
            if (prev < 0.0) != (cur < 0.0) {
                count += 1;
                let hi = if j == k { phi + TWO_PI } else { psi(j) };
                let root = self.refine(center, psi(j - 1), hi);
                let (pos, vel) = self.curve.pos_d1(root);
                let u = pos - center;
                let slope = u.dot(vel) / u.norm().max(f64::MIN_POSITIVE);
                if slope.abs() < TANGENCY * self.curve.speed().max(1.0) {
                    unreliable = true;
                }
            }
            prev = cur;
        }
        CrossingCount { count, unreliable }
    }

    /// Root of `|γ(t) − center|² = r²` in a one-step bracket: linear
    /// interpolation, then Newton steps kept inside the bracket.
    fn refine(&self, center: Vec2, lo: f64, hi: f64) -> f64 {
        let r2 = self.r * self.r;
        let g = |t: f64| (self.curve.evaluate(t) - center).norm_sq() - r2;
        let (glo, ghi) = (g(lo), g(hi));
        let mut t = if glo != ghi {
            lo + (hi - lo) * glo / (glo - ghi)
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..4 {
            let (pos, vel) = self.curve.pos_d1(t);
            let u = pos - center;
            let dg = 2.0 * u.dot(vel);
            if dg == 0.0 {
                break;
            }
            t = (t - (u.norm_sq() - r2) / dg).clamp(lo, hi);
        }
        t
    }
}

/// Crossings of the radius-`r` circle about `γ(φ)` with `γ`.
pub fn intersection_count(curve: &Curve, r: f64, phi: f64) -> CrossingCount {
    IntersectionCounter::new(curve, r).count(phi)
}

/// `I_r` on the curve's grid together with the crossing parameters.
#[derive(Debug, Clone)]
pub struct InvariantProfile {
    pub r: f64,
    pub values: PeriodicFn,
    pub pairs: Vec<IntersectionPair>,
    pub n_modes: usize,
}

impl InvariantProfile {
    pub fn grid_size(&self) -> usize {
        self.values.grid_size()
    }
}

/// Verify that every grid disk crosses the curve exactly twice.
pub fn check_two_crossings(curve: &Curve, r: f64) -> Result<()> {
    let counter = IntersectionCounter::new(curve, r);
    let m = curve.grid_size();
    let bad = (0..m)
        .into_par_iter()
        .map(|i| (i, counter.count(curve.grid_angle(i))))
        .find_first(|(_, c)| c.count != 2 || c.unreliable);
    if let Some((i, c)) = bad {
        return Err(Error::Topology {
            op: "invariant::intersection_count",
            msg: format!(
                "{} crossing(s){} at φ = {:.6}",
                c.count,
                if c.unreliable { " (near-tangential)" } else { "" },
                curve.grid_angle(i)
            ),
        });
    }
    Ok(())
}

/// Crossing pairs at every grid point, by continuation from `φ_0`.
pub fn intersection_pairs(curve: &Curve, r: f64) -> Result<Vec<IntersectionPair>> {
    let m = curve.grid_size();
    let step = TWO_PI / m as f64;
    let mut pairs = Vec::with_capacity(m);
    let mut prev: Option<IntersectionPair> = None;
    for i in 0..m {
        let hint = prev.map(|q| IntersectionPair {
            m: q.m + step,
            p: q.p + step,
        });
        let pair = intersection_params(curve, r, curve.grid_angle(i), hint)?;
        prev = Some(pair);
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Chord-plus-arc value at one center: half the integral of
/// `det(γ(ψ) − γ(φ), γ̇(ψ))` over `[m, p]` plus half `r²` times the angle of
/// the disk boundary arc that lies inside the curve.
pub fn invariant_at(curve: &Curve, r: f64, phi: f64, pair: IntersectionPair) -> Result<f64> {
    let center = curve.evaluate(phi);
    let chord = quadrature::integrate(
        |psi| {
            let (pos, vel) = curve.pos_d1(psi);
            (pos - center).cross(vel)
        },
        pair.m,
        pair.p,
        TOL_CHORD,
    );
    let u = curve.evaluate(pair.p) - center;
    let w = curve.evaluate(pair.m) - center;
    Ok(0.5 * chord + 0.5 * r * r * inside_arc_angle(u, w, r)?)
}

/// Counter-clockwise angle from `u` to `w` (both of length `r`), in `(0, 2π)`:
/// `arccos(⟨u, w⟩/r²)`, reflected to `2π − arccos` when the turn is clockwise.
pub fn inside_arc_angle(u: Vec2, w: Vec2, r: f64) -> Result<f64> {
    let c = u.dot(w) / (r * r);
    if !(c.abs() <= 1.0 + ARCCOS_SLACK) {
        return Err(Error::Consistency {
            op: "invariant::invariant_analytic",
            msg: format!("arccos argument {c:.15} outside [−1, 1]"),
        });
    }
    let a = c.clamp(-1.0, 1.0).acos();
    Ok(if u.cross(w) < 0.0 { TWO_PI - a } else { a })
}

/// `I_r[γ]` at every grid point from the analytic formula. Fails with a
/// topology error unless every grid disk crosses the curve exactly twice.
pub fn invariant_analytic(curve: &Curve, r: f64) -> Result<InvariantProfile> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param(
            "invariant::invariant_analytic",
            format!("r must be positive, got {r}"),
        ));
    }
    check_two_crossings(curve, r)?;
    let pairs = intersection_pairs(curve, r)?;
    let values = (0..curve.grid_size())
        .into_par_iter()
        .map(|i| invariant_at(curve, r, curve.grid_angle(i), pairs[i]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(InvariantProfile {
        r,
        values: PeriodicFn::from_samples(values),
        pairs,
        n_modes: curve.n_modes(),
    })
}

/// Counter-clockwise polygon with `16·M` vertices inscribed in the curve.
fn oracle_polygon(curve: &Curve) -> Result<Vec<Vec2>> {
    let mut poly = curve.sample_points(16 * curve.grid_size());
    let area = polygon_signed_area(&poly);
    if !area.is_finite() || area.abs() < 1e-14 * curve.speed().powi(2) {
        return Err(Error::Geometry {
            op: "invariant::invariant_oracle",
            msg: format!("degenerate polygon (area {area:.3e})"),
        });
    }
    if area < 0.0 {
        poly.reverse();
    }
    Ok(poly)
}

/// Area of the disk of radius `r` about `γ(φ)` intersected with the polygon
/// inscribed in the curve; exact for the polygon, `O(M⁻²)` from the curve.
pub fn invariant_oracle(curve: &Curve, r: f64, phi: f64) -> Result<f64> {
    let poly = oracle_polygon(curve)?;
    Ok(disk_polygon_area(&poly, curve.evaluate(phi), r))
}

/// [`invariant_oracle`] at every grid point.
pub fn invariant_oracle_profile(curve: &Curve, r: f64) -> Result<Vec<f64>> {
    let poly = oracle_polygon(curve)?;
    Ok((0..curve.grid_size())
        .into_par_iter()
        .map(|i| disk_polygon_area(&poly, curve.evaluate(curve.grid_angle(i)), r))
        .collect())
}

/// Largest deviations observed by [`invariance_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    /// `max |I_r[g∘γ] − I_r[γ]|`
    pub rigid: f64,
    /// `max |I_r[γ∘Φ] − I_r[γ]∘Φ|`
    pub reparam: f64,
    /// `max |I_r[tγ] − t² I_{r/t}[γ]|`
    pub scaling: f64,
}

impl InvarianceReport {
    pub fn max(&self) -> f64 {
        self.rigid.max(self.reparam).max(self.scaling)
    }
}

/// Transformations exercised by [`invariance_suite`].
#[derive(Debug, Clone, Copy)]
pub struct Transforms {
    pub angle: f64,
    pub translation: Vec2,
    /// reparameterization shift, in grid steps
    pub shift: usize,
    pub scale: f64,
}

impl Default for Transforms {
    fn default() -> Self {
        Self {
            angle: 0.7,
            translation: Vec2::new(3.0, -2.0),
            shift: 17,
            scale: 2.0,
        }
    }
}

/// Check Euclidean invariance, reparameterization equivariance for grid
/// shifts, and the scaling law of the invariant on one curve.
pub fn invariance_suite(curve: &Curve, r: f64, t: &Transforms) -> Result<InvarianceReport> {
    let base = invariant_analytic(curve, r)?;
    let base = base.values.samples();
    let m = curve.grid_size();
    let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));

    let moved = invariant_analytic(&curve.rigid_motion(t.angle, t.translation), r)?;
    let rigid = max_diff(moved.values.samples(), base);

    let shift = t.shift % m;
    let shifted = invariant_analytic(&curve.reparam_shift(TWO_PI * shift as f64 / m as f64), r)?;
    let expected: Vec<f64> = (0..m).map(|i| base[(i + shift) % m]).collect();
    let reparam = max_diff(shifted.values.samples(), &expected);

    let big = invariant_analytic(&curve.scaled(t.scale), r)?;
    let small = invariant_analytic(curve, r / t.scale)?;
    let t2 = t.scale * t.scale;
    let law: Vec<f64> = small.values.samples().iter().map(|v| t2 * v).collect();
    let scaling = max_diff(big.values.samples(), &law);

    Ok(InvarianceReport {
        rigid,
        reparam,
        scaling,
    })
}
