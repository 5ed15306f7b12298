//! Planar primitives: 2-vectors, polygon area, segment tests and the exact
//! area of a disk intersected with a simple polygon.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// `x₁y₂ − y₁x₂`; equals `⟨self, o^⊥⟩`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Clockwise quarter turn `(x, y) ↦ (y, −x)`. For a counter-clockwise
    /// curve, `γ̇^⊥` is the outward normal.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Rotate counter-clockwise by `angle`.
    #[inline]
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, t: f64) -> Vec2 {
        Vec2::new(self.x * t, self.y * t)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// Shoelace area, positive for counter-clockwise vertex order.
pub fn polygon_signed_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * acc
}

/// Distance between segments `[a, b]` and `[c, d]`; zero when they cross.
pub fn segment_distance(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d3 != 0.0
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}

/// Smallest distance between two non-adjacent edges of a closed polygon.
/// Returns 0 when two edges cross.
pub fn min_nonadjacent_edge_distance(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    let edge = |i: usize| (vertices[i], vertices[(i + 1) % n]);
    let boxes: Vec<(Vec2, Vec2)> = (0..n)
        .map(|i| {
            let (a, b) = edge(i);
            (
                Vec2::new(a.x.min(b.x), a.y.min(b.y)),
                Vec2::new(a.x.max(b.x), a.y.max(b.y)),
            )
        })
        .collect();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (lo_i, hi_i) = boxes[i];
            let (lo_j, hi_j) = boxes[j];
            let gap_x = (lo_j.x - hi_i.x).max(lo_i.x - hi_j.x).max(0.0);
            let gap_y = (lo_j.y - hi_i.y).max(lo_i.y - hi_j.y).max(0.0);
            if gap_x.hypot(gap_y) >= best {
                continue;
            }
            let (a, b) = edge(i);
            let (c, d) = edge(j);
            best = best.min(segment_distance(a, b, c, d));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

/// Signed area of `disk(0, r) ∩ triangle(0, a, b)`, positive when `a → b`
/// turns counter-clockwise about the origin.
///
/// The edge is split at its crossings with the circle; pieces inside the disk
/// contribute triangle areas, pieces outside contribute circular sectors.
pub fn disk_triangle_area(a: Vec2, b: Vec2, r: f64) -> f64 {
    let r2 = r * r;
    let d = b - a;
    let qa = d.norm_sq();
    if qa == 0.0 {
        return 0.0;
    }
    // |a + t d|² = r²
    let qb = 2.0 * a.dot(d);
    let qc = a.norm_sq() - r2;
    let mut cuts = [0.0, 1.0, 1.0, 1.0];
    let mut n_cuts = 1;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc > 0.0 {
        let sq = disc.sqrt();
        // numerically stable roots
        let q = -0.5 * (qb + qb.signum() * sq);
        let (mut t1, mut t2) = if q != 0.0 { (q / qa, qc / q) } else { (0.0, 0.0) };
        if t1 > t2 {
            std::mem::swap(&mut t1, &mut t2);
        }
        for t in [t1, t2] {
            if t > 0.0 && t < 1.0 {
                cuts[n_cuts] = t;
                n_cuts += 1;
            }
        }
    }
    cuts[n_cuts] = 1.0;
    let mut area = 0.0;
    for k in 0..n_cuts {
        let (t0, t1) = (cuts[k], cuts[k + 1]);
        if t1 <= t0 {
            continue;
        }
        let p = a + d * t0;
        let q = a + d * t1;
        let mid = a + d * (0.5 * (t0 + t1));
        if mid.norm_sq() <= r2 {
            area += 0.5 * p.cross(q);
        } else {
            area += 0.5 * r2 * p.cross(q).atan2(p.dot(q));
        }
    }
    area
}

/// Exact area of `disk(center, r) ∩ polygon` for a simple polygon with
/// counter-clockwise vertex order.
pub fn disk_polygon_area(vertices: &[Vec2], center: Vec2, r: f64) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i] - center;
        let b = vertices[(i + 1) % n] - center;
        acc += disk_triangle_area(a, b, r);
    }
    acc
}

/// Area of the lens `disk(0, big) ∩ disk((d, 0), small)`.
pub fn lens_area(big: f64, small: f64, d: f64) -> f64 {
    if d >= big + small {
        return 0.0;
    }
    if d <= (big - small).abs() {
        let m = big.min(small);
        return PI * m * m;
    }
    let a_small = ((d * d + small * small - big * big) / (2.0 * d * small))
        .clamp(-1.0, 1.0)
        .acos();
    let a_big = ((d * d + big * big - small * small) / (2.0 * d * big))
        .clamp(-1.0, 1.0)
        .acos();
    let k = (-d + small + big) * (d + small - big) * (d - small + big) * (d + small + big);
    small * small * a_small + big * big * a_big - 0.5 * k.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec2> {
        vec![
            Vec2::new(-1.0, -1.0),
            Vec2::new(1.0, -1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, 1.0),
        ]
    }

    #[test]
    fn perp_is_clockwise() {
        let t = Vec2::new(0.0, 1.0);
        assert_eq!(t.perp(), Vec2::new(1.0, 0.0));
        let u = Vec2::new(0.3, -0.7);
        assert_eq!(u.dot(t.perp()), u.cross(t));
    }

    #[test]
    fn disk_inside_square() {
        let a = disk_polygon_area(&square(), Vec2::ZERO, 0.5);
        assert!((a - PI * 0.25).abs() < 1e-14);
    }

    #[test]
    fn square_inside_disk() {
        let a = disk_polygon_area(&square(), Vec2::ZERO, 2.0);
        assert!((a - 4.0).abs() < 1e-14);
    }

    #[test]
    fn disk_centered_on_corner() {
        let a = disk_polygon_area(&square(), Vec2::new(1.0, 1.0), 0.5);
        assert!((a - PI * 0.25 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn disk_centered_on_edge() {
        let a = disk_polygon_area(&square(), Vec2::new(1.0, 0.0), 0.5);
        assert!((a - PI * 0.25 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn disk_overhanging_edge() {
        // square [-1, 1]², centered disk with 1 < r < √2 crosses all four edges
        let r: f64 = 1.2;
        let a = disk_polygon_area(&square(), Vec2::ZERO, r);
        // disk minus four circular segments beyond |x| = 1
        let h = 1.0 / r;
        let seg = r * r * (h.acos() - h * (1.0 - h * h).sqrt());
        assert!((a - (PI * r * r - 4.0 * seg)).abs() < 1e-13);
    }

    #[test]
    fn lens_of_unit_circles() {
        let exact = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((lens_area(1.0, 1.0, 1.0) - exact).abs() < 1e-15);
    }

    #[test]
    fn crossing_edges_have_zero_distance() {
        let bowtie = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        assert_eq!(min_nonadjacent_edge_distance(&bowtie), 0.0);
        assert!(min_nonadjacent_edge_distance(&square()) > 1.9);
    }
}
