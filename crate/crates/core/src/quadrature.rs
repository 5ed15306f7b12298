//! Adaptive Gauss–Legendre quadrature on finite intervals.

use std::sync::OnceLock;

/// Points per panel.
pub const GL_ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;

/// Nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn panel<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, buf: &mut [f64], out: &mut [f64]) {
    let (x, w) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    out.iter_mut().for_each(|v| *v = 0.0);
    for (xi, wi) in x.iter().zip(w) {
        f(mid + half * xi, buf);
        for (o, v) in out.iter_mut().zip(buf.iter()) {
            *o += wi * half * v;
        }
    }
}

/// Integrate a vector-valued integrand of dimension `dim` over `[a, b]`.
///
/// Panels are bisected until the 2-panel and 1-panel estimates agree to `tol`
/// (max over components) on each piece, with `tol` shared proportionally to
/// panel length. Summation order is fixed, so results are reproducible.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(mut f: F, a: f64, b: f64, dim: usize, tol: f64) -> Vec<f64> {
    let mut total = vec![0.0; dim];
    if a == b {
        return total;
    }
    let mut buf = vec![0.0; dim];
    let mut whole = vec![0.0; dim];
    panel(&mut f, a, b, &mut buf, &mut whole);
    let len = (b - a).abs();
    recurse(&mut f, a, b, whole, tol, len, 0, &mut buf, &mut total);
    total
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: Vec<f64>,
    tol: f64,
    len: f64,
    depth: u32,
    buf: &mut [f64],
    total: &mut [f64],
) {
    let dim = whole.len();
    let c = 0.5 * (a + b);
    let mut left = vec![0.0; dim];
    let mut right = vec![0.0; dim];
    panel(f, a, c, buf, &mut left);
    panel(f, c, b, buf, &mut right);
    let err = whole
        .iter()
        .zip(left.iter().zip(&right))
        .fold(0.0_f64, |m, (w, (l, r))| m.max((w - l - r).abs()));
    let local_tol = tol * ((b - a).abs() / len).max(1e-3);
    if err <= local_tol || depth >= MAX_DEPTH {
        for (t, (l, r)) in total.iter_mut().zip(left.iter().zip(&right)) {
            *t += l + r;
        }
        return;
    }
    recurse(f, a, c, left, tol, len, depth + 1, buf, total);
    recurse(f, c, b, right, tol, len, depth + 1, buf, total);
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_vec(|x, out| out[0] = f(x), a, b, 1, tol)[0]
}
