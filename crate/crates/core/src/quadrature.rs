//! Adaptive Gauss–Legendre quadrature for complex-valued integrands.

use std::sync::OnceLock;

use num_complex::Complex64;

/// Default order of the fixed rule applied on every panel.
pub const DEFAULT_ORDER: usize = 32;
/// Default relative tolerance for adaptive bisection.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_PANELS: usize = 200_000;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Fixed-rule estimate of `∫_a^b f`.
    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// The shared 32-point rule.
pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(DEFAULT_ORDER))
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Adaptive bisection of `∫_a^b f` until each panel's one-level and
/// two-level estimates differ by less than `tol · max(1, |panel|)`.
///
/// `breaks` seeds the initial partition (points outside `(a, b)` are ignored).
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    breaks: &[f64],
) -> Integral {
    let rule = gl32();
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut stack: Vec<(f64, f64, Complex64)> = pts
        .windows(2)
        .map(|w| (w[0], w[1], rule.apply(f, w[0], w[1])))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.apply(f, lo, mid);
        let right = rule.apply(f, mid, hi);
        let split = left + right;
        let diff = (split - whole).norm();
        let width_floor = 1e-14 * lo.abs().max(hi.abs()).max(1.0);
        if diff <= tol * split.norm().max(1.0) || hi - lo < width_floor || panels > MAX_PANELS {
            total += split;
            err += diff;
            panels += 1;
        } else {
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
    }
    Integral {
        value: total,
        error_estimate: err,
        panels,
    }
}

/// Breakpoints graded geometrically toward `focus`, starting at distance `d`,
/// so that an integrand peaked on the scale `d` is resolved from the first pass.
pub fn graded_breaks(a: f64, b: f64, focus: f64, d: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if !(focus.is_finite() && d.is_finite() && d > 0.0) {
        return out;
    }
    if focus > a && focus < b {
        out.push(focus);
    }
    let span = (b - a).abs().max((focus - a).abs()).max((focus - b).abs());
    let mut h = d;
    while h < span {
        for x in [focus - h, focus + h] {
            if x > a && x < b {
                out.push(x);
            }
        }
        h *= 4.0;
    }
    out
}
