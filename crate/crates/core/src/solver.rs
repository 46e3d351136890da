//! The Riemann problem with a jump on ℝ and on the unit circle, continuous
//! argument tracking, and checks of the resulting jumps.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{wrap_angle, PiecewiseCircle, PiecewiseReal};
use crate::cauchy::{limit_schedule, richardson, AnalyticFactor, EvalError, RICHARDSON_ORDER};
use crate::numbers::Level;
use crate::sampling::interior_samples;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("anchor {anchor}: {reason}")]
    AnchorViolation { anchor: f64, reason: &'static str },
    #[error("no admissible path to {0} inside its component")]
    PathCrossesBoundary(Complex64),
    #[error("factor is not holomorphic at the anchor {0}")]
    NotHolomorphicAtAnchor(f64),
    #[error("data is not locally constant around {0}")]
    NotLocallyConstant(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Jump data on ℝ (`φ`) and on the circle (`G = μ e^{iφ̂}`), with the two
/// real anchors where `φ` vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub phi: PiecewiseReal,
    pub phi_hat: PiecewiseCircle,
    pub ln_mu: PiecewiseCircle,
    pub anchor_inner: f64,
    pub anchor_outer: f64,
}

impl ProblemInstance {
    pub fn new(
        phi: PiecewiseReal,
        phi_hat: PiecewiseCircle,
        ln_mu: PiecewiseCircle,
        anchor_inner: f64,
        anchor_outer: f64,
    ) -> Result<Self, SolveError> {
        let inst = ProblemInstance {
            phi,
            phi_hat,
            ln_mu,
            anchor_inner,
            anchor_outer,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let check = |t: f64, inside: bool| -> Result<(), SolveError> {
            if !t.is_finite() || (t.abs() < 1.0) != inside || t.abs() == 1.0 {
                let reason = if inside {
                    "inner anchor must lie in (−1, 1)"
                } else {
                    "outer anchor must lie outside [−1, 1]"
                };
                return Err(SolveError::AnchorViolation { anchor: t, reason });
            }
            match self.phi.value_at(t) {
                Some(l) if l.is_zero() => Ok(()),
                _ => Err(SolveError::AnchorViolation {
                    anchor: t,
                    reason: "φ does not vanish near the anchor",
                }),
            }
        };
        check(self.anchor_inner, true)?;
        check(self.anchor_outer, false)
    }
}

/// `R = P(·, φ/2) · P̂(·, φ̂/2) · R_μ`.
pub fn solve_riemann(instance: &ProblemInstance) -> Result<AnalyticFactor, SolveError> {
    instance.validate()?;
    let half = Rational64::new(1, 2);
    Ok(AnalyticFactor::product(vec![
        AnalyticFactor::line(instance.phi.scale(half)),
        AnalyticFactor::circle(instance.phi_hat.scale(half)),
        AnalyticFactor::outer_modulus(instance.ln_mu.clone()),
    ]))
}

/// One of the four regions cut out by ℝ and the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub upper: bool,
    pub inside: bool,
}

impl Component {
    pub fn of(z: Complex64) -> Option<Component> {
        let r = z.norm();
        if z.im == 0.0 || r == 1.0 || !r.is_finite() {
            return None;
        }
        Some(Component {
            upper: z.im > 0.0,
            inside: r < 1.0,
        })
    }

    pub fn admits(&self, z: Complex64) -> bool {
        Component::of(z) == Some(*self)
    }
}

const INITIAL_STEPS: usize = 16;
const MAX_DEPTH: usize = 40;

/// Continuous argument of `factor` at `target`, continued from the real
/// `anchor` along a polyline inside the target's component.
pub fn track_argument(factor: &AnalyticFactor, anchor: f64, target: Complex64) -> Result<f64, SolveError> {
    let args = track_sequence(factor, anchor, &[target])?;
    Ok(args[0])
}

/// As [`track_argument`], through caller-chosen waypoints.
pub fn track_argument_via(
    factor: &AnalyticFactor,
    anchor: f64,
    waypoints: &[Complex64],
    target: Complex64,
) -> Result<f64, SolveError> {
    let comp = Component::of(target).ok_or(SolveError::PathCrossesBoundary(target))?;
    check_anchor(factor, anchor, comp, target)?;
    let mut nodes = vec![Complex64::new(anchor, 0.0)];
    nodes.extend_from_slice(waypoints);
    nodes.push(target);
    let args = track_polyline(factor, &nodes, comp)?;
    Ok(*args.last().unwrap())
}

/// Tracked arguments at several targets: the first is reached along the
/// default path, each later one by a straight leg from its predecessor.
pub fn track_sequence(
    factor: &AnalyticFactor,
    anchor: f64,
    targets: &[Complex64],
) -> Result<Vec<f64>, SolveError> {
    let Some(&first) = targets.first() else {
        return Ok(Vec::new());
    };
    let comp = Component::of(first).ok_or(SolveError::PathCrossesBoundary(first))?;
    check_anchor(factor, anchor, comp, first)?;
    let mut nodes = default_path(anchor, first, comp);
    // args exclude the anchor, so the first target sits at len − 2
    let lead = nodes.len() - 2;
    nodes.extend_from_slice(&targets[1..]);
    let args = track_polyline(factor, &nodes, comp)?;
    Ok(args[lead..].to_vec())
}

fn check_anchor(factor: &AnalyticFactor, anchor: f64, comp: Component, target: Complex64) -> Result<(), SolveError> {
    if !anchor.is_finite() || anchor.abs() == 1.0 || (anchor.abs() < 1.0) != comp.inside {
        return Err(SolveError::PathCrossesBoundary(target));
    }
    if factor.singular_support().distance(Complex64::new(anchor, 0.0)) <= 1e-12 {
        return Err(SolveError::NotHolomorphicAtAnchor(anchor));
    }
    Ok(())
}

fn default_path(anchor: f64, target: Complex64, comp: Component) -> Vec<Complex64> {
    let a = Complex64::new(anchor, 0.0);
    if comp.inside {
        // half-disks are convex
        return vec![a, target];
    }
    let s = if comp.upper { 1.0 } else { -1.0 };
    let h = target.norm().max(anchor.abs()) + 1.0;
    vec![
        a,
        Complex64::new(anchor, s * h),
        Complex64::new(target.re, s * h),
        target,
    ]
}

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

// tracked arguments at every node; nodes[0] is the real anchor
fn track_polyline(factor: &AnalyticFactor, nodes: &[Complex64], comp: Component) -> Result<Vec<f64>, SolveError> {
    let mut prev_z = nodes[0];
    let mut prev_log = factor.log_eval(prev_z)?;
    let mut arg = wrap_angle(prev_log.im);
    let mut out = Vec::with_capacity(nodes.len() - 1);
    for &b in &nodes[1..] {
        let a = prev_z;
        if a == b {
            out.push(arg);
            continue;
        }
        for k in 1..=INITIAL_STEPS {
            let z = if k == INITIAL_STEPS {
                b
            } else {
                a + (b - a) * (k as f64 / INITIAL_STEPS as f64)
            };
            let (log_z, inc) = refine(factor, prev_z, prev_log, z, comp, 0)?;
            arg += inc;
            prev_z = z;
            prev_log = log_z;
        }
        out.push(arg);
    }
    Ok(out)
}

// phase increment from a to b, bisecting until each step is below π/2
fn refine(
    factor: &AnalyticFactor,
    a: Complex64,
    la: Complex64,
    b: Complex64,
    comp: Component,
    depth: usize,
) -> Result<(Complex64, f64), SolveError> {
    if !comp.admits(b) {
        return Err(SolveError::PathCrossesBoundary(b));
    }
    let lb = factor.log_eval(b)?;
    let inc = wrap(lb.im - la.im);
    if inc.abs() < PI / 2.0 || depth >= MAX_DEPTH {
        return Ok((lb, inc));
    }
    let m = 0.5 * (a + b);
    let (lm, i1) = refine(factor, a, la, m, comp, depth + 1)?;
    let (lb, i2) = refine(factor, m, lm, b, comp, depth + 1)?;
    Ok((lb, i1 + i2))
}

/// Largest deviations of the boundary jumps from the prescribed data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpReport {
    pub line_samples: usize,
    pub circle_samples: usize,
    /// `max | |R⁺/R⁻| − 1 |` on ℝ.
    pub line_modulus_dev: f64,
    /// `max | arg(R⁺/R⁻) − φ |` on ℝ.
    pub line_arg_dev: f64,
    /// `max | |R⁺/R⁻| − μ | / μ` on the circle.
    pub circle_modulus_dev: f64,
    /// `max | arg(R⁺/R⁻) − φ̂ |` on the circle.
    pub circle_arg_dev: f64,
    pub tol: f64,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl JumpReport {
    pub fn max_deviation(&self) -> f64 {
        self.line_modulus_dev
            .max(self.line_arg_dev)
            .max(self.circle_modulus_dev)
            .max(self.circle_arg_dev)
    }
}

// tracked log at the extrapolated boundary point: (log|R|, arg R)
fn tracked_limit(factor: &AnalyticFactor, anchor: f64, path: impl Fn(f64) -> Complex64) -> Result<Complex64, SolveError> {
    let eps = limit_schedule();
    let targets: Vec<Complex64> = eps.iter().map(|&e| path(e)).collect();
    let args = track_sequence(factor, anchor, &targets)?;
    let mut vals = Vec::with_capacity(eps.len());
    for (z, a) in targets.iter().zip(&args) {
        vals.push(Complex64::new(factor.log_eval(*z)?.re, *a));
    }
    Ok(richardson(&eps, &vals, RICHARDSON_ORDER).0)
}

fn partition(points: &mut Vec<f64>) -> Vec<(f64, f64)> {
    points.retain(|x| x.is_finite());
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    points.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Line samples (midpoints plus quasi-random interior points between the
/// breakpoints of `φ` and ±1).
pub fn line_sample_points(phi: &PiecewiseReal) -> Vec<f64> {
    let mut pts: Vec<f64> = phi.breakpoints().iter().map(|p| p.to_f64()).collect();
    pts.extend([-1.0, 1.0]);
    let lo = pts.iter().copied().filter(|x| x.is_finite()).fold(-1.0, f64::min) - 2.0;
    let hi = pts.iter().copied().filter(|x| x.is_finite()).fold(1.0, f64::max) + 2.0;
    pts.extend([lo, hi]);
    partition(&mut pts)
        .into_iter()
        .flat_map(|(a, b)| interior_samples(a, b, 3, 1e-3))
        .collect()
}

/// Circle samples between the breakpoints of the data and the angles 0, π.
pub fn circle_sample_points(data: &[&PiecewiseCircle]) -> Vec<f64> {
    let mut pts: Vec<f64> = data.iter().flat_map(|g| g.breakpoints()).collect();
    pts.extend([-PI, 0.0, PI]);
    partition(&mut pts)
        .into_iter()
        .flat_map(|(a, b)| interior_samples(a, b, 3, 1e-3))
        .collect()
}

/// Checks `|R⁺/R⁻| = 1`, `arg(R⁺/R⁻) = φ` on ℝ and `|R⁺/R⁻| = μ`,
/// `arg(R⁺/R⁻) = φ̂` on the circle, with arguments tracked from the anchors.
pub fn verify_jumps(solution: &AnalyticFactor, instance: &ProblemInstance, tol: f64) -> JumpReport {
    let mut r = JumpReport {
        line_samples: 0,
        circle_samples: 0,
        line_modulus_dev: 0.0,
        line_arg_dev: 0.0,
        circle_modulus_dev: 0.0,
        circle_arg_dev: 0.0,
        tol,
        failures: Vec::new(),
        passed: false,
    };
    for t in line_sample_points(&instance.phi) {
        let anchor = if t.abs() < 1.0 {
            instance.anchor_inner
        } else {
            instance.anchor_outer
        };
        let phi = instance.phi.value_at(t).map(Level::to_f64).unwrap_or(0.0);
        let plus = tracked_limit(solution, anchor, |e| Complex64::new(t, e));
        let minus = tracked_limit(solution, anchor, |e| Complex64::new(t, -e));
        match (plus, minus) {
            (Ok(p), Ok(m)) => {
                let d = p - m;
                r.line_modulus_dev = r.line_modulus_dev.max((d.re.exp() - 1.0).abs());
                r.line_arg_dev = r.line_arg_dev.max((d.im - phi).abs());
                r.line_samples += 1;
            }
            (Err(e), _) | (_, Err(e)) => r.failures.push(format!("t = {t}: {e}")),
        }
    }
    for th in circle_sample_points(&[&instance.phi_hat, &instance.ln_mu]) {
        let phi_hat = instance.phi_hat.value_at(th).map(Level::to_f64).unwrap_or(0.0);
        let mu = instance.ln_mu.value_at(th).map(Level::to_f64).unwrap_or(0.0).exp();
        let plus = tracked_limit(solution, instance.anchor_inner, |e| Complex64::from_polar(1.0 - e, th));
        let minus = tracked_limit(solution, instance.anchor_outer, |e| Complex64::from_polar(1.0 + e, th));
        match (plus, minus) {
            (Ok(p), Ok(m)) => {
                let d = p - m;
                r.circle_modulus_dev = r.circle_modulus_dev.max((d.re.exp() - mu).abs() / mu);
                r.circle_arg_dev = r.circle_arg_dev.max((d.im - phi_hat).abs());
                r.circle_samples += 1;
            }
            (Err(e), _) | (_, Err(e)) => r.failures.push(format!("θ = {th}: {e}")),
        }
    }
    r.passed = r.failures.is_empty() && r.max_deviation() <= tol;
    r
}

/// Local exponent `e` with `R⁽¹⁾(z) ~ C (z − t₀)^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Rational(Rational64),
    Real(f64),
}

impl Exponent {
    pub fn to_f64(self) -> f64 {
        match self {
            Exponent::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Real(x) => x,
        }
    }

    /// The pole (negative) or zero (positive) order, when integral.
    pub fn order(self) -> Option<i64> {
        match self {
            Exponent::Rational(r) if r.is_integer() => Some(r.to_integer()),
            Exponent::Real(x) if x.fract() == 0.0 => Some(x as i64),
            _ => None,
        }
    }
}

/// `e(t₀) = (φ(t₀−) − φ(t₀+)) / 2π` for the factor `P(·, φ/2)`.
pub fn classify_singularity(phi: &PiecewiseReal, t0: f64) -> Result<Exponent, SolveError> {
    if !t0.is_finite() {
        return Err(SolveError::NotLocallyConstant(t0));
    }
    let bps: Vec<f64> = phi.breakpoints().iter().map(|p| p.to_f64()).collect();
    let left_b = bps.iter().copied().filter(|&b| b < t0 - 1e-12).fold(f64::NEG_INFINITY, f64::max);
    let right_b = bps.iter().copied().filter(|&b| b > t0 + 1e-12).fold(f64::INFINITY, f64::min);
    let probe = |b: f64, dir: f64| if b.is_finite() { 0.5 * (t0 + b) } else { t0 + dir };
    let left = phi.value_at(probe(left_b, -1.0)).ok_or(SolveError::NotLocallyConstant(t0))?;
    let right = phi.value_at(probe(right_b, 1.0)).ok_or(SolveError::NotLocallyConstant(t0))?;
    Ok(match left - right {
        Level::Pi(k) => Exponent::Rational(k / Rational64::from_integer(2)),
        Level::Real(x) if x.is_zero() => Exponent::Rational(Rational64::zero()),
        Level::Real(x) => Exponent::Real(x / (2.0 * PI)),
    })
}
