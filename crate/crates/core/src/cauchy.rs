//! Cauchy-type exponentials on the real line and the unit circle, their
//! boundary values and products.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::boundary::{wrap_angle, PiecewiseCircle, PiecewiseReal, SampledProfile};
use crate::quadrature::{graded_breaks, integrate, DEFAULT_TOL};

/// Quadrature refuses to evaluate closer than this to the data's support.
pub const QUADRATURE_MIN_DIST: f64 = 1e-6;
/// Elimination depth of the Richardson table used for boundary limits.
pub const RICHARDSON_ORDER: usize = 2;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `ε_k = 10^{−2−k/2}`, `k = 0..6`: the offsets used to approach the boundary.
pub fn limit_schedule() -> [f64; 7] {
    std::array::from_fn(|k| 10f64.powf(-2.0 - 0.5 * k as f64))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("z = {0} lies on the singular support")]
    OnSingularSupport(Complex64),
    #[error("z = {0} lies on the unit circle")]
    OnUnitCircle(Complex64),
    #[error("{0} is a breakpoint of the boundary data")]
    Breakpoint(f64),
    #[error("factor is not supported on the unit circle")]
    NonCircleFactor,
    #[error("|η| reaches {max}, above the bound {bound}")]
    UnboundedArgument { max: f64, bound: f64 },
    #[error("evaluation is not finite at z = {0}")]
    NonFinite(Complex64),
}

/// Side of approach: `Plus` is the upper half-plane on ℝ and the inside of
/// the disk on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineMethod {
    #[default]
    Closed,
    Quadrature,
}

/// Where a factor may fail to be holomorphic: closed real segments, closed
/// arcs of the unit circle, and isolated real points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SingularSupport {
    pub line: Vec<(f64, f64)>,
    pub arcs: Vec<(f64, f64)>,
    pub points: Vec<f64>,
}

impl SingularSupport {
    pub fn is_empty(&self) -> bool {
        self.line.is_empty() && self.arcs.is_empty() && self.points.is_empty()
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        let mut d = f64::INFINITY;
        for &(lo, hi) in &self.line {
            d = d.min(segment_distance(lo, hi, z));
        }
        for &(lo, hi) in &self.arcs {
            d = d.min(arc_distance(lo, hi, z));
        }
        for &p in &self.points {
            d = d.min((z - p).norm());
        }
        d
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.distance(z) <= tol
    }

    fn extend(&mut self, other: &SingularSupport) {
        self.line.extend_from_slice(&other.line);
        self.arcs.extend_from_slice(&other.arcs);
        self.points.extend_from_slice(&other.points);
    }
}

fn segment_distance(lo: f64, hi: f64, z: Complex64) -> f64 {
    if z.re >= lo && z.re <= hi {
        z.im.abs()
    } else {
        let x = if z.re < lo { lo } else { hi };
        (z - x).norm()
    }
}

fn arc_distance(lo: f64, hi: f64, z: Complex64) -> f64 {
    let r = z.norm();
    if r > 0.0 {
        let th = z.arg();
        if [th - 2.0 * PI, th, th + 2.0 * PI].iter().any(|&t| t >= lo && t <= hi) {
            return (r - 1.0).abs();
        }
    }
    let a = Complex64::from_polar(1.0, lo);
    let b = Complex64::from_polar(1.0, hi);
    (z - a).norm().min((z - b).norm())
}

#[derive(Debug, Clone, PartialEq)]
pub enum FactorKind {
    /// `P(z, γ)`.
    Line { gamma: PiecewiseReal, method: LineMethod },
    /// `P(z, γ)` for sampled `γ`, by quadrature.
    SampledLine(SampledProfile),
    /// `P̂(z, γ̂)`.
    Circle(PiecewiseCircle),
    /// `R_μ(z)` from `ln μ`.
    OuterModulus(PiecewiseCircle),
    /// `scale · Π (z − p)^m`.
    Rational { scale: f64, roots: Vec<(f64, i64)> },
    /// `F(z + 1/z)`.
    Joukowski(Box<AnalyticFactor>),
    Product(Vec<AnalyticFactor>),
}

/// A holomorphic function off its singular support, represented by the data
/// that generates it.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFactor {
    kind: FactorKind,
    tol: f64,
    support: SingularSupport,
}

impl AnalyticFactor {
    fn from_kind(kind: FactorKind) -> Self {
        let support = support_of(&kind);
        AnalyticFactor {
            kind,
            tol: DEFAULT_TOL,
            support,
        }
    }

    pub fn line(gamma: PiecewiseReal) -> Self {
        Self::line_with(gamma, LineMethod::Closed)
    }

    pub fn line_with(gamma: PiecewiseReal, method: LineMethod) -> Self {
        Self::from_kind(FactorKind::Line { gamma, method })
    }

    pub fn sampled_line(profile: SampledProfile) -> Self {
        Self::from_kind(FactorKind::SampledLine(profile))
    }

    pub fn circle(gamma_hat: PiecewiseCircle) -> Self {
        Self::from_kind(FactorKind::Circle(gamma_hat))
    }

    pub fn outer_modulus(ln_mu: PiecewiseCircle) -> Self {
        Self::from_kind(FactorKind::OuterModulus(ln_mu))
    }

    /// `scale · Π (z − p)^m`; zero multiplicities are dropped.
    pub fn rational(scale: f64, roots: Vec<(f64, i64)>) -> Self {
        let roots = roots.into_iter().filter(|&(_, m)| m != 0).collect();
        Self::from_kind(FactorKind::Rational { scale, roots })
    }

    pub fn constant(c: f64) -> Self {
        Self::rational(c, Vec::new())
    }

    pub fn identity() -> Self {
        Self::product(Vec::new())
    }

    pub fn joukowski(inner: AnalyticFactor) -> Self {
        Self::from_kind(FactorKind::Joukowski(Box::new(inner)))
    }

    /// Product of factors; nested products are flattened.
    pub fn product(factors: Vec<AnalyticFactor>) -> Self {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f.kind {
                FactorKind::Product(inner) => flat.extend(inner),
                _ => flat.push(f),
            }
        }
        Self::from_kind(FactorKind::Product(flat))
    }

    /// Sets the quadrature tolerance, recursively.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        match &mut self.kind {
            FactorKind::Product(fs) => {
                for f in fs.iter_mut() {
                    *f = f.clone().with_tolerance(tol);
                }
            }
            FactorKind::Joukowski(inner) => {
                **inner = inner.as_ref().clone().with_tolerance(tol);
            }
            _ => {}
        }
        self
    }

    pub fn kind(&self) -> &FactorKind {
        &self.kind
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn singular_support(&self) -> &SingularSupport {
        &self.support
    }

    /// Members of a product, or the factor itself.
    pub fn members(&self) -> &[AnalyticFactor] {
        match &self.kind {
            FactorKind::Product(fs) => fs,
            _ => std::slice::from_ref(self),
        }
    }

    pub fn reciprocal(&self) -> Self {
        let kind = match &self.kind {
            FactorKind::Line { gamma, method } => FactorKind::Line {
                gamma: gamma.neg(),
                method: *method,
            },
            FactorKind::SampledLine(p) => {
                let knots = p.knots().iter().map(|&(t, v)| (t, -v)).collect();
                FactorKind::SampledLine(SampledProfile::new(knots).expect("negated knots stay valid"))
            }
            FactorKind::Circle(g) => FactorKind::Circle(g.neg()),
            FactorKind::OuterModulus(g) => FactorKind::OuterModulus(g.neg()),
            FactorKind::Rational { scale, roots } => FactorKind::Rational {
                scale: 1.0 / scale,
                roots: roots.iter().map(|&(p, m)| (p, -m)).collect(),
            },
            FactorKind::Joukowski(inner) => FactorKind::Joukowski(Box::new(inner.reciprocal())),
            FactorKind::Product(fs) => FactorKind::Product(fs.iter().map(|f| f.reciprocal()).collect()),
        };
        AnalyticFactor {
            kind,
            tol: self.tol,
            support: self.support.clone(),
        }
    }

    /// True for factors whose only singularities lie on the unit circle.
    pub fn is_circle_supported(&self) -> bool {
        match &self.kind {
            FactorKind::Circle(_) | FactorKind::OuterModulus(_) => true,
            FactorKind::Rational { roots, .. } => roots.is_empty(),
            FactorKind::Product(fs) => fs.iter().all(|f| f.is_circle_supported()),
            _ => false,
        }
    }

    /// A logarithm of the factor at `z`. Each member contributes a branch
    /// that is continuous in every component of the complement of ℝ ∪ 𝕋.
    pub fn log_eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        let v = match &self.kind {
            FactorKind::Line { gamma, method } => match method {
                LineMethod::Closed => line_log_closed(gamma, z)?,
                LineMethod::Quadrature => line_log_quadrature(gamma, z, self.tol)?,
            },
            FactorKind::SampledLine(p) => sampled_log_quadrature(p, z, self.tol)?,
            FactorKind::Circle(g) => I * schwarz_integral(g, z, self.tol)? / (2.0 * PI),
            FactorKind::OuterModulus(g) => {
                (schwarz_integral(g, z, self.tol)? + g.integral()) / (4.0 * PI)
            }
            FactorKind::Rational { scale, roots } => {
                let mut acc = Complex64::new(*scale, 0.0).ln();
                for &(p, m) in roots {
                    let d = z - p;
                    if d.norm() == 0.0 {
                        return Err(EvalError::OnSingularSupport(z));
                    }
                    acc += d.ln() * m as f64;
                }
                acc
            }
            FactorKind::Joukowski(inner) => {
                if z.norm() == 0.0 {
                    return Err(EvalError::OnSingularSupport(z));
                }
                inner.log_eval(z + z.inv())?
            }
            FactorKind::Product(fs) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for f in fs {
                    acc += f.log_eval(z)?;
                }
                acc
            }
        };
        if v.re.is_nan() || v.im.is_nan() || v.im.is_infinite() || v.re == f64::INFINITY {
            return Err(EvalError::NonFinite(z));
        }
        Ok(v)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        Ok(self.log_eval(z)?.exp())
    }
}

fn support_of(kind: &FactorKind) -> SingularSupport {
    let mut s = SingularSupport::default();
    match kind {
        FactorKind::Line { gamma, .. } => {
            s.line = gamma
                .pieces()
                .iter()
                .map(|p| (p.interval.lo.to_f64(), p.interval.hi.to_f64()))
                .collect();
        }
        FactorKind::SampledLine(p) => s.line.push(p.support()),
        FactorKind::Circle(g) | FactorKind::OuterModulus(g) => {
            s.arcs = g.pieces().iter().map(|p| (p.lo, p.hi)).collect();
        }
        FactorKind::Rational { roots, .. } => s.points = roots.iter().map(|&(p, _)| p).collect(),
        FactorKind::Joukowski(inner) => {
            let inner = inner.singular_support();
            for &(lo, hi) in &inner.line {
                joukowski_preimage(lo, hi, &mut s);
            }
            for &p in &inner.points {
                joukowski_preimage(p, p, &mut s);
            }
        }
        FactorKind::Product(fs) => {
            for f in fs {
                s.extend(f.singular_support());
            }
        }
    }
    s
}

// preimage of the λ-segment [lo, hi] under z ↦ z + 1/z
fn joukowski_preimage(lo: f64, hi: f64, s: &mut SingularSupport) {
    let outer = |l: f64| -> f64 {
        if l.is_infinite() {
            l
        } else {
            let r = (l * l - 4.0).max(0.0).sqrt();
            if l >= 0.0 {
                0.5 * (l + r)
            } else {
                0.5 * (l - r)
            }
        }
    };
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if hi >= 2.0 {
        let (a, b) = (outer(lo.max(2.0)), outer(hi));
        s.line.push((a, b));
        s.line.push((inv(b), inv(a)));
    }
    if lo <= -2.0 {
        let (a, b) = (outer(lo), outer(hi.min(-2.0)));
        s.line.push((a, b));
        s.line.push((inv(b), inv(a)));
    }
    let (p, q) = (lo.max(-2.0), hi.min(2.0));
    if p <= q {
        let (t0, t1) = ((q / 2.0).acos(), (p / 2.0).acos());
        s.arcs.push((t0, t1));
        s.arcs.push((-t1, -t0));
    }
}

/// Log contribution of `c·χ_(a,b)` to `log P(z, ·)`.
fn line_piece_log(a: f64, b: f64, c: f64, z: Complex64) -> Complex64 {
    let k = c / PI;
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            k * (((b - z) / (a - z)).ln() + 0.5 * ((1.0 + a * a) / (1.0 + b * b)).ln())
        }
        (true, false) => k * (-(a - z).ln() + 0.5 * (1.0 + a * a).ln()),
        (false, true) => k * ((z - b).ln() - 0.5 * (1.0 + b * b).ln()),
        (false, false) => I * c * z.im.signum(),
    }
}

// the real part of the same contribution at a real point
fn line_piece_log_modulus(a: f64, b: f64, c: f64, t: f64) -> f64 {
    let k = c / PI;
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            k * ((b - t).abs().ln() - (a - t).abs().ln()
                + 0.5 * ((1.0 + a * a) / (1.0 + b * b)).ln())
        }
        (true, false) => k * (-(a - t).abs().ln() + 0.5 * (1.0 + a * a).ln()),
        (false, true) => k * ((t - b).abs().ln() - 0.5 * (1.0 + b * b).ln()),
        (false, false) => 0.0,
    }
}

fn line_log_closed(gamma: &PiecewiseReal, z: Complex64) -> Result<Complex64, EvalError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in gamma.pieces() {
        let (a, b) = (p.interval.lo.to_f64(), p.interval.hi.to_f64());
        if z.im == 0.0 && z.re >= a && z.re <= b {
            return Err(EvalError::OnSingularSupport(z));
        }
        acc += line_piece_log(a, b, p.value.to_f64(), z);
    }
    Ok(acc)
}

fn line_log_quadrature(gamma: &PiecewiseReal, z: Complex64, tol: f64) -> Result<Complex64, EvalError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in gamma.pieces() {
        let (a, b) = (p.interval.lo.to_f64(), p.interval.hi.to_f64());
        if segment_distance(a, b, z) < QUADRATURE_MIN_DIST {
            return Err(EvalError::OnSingularSupport(z));
        }
        let c = p.value.to_f64();
        acc += c * kernel_integral(a, b, z, tol, &[]);
    }
    Ok(acc / PI)
}

fn sampled_log_quadrature(p: &SampledProfile, z: Complex64, tol: f64) -> Result<Complex64, EvalError> {
    let (a, b) = p.support();
    if segment_distance(a, b, z) < QUADRATURE_MIN_DIST {
        return Err(EvalError::OnSingularSupport(z));
    }
    let kernel = |t: f64| p.value_at(t) * (1.0 / (t - z) - t / (1.0 + t * t));
    let mut breaks: Vec<f64> = p.knots().iter().map(|k| k.0).collect();
    breaks.extend(graded_breaks(a, b, z.re, z.im.abs().max(1e-12)));
    Ok(integrate(&kernel, a, b, tol, &breaks).value / PI)
}

// ∫_a^b (1/(t−z) − t/(1+t²)) dt with infinite ends mapped to (0, 1)
fn kernel_integral(a: f64, b: f64, z: Complex64, tol: f64, extra: &[f64]) -> Complex64 {
    let kernel = |t: f64| 1.0 / (t - z) - t / (1.0 + t * t);
    let d = z.im.abs().max(1e-12);
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            let mut breaks = graded_breaks(a, b, z.re, d);
            breaks.extend_from_slice(extra);
            integrate(&kernel, a, b, tol, &breaks).value
        }
        (true, false) => {
            let f = |s: f64| {
                let w = 1.0 - s;
                kernel(a + s / w) / (w * w)
            };
            let u = z.re - a;
            let breaks = if u > 0.0 {
                graded_breaks(0.0, 1.0, u / (1.0 + u), d / ((1.0 + u) * (1.0 + u)))
            } else {
                Vec::new()
            };
            integrate(&f, 0.0, 1.0, tol, &breaks).value
        }
        (false, true) => {
            let f = |s: f64| {
                let w = 1.0 - s;
                kernel(b - s / w) / (w * w)
            };
            let u = b - z.re;
            let breaks = if u > 0.0 {
                graded_breaks(0.0, 1.0, u / (1.0 + u), d / ((1.0 + u) * (1.0 + u)))
            } else {
                Vec::new()
            };
            integrate(&f, 0.0, 1.0, tol, &breaks).value
        }
        (false, false) => {
            kernel_integral(f64::NEG_INFINITY, 0.0, z, tol, extra)
                + kernel_integral(0.0, f64::INFINITY, z, tol, extra)
        }
    }
}

/// `∫ (e^{iθ}+z)/(e^{iθ}−z) g(θ) dθ` over the circle.
fn schwarz_integral(g: &PiecewiseCircle, z: Complex64, tol: f64) -> Result<Complex64, EvalError> {
    let r = z.norm();
    if (r - 1.0).abs() < QUADRATURE_MIN_DIST {
        return Err(EvalError::OnUnitCircle(z));
    }
    let d = (r - 1.0).abs();
    let focus = if r > 0.0 { z.arg() } else { 0.0 };
    let kernel = |th: f64| {
        let e = Complex64::from_polar(1.0, th);
        (e + z) / (e - z)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for p in g.pieces() {
        let mut breaks = Vec::new();
        for f in [focus - 2.0 * PI, focus, focus + 2.0 * PI] {
            breaks.extend(graded_breaks(p.lo, p.hi, f, d));
        }
        acc += p.value.to_f64() * integrate(&kernel, p.lo, p.hi, tol, &breaks).value;
    }
    Ok(acc)
}

/// `P(z, γ)`.
pub fn eval_line_factor(gamma: &PiecewiseReal, z: Complex64, method: LineMethod) -> Result<Complex64, EvalError> {
    AnalyticFactor::line_with(gamma.clone(), method).eval(z)
}

/// `P̂(z, γ̂)`.
pub fn eval_circle_factor(gamma_hat: &PiecewiseCircle, z: Complex64) -> Result<Complex64, EvalError> {
    AnalyticFactor::circle(gamma_hat.clone()).eval(z)
}

/// `R_μ(z)`.
pub fn eval_outer_modulus(ln_mu: &PiecewiseCircle, z: Complex64) -> Result<Complex64, EvalError> {
    AnalyticFactor::outer_modulus(ln_mu.clone()).eval(z)
}

/// Product of factor values, accumulated in the log domain.
pub fn eval_product(factors: &[AnalyticFactor], z: Complex64) -> Result<Complex64, EvalError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for f in factors {
        acc += f.log_eval(z)?;
    }
    Ok(acc.exp())
}

/// `log P^±(t, γ)` in closed form: `arg = ±γ(t)`, modulus from the
/// principal-value integral.
pub fn boundary_log_line(gamma: &PiecewiseReal, t: f64, side: Side) -> Result<Complex64, EvalError> {
    let Some(level) = gamma.value_at(t) else {
        return Err(EvalError::Breakpoint(t));
    };
    let modulus: f64 = gamma
        .pieces()
        .iter()
        .map(|p| line_piece_log_modulus(p.interval.lo.to_f64(), p.interval.hi.to_f64(), p.value.to_f64(), t))
        .sum();
    Ok(Complex64::new(modulus, side.sign() * level.to_f64()))
}

/// `P^±(t, γ)`.
pub fn boundary_limit_line(gamma: &PiecewiseReal, t: f64, side: Side) -> Result<Complex64, EvalError> {
    Ok(boundary_log_line(gamma, t, side)?.exp())
}

/// A boundary value of a logarithm with its extrapolation error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub log: Complex64,
    pub error: f64,
}

impl Extrapolated {
    pub fn value(&self) -> Complex64 {
        self.log.exp()
    }
}

/// Neville–Richardson extrapolation to `ε = 0`, eliminating the terms
/// `ε, …, ε^order`. Returns the estimate and the change from the previous level.
pub fn richardson(eps: &[f64], vals: &[Complex64], order: usize) -> (Complex64, f64) {
    assert_eq!(eps.len(), vals.len());
    assert!(!vals.is_empty());
    let order = order.min(vals.len() - 1);
    let mut table = vals.to_vec();
    let mut prev_last = *vals.last().unwrap();
    for j in 1..=order {
        prev_last = *table.last().unwrap();
        table = (0..table.len() - 1)
            .map(|k| {
                let (e0, e1) = (eps[k], eps[k + j]);
                table[k + 1] + (table[k + 1] - table[k]) * (e1 / (e0 - e1))
            })
            .collect();
    }
    let last = *table.last().unwrap();
    (last, (last - prev_last).norm())
}

/// Extrapolates `log F` along `path(ε)` as `ε → 0` over the standard
/// schedule, unwrapping the imaginary part between successive offsets.
pub fn extrapolate_log(
    factor: &AnalyticFactor,
    path: impl Fn(f64) -> Complex64,
) -> Result<Extrapolated, EvalError> {
    let eps = limit_schedule();
    let mut vals = Vec::with_capacity(eps.len());
    for &e in &eps {
        let mut v = factor.log_eval(path(e))?;
        if let Some(prev) = vals.last() {
            let prev: &Complex64 = prev;
            v.im -= 2.0 * PI * ((v.im - prev.im) / (2.0 * PI)).round();
        }
        vals.push(v);
    }
    let (log, error) = richardson(&eps, &vals, RICHARDSON_ORDER);
    Ok(Extrapolated { log, error })
}

/// Boundary value of any factor at real `t` from the given side, by extrapolation.
pub fn limit_on_line(factor: &AnalyticFactor, t: f64, side: Side) -> Result<Extrapolated, EvalError> {
    extrapolate_log(factor, |e| Complex64::new(t, side.sign() * e))
}

/// Boundary value of any factor at `e^{iθ}`; `Plus` approaches from inside.
pub fn limit_on_circle(factor: &AnalyticFactor, theta: f64, side: Side) -> Result<Extrapolated, EvalError> {
    extrapolate_log(factor, |e| Complex64::from_polar(1.0 - side.sign() * e, theta))
}

fn circle_breakpoint(factor: &AnalyticFactor, theta: f64) -> bool {
    factor.members().iter().any(|f| match &f.kind {
        FactorKind::Circle(g) | FactorKind::OuterModulus(g) => g.is_breakpoint(theta),
        _ => false,
    })
}

/// `F^±(e^{iθ})` for a factor singular only on the circle.
pub fn boundary_limit_circle(factor: &AnalyticFactor, theta: f64, side: Side) -> Result<Complex64, EvalError> {
    if !factor.is_circle_supported() {
        return Err(EvalError::NonCircleFactor);
    }
    if circle_breakpoint(factor, theta) {
        return Err(EvalError::Breakpoint(wrap_angle(theta)));
    }
    Ok(limit_on_circle(factor, theta, side)?.value())
}

/// `log(F⁺/F⁻)` across the circle at `e^{iθ}`, with unwrapped argument.
pub fn circle_jump_log(factor: &AnalyticFactor, theta: f64) -> Result<Complex64, EvalError> {
    if circle_breakpoint(factor, theta) {
        return Err(EvalError::Breakpoint(wrap_angle(theta)));
    }
    let plus = limit_on_circle(factor, theta, Side::Plus)?;
    let minus = limit_on_circle(factor, theta, Side::Minus)?;
    Ok(plus.log - minus.log)
}

/// Boundary argument data for a factor to be constructed.
#[derive(Debug, Clone, PartialEq)]
pub enum ArgumentData {
    HalfPlane(PiecewiseReal),
    Disk(PiecewiseCircle),
}

/// The factor whose boundary argument from above (or from inside) is the
/// given data, normalized with constant 1.
pub fn represent_from_argument(eta: &ArgumentData, bound: f64) -> Result<AnalyticFactor, EvalError> {
    let max = match eta {
        ArgumentData::HalfPlane(g) => g.max_abs(),
        ArgumentData::Disk(g) => g.max_abs(),
    };
    if !(max <= bound) {
        return Err(EvalError::UnboundedArgument { max, bound });
    }
    Ok(match eta {
        ArgumentData::HalfPlane(g) if g.is_zero() => AnalyticFactor::constant(1.0),
        ArgumentData::Disk(g) if g.is_zero() => AnalyticFactor::constant(1.0),
        ArgumentData::HalfPlane(g) => AnalyticFactor::line(g.clone()),
        ArgumentData::Disk(g) => AnalyticFactor::circle(g.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{Level, Point};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pi_chi(a: i64, b: i64) -> PiecewiseReal {
        PiecewiseReal::indicator(Point::int(a), Point::int(b), Level::pi_int(1)).unwrap()
    }

    #[test]
    fn zero_data_gives_one() {
        let z = c(0.3, -2.0);
        assert_eq!(eval_line_factor(&PiecewiseReal::zero(), z, LineMethod::Closed).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_circle_factor(&PiecewiseCircle::zero(), z).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_outer_modulus(&PiecewiseCircle::zero(), z).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_product(&[], z).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn unit_indicator_at_2i() {
        let want = c(2.0, 1.0) / (2.0 * 2f64.sqrt());
        for m in [LineMethod::Closed, LineMethod::Quadrature] {
            let got = eval_line_factor(&pi_chi(0, 1), c(0.0, 2.0), m).unwrap();
            assert!((got - want).norm() < 1e-10, "{m:?}: {got}");
        }
    }

    #[test]
    fn indicator_at_real_point_off_support() {
        let want = 1.4 * (10.0f64 / 17.0).sqrt();
        let got = eval_line_factor(&pi_chi(3, 4), c(0.5, 0.0), LineMethod::Closed).unwrap();
        assert!((got - want).norm() < 1e-12);
        assert!(matches!(
            eval_line_factor(&pi_chi(3, 4), c(3.5, 0.0), LineMethod::Closed),
            Err(EvalError::OnSingularSupport(_))
        ));
        assert!(matches!(
            eval_line_factor(&pi_chi(3, 4), c(3.5, 1e-8), LineMethod::Quadrature),
            Err(EvalError::OnSingularSupport(_))
        ));
    }

    #[test]
    fn half_lines_and_whole_line() {
        // compare the closed form with quadrature on unbounded pieces
        let g = PiecewiseReal::new(vec![
            crate::boundary::Piece::new(Point::NegInf, Point::int(-1), Level::Real(0.7)),
            crate::boundary::Piece::new(Point::int(2), Point::PosInf, Level::Real(-1.3)),
        ])
        .unwrap();
        for z in [c(0.5, 0.4), c(-3.0, -1.0), c(5.0, 0.2), c(0.0, 30.0)] {
            let a = eval_line_factor(&g, z, LineMethod::Closed).unwrap();
            let b = eval_line_factor(&g, z, LineMethod::Quadrature).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm(), "{z}: {a} vs {b}");
        }
        let whole = PiecewiseReal::indicator(Point::NegInf, Point::PosInf, Level::Real(0.5)).unwrap();
        let up = eval_line_factor(&whole, c(1.0, 1.0), LineMethod::Closed).unwrap();
        assert!((up - Complex64::from_polar(1.0, 0.5)).norm() < 1e-14);
        let q = eval_line_factor(&whole, c(1.0, -1.0), LineMethod::Quadrature).unwrap();
        assert!((q - Complex64::from_polar(1.0, -0.5)).norm() < 1e-9);
    }

    #[test]
    fn boundary_limit_in_the_middle_of_an_indicator() {
        let g = pi_chi(0, 1);
        for side in [Side::Plus, Side::Minus] {
            let v = boundary_limit_line(&g, 0.5, side).unwrap();
            assert!((v - c(-(0.5f64).sqrt(), 0.0)).norm() < 1e-12, "{v}");
            let ex = limit_on_line(&AnalyticFactor::line(g.clone()), 0.5, side).unwrap();
            let closed = boundary_log_line(&g, 0.5, side).unwrap();
            assert!((ex.log - closed).norm() < 1e-8, "{:?} vs {closed}", ex.log);
        }
        assert_eq!(boundary_limit_line(&g, 1.0, Side::Plus), Err(EvalError::Breakpoint(1.0)));
    }

    // ∫_lo^hi (e^{iθ}+z)/(e^{iθ}−z) dθ = −(hi−lo) + 2·[−i log(e^{iθ} − z)]_lo^hi,
    // the logarithm continued along the arc in small steps
    fn arc_oracle(lo: f64, hi: f64, z: Complex64) -> Complex64 {
        let n = 20_000;
        let mut arg = (Complex64::from_polar(1.0, lo) - z).arg();
        let mut prev = arg;
        for k in 1..=n {
            let th = lo + (hi - lo) * k as f64 / n as f64;
            let a = (Complex64::from_polar(1.0, th) - z).arg();
            let mut d = a - prev;
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            arg += d;
            prev = a;
        }
        let m0 = (Complex64::from_polar(1.0, lo) - z).norm().ln();
        let m1 = (Complex64::from_polar(1.0, hi) - z).norm().ln();
        let start = (Complex64::from_polar(1.0, lo) - z).arg();
        let log_diff = c(m1 - m0, arg - start);
        -(hi - lo) + 2.0 * (-I) * log_diff
    }

    #[test]
    fn circle_factor_matches_antiderivative_oracle() {
        let g = PiecewiseCircle::arc(-0.4, 2.1, Level::Real(0.8)).unwrap();
        for z in [c(0.2, 0.1), c(0.95, 0.3), c(-1.5, 2.0), c(1.01, 0.0)] {
            let want = (I * 0.8 * arc_oracle(-0.4, 2.1, z) / (2.0 * PI)).exp();
            let got = eval_circle_factor(&g, z).unwrap();
            assert!((got - want).norm() < 1e-9, "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn outer_modulus_residue_values() {
        let one = PiecewiseCircle::constant(Level::Real(1.0));
        for z in [c(0.0, 0.0), c(0.5, -0.3), c(0.99, 0.0)] {
            let v = eval_outer_modulus(&one, z).unwrap();
            assert!((v - c(std::f64::consts::E, 0.0)).norm() < 1e-9, "{z}: {v}");
        }
        for z in [c(3.0, 1.0), c(-1.02, 0.0)] {
            let v = eval_outer_modulus(&one, z).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 1e-9, "{z}: {v}");
        }
        assert!(matches!(eval_outer_modulus(&one, c(0.0, 1.0)), Err(EvalError::OnUnitCircle(_))));
    }

    #[test]
    fn circle_jumps() {
        let g = AnalyticFactor::circle(PiecewiseCircle::arc(0.0, PI, Level::pi_frac(1, 4)).unwrap());
        let j = circle_jump_log(&g, PI / 2.0).unwrap();
        assert!((j.im - PI / 2.0).abs() < 1e-8 && j.re.abs() < 1e-8, "{j}");
        let plus = boundary_limit_circle(&g, PI / 2.0, Side::Plus).unwrap();
        assert!((plus.arg() - PI / 4.0).abs() < 1e-8);

        let mu = AnalyticFactor::outer_modulus(PiecewiseCircle::constant(Level::Real(1.0)));
        let j = circle_jump_log(&mu, 1.0).unwrap();
        assert!((j.re - 1.0).abs() < 1e-8 && j.im.abs() < 1e-8, "{j}");

        let line = AnalyticFactor::line(pi_chi(0, 1));
        assert_eq!(boundary_limit_circle(&line, 1.0, Side::Plus), Err(EvalError::NonCircleFactor));
        assert!(matches!(boundary_limit_circle(&g, 0.0, Side::Plus), Err(EvalError::Breakpoint(_))));
    }

    #[test]
    fn richardson_removes_low_order_terms() {
        let eps = limit_schedule();
        let vals: Vec<Complex64> = eps.iter().map(|&e| c(1.0 + 3.0 * e - 2.0 * e * e, e)).collect();
        let (v, _) = richardson(&eps, &vals, 2);
        assert!((v - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn rational_and_reciprocal() {
        let r = AnalyticFactor::rational(-2.0, vec![(1.0, 1), (3.0, -2), (5.0, 0)]);
        let z = c(0.5, 0.5);
        let want = -2.0 * (z - 1.0) / ((z - 3.0) * (z - 3.0));
        assert!((r.eval(z).unwrap() - want).norm() < 1e-14);
        assert_eq!(r.singular_support().points, vec![1.0, 3.0]);
        let f = AnalyticFactor::product(vec![
            r.clone(),
            AnalyticFactor::line(pi_chi(0, 1)),
            AnalyticFactor::circle(PiecewiseCircle::arc(0.1, 0.5, Level::Real(0.3)).unwrap()),
        ]);
        let both = AnalyticFactor::product(vec![f.clone(), f.reciprocal()]);
        assert_eq!(both.members().len(), 6);
        assert!((both.eval(c(-0.2, 0.7)).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn joukowski_support_and_value() {
        let inner = AnalyticFactor::line(PiecewiseReal::indicator(Point::int(-1), Point::int(3), Level::pi_int(1)).unwrap());
        let n = AnalyticFactor::joukowski(inner.clone());
        let z = c(0.4, 1.7);
        assert!((n.eval(z).unwrap() - inner.eval(z + z.inv()).unwrap()).norm() < 1e-14);
        let s = n.singular_support();
        // λ ∈ [2, 3] pulls back to [1, (3+√5)/2] and its reciprocal
        let g = 0.5 * (3.0 + 5f64.sqrt());
        assert!(s.line.iter().any(|&(a, b)| (a - 1.0).abs() < 1e-12 && (b - g).abs() < 1e-12));
        assert!(s.line.iter().any(|&(a, b)| (a - 1.0 / g).abs() < 1e-12 && (b - 1.0).abs() < 1e-12));
        // λ ∈ [−1, 2] is the arc θ ∈ [0, 2π/3] and its mirror
        assert!(s.arcs.iter().any(|&(a, b)| a.abs() < 1e-12 && (b - 2.0 * PI / 3.0).abs() < 1e-12));
        assert!(s.contains(c(0.0, 1.0), 1e-12));
        assert!(!s.contains(c(0.0, -0.5), 0.1));
    }

    #[test]
    fn represent_from_argument_contract() {
        let one = represent_from_argument(&ArgumentData::HalfPlane(PiecewiseReal::zero()), 10.0).unwrap();
        assert_eq!(one.eval(c(0.3, 0.3)).unwrap(), c(1.0, 0.0));
        let f = represent_from_argument(&ArgumentData::HalfPlane(pi_chi(0, 1)), 10.0).unwrap();
        for t in [0.25, 0.5, 0.9] {
            let v = limit_on_line(&f, t, Side::Plus).unwrap();
            assert!((v.log.im - PI).abs() < 1e-6);
        }
        let v = limit_on_line(&f, 2.0, Side::Plus).unwrap();
        assert!(v.log.im.abs() < 1e-6);
        assert!(matches!(
            represent_from_argument(&ArgumentData::HalfPlane(pi_chi(0, 1)), 1.0),
            Err(EvalError::UnboundedArgument { .. })
        ));
    }

    #[test]
    fn sampled_profile_matches_piecewise_constant_limit() {
        // a steep ramp approximates the indicator of (0, 1)
        let h = 1e-7;
        let p = SampledProfile::new(vec![(-h, 0.0), (h, PI), (1.0 - h, PI), (1.0 + h, 0.0)]).unwrap();
        let z = c(0.3, 0.8);
        let a = AnalyticFactor::sampled_line(p).eval(z).unwrap();
        let b = eval_line_factor(&pi_chi(0, 1), z, LineMethod::Closed).unwrap();
        assert!((a - b).norm() < 1e-6, "{a} vs {b}");
    }
}
