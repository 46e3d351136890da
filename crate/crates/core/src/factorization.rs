//! Factorization `N(z) = R(z) R(1/z)` of a symmetric function with a
//! prescribed modulus jump of `R` across the unit circle.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{ArcPiece, BoundaryError, Parity, Piece, PiecewiseCircle, PiecewiseReal};
use crate::cauchy::{AnalyticFactor, EvalError};
use crate::numbers::{Level, Point};
use crate::sets::{
    decompose_delta, decompose_delta_hardy, DeltaComponent, IntervalClassification, Interval, SetError,
    SigmaDecomposition,
};

/// Pipeline stage, attached to errors raised inside [`factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    SplitM,
    DecomposeDelta,
    ValidatePlateaus,
    HardyCover,
    FactorizeN1,
    FactorizeN0,
    Assemble,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::SplitM => "split_m",
            Stage::DecomposeDelta => "decompose_delta",
            Stage::ValidatePlateaus => "validate_plateaus",
            Stage::HardyCover => "hardy_cover",
            Stage::FactorizeN1 => "factorize_n1",
            Stage::FactorizeN0 => "factorize_n0",
            Stage::Assemble => "assemble",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorizationError {
    #[error("λ = {0} lies on the cut [−2, 2]")]
    BranchCut(Complex64),
    #[error("ν = {value} on ({lo}, {hi}) is not an integer multiple of π")]
    NonIntegerPlateau { lo: f64, hi: f64, value: String },
    #[error("ν is not constant on ({lo}, {hi})")]
    NonConstantPlateau { lo: f64, hi: f64 },
    #[error("the circle data is not odd in θ")]
    NotOdd,
    #[error("μ is not even in θ")]
    NotEven,
    #[error("the ratio R(z)R(1/z)/N(z) varies by {spread:e} over the reference points")]
    NonConstantRatio { spread: f64 },
    #[error("the normalizing constant {0} is not positive")]
    NegativeConstant(f64),
    #[error("oscillation {oscillation} on ({lo}, {hi}) is not below {bound}")]
    OscillationTooLarge { lo: f64, hi: f64, oscillation: f64, bound: f64 },
    #[error("the interval [{lo}, {hi}] of Ω₂ is not covered")]
    CoverIncomplete { lo: f64, hi: f64 },
    #[error("scale {0} is not positive")]
    NonPositiveScale(f64),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{stage}: {source}")]
    AtStage { stage: Stage, source: Box<FactorizationError> },
}

impl FactorizationError {
    /// The error without its stage annotation.
    pub fn root(&self) -> &FactorizationError {
        match self {
            FactorizationError::AtStage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            FactorizationError::AtStage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

fn at<T, E: Into<FactorizationError>>(stage: Stage, r: Result<T, E>) -> Result<T, FactorizationError> {
    r.map_err(|e| FactorizationError::AtStage {
        stage,
        source: Box::new(e.into()),
    })
}

/// `λ = z + 1/z`.
pub fn joukowski(z: Complex64) -> Complex64 {
    z + z.inv()
}

/// The preimage of `λ` with `|z| > 1`.
pub fn joukowski_inverse(lambda: Complex64) -> Result<Complex64, FactorizationError> {
    if lambda.im == 0.0 && lambda.re.abs() <= 2.0 {
        return Err(FactorizationError::BranchCut(lambda));
    }
    let w = (lambda * lambda - 4.0).sqrt();
    let (a, b) = (0.5 * (lambda + w), 0.5 * (lambda - w));
    Ok(if a.norm() >= b.norm() { a } else { b })
}

/// `N(z) = scale · P(z + 1/z, η)`, given by the boundary argument `η` of
/// `M(λ) = N(z)` on the λ-line.
#[derive(Debug, Clone, PartialEq)]
pub struct JoukowskiProfile {
    pub eta: PiecewiseReal,
    pub scale: f64,
    /// An independent evaluator of `N`, used in place of the one built from
    /// `η` when determining the constant.
    pub cross_check: Option<AnalyticFactor>,
}

impl JoukowskiProfile {
    pub fn new(eta: PiecewiseReal, scale: f64) -> Result<Self, FactorizationError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(FactorizationError::NonPositiveScale(scale));
        }
        Ok(JoukowskiProfile {
            eta,
            scale,
            cross_check: None,
        })
    }

    pub fn with_cross_check(mut self, n: AnalyticFactor) -> Self {
        self.cross_check = Some(n);
        self
    }

    /// The evaluator of `N` built from `(η, scale)`.
    pub fn n_factor(&self) -> AnalyticFactor {
        synthesize_n(&self.eta, self.scale)
    }

    fn reference_n(&self) -> AnalyticFactor {
        self.cross_check.clone().unwrap_or_else(|| self.n_factor())
    }
}

/// `z ↦ scale · P(z + 1/z, η)`. Symmetric under `z ↦ 1/z` and real on ℝ
/// by construction.
pub fn synthesize_n(eta: &PiecewiseReal, scale: f64) -> AnalyticFactor {
    AnalyticFactor::product(vec![
        AnalyticFactor::constant(scale),
        AnalyticFactor::joukowski(AnalyticFactor::line(eta.clone())),
    ])
}

/// `η` split at `±2`, with both parts carried to the `z`-plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorSplit {
    /// `χ_[−2,2] η`.
    pub m0_arg: PiecewiseReal,
    /// `χ_ℝ∖[−2,2] η`.
    pub m1_arg: PiecewiseReal,
    /// `arg N₀⁺(e^{iθ})`: `−η(2cos θ)` for `θ ∈ [0, π)`, `η(2cos θ)` below.
    pub nu_hat0: PiecewiseCircle,
    /// `arg N₁⁺(t)`: `η(t + 1/t)` for `|t| > 1`, `−η(t + 1/t)` for `|t| < 1`.
    pub nu: PiecewiseReal,
}

pub fn split_m(profile: &JoukowskiProfile) -> Result<FactorSplit, FactorizationError> {
    let eta = &profile.eta;
    let two = Point::int(2);
    let m0_arg = eta.restrict(&[Interval { lo: two.neg(), hi: two }]);
    let m1_arg = eta.restrict(&[
        Interval {
            lo: Point::NegInf,
            hi: two.neg(),
        },
        Interval {
            lo: two,
            hi: Point::PosInf,
        },
    ]);

    // each monotone branch of t ↦ t + 1/t carries λ-breakpoints exactly
    let mut nu_pieces = Vec::new();
    for p in m1_arg.pieces() {
        let (a, b) = (p.interval.lo.joukowski_outer_preimage(), p.interval.hi.joukowski_outer_preimage());
        let s = if a.signum() < 0 || b.signum() < 0 { -1 } else { 1 };
        nu_pieces.push(Piece::new(a, b, p.value));
        nu_pieces.push(Piece::new(b.recip(s), a.recip(s), -p.value));
    }
    let nu = PiecewiseReal::new(nu_pieces)?;

    let mut arcs = Vec::new();
    for p in m0_arg.pieces() {
        let (lo, hi) = (p.interval.lo.to_f64().max(-2.0), p.interval.hi.to_f64().min(2.0));
        let (t0, t1) = ((hi / 2.0).acos(), (lo / 2.0).acos());
        arcs.push(ArcPiece {
            lo: t0,
            hi: t1,
            value: -p.value,
        });
        arcs.push(ArcPiece {
            lo: -t1,
            hi: -t0,
            value: p.value,
        });
    }
    let nu_hat0 = PiecewiseCircle::new(arcs)?;
    Ok(FactorSplit {
        m0_arg,
        m1_arg,
        nu_hat0,
        nu,
    })
}

/// A finite family of disjoint open intervals covering `Ω₂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyCover {
    pub delta_l: Vec<Interval>,
}

/// Plateau integers of `ν` on the components of `Δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plateaus {
    /// `n(k)` on the chosen components, in classification order.
    pub chosen: Vec<i64>,
    /// `n` on `Δ′` components.
    pub prime: Vec<i64>,
    /// `n` on `Δ″` components.
    pub double_prime: Vec<i64>,
    /// `ñ`: `n` on each component, `−n` on its `V`-image; in units of π.
    pub n_tilde: PiecewiseReal,
}

// open intervals of iv with the closed intervals in `removed` taken out
fn subtract(iv: Interval, removed: &[Interval]) -> Vec<Interval> {
    let mut out = vec![iv];
    for r in removed {
        out = out
            .into_iter()
            .flat_map(|s| {
                if !r.lo.lt(&s.hi) || !s.lo.lt(&r.hi) {
                    return vec![s];
                }
                let mut parts = Vec::new();
                if s.lo.lt(&r.lo) {
                    parts.push(Interval { lo: s.lo, hi: r.lo });
                }
                if r.hi.lt(&s.hi) {
                    parts.push(Interval { lo: r.hi, hi: s.hi });
                }
                parts
            })
            .collect();
    }
    out
}

// the distinct values of f on the open interval (a, b), 0 included where uncovered
fn values_on(f: &PiecewiseReal, iv: Interval) -> Vec<Level> {
    let mut vals: Vec<Level> = Vec::new();
    let mut cursor = iv.lo;
    let mut gap = false;
    for p in f.pieces() {
        if !p.interval.lo.lt(&iv.hi) || !iv.lo.lt(&p.interval.hi) {
            continue;
        }
        if cursor.lt(&p.interval.lo) {
            gap = true;
        }
        cursor = cursor.max(p.interval.hi);
        if !vals.contains(&p.value) {
            vals.push(p.value);
        }
    }
    if gap || cursor.lt(&iv.hi) {
        let z = Level::zero();
        if !vals.contains(&z) {
            vals.push(z);
        }
    }
    vals
}

fn plateau_of(nu: &PiecewiseReal, comp: &DeltaComponent, omega2: &[Interval]) -> Result<i64, FactorizationError> {
    let segments: Vec<Interval> = comp
        .real_pieces()
        .into_iter()
        .flat_map(|iv| subtract(iv, omega2))
        .collect();
    let mut seen: Vec<Level> = Vec::new();
    for s in &segments {
        for v in values_on(nu, *s) {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
    }
    let (lo, hi) = (comp.start.to_f64(), comp.end.to_f64());
    match seen.as_slice() {
        [] => Ok(0),
        [v] => v.pi_integer().ok_or_else(|| FactorizationError::NonIntegerPlateau {
            lo,
            hi,
            value: v.to_string(),
        }),
        _ => Err(FactorizationError::NonConstantPlateau { lo, hi }),
    }
}

/// Reads off `n = ν/π` on every component of `Δ`. Outside the Hardy variant
/// `ν` must be a constant integer multiple of π on each component; in it,
/// only on the part of each component outside `Ω₂`.
pub fn validate_plateaus(
    nu: &PiecewiseReal,
    classification: &IntervalClassification,
) -> Result<Plateaus, FactorizationError> {
    let omega2: Vec<Interval> = if classification.hardy {
        classification.sigma.omega2.intervals().to_vec()
    } else {
        Vec::new()
    };
    let chosen = classification
        .chosen
        .iter()
        .map(|c| plateau_of(nu, &c.component, &omega2))
        .collect::<Result<Vec<_>, _>>()?;
    let prime = classification
        .delta_prime
        .iter()
        .map(|c| plateau_of(nu, c, &omega2))
        .collect::<Result<Vec<_>, _>>()?;
    let double_prime = classification
        .delta_double_prime
        .iter()
        .map(|c| plateau_of(nu, c, &omega2))
        .collect::<Result<Vec<_>, _>>()?;

    let mut pieces = Vec::new();
    let comps = classification.components();
    let ns = chosen.iter().chain(prime.iter()).chain(double_prime.iter());
    for (comp, &n) in comps.zip(ns) {
        for iv in comp.real_pieces() {
            pieces.push(Piece {
                interval: iv,
                value: Level::pi_int(n),
            });
        }
        for iv in comp.v_pieces() {
            pieces.push(Piece {
                interval: iv,
                value: Level::pi_int(-n),
            });
        }
    }
    Ok(Plateaus {
        chosen,
        prime,
        double_prime,
        n_tilde: PiecewiseReal::new(pieces)?,
    })
}

/// The factors of `N₁ = C·R₀₁₂(z)R₀₁₂(1/z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct N1Factors {
    pub r0: AnalyticFactor,
    pub r0_prime: AnalyticFactor,
    pub r0_double_prime: AnalyticFactor,
    pub r1: AnalyticFactor,
    pub r2: AnalyticFactor,
}

impl N1Factors {
    pub fn product(&self) -> AnalyticFactor {
        AnalyticFactor::product(vec![
            self.r0.clone(),
            self.r0_prime.clone(),
            self.r0_double_prime.clone(),
            self.r1.clone(),
            self.r2.clone(),
        ])
    }
}

fn open(ivs: &[Interval]) -> Vec<Interval> {
    ivs.to_vec()
}

fn v_pieces_of<'a>(comps: impl Iterator<Item = &'a DeltaComponent>) -> Vec<Interval> {
    comps.flat_map(|c| c.v_pieces()).collect()
}

fn real_pieces_of<'a>(comps: impl Iterator<Item = &'a DeltaComponent>) -> Vec<Interval> {
    comps.flat_map(|c| c.real_pieces()).collect()
}

/// `R₀ = Π ((z − β*)/(z − α*))^{n(k)}`; a starred endpoint at infinity turns
/// its factor into `P(z, n(k)π χ_(α*, β*))`.
pub fn build_r0(classification: &IntervalClassification, n: &[i64]) -> Result<AnalyticFactor, FactorizationError> {
    let mut roots = Vec::new();
    let mut extra = Vec::new();
    for (c, &nk) in classification.chosen.iter().zip(n) {
        if nk == 0 {
            continue;
        }
        if c.has_infinite_star() {
            let (lo, hi, k) = if c.alpha_star.lt(&c.beta_star) {
                (c.alpha_star, c.beta_star, nk)
            } else {
                (c.beta_star, c.alpha_star, -nk)
            };
            extra.push(AnalyticFactor::line(PiecewiseReal::indicator(lo, hi, Level::pi_int(k))?));
        } else {
            roots.push((c.beta_star.to_f64(), nk));
            roots.push((c.alpha_star.to_f64(), -nk));
        }
    }
    let mut merged: Vec<(f64, i64)> = Vec::new();
    for (p, m) in roots {
        match merged.iter_mut().find(|(q, _)| *q == p) {
            Some(e) => e.1 += m,
            None => merged.push((p, m)),
        }
    }
    let r = AnalyticFactor::rational(1.0, merged);
    if extra.is_empty() {
        Ok(r)
    } else {
        extra.insert(0, r);
        Ok(AnalyticFactor::product(extra))
    }
}

/// `R₀, R₀′, R₀″, R₁, R₂` from `ν` and the classification.
pub fn factorize_n1(
    nu: &PiecewiseReal,
    classification: &IntervalClassification,
    plateaus: &Plateaus,
) -> Result<N1Factors, FactorizationError> {
    let sigma = &classification.sigma;
    let half = Rational64::new(1, 2);
    let v_prime = v_pieces_of(classification.delta_prime.iter());
    let dd = real_pieces_of(classification.delta_double_prime.iter());
    let omega1 = open(sigma.omega1.intervals());
    let omega2 = open(sigma.omega2.intervals());

    let r0 = build_r0(classification, &plateaus.chosen)?;
    let r1 = AnalyticFactor::line(nu.restrict(&omega1));
    let (r0_prime, r0_double_prime, r2) = if classification.hardy {
        let nt = &plateaus.n_tilde;
        (
            AnalyticFactor::line(nt.restrict(&v_prime)),
            AnalyticFactor::line(nt.restrict(&dd)),
            AnalyticFactor::line(nu.sub(nt).restrict(&omega2).scale(half)),
        )
    } else {
        (
            AnalyticFactor::line(nu.restrict(&v_prime)),
            AnalyticFactor::line(nu.restrict(&dd)),
            AnalyticFactor::line(nu.restrict(&omega2).scale(half)),
        )
    };
    Ok(N1Factors {
        r0,
        r0_prime,
        r0_double_prime,
        r1,
        r2,
    })
}

/// `R₃ = P̂(·, ν̂₀/2)`, which satisfies `R₃(z)R₃(1/z) = P̂(z, ν̂₀)` for odd `ν̂₀`.
pub fn factorize_n0(nu_hat0: &PiecewiseCircle) -> Result<AnalyticFactor, FactorizationError> {
    match nu_hat0.parity() {
        Parity::Zero | Parity::Odd => Ok(AnalyticFactor::circle(nu_hat0.scale(Rational64::new(1, 2)))),
        _ => Err(FactorizationError::NotOdd),
    }
}

/// Points where the normalizing constant is sampled; they keep clear of ℝ
/// and of the unit circle.
pub const REFERENCE_POINTS: [(f64, f64); 8] = [
    (0.3, 0.45),
    (-0.2, 0.5),
    (0.1, -0.6),
    (-0.45, -0.3),
    (1.5, 1.2),
    (-2.0, 0.8),
    (0.7, -1.9),
    (-1.3, -1.6),
];

/// Agreement required between the samples of the constant.
pub const CONSTANT_TOL: f64 = 1e-6;

/// `R(z)R(1/z)/N(z)` at the reference points.
pub fn constant_samples(r: &AnalyticFactor, n: &AnalyticFactor) -> Result<Vec<Complex64>, EvalError> {
    REFERENCE_POINTS
        .iter()
        .map(|&(x, y)| {
            let z = Complex64::new(x, y);
            Ok((r.log_eval(z)? + r.log_eval(z.inv())? - n.log_eval(z)?).exp())
        })
        .collect()
}

/// Everything the factorization produces.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationResult {
    pub r0: AnalyticFactor,
    pub r0_prime: AnalyticFactor,
    pub r0_double_prime: AnalyticFactor,
    pub r1: AnalyticFactor,
    pub r2: AnalyticFactor,
    pub r3: AnalyticFactor,
    pub r_mu: AnalyticFactor,
    /// `C` with `R₀₁₂₃μ(z)R₀₁₂₃μ(1/z) = C·N(z)`.
    pub constant_c: f64,
    /// `R = R₀₁₂₃μ / √C`.
    pub assembled_r: AnalyticFactor,
    pub classification: IntervalClassification,
    pub split: FactorSplit,
    pub plateaus: Plateaus,
    pub hardy_mode: bool,
    /// `ñ` (in units of π), present in the Hardy variant.
    pub n_tilde: Option<PiecewiseReal>,
    /// The evaluator of `N` the constant was fitted against.
    pub n: AnalyticFactor,
}

impl FactorizationResult {
    /// `R₀₁₂₃μ` before normalization.
    pub fn unscaled_r(&self) -> AnalyticFactor {
        AnalyticFactor::product(vec![
            self.r0.clone(),
            self.r0_prime.clone(),
            self.r0_double_prime.clone(),
            self.r1.clone(),
            self.r2.clone(),
            self.r3.clone(),
            self.r_mu.clone(),
        ])
    }
}

/// Multiplies the parts with `R_μ`, fits the constant and normalizes.
pub fn assemble(
    n1: N1Factors,
    r3: AnalyticFactor,
    ln_mu: &PiecewiseCircle,
    n: AnalyticFactor,
) -> Result<(AnalyticFactor, f64, AnalyticFactor, [AnalyticFactor; 7]), FactorizationError> {
    if !matches!(ln_mu.parity(), Parity::Zero | Parity::Even) {
        return Err(FactorizationError::NotEven);
    }
    let r_mu = AnalyticFactor::outer_modulus(ln_mu.clone());
    let parts = [n1.r0, n1.r0_prime, n1.r0_double_prime, n1.r1, n1.r2, r3, r_mu];
    let unscaled = AnalyticFactor::product(parts.to_vec());
    let q = constant_samples(&unscaled, &n)?;
    let q0 = q[0];
    let spread = q
        .iter()
        .map(|v| (v - q0).norm() / q0.norm())
        .chain(q.iter().map(|v| v.im.abs() / v.norm()))
        .fold(0.0, f64::max);
    if !(spread <= CONSTANT_TOL) {
        return Err(FactorizationError::NonConstantRatio { spread });
    }
    let c = q.iter().map(|v| v.re).sum::<f64>() / q.len() as f64;
    if !(c > 0.0) {
        return Err(FactorizationError::NegativeConstant(c));
    }
    let assembled = AnalyticFactor::product(vec![unscaled, AnalyticFactor::constant(c.sqrt().recip())]);
    Ok((assembled, c, n, parts))
}

fn run(
    profile: &JoukowskiProfile,
    classification: IntervalClassification,
    ln_mu: &PiecewiseCircle,
    cover: Option<&HardyCover>,
) -> Result<FactorizationResult, FactorizationError> {
    let split = at(Stage::SplitM, split_m(profile))?;
    let plateaus = at(Stage::ValidatePlateaus, validate_plateaus(&split.nu, &classification))?;
    if let Some(cover) = cover {
        at(Stage::HardyCover, check_cover(&split.nu, &plateaus, &classification.sigma, cover))?;
    }
    let n1 = at(Stage::FactorizeN1, factorize_n1(&split.nu, &classification, &plateaus))?;
    let r3 = at(Stage::FactorizeN0, factorize_n0(&split.nu_hat0))?;
    let (assembled_r, constant_c, n, parts) = at(Stage::Assemble, assemble(n1, r3, ln_mu, profile.reference_n()))?;
    let [r0, r0_prime, r0_double_prime, r1, r2, r3, r_mu] = parts;
    let hardy_mode = classification.hardy;
    Ok(FactorizationResult {
        r0,
        r0_prime,
        r0_double_prime,
        r1,
        r2,
        r3,
        r_mu,
        constant_c,
        assembled_r,
        n_tilde: hardy_mode.then(|| plateaus.n_tilde.clone()),
        classification,
        split,
        plateaus,
        hardy_mode,
        n,
    })
}

/// The full pipeline for a function given by its Joukowski profile.
pub fn factorize(
    profile: &JoukowskiProfile,
    sigma: &SigmaDecomposition,
    ln_mu: &PiecewiseCircle,
) -> Result<FactorizationResult, FactorizationError> {
    let classification = at(Stage::DecomposeDelta, decompose_delta(sigma))?;
    run(profile, classification, ln_mu, None)
}

/// The variant whose `R` is locally of Hardy class `H²` near `Ω₂`.
pub fn factorize_hardy(
    profile: &JoukowskiProfile,
    sigma: &SigmaDecomposition,
    ln_mu: &PiecewiseCircle,
    cover: &HardyCover,
) -> Result<FactorizationResult, FactorizationError> {
    let classification = at(Stage::DecomposeDelta, decompose_delta_hardy(sigma))?;
    run(profile, classification, ln_mu, Some(cover))
}

/// Checks that the cover contains `Ω₂`, that `ν` oscillates by less than π
/// on each `δ_l`, and that the data of `R₂` oscillates by less than π/2.
pub fn check_cover(
    nu: &PiecewiseReal,
    plateaus: &Plateaus,
    sigma: &SigmaDecomposition,
    cover: &HardyCover,
) -> Result<(), FactorizationError> {
    for (i, a) in cover.delta_l.iter().enumerate() {
        if !(a.lo.is_finite() && a.hi.is_finite()) {
            return Err(BoundaryError::EmptyIntersection(a.lo.to_f64(), a.hi.to_f64()).into());
        }
        for b in &cover.delta_l[i + 1..] {
            if a.lo.lt(&b.hi) && b.lo.lt(&a.hi) {
                return Err(BoundaryError::Overlap(a.lo.to_f64(), a.hi.to_f64(), b.lo.to_f64(), b.hi.to_f64()).into());
            }
        }
    }
    for w in sigma.omega2.intervals() {
        let covered = cover.delta_l.iter().any(|d| d.lo.lt(&w.lo) && w.hi.lt(&d.hi));
        if !covered {
            return Err(FactorizationError::CoverIncomplete {
                lo: w.lo.to_f64(),
                hi: w.hi.to_f64(),
            });
        }
    }
    let omega2 = open(sigma.omega2.intervals());
    let r2_data = nu.sub(&plateaus.n_tilde).restrict(&omega2).scale(Rational64::new(1, 2));
    for d in &cover.delta_l {
        let (lo, hi) = (d.lo.to_f64(), d.hi.to_f64());
        for (f, bound) in [(nu, PI), (&r2_data, PI / 2.0)] {
            let oscillation = f.oscillation(lo, hi)?;
            if !(oscillation < bound - 1e-12) {
                return Err(FactorizationError::OscillationTooLarge {
                    lo,
                    hi,
                    oscillation,
                    bound,
                });
            }
        }
    }
    Ok(())
}

/// One of the pair identities `P(z, χν)P(z, V(χ)ν) = C·R_x(z)R_x(1/z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub name: &'static str,
    /// The product of the two `P` factors on the left.
    pub lhs: AnalyticFactor,
    /// `R_x`.
    pub factor: AnalyticFactor,
    /// Whether the identity holds only up to a positive constant.
    pub up_to_constant: bool,
}

/// The pair identities for the parts of `N₁ = P(·, ν)`.
pub fn factor_pairs(nu: &PiecewiseReal, result: &FactorizationResult) -> Result<Vec<FactorPair>, FactorizationError> {
    let cls = &result.classification;
    let sigma = &cls.sigma;
    let half = Rational64::new(1, 2);
    let line = |ivs: &[Interval], f: &PiecewiseReal| AnalyticFactor::line(f.restrict(ivs));
    let pair = |ivs: Vec<Interval>, f: &PiecewiseReal| -> Result<AnalyticFactor, FactorizationError> {
        let mut v: Vec<Interval> = ivs.iter().map(|iv| iv.v_image()).collect::<Result<_, _>>()?;
        v.sort_by(|a, b| a.lo.cmp_tol(&b.lo));
        Ok(AnalyticFactor::product(vec![line(&ivs, f), line(&v, f)]))
    };
    let (data_prime, data_dd, data_2) = if cls.hardy {
        let nt = &result.plateaus.n_tilde;
        (nt.clone(), nt.clone(), nu.sub(nt))
    } else {
        (nu.clone(), nu.clone(), nu.clone())
    };
    let omega2 = open(sigma.omega2.intervals());
    let chosen: Vec<Interval> = real_pieces_of(cls.chosen.iter().map(|c| &c.component));
    let chosen_data = if cls.hardy { &result.plateaus.n_tilde } else { nu };
    Ok(vec![
        FactorPair {
            name: "omega1",
            lhs: pair(open(sigma.omega1.intervals()), nu)?,
            factor: result.r1.clone(),
            up_to_constant: false,
        },
        FactorPair {
            name: "omega2",
            lhs: AnalyticFactor::line(data_2.restrict(&omega2)),
            factor: AnalyticFactor::line(data_2.restrict(&omega2).scale(half)),
            up_to_constant: false,
        },
        FactorPair {
            name: "delta_prime",
            lhs: pair(real_pieces_of(cls.delta_prime.iter()), &data_prime)?,
            factor: result.r0_prime.clone(),
            up_to_constant: false,
        },
        FactorPair {
            name: "delta_double_prime",
            lhs: pair(real_pieces_of(cls.delta_double_prime.iter()), &data_dd)?,
            factor: result.r0_double_prime.clone(),
            up_to_constant: false,
        },
        FactorPair {
            name: "chosen",
            lhs: pair(chosen, chosen_data)?,
            factor: result.r0.clone(),
            up_to_constant: true,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{validate_sigma, RealSet};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn set(ivs: &[((i64, i64), (i64, i64))]) -> RealSet {
        RealSet::new(ivs.iter().map(|&(a, b)| Interval::ratio(a, b)).collect()).unwrap()
    }

    fn worked_sigma() -> SigmaDecomposition {
        validate_sigma(set(&[((1, 2), (3, 4))]), set(&[((1, 4), (1, 3)), ((3, 1), (4, 1))])).unwrap()
    }

    fn worked_eta() -> PiecewiseReal {
        PiecewiseReal::new(vec![
            Piece::new(Point::int(2), Point::ratio(10, 3), Level::pi_int(1)),
            Piece::new(Point::ratio(10, 3), Point::ratio(17, 4), Level::pi_frac(1, 3)),
        ])
        .unwrap()
    }

    #[test]
    fn joukowski_round_trip() {
        assert_eq!(joukowski(c(2.0, 0.0)), c(2.5, 0.0));
        assert!((joukowski_inverse(c(2.5, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        let z = Complex64::from_polar(1.0, PI / 3.0);
        assert!((joukowski(z) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(joukowski_inverse(c(1.0, 0.0)), Err(FactorizationError::BranchCut(_))));
        for l in [c(0.3, 0.2), c(-5.0, 0.0), c(1.0, -3.0)] {
            let z = joukowski_inverse(l).unwrap();
            assert!(z.norm() > 1.0 && (joukowski(z) - l).norm() < 1e-13);
        }
    }

    #[test]
    fn split_of_the_fractional_piece() {
        let eta = PiecewiseReal::indicator(Point::ratio(10, 3), Point::ratio(17, 4), Level::pi_frac(1, 3)).unwrap();
        let s = split_m(&JoukowskiProfile::new(eta, 1.0).unwrap()).unwrap();
        let want = PiecewiseReal::new(vec![
            Piece::new(Point::ratio(1, 4), Point::ratio(1, 3), Level::pi_frac(-1, 3)),
            Piece::new(Point::int(3), Point::int(4), Level::pi_frac(1, 3)),
        ])
        .unwrap();
        assert_eq!(s.nu, want);
        assert!(s.nu.pieces().iter().all(|p| p.interval.lo.is_exact() && p.interval.hi.is_exact()));
        assert!(s.nu_hat0.is_zero());
    }

    #[test]
    fn split_inside_the_cut() {
        let eta = PiecewiseReal::indicator(Point::int(-1), Point::int(1), Level::pi_frac(1, 4)).unwrap();
        let s = split_m(&JoukowskiProfile::new(eta, 1.0).unwrap()).unwrap();
        assert!(s.nu.is_zero());
        assert!(s.nu_hat0.is_odd());
        let v = s.nu_hat0.value_at(PI / 2.0).unwrap().to_f64();
        assert!((v + PI / 4.0).abs() < 1e-15);
        let v = s.nu_hat0.value_at(-PI / 2.0).unwrap().to_f64();
        assert!((v - PI / 4.0).abs() < 1e-15);
        assert!(s.nu_hat0.value_at(0.5).unwrap().is_zero());
    }

    #[test]
    fn nu_is_odd_under_inversion() {
        let s = split_m(&JoukowskiProfile::new(worked_eta(), 1.0).unwrap()).unwrap();
        assert_eq!(s.nu.v_func().unwrap(), s.nu.neg());
    }

    #[test]
    fn plateaus_of_the_worked_instance() {
        let s = split_m(&JoukowskiProfile::new(worked_eta(), 1.0).unwrap()).unwrap();
        let cls = decompose_delta(&worked_sigma()).unwrap();
        let p = validate_plateaus(&s.nu, &cls).unwrap();
        assert_eq!(p.chosen, vec![1, 1]);
        assert_eq!(p.double_prime, vec![0]);

        let bad = PiecewiseReal::indicator(Point::int(2), Point::ratio(10, 3), Level::pi_frac(1, 2)).unwrap();
        let s = split_m(&JoukowskiProfile::new(bad, 1.0).unwrap()).unwrap();
        assert!(matches!(
            validate_plateaus(&s.nu, &cls),
            Err(FactorizationError::NonIntegerPlateau { .. })
        ));
    }

    #[test]
    fn r0_of_the_worked_instance() {
        let s = split_m(&JoukowskiProfile::new(worked_eta(), 1.0).unwrap()).unwrap();
        let cls = decompose_delta(&worked_sigma()).unwrap();
        let p = validate_plateaus(&s.nu, &cls).unwrap();
        let r0 = build_r0(&cls, &p.chosen).unwrap();
        for z in [c(0.2, 0.9), c(-3.0, -0.4)] {
            let want = (z - 0.75) / (z - 1.0) * (z - 3.0) / (z - 0.5);
            assert!((r0.eval(z).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn r3_squares_to_n0() {
        let g = PiecewiseCircle::new(vec![
            ArcPiece { lo: -2.0, hi: -0.5, value: Level::Real(0.7) },
            ArcPiece { lo: 0.5, hi: 2.0, value: Level::Real(-0.7) },
        ])
        .unwrap();
        let r3 = factorize_n0(&g).unwrap();
        let n0 = AnalyticFactor::circle(g);
        for z in [c(0.3, 0.2), c(-1.7, 0.4), c(0.1, -0.8)] {
            let got = r3.eval(z).unwrap() * r3.eval(z.inv()).unwrap() / n0.eval(z).unwrap();
            assert!((got - 1.0).norm() < 1e-8, "{z}: {got}");
        }
        let even = PiecewiseCircle::new(vec![
            ArcPiece { lo: -2.0, hi: -0.5, value: Level::Real(0.7) },
            ArcPiece { lo: 0.5, hi: 2.0, value: Level::Real(0.7) },
        ])
        .unwrap();
        assert_eq!(factorize_n0(&even), Err(FactorizationError::NotOdd));
    }

    #[test]
    fn trivial_factorization() {
        let sigma = validate_sigma(RealSet::empty(), RealSet::empty()).unwrap();
        let profile = JoukowskiProfile::new(PiecewiseReal::zero(), 1.0).unwrap();
        let res = factorize(&profile, &sigma, &PiecewiseCircle::zero()).unwrap();
        assert!((res.constant_c - 1.0).abs() < 1e-14);
        assert!((res.assembled_r.eval(c(0.4, 0.7)).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn worked_instance_factorizes() {
        let profile = JoukowskiProfile::new(worked_eta(), 2.5).unwrap();
        let ln_mu = PiecewiseCircle::new(vec![
            ArcPiece { lo: -2.5, hi: -1.0, value: Level::Real(0.4) },
            ArcPiece { lo: 1.0, hi: 2.5, value: Level::Real(0.4) },
        ])
        .unwrap();
        let res = factorize(&profile, &worked_sigma(), &ln_mu).unwrap();
        let n = profile.n_factor();
        for z in [c(0.2, 0.3), c(-2.5, 1.1), c(3.5, 0.2), c(0.6, -0.05)] {
            let r = &res.assembled_r;
            let got = r.eval(z).unwrap() * r.eval(z.inv()).unwrap();
            let want = n.eval(z).unwrap();
            assert!((got - want).norm() < 1e-7 * want.norm().max(1.0), "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn wrong_cross_check_is_a_non_constant_ratio() {
        let other = synthesize_n(&PiecewiseReal::indicator(Point::int(2), Point::int(3), Level::pi_int(1)).unwrap(), 1.0);
        let profile = JoukowskiProfile::new(worked_eta(), 1.0).unwrap().with_cross_check(other);
        let err = factorize(&profile, &worked_sigma(), &PiecewiseCircle::zero()).unwrap_err();
        assert_eq!(err.stage(), Some(Stage::Assemble));
        assert!(matches!(err.root(), FactorizationError::NonConstantRatio { .. }));
    }

    fn hardy_eta(mid: Level) -> PiecewiseReal {
        PiecewiseReal::new(vec![
            Piece::new(Point::NegInf, Point::int(-2), Level::pi_int(1)),
            Piece::new(Point::int(2), Point::ratio(10, 3), Level::pi_int(1)),
            Piece::new(Point::ratio(10, 3), Point::ratio(17, 4), mid),
            Piece::new(Point::ratio(17, 4), Point::PosInf, Level::pi_int(1)),
        ])
        .unwrap()
    }

    fn hardy_cover() -> HardyCover {
        HardyCover {
            delta_l: vec![Interval::ratio((2, 9), (2, 5)), Interval::ratio((5, 2), (9, 2))],
        }
    }

    #[test]
    fn hardy_worked_instance() {
        let profile = JoukowskiProfile::new(hardy_eta(Level::pi_frac(1, 3)), 1.0).unwrap();
        let res = factorize_hardy(&profile, &worked_sigma(), &PiecewiseCircle::zero(), &hardy_cover()).unwrap();
        assert!(res.hardy_mode);
        let r2_data = res.split.nu.sub(&res.plateaus.n_tilde).restrict(res.classification.sigma.omega2.intervals());
        let r2_data = r2_data.scale(Rational64::new(1, 2));
        assert_eq!(r2_data.value_at(3.5), Some(Level::pi_frac(-1, 3)));
        assert_eq!(r2_data.value_at(0.3), Some(Level::pi_frac(1, 3)));
        let n = profile.n_factor();
        for z in [c(0.2, 0.3), c(-2.5, 1.1), c(3.5, 0.2)] {
            let r = &res.assembled_r;
            let got = r.eval(z).unwrap() * r.eval(z.inv()).unwrap();
            let want = n.eval(z).unwrap();
            assert!((got - want).norm() < 1e-7 * want.norm().max(1.0), "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn hardy_rejects_a_large_step() {
        let profile = JoukowskiProfile::new(hardy_eta(Level::pi_frac(-1, 2)), 1.0).unwrap();
        let err = factorize_hardy(&profile, &worked_sigma(), &PiecewiseCircle::zero(), &hardy_cover()).unwrap_err();
        assert_eq!(err.stage(), Some(Stage::HardyCover));
        assert!(matches!(err.root(), FactorizationError::OscillationTooLarge { .. }), "{err}");
    }

    #[test]
    fn hardy_cover_must_contain_omega2() {
        let profile = JoukowskiProfile::new(hardy_eta(Level::pi_frac(1, 3)), 1.0).unwrap();
        let cover = HardyCover {
            delta_l: vec![Interval::ratio((5, 2), (9, 2))],
        };
        let err = factorize_hardy(&profile, &worked_sigma(), &PiecewiseCircle::zero(), &cover).unwrap_err();
        assert!(matches!(err.root(), FactorizationError::CoverIncomplete { .. }), "{err}");
    }
}
