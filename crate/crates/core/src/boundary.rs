//! Piecewise-constant boundary data on the real line and on the unit circle.

use std::f64::consts::PI;

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::numbers::{Level, Point, MEMBERSHIP_TOL};
use crate::sets::{Interval, SetError};

/// Default cap on the number of pieces a combination may produce.
pub const DEFAULT_PIECE_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("pieces ({0}, {1}) and ({2}, {3}) overlap")]
    Overlap(f64, f64, f64, f64),
    #[error("piece ({0}, {1}) is empty or has a non-finite value")]
    BadPiece(f64, f64),
    #[error("a piece contains 0 in its interior")]
    ZeroInSupport,
    #[error("arc ({0}, {1}) is not inside (-pi, pi]")]
    ArcOutOfRange(f64, f64),
    #[error("result has {0} pieces, more than the cap of {1}")]
    TooManyPieces(usize, usize),
    #[error("interval ({0}, {1}) must be bounded and nonempty")]
    EmptyIntersection(f64, f64),
    #[error("sample knots must be strictly increasing and finite")]
    BadSamples,
    #[error(transparent)]
    Set(#[from] SetError),
}

/// A constant value on an open interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub interval: Interval,
    pub value: Level,
}

impl Piece {
    pub fn new(lo: Point, hi: Point, value: Level) -> Self {
        Piece {
            interval: Interval { lo, hi },
            value,
        }
    }
}

/// A bounded real function on the line: constant on finitely many open
/// intervals and zero elsewhere. Values at breakpoints are left undefined.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PiecewiseReal {
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CombineOp {
    Add,
    Scale(Rational64),
    /// Zero `f` off the support of `g`.
    IndicatorMultiply,
}

impl PiecewiseReal {
    pub fn zero() -> Self {
        PiecewiseReal::default()
    }

    pub fn new(mut pieces: Vec<Piece>) -> Result<Self, BoundaryError> {
        for p in &pieces {
            let (a, b) = (p.interval.lo, p.interval.hi);
            if !a.lt(&b) || !p.value.to_f64().is_finite() {
                return Err(BoundaryError::BadPiece(a.to_f64(), b.to_f64()));
            }
        }
        pieces.sort_by(|a, b| a.interval.lo.cmp_tol(&b.interval.lo));
        for w in pieces.windows(2) {
            if w[1].interval.lo.lt(&w[0].interval.hi) {
                return Err(BoundaryError::Overlap(
                    w[0].interval.lo.to_f64(),
                    w[0].interval.hi.to_f64(),
                    w[1].interval.lo.to_f64(),
                    w[1].interval.hi.to_f64(),
                ));
            }
        }
        Ok(PiecewiseReal::normalized(pieces))
    }

    /// `value · χ_(lo, hi)`.
    pub fn indicator(lo: Point, hi: Point, value: Level) -> Result<Self, BoundaryError> {
        PiecewiseReal::new(vec![Piece::new(lo, hi, value)])
    }

    /// `value` on each of the given disjoint open intervals.
    pub fn on_intervals(intervals: &[Interval], value: Level) -> Result<Self, BoundaryError> {
        PiecewiseReal::new(
            intervals
                .iter()
                .filter(|iv| iv.lo.lt(&iv.hi))
                .map(|iv| Piece {
                    interval: *iv,
                    value,
                })
                .collect(),
        )
    }

    // drops zero pieces and merges touching pieces with equal values
    fn normalized(pieces: Vec<Piece>) -> Self {
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces.into_iter().filter(|p| !p.value.is_zero()) {
            match out.last_mut() {
                Some(last) if last.interval.hi.eq_tol(&p.interval.lo) && last.value == p.value => {
                    last.interval.hi = p.interval.hi;
                }
                _ => out.push(p),
            }
        }
        PiecewiseReal { pieces: out }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Sorted, deduplicated finite breakpoints.
    pub fn breakpoints(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = self
            .pieces
            .iter()
            .flat_map(|p| [p.interval.lo, p.interval.hi])
            .filter(|p| p.is_finite())
            .collect();
        sort_dedup(&mut pts);
        pts
    }

    pub fn is_breakpoint(&self, t: f64) -> bool {
        self.breakpoints()
            .iter()
            .any(|p| (p.to_f64() - t).abs() <= MEMBERSHIP_TOL * t.abs().max(1.0))
    }

    /// Value at `t`; `None` at a breakpoint.
    pub fn value_at(&self, t: f64) -> Option<Level> {
        if self.is_breakpoint(t) {
            return None;
        }
        Some(
            self.pieces
                .iter()
                .find(|p| p.interval.contains_open(t))
                .map(|p| p.value)
                .unwrap_or_else(Level::zero),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.value.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Combines two functions on their merged breakpoints.
    pub fn zip_with(
        &self,
        other: &PiecewiseReal,
        cap: usize,
        f: impl Fn(Level, Level) -> Level,
    ) -> Result<PiecewiseReal, BoundaryError> {
        let mut pts: Vec<Point> = vec![Point::NegInf, Point::PosInf];
        pts.extend(self.pieces.iter().flat_map(|p| [p.interval.lo, p.interval.hi]));
        pts.extend(other.pieces.iter().flat_map(|p| [p.interval.lo, p.interval.hi]));
        sort_dedup(&mut pts);
        let mut out = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let va = level_on(&self.pieces, &mut i, a, b);
            let vb = level_on(&other.pieces, &mut j, a, b);
            let v = f(va, vb);
            if !v.is_zero() {
                out.push(Piece::new(a, b, v));
            }
        }
        let res = PiecewiseReal::normalized(out);
        if res.pieces.len() > cap {
            return Err(BoundaryError::TooManyPieces(res.pieces.len(), cap));
        }
        Ok(res)
    }

    pub fn combine(
        &self,
        other: &PiecewiseReal,
        op: CombineOp,
    ) -> Result<PiecewiseReal, BoundaryError> {
        match op {
            CombineOp::Add => self.zip_with(other, DEFAULT_PIECE_CAP, |a, b| a + b),
            CombineOp::Scale(c) => Ok(self.scale(c)),
            CombineOp::IndicatorMultiply => self.zip_with(other, DEFAULT_PIECE_CAP, |a, b| {
                if b.is_zero() {
                    Level::zero()
                } else {
                    a
                }
            }),
        }
    }

    pub fn add(&self, other: &PiecewiseReal) -> PiecewiseReal {
        self.combine(other, CombineOp::Add)
            .expect("sum of capped functions")
    }

    pub fn sub(&self, other: &PiecewiseReal) -> PiecewiseReal {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PiecewiseReal {
        self.map_values(|v| -v)
    }

    pub fn scale(&self, c: Rational64) -> PiecewiseReal {
        self.map_values(|v| v.scale(c))
    }

    pub fn map_values(&self, f: impl Fn(Level) -> Level) -> PiecewiseReal {
        PiecewiseReal::normalized(
            self.pieces
                .iter()
                .map(|p| Piece {
                    interval: p.interval,
                    value: f(p.value),
                })
                .collect(),
        )
    }

    /// `f · χ_S` for `S` a union of disjoint open intervals.
    pub fn restrict(&self, support: &[Interval]) -> PiecewiseReal {
        let mask = PiecewiseReal::on_intervals(support, Level::pi_int(1))
            .expect("support intervals are disjoint");
        self.combine(&mask, CombineOp::IndicatorMultiply)
            .expect("restriction never grows the piece count past the inputs")
    }

    /// `t ↦ f(1/t)`. Pieces with 0 inside are split at 0.
    pub fn v_func(&self) -> Result<PiecewiseReal, BoundaryError> {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        for p in &self.pieces {
            let (a, b) = (p.interval.lo, p.interval.hi);
            if a.signum() < 0 && b.signum() > 0 {
                for half in [Interval { lo: a, hi: Point::int(0) }, Interval { lo: Point::int(0), hi: b }] {
                    out.push(Piece {
                        interval: half.v_image()?,
                        value: p.value,
                    });
                }
            } else {
                out.push(Piece {
                    interval: p.interval.v_image()?,
                    value: p.value,
                });
            }
        }
        PiecewiseReal::new(out)
    }

    /// Essential supremum minus essential infimum over the bounded interval `(lo, hi)`.
    pub fn oscillation(&self, lo: f64, hi: f64) -> Result<f64, BoundaryError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(BoundaryError::EmptyIntersection(lo, hi));
        }
        let mut values: Vec<f64> = Vec::new();
        let mut covered = 0.0;
        for p in &self.pieces {
            let a = p.interval.lo.to_f64().max(lo);
            let b = p.interval.hi.to_f64().min(hi);
            if b > a {
                values.push(p.value.to_f64());
                covered += b - a;
            }
        }
        if covered < (hi - lo) * (1.0 - 1e-12) {
            values.push(0.0);
        }
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(max - min)
    }
}

fn sort_dedup(pts: &mut Vec<Point>) {
    pts.sort_by(|a, b| a.cmp_tol(b));
    pts.dedup_by(|a, b| a.eq_tol(b));
}

// Value of a sorted piece list on the segment (a, b), advancing the cursor.
fn level_on(pieces: &[Piece], cursor: &mut usize, a: Point, b: Point) -> Level {
    while *cursor < pieces.len() && pieces[*cursor].interval.hi.le(&a) {
        *cursor += 1;
    }
    match pieces.get(*cursor) {
        Some(p) if p.interval.lo.le(&a) && b.le(&p.interval.hi) => p.value,
        _ => Level::zero(),
    }
}

/// A constant value on an open arc `(lo, hi)` of angles in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcPiece {
    pub lo: f64,
    pub hi: f64,
    pub value: Level,
}

/// Piecewise-constant data on the unit circle, indexed by `θ ∈ (−π, π]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PiecewiseCircle {
    pieces: Vec<ArcPiece>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    /// Identically zero; both even and odd.
    Zero,
    Even,
    Odd,
    Neither,
}

const ARC_TOL: f64 = 1e-12;

impl PiecewiseCircle {
    pub fn zero() -> Self {
        PiecewiseCircle::default()
    }

    pub fn new(mut pieces: Vec<ArcPiece>) -> Result<Self, BoundaryError> {
        for p in &pieces {
            if !(p.lo < p.hi) || !p.value.to_f64().is_finite() {
                return Err(BoundaryError::BadPiece(p.lo, p.hi));
            }
            if p.lo < -PI - ARC_TOL || p.hi > PI + ARC_TOL {
                return Err(BoundaryError::ArcOutOfRange(p.lo, p.hi));
            }
        }
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi - ARC_TOL {
                return Err(BoundaryError::Overlap(w[0].lo, w[0].hi, w[1].lo, w[1].hi));
            }
        }
        Ok(PiecewiseCircle::normalized(pieces))
    }

    pub fn arc(lo: f64, hi: f64, value: Level) -> Result<Self, BoundaryError> {
        PiecewiseCircle::new(vec![ArcPiece { lo, hi, value }])
    }

    /// A constant on the whole circle.
    pub fn constant(value: Level) -> Self {
        PiecewiseCircle::normalized(vec![ArcPiece {
            lo: -PI,
            hi: PI,
            value,
        }])
    }

    fn normalized(pieces: Vec<ArcPiece>) -> Self {
        let mut out: Vec<ArcPiece> = Vec::with_capacity(pieces.len());
        for p in pieces.into_iter().filter(|p| !p.value.is_zero()) {
            match out.last_mut() {
                Some(last) if (last.hi - p.lo).abs() <= ARC_TOL && last.value == p.value => {
                    last.hi = p.hi;
                }
                _ => out.push(p),
            }
        }
        PiecewiseCircle { pieces: out }
    }

    pub fn pieces(&self) -> &[ArcPiece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= ARC_TOL);
        pts
    }

    pub fn is_breakpoint(&self, theta: f64) -> bool {
        let th = wrap_angle(theta);
        self.breakpoints().iter().any(|&b| {
            let d = (b - th).abs();
            d <= ARC_TOL || (2.0 * PI - d).abs() <= ARC_TOL
        })
    }

    /// Value at `θ` (any real, reduced mod 2π); `None` at a breakpoint.
    pub fn value_at(&self, theta: f64) -> Option<Level> {
        if self.is_breakpoint(theta) {
            return None;
        }
        let th = wrap_angle(theta);
        Some(
            self.pieces
                .iter()
                .find(|p| p.lo < th && th < p.hi)
                .map(|p| p.value)
                .unwrap_or_else(Level::zero),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.value.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// `∫_{−π}^{π} f(θ) dθ`.
    pub fn integral(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.value.to_f64() * (p.hi - p.lo))
            .sum()
    }

    /// `θ ↦ f(−θ)`.
    pub fn reflect(&self) -> PiecewiseCircle {
        PiecewiseCircle::normalized({
            let mut v: Vec<ArcPiece> = self
                .pieces
                .iter()
                .map(|p| ArcPiece {
                    lo: -p.hi,
                    hi: -p.lo,
                    value: p.value,
                })
                .collect();
            v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            v
        })
    }

    pub fn zip_with(
        &self,
        other: &PiecewiseCircle,
        f: impl Fn(Level, Level) -> Level,
    ) -> PiecewiseCircle {
        let mut pts = vec![-PI, PI];
        pts.extend(self.breakpoints());
        pts.extend(other.breakpoints());
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= ARC_TOL);
        let mut out = Vec::new();
        for w in pts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let a = self.value_at(mid).unwrap_or_else(Level::zero);
            let b = other.value_at(mid).unwrap_or_else(Level::zero);
            out.push(ArcPiece {
                lo: w[0],
                hi: w[1],
                value: f(a, b),
            });
        }
        PiecewiseCircle::normalized(out)
    }

    pub fn add(&self, other: &PiecewiseCircle) -> PiecewiseCircle {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn neg(&self) -> PiecewiseCircle {
        self.map_values(|v| -v)
    }

    pub fn scale(&self, c: Rational64) -> PiecewiseCircle {
        self.map_values(|v| v.scale(c))
    }

    pub fn map_values(&self, f: impl Fn(Level) -> Level) -> PiecewiseCircle {
        PiecewiseCircle::normalized(
            self.pieces
                .iter()
                .map(|p| ArcPiece {
                    value: f(p.value),
                    ..*p
                })
                .collect(),
        )
    }

    /// Compares `f(θ)` with `f(−θ)` on the merged breakpoints.
    pub fn parity(&self) -> Parity {
        if self.is_zero() {
            return Parity::Zero;
        }
        let refl = self.reflect();
        let tol = 1e-12;
        let even = self.zip_with(&refl, |a, b| {
            if a.approx_eq(b, tol) {
                Level::zero()
            } else {
                Level::pi_int(1)
            }
        });
        if even.is_zero() {
            return Parity::Even;
        }
        let odd = self.zip_with(&refl, |a, b| {
            if a.approx_eq(-b, tol) {
                Level::zero()
            } else {
                Level::pi_int(1)
            }
        });
        if odd.is_zero() {
            Parity::Odd
        } else {
            Parity::Neither
        }
    }

    pub fn is_odd(&self) -> bool {
        matches!(self.parity(), Parity::Zero | Parity::Odd)
    }

    pub fn is_even(&self) -> bool {
        matches!(self.parity(), Parity::Zero | Parity::Even)
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Sampled real data, linearly interpolated between knots and zero outside
/// them. Only the quadrature evaluation paths accept it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledProfile {
    knots: Vec<(f64, f64)>,
}

impl SampledProfile {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self, BoundaryError> {
        if knots.len() < 2
            || knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite())
            || knots.windows(2).any(|w| w[1].0 <= w[0].0)
        {
            return Err(BoundaryError::BadSamples);
        }
        Ok(SampledProfile { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t < k[0].0 || t > k[k.len() - 1].0 {
            return 0.0;
        }
        let i = k.partition_point(|&(x, _)| x <= t).clamp(1, k.len() - 1);
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi_chi(a: (i64, i64), b: (i64, i64), k: (i64, i64)) -> PiecewiseReal {
        PiecewiseReal::indicator(Point::ratio(a.0, a.1), Point::ratio(b.0, b.1), Level::pi_frac(k.0, k.1))
            .unwrap()
    }

    #[test]
    fn v_func_inverts_endpoints() {
        let f = pi_chi((2, 1), (3, 1), (1, 1));
        assert_eq!(f.v_func().unwrap(), pi_chi((1, 3), (1, 2), (1, 1)));
        assert_eq!(f.v_func().unwrap().v_func().unwrap(), f);
    }

    #[test]
    fn v_func_splits_at_zero() {
        let f = pi_chi((-1, 2), (1, 3), (1, 1));
        let g = f.v_func().unwrap();
        assert_eq!(g.pieces().len(), 2);
        assert!(matches!(g.pieces()[0].interval.lo, Point::NegInf));
        assert!(matches!(g.pieces()[1].interval.hi, Point::PosInf));
    }

    #[test]
    fn odd_under_v() {
        // ν = π/3 on (3,4), −π/3 on (1/4,1/3)
        let nu = pi_chi((3, 1), (4, 1), (1, 3)).add(&pi_chi((1, 4), (1, 3), (-1, 3)));
        assert_eq!(nu.v_func().unwrap(), nu.neg());
    }

    #[test]
    fn combine_cases() {
        let f = pi_chi((0, 1), (2, 1), (1, 1));
        assert!(f.add(&f.neg()).is_zero());
        let chi = PiecewiseReal::indicator(Point::int(0), Point::int(1), Level::Real(1.0)).unwrap();
        assert_eq!(
            f.combine(&chi, CombineOp::IndicatorMultiply).unwrap(),
            pi_chi((0, 1), (1, 1), (1, 1))
        );
        let half = f.combine(&f, CombineOp::Scale(Rational64::new(1, 2))).unwrap();
        assert_eq!(half, pi_chi((0, 1), (2, 1), (1, 2)));
    }

    #[test]
    fn combine_respects_cap() {
        let pieces: Vec<Piece> = (0..20)
            .map(|i| Piece::new(Point::int(2 * i), Point::int(2 * i + 1), Level::pi_int(1)))
            .collect();
        let f = PiecewiseReal::new(pieces).unwrap();
        assert!(matches!(
            f.zip_with(&f, 5, |a, b| a + b),
            Err(BoundaryError::TooManyPieces(20, 5))
        ));
    }

    #[test]
    fn oscillation_cases() {
        let f = pi_chi((2, 1), (3, 1), (1, 1)).add(&pi_chi((3, 1), (4, 1), (1, 3)));
        assert!((f.oscillation(2.5, 3.5).unwrap() - 2.0 * PI / 3.0).abs() < 1e-14);
        let c = PiecewiseReal::indicator(Point::NegInf, Point::PosInf, Level::Real(2.0)).unwrap();
        assert_eq!(c.oscillation(-1.0, 5.0).unwrap(), 0.0);
        assert_eq!(f.oscillation(10.0, 11.0).unwrap(), 0.0);
        // partly covered interval sees the zero outside the pieces
        assert!((f.oscillation(1.0, 2.5).unwrap() - PI).abs() < 1e-14);
        assert!(f.oscillation(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn circle_parity() {
        let half_pi = PI / 2.0;
        let odd = PiecewiseCircle::arc(0.5, 1.0, Level::pi_frac(1, 4))
            .unwrap()
            .add(&PiecewiseCircle::arc(-1.0, -0.5, Level::pi_frac(-1, 4)).unwrap());
        assert_eq!(odd.parity(), Parity::Odd);
        let even = PiecewiseCircle::arc(-1.0, 1.0, Level::Real(0.3)).unwrap();
        assert_eq!(even.parity(), Parity::Even);
        let neither = PiecewiseCircle::arc(0.0, half_pi, Level::Real(1.0)).unwrap();
        assert_eq!(neither.parity(), Parity::Neither);
        assert_eq!(PiecewiseCircle::zero().parity(), Parity::Zero);
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sampled_profile_interpolates() {
        let s = SampledProfile::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]).unwrap();
        assert_eq!(s.value_at(0.5), 1.0);
        assert_eq!(s.value_at(1.5), 1.0);
        assert_eq!(s.value_at(3.0), 0.0);
        assert!(SampledProfile::new(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
    }
}
