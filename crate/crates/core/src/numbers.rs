//! Exact-where-possible scalars: extended-real endpoints and boundary levels
//! stored as rational multiples of π.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for comparing endpoints that are not both exact.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Largest denominator accepted when a binary float is promoted to an exact rational.
const MAX_DYADIC_DENOM: i64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseNumberError {
    #[error("cannot parse `{0}` as a real endpoint")]
    Endpoint(String),
    #[error("cannot parse `{0}` as a boundary value")]
    Level(String),
}

/// A point of the extended real line.
#[derive(Debug, Clone, Copy)]
pub enum Point {
    NegInf,
    Exact(Rational64),
    Approx(f64),
    PosInf,
}

impl Point {
    pub fn int(n: i64) -> Self {
        Point::Exact(Rational64::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Point::Exact(Rational64::new(n, d))
    }

    /// Promotes dyadic floats with small denominators (0.5, 0.75, ...) to exact values.
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            return Point::PosInf;
        }
        if x == f64::NEG_INFINITY {
            return Point::NegInf;
        }
        let scaled = x * MAX_DYADIC_DENOM as f64;
        if x.is_finite() && scaled.fract() == 0.0 && scaled.abs() < 2f64.powi(52) {
            Point::Exact(Rational64::new(scaled as i64, MAX_DYADIC_DENOM))
        } else {
            Point::Approx(x)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Point::NegInf => f64::NEG_INFINITY,
            Point::PosInf => f64::INFINITY,
            Point::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Point::Approx(x) => x,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Point::Exact(_) | Point::Approx(_))
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Point::Approx(_))
    }

    pub fn is_zero(self) -> bool {
        match self {
            Point::Exact(r) => r.is_zero(),
            Point::Approx(x) => x.abs() <= MEMBERSHIP_TOL,
            _ => false,
        }
    }

    /// Sign of the point; zero for 0.
    pub fn signum(self) -> i32 {
        match self {
            Point::NegInf => -1,
            Point::PosInf => 1,
            Point::Exact(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Point::Approx(x) => {
                if x.abs() <= MEMBERSHIP_TOL {
                    0
                } else if x > 0.0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// `1/t`. Zero maps to the infinity on the side given by `side` (±1).
    pub fn recip(self, side: i32) -> Self {
        match self {
            Point::NegInf | Point::PosInf => Point::int(0),
            p if p.is_zero() => {
                if side >= 0 {
                    Point::PosInf
                } else {
                    Point::NegInf
                }
            }
            Point::Exact(r) => Point::Exact(r.recip()),
            Point::Approx(x) => Point::Approx(1.0 / x),
        }
    }

    pub fn abs(self) -> Self {
        match self {
            Point::NegInf | Point::PosInf => Point::PosInf,
            Point::Exact(r) => Point::Exact(r.abs()),
            Point::Approx(x) => Point::Approx(x.abs()),
        }
    }

    pub fn neg(self) -> Self {
        match self {
            Point::NegInf => Point::PosInf,
            Point::PosInf => Point::NegInf,
            Point::Exact(r) => Point::Exact(-r),
            Point::Approx(x) => Point::Approx(-x),
        }
    }

    /// Ordering in which non-exact pairs closer than [`MEMBERSHIP_TOL`] compare equal.
    pub fn cmp_tol(&self, other: &Self) -> Ordering {
        use Point::*;
        match (*self, *other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Exact(a), Exact(b)) => a.cmp(&b),
            (a, b) => {
                let (x, y) = (a.to_f64(), b.to_f64());
                if (x - y).abs() <= MEMBERSHIP_TOL * x.abs().max(y.abs()).max(1.0) {
                    Ordering::Equal
                } else {
                    x.partial_cmp(&y).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    pub fn eq_tol(&self, other: &Self) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    pub fn lt(&self, other: &Self) -> bool {
        self.cmp_tol(other) == Ordering::Less
    }

    pub fn le(&self, other: &Self) -> bool {
        self.cmp_tol(other) != Ordering::Greater
    }

    pub fn min(self, other: Self) -> Self {
        if other.lt(&self) {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.lt(&other) {
            other
        } else {
            self
        }
    }

    /// Distance between two points; infinite if either is infinite.
    pub fn dist(self, other: Self) -> f64 {
        match (self, other) {
            (Point::Exact(a), Point::Exact(b)) => (a - b).abs().to_f64().unwrap_or(f64::NAN),
            (a, b) if a.eq_tol(&b) => 0.0,
            (a, b) => (a.to_f64() - b.to_f64()).abs(),
        }
    }

    /// Exact rational difference when both are exact.
    pub fn exact_dist(self, other: Self) -> Option<Rational64> {
        match (self, other) {
            (Point::Exact(a), Point::Exact(b)) => Some((a - b).abs()),
            _ => None,
        }
    }

    /// The branch of `t` solving `t + 1/t = λ` with `|t| ≥ 1` (for `|λ| ≥ 2`).
    /// Exact whenever `λ² − 4` is the square of a rational.
    pub fn joukowski_outer_preimage(self) -> Self {
        match self {
            Point::PosInf => Point::PosInf,
            Point::NegInf => Point::NegInf,
            Point::Exact(l) => {
                let disc = l * l - Rational64::from_integer(4);
                if let Some(root) = rational_sqrt(disc) {
                    let two = Rational64::from_integer(2);
                    if l.is_positive() {
                        Point::Exact((l + root) / two)
                    } else {
                        Point::Exact((l - root) / two)
                    }
                } else {
                    Point::Approx(outer_preimage_f64(l.to_f64().unwrap_or(f64::NAN)))
                }
            }
            Point::Approx(l) => Point::Approx(outer_preimage_f64(l)),
        }
    }
}

fn outer_preimage_f64(l: f64) -> f64 {
    let disc = (l * l - 4.0).max(0.0).sqrt();
    if l >= 0.0 {
        0.5 * (l + disc)
    } else {
        0.5 * (l - disc)
    }
}

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

fn rational_sqrt(q: Rational64) -> Option<Rational64> {
    let n = isqrt_exact(*q.numer() as i128)?;
    let d = isqrt_exact(*q.denom() as i128)?;
    Some(Rational64::new(n as i64, d as i64))
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.eq_tol(other)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::NegInf => write!(f, "-inf"),
            Point::PosInf => write!(f, "inf"),
            Point::Exact(r) => write!(f, "{r}"),
            Point::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Point {
    type Err = ParseNumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "inf" | "+inf" | "infinity" => return Ok(Point::PosInf),
            "-inf" | "-infinity" => return Ok(Point::NegInf),
            _ => {}
        }
        if let Some(r) = parse_rational(t) {
            return Ok(Point::Exact(r));
        }
        t.parse::<f64>()
            .map(Point::from_f64)
            .map_err(|_| ParseNumberError::Endpoint(s.to_string()))
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Point::Approx(x) => s.serialize_f64(*x),
            Point::Exact(r) if *r.denom() == 1 => s.serialize_i64(*r.numer()),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Point::int(i))
                } else {
                    Ok(Point::from_f64(n.as_f64().unwrap_or(f64::NAN)))
                }
            }
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!(
                "expected a number or string endpoint, got {other}"
            ))),
        }
    }
}

/// Parses `p`, `p/q`, or a terminating decimal as an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational64::new(n, d));
    }
    if let Ok(n) = t.parse::<i64>() {
        return Some(Rational64::from_integer(n));
    }
    // terminating decimal such as "0.75"
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (ip, fp) = body.split_once('.')?;
    if fp.is_empty() || fp.len() > 12 || !fp.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let ip: i64 = if ip.is_empty() { 0 } else { ip.parse().ok()? };
    let scale = 10i64.checked_pow(fp.len() as u32)?;
    let frac: i64 = fp.parse().ok()?;
    let r = Rational64::new(ip.checked_mul(scale)?.checked_add(frac)?, scale);
    Some(if neg { -r } else { r })
}

/// A real boundary value. Rational multiples of π are kept exact so that
/// integer-plateau conditions are decidable.
#[derive(Debug, Clone, Copy)]
pub enum Level {
    Pi(Rational64),
    Real(f64),
}

impl Level {
    pub fn zero() -> Self {
        Level::Pi(Rational64::zero())
    }

    pub fn pi_frac(n: i64, d: i64) -> Self {
        Level::Pi(Rational64::new(n, d))
    }

    pub fn pi_int(n: i64) -> Self {
        Level::Pi(Rational64::from_integer(n))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Level::Pi(r) => r.to_f64().unwrap_or(f64::NAN) * PI,
            Level::Real(x) => x,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Level::Pi(r) => r.is_zero(),
            Level::Real(x) => x.abs() <= MEMBERSHIP_TOL,
        }
    }

    /// The integer `k` with `self = kπ`, only for exact values.
    pub fn pi_integer(self) -> Option<i64> {
        match self {
            Level::Pi(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn scale(self, c: Rational64) -> Self {
        match self {
            Level::Pi(r) => Level::Pi(r * c),
            Level::Real(x) => Level::Real(x * c.to_f64().unwrap_or(f64::NAN)),
        }
    }

    pub fn scale_f64(self, c: f64) -> Self {
        Level::Real(self.to_f64() * c)
    }

    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        match (self, other) {
            (Level::Pi(a), Level::Pi(b)) => a == b,
            (a, b) => (a.to_f64() - b.to_f64()).abs() <= tol,
        }
    }
}

impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(*other, MEMBERSHIP_TOL)
    }
}

impl Add for Level {
    type Output = Level;
    fn add(self, rhs: Level) -> Level {
        match (self, rhs) {
            (Level::Pi(a), Level::Pi(b)) => Level::Pi(a + b),
            (a, b) => Level::Real(a.to_f64() + b.to_f64()),
        }
    }
}

impl Neg for Level {
    type Output = Level;
    fn neg(self) -> Level {
        match self {
            Level::Pi(a) => Level::Pi(-a),
            Level::Real(x) => Level::Real(-x),
        }
    }
}

impl Sub for Level {
    type Output = Level;
    fn sub(self, rhs: Level) -> Level {
        self + (-rhs)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Pi(r) if r.is_zero() => write!(f, "0"),
            Level::Pi(r) => write!(f, "{r} pi"),
            Level::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Level {
    type Err = ParseNumberError;

    /// Accepts plain numbers and `pi`, `-pi`, `2 pi`, `1/3 pi`, `-3/2pi`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(coef) = t.strip_suffix("pi") {
            let c = coef.trim();
            let r = match c {
                "" | "+" => Some(Rational64::from_integer(1)),
                "-" => Some(Rational64::from_integer(-1)),
                c => parse_rational(c.trim_end_matches('*').trim()),
            };
            return r
                .map(Level::Pi)
                .ok_or_else(|| ParseNumberError::Level(s.to_string()));
        }
        t.parse::<f64>()
            .map(Level::Real)
            .map_err(|_| ParseNumberError::Level(s.to_string()))
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Level::Real(x) => s.serialize_f64(*x),
            Level::Pi(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => Ok(Level::Real(n.as_f64().unwrap_or(f64::NAN))),
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!(
                "expected a number or \"k/m pi\" string, got {other}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pi_multiples_exactly() {
        assert!(matches!("1/3 pi".parse::<Level>().unwrap(), Level::Pi(r) if r == Rational64::new(1, 3)));
        assert!(matches!("-pi".parse::<Level>().unwrap(), Level::Pi(r) if r == Rational64::from_integer(-1)));
        assert!(matches!("2pi".parse::<Level>().unwrap(), Level::Pi(r) if r == Rational64::from_integer(2)));
        assert!(matches!("0.5".parse::<Level>().unwrap(), Level::Real(x) if x == 0.5));
        assert!("pie".parse::<Level>().is_err());
    }

    #[test]
    fn parses_endpoints() {
        assert!(matches!("-inf".parse::<Point>().unwrap(), Point::NegInf));
        assert_eq!("3/4".parse::<Point>().unwrap(), Point::ratio(3, 4));
        assert!("0.75".parse::<Point>().unwrap().is_exact());
        assert_eq!(Point::from_f64(0.5), Point::ratio(1, 2));
        assert!(!Point::from_f64(0.1).is_exact());
    }

    #[test]
    fn reciprocal_of_zero_follows_side() {
        assert!(matches!(Point::int(0).recip(-1), Point::NegInf));
        assert!(matches!(Point::int(0).recip(1), Point::PosInf));
        assert_eq!(Point::PosInf.recip(1), Point::int(0));
        assert_eq!(Point::ratio(4, 3).recip(1), Point::ratio(3, 4));
    }

    #[test]
    fn joukowski_preimage_is_exact_for_square_discriminants() {
        assert!(matches!(Point::ratio(10, 3).joukowski_outer_preimage(), Point::Exact(r) if r == Rational64::from_integer(3)));
        assert!(matches!(Point::ratio(17, 4).joukowski_outer_preimage(), Point::Exact(r) if r == Rational64::from_integer(4)));
        assert!(matches!(Point::ratio(-5, 2).joukowski_outer_preimage(), Point::Exact(r) if r == Rational64::from_integer(-2)));
        let t = Point::int(3).joukowski_outer_preimage().to_f64();
        assert!((t + 1.0 / t - 3.0).abs() < 1e-14);
    }

    #[test]
    fn level_arithmetic_stays_exact() {
        let a = Level::pi_frac(1, 3) + Level::pi_frac(2, 3);
        assert_eq!(a.pi_integer(), Some(1));
        assert_eq!((Level::pi_int(1) - Level::pi_frac(1, 3)).scale(Rational64::new(1, 2)).pi_integer(), None);
    }
}
