//! Singularity sets on the real axis.
//!
//! A [`RealSet`] is a finite union of closed intervals of the extended line.
//! The inversion `t ↦ 1/t` acts on sets through [`RealSet::v_set`]. A
//! [`SigmaDecomposition`] holds the three mutually separated pieces `Ω₁`,
//! `V(Ω₁)` and `Ω₂ = V(Ω₂)`, and [`decompose_delta`] splits the complement
//! `ℝ ∖ ([−1,1] ∪ Σ)` into its components and classifies them by the sets their
//! endpoints belong to.
//!
//! Endpoints `0` and `±∞` are limit points: an interval such as `[0, 1/5]`
//! (the image of `[5, ∞)`) does not contain `0`.
//!
//! When `Σ` is bounded the two unbounded components of the complement are one
//! arc through the point at infinity, where every admissible `N` is holomorphic.
//! Such an arc is stored with `start > end` and covers `(start, ∞) ∪ (−∞, end)`.

use serde::Serialize;
use thiserror::Error;

use crate::numbers::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("interval [{0}, {1}] is empty")]
    EmptyInterval(Point, Point),
    #[error("intervals [{0}, {1}] and [{2}, {3}] overlap")]
    Overlap(Point, Point, Point, Point),
    #[error("the set contains 0, where t -> 1/t is undefined")]
    ZeroInSet,
    #[error("omega2 is not invariant under t -> 1/t")]
    SymmetryViolation,
    #[error("dist({pair}) = {distance} is not positive")]
    DistanceViolation { pair: &'static str, distance: f64 },
    #[error("{0} accumulates at 0; only an unbounded omega1 is admitted, and only with the infinite-endpoint option")]
    AccumulatesAtZero(&'static str),
    #[error("chosen interval {index} has an infinite starred endpoint; build its factor as P(z, chi * n pi)")]
    InfiniteStarEndpoint { index: usize },
    #[error("point {0} is 0, ±1 or an interval endpoint")]
    DomainError(f64),
    #[error("endpoint {0} belongs to none of the membership classes")]
    InternalError(Point),
}

/// A closed interval `[lo, hi]` of the extended real line (or an open one,
/// depending on context; the two only differ at endpoints).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: Point,
    pub hi: Point,
}

impl Interval {
    pub fn new(lo: Point, hi: Point) -> Result<Self, SetError> {
        if hi.lt(&lo) {
            return Err(SetError::EmptyInterval(lo, hi));
        }
        Ok(Interval { lo, hi })
    }

    pub fn ratio(lo: (i64, i64), hi: (i64, i64)) -> Self {
        Interval {
            lo: Point::ratio(lo.0, lo.1),
            hi: Point::ratio(hi.0, hi.1),
        }
    }

    /// Closed membership; `0` and infinities are never members.
    pub fn contains(&self, t: Point) -> bool {
        if !t.is_finite() {
            return false;
        }
        if t.is_zero() && (self.lo.is_zero() || self.hi.is_zero()) {
            return false;
        }
        self.lo.le(&t) && t.le(&self.hi)
    }

    /// Open membership for a float.
    pub fn contains_open(&self, t: f64) -> bool {
        self.lo.to_f64() < t && t < self.hi.to_f64()
    }

    pub fn length(&self) -> f64 {
        self.hi.to_f64() - self.lo.to_f64()
    }

    fn dist(&self, other: &Interval) -> Point {
        if self.hi.lt(&other.lo) {
            gap(self.hi, other.lo)
        } else if other.hi.lt(&self.lo) {
            gap(other.hi, self.lo)
        } else {
            Point::int(0)
        }
    }

    /// `V` of a single interval; errors when 0 is an interior point.
    pub fn v_image(&self) -> Result<Interval, SetError> {
        match (self.lo.signum(), self.hi.signum()) {
            (l, h) if l < 0 && h > 0 => Err(SetError::ZeroInSet),
            (0, 0) => Err(SetError::ZeroInSet),
            (l, _) if l >= 0 => Ok(Interval {
                lo: self.hi.recip(1),
                hi: self.lo.recip(1),
            }),
            _ => Ok(Interval {
                lo: self.hi.recip(-1),
                hi: self.lo.recip(-1),
            }),
        }
    }
}

fn gap(a: Point, b: Point) -> Point {
    match (a, b) {
        (Point::Exact(x), Point::Exact(y)) => Point::Exact(y - x),
        (a, b) if a.is_finite() && b.is_finite() => Point::Approx(b.to_f64() - a.to_f64()),
        _ => Point::PosInf,
    }
}

/// A finite union of pairwise disjoint closed intervals, sorted by left endpoint.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RealSet {
    intervals: Vec<Interval>,
}

impl RealSet {
    pub fn empty() -> Self {
        RealSet::default()
    }

    pub fn new(mut intervals: Vec<Interval>) -> Result<Self, SetError> {
        for iv in &intervals {
            if iv.hi.lt(&iv.lo) {
                return Err(SetError::EmptyInterval(iv.lo, iv.hi));
            }
        }
        intervals.sort_by(|a, b| a.lo.cmp_tol(&b.lo));
        for w in intervals.windows(2) {
            if !w[0].hi.lt(&w[1].lo) {
                return Err(SetError::Overlap(w[0].lo, w[0].hi, w[1].lo, w[1].hi));
            }
        }
        Ok(RealSet { intervals })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: Point) -> bool {
        self.intervals.iter().any(|iv| iv.contains(t))
    }

    pub fn contains_f64(&self, t: f64) -> bool {
        self.contains(Point::Approx(t))
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals
            .iter()
            .all(|iv| iv.lo.is_finite() && iv.hi.is_finite())
    }

    /// Whether 0 is an endpoint (the set accumulates at the origin).
    pub fn touches_zero(&self) -> bool {
        self.intervals
            .iter()
            .any(|iv| iv.lo.is_zero() || iv.hi.is_zero())
    }

    pub fn endpoints(&self) -> impl Iterator<Item = Point> + '_ {
        self.intervals.iter().flat_map(|iv| [iv.lo, iv.hi])
    }

    /// Euclidean distance between two sets; `+∞` if either is empty.
    pub fn distance(&self, other: &RealSet) -> Point {
        let mut best = Point::PosInf;
        for a in &self.intervals {
            for b in &other.intervals {
                best = best.min(a.dist(b));
            }
        }
        best
    }

    /// `V(A) = { t | 1/t ∈ A }`.
    pub fn v_set(&self) -> Result<RealSet, SetError> {
        let images = self
            .intervals
            .iter()
            .map(Interval::v_image)
            .collect::<Result<Vec<_>, _>>()?;
        RealSet::new(images)
    }

    /// Union of sets whose members are known to be disjoint.
    pub fn disjoint_union(sets: &[&RealSet]) -> Result<RealSet, SetError> {
        RealSet::new(sets.iter().flat_map(|s| s.intervals.iter().copied()).collect())
    }
}

/// Options for [`validate_sigma_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SigmaOptions {
    /// Admit an unbounded `Ω₁` (so that 0 is a boundary point of `V(Ω₁)`).
    /// Chosen intervals may then have an infinite starred endpoint.
    pub allow_unbounded_omega1: bool,
}

/// `Σ = Ω₁ ∪ V(Ω₁) ∪ Ω₂` with its validated separation data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaDecomposition {
    pub omega1: RealSet,
    pub omega2: RealSet,
    pub v_omega1: RealSet,
    pub dist_omega1_v_omega1: Point,
    pub dist_omega1_omega2: Point,
    pub dist_v_omega1_omega2: Point,
    pub min_pairwise_distance: f64,
    pub options: SigmaOptions,
}

impl SigmaDecomposition {
    pub fn sigma(&self) -> RealSet {
        RealSet::disjoint_union(&[&self.omega1, &self.v_omega1, &self.omega2])
            .expect("validated sets are separated")
    }

    /// `Ω = Ω₁ ∪ Ω₂`, the singular set allowed for the factor.
    pub fn omega(&self) -> RealSet {
        RealSet::disjoint_union(&[&self.omega1, &self.omega2]).expect("validated sets are separated")
    }
}

pub fn validate_sigma(omega1: RealSet, omega2: RealSet) -> Result<SigmaDecomposition, SetError> {
    validate_sigma_with(omega1, omega2, SigmaOptions::default())
}

pub fn validate_sigma_with(
    omega1: RealSet,
    omega2: RealSet,
    options: SigmaOptions,
) -> Result<SigmaDecomposition, SetError> {
    let v_omega1 = omega1.v_set()?;
    let v_omega2 = omega2.v_set()?;
    let d1 = omega1.distance(&v_omega1);
    let d2 = omega1.distance(&omega2);
    let d3 = v_omega1.distance(&omega2);
    for (pair, d) in [
        ("omega1, V(omega1)", d1),
        ("omega1, omega2", d2),
        ("V(omega1), omega2", d3),
    ] {
        if d.signum() <= 0 {
            return Err(SetError::DistanceViolation {
                pair,
                distance: d.to_f64(),
            });
        }
    }
    if v_omega2 != omega2 {
        return Err(SetError::SymmetryViolation);
    }
    if omega2.touches_zero() {
        return Err(SetError::AccumulatesAtZero("omega2"));
    }
    if omega1.touches_zero() {
        // V(Ω₁) would then be unbounded, so Ω₁ ∪ V(Ω₁) accumulates at 0 either way.
        return Err(SetError::AccumulatesAtZero("omega1"));
    }
    if v_omega1.touches_zero() && !options.allow_unbounded_omega1 {
        return Err(SetError::AccumulatesAtZero("V(omega1)"));
    }
    let min = d1.min(d2).min(d3).to_f64();
    Ok(SigmaDecomposition {
        omega1,
        omega2,
        v_omega1,
        dist_omega1_v_omega1: d1,
        dist_omega1_omega2: d2,
        dist_v_omega1_omega2: d3,
        min_pairwise_distance: min,
        options,
    })
}

/// Which set a component endpoint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointClass {
    Omega1,
    VOmega1,
    Omega2,
    /// One of the points `±1`.
    Unit,
}

/// A component of `Δ`: the open interval `(start, end)`, or, when
/// `start > end`, the arc `(start, +∞) ∪ {∞} ∪ (−∞, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaComponent {
    pub start: Point,
    pub end: Point,
    pub start_class: EndpointClass,
    pub end_class: EndpointClass,
}

impl DeltaComponent {
    pub fn wraps(&self) -> bool {
        self.end.lt(&self.start)
    }

    /// The pieces of the component on the real line, as open intervals.
    pub fn real_pieces(&self) -> Vec<Interval> {
        if self.wraps() {
            vec![
                Interval {
                    lo: Point::NegInf,
                    hi: self.end,
                },
                Interval {
                    lo: self.start,
                    hi: Point::PosInf,
                },
            ]
        } else {
            vec![Interval {
                lo: self.start,
                hi: self.end,
            }]
        }
    }

    /// Pieces of `V` of the component, as open intervals.
    pub fn v_pieces(&self) -> Vec<Interval> {
        let mut out: Vec<Interval> = self
            .real_pieces()
            .iter()
            .map(|iv| iv.v_image().expect("components avoid 0"))
            .collect();
        out.sort_by(|a, b| a.lo.cmp_tol(&b.lo));
        out
    }

    pub fn contains_f64(&self, t: f64) -> bool {
        self.real_pieces().iter().any(|iv| iv.contains_open(t))
    }
}

/// A chosen component with its starred endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChosenInterval {
    pub component: DeltaComponent,
    pub alpha_star: Point,
    pub beta_star: Point,
}

impl ChosenInterval {
    pub fn has_infinite_star(&self) -> bool {
        !self.alpha_star.is_finite() || !self.beta_star.is_finite()
    }
}

/// The components of `Δ` split into the chosen ones, `Δ′` and `Δ″`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalClassification {
    pub chosen: Vec<ChosenInterval>,
    pub delta_prime: Vec<DeltaComponent>,
    pub delta_double_prime: Vec<DeltaComponent>,
    /// Components built with `Ω₂` left inside `Δ`.
    pub hardy: bool,
    pub sigma: SigmaDecomposition,
}

impl IntervalClassification {
    pub fn k0(&self) -> usize {
        self.chosen.len()
    }

    pub fn components(&self) -> impl Iterator<Item = &DeltaComponent> {
        self.chosen
            .iter()
            .map(|c| &c.component)
            .chain(self.delta_prime.iter())
            .chain(self.delta_double_prime.iter())
    }
}

fn classify_endpoint(
    p: Point,
    sigma: &SigmaDecomposition,
    include_omega2: bool,
) -> Result<EndpointClass, SetError> {
    if !p.is_finite() {
        // ∞ belongs to the closure of Ω₁ exactly when Ω₁ is unbounded
        return if sigma.omega1.is_bounded() {
            Err(SetError::InternalError(p))
        } else {
            Ok(EndpointClass::Omega1)
        };
    }
    if sigma.v_omega1.contains(p) {
        Ok(EndpointClass::VOmega1)
    } else if sigma.omega1.contains(p) {
        Ok(EndpointClass::Omega1)
    } else if include_omega2 && sigma.omega2.contains(p) {
        Ok(EndpointClass::Omega2)
    } else if p.abs().eq_tol(&Point::int(1)) {
        Ok(EndpointClass::Unit)
    } else {
        Err(SetError::InternalError(p))
    }
}

/// Open gaps of the real line left by a sorted list of closed intervals.
fn complement_gaps(mut removed: Vec<Interval>) -> Vec<Interval> {
    removed.sort_by(|a, b| a.lo.cmp_tol(&b.lo));
    let mut merged: Vec<Interval> = Vec::new();
    for iv in removed {
        match merged.last_mut() {
            Some(last) if !last.hi.lt(&iv.lo) => last.hi = last.hi.max(iv.hi),
            _ => merged.push(iv),
        }
    }
    let mut gaps = Vec::new();
    let mut cursor = Point::NegInf;
    for iv in &merged {
        if cursor.lt(&iv.lo) {
            gaps.push(Interval {
                lo: cursor,
                hi: iv.lo,
            });
        }
        cursor = cursor.max(iv.hi);
    }
    if cursor.lt(&Point::PosInf) {
        gaps.push(Interval {
            lo: cursor,
            hi: Point::PosInf,
        });
    }
    gaps
}

/// Components of `ℝ ∖ ([−1,1] ∪ Σ)` and their classification.
pub fn decompose_delta(sigma: &SigmaDecomposition) -> Result<IntervalClassification, SetError> {
    decompose(sigma, false)
}

/// Components of `ℝ ∖ ([−1,1] ∪ Ω₁ ∪ V(Ω₁))`, used by the Hardy-class variant.
pub fn decompose_delta_hardy(
    sigma: &SigmaDecomposition,
) -> Result<IntervalClassification, SetError> {
    decompose(sigma, true)
}

fn decompose(sigma: &SigmaDecomposition, hardy: bool) -> Result<IntervalClassification, SetError> {
    let mut removed = vec![Interval {
        lo: Point::int(-1),
        hi: Point::int(1),
    }];
    removed.extend_from_slice(sigma.omega1.intervals());
    removed.extend_from_slice(sigma.v_omega1.intervals());
    if !hardy {
        removed.extend_from_slice(sigma.omega2.intervals());
    }
    let mut gaps = complement_gaps(removed);

    let bounded = sigma.omega1.is_bounded() && sigma.v_omega1.is_bounded() && sigma.omega2.is_bounded();
    let mut raw: Vec<(Point, Point)> = Vec::with_capacity(gaps.len());
    if bounded && gaps.len() >= 2 {
        let first = gaps.remove(0);
        let last = gaps.pop().expect("at least two gaps");
        debug_assert!(!first.lo.is_finite() && !last.hi.is_finite());
        raw.extend(gaps.iter().map(|g| (g.lo, g.hi)));
        raw.push((last.lo, first.hi));
    } else {
        raw.extend(gaps.iter().map(|g| (g.lo, g.hi)));
    }

    let mut chosen = Vec::new();
    let mut delta_prime = Vec::new();
    let mut delta_double_prime = Vec::new();
    for (start, end) in raw {
        let start_class = classify_endpoint(start, sigma, !hardy)?;
        let end_class = classify_endpoint(end, sigma, !hardy)?;
        let comp = DeltaComponent {
            start,
            end,
            start_class,
            end_class,
        };
        let in_v = |c: EndpointClass| c == EndpointClass::VOmega1;
        match (in_v(start_class), in_v(end_class)) {
            (true, true) => delta_prime.push(comp),
            (false, false) => delta_double_prime.push(comp),
            _ => {
                let star = |p: Point, c: EndpointClass| {
                    if in_v(c) {
                        p.recip(p.signum())
                    } else {
                        p
                    }
                };
                chosen.push(ChosenInterval {
                    component: comp,
                    alpha_star: star(start, start_class),
                    beta_star: star(end, end_class),
                });
            }
        }
    }
    Ok(IntervalClassification {
        chosen,
        delta_prime,
        delta_double_prime,
        hardy,
        sigma: sigma.clone(),
    })
}

/// Starred endpoints `(α*_k, β*_k)` of the chosen intervals.
///
/// Fails with [`SetError::InfiniteStarEndpoint`] when one of them is infinite; the
/// factorization builds those factors from an indicator instead of a rational function.
pub fn star_endpoints(
    classification: &IntervalClassification,
) -> Result<Vec<(Point, Point)>, SetError> {
    classification
        .chosen
        .iter()
        .enumerate()
        .map(|(index, c)| {
            if c.has_infinite_star() {
                Err(SetError::InfiniteStarEndpoint { index })
            } else {
                Ok((c.alpha_star, c.beta_star))
            }
        })
        .collect()
}

/// Sum of the indicator partition at `t`: `Ω₁`, `V(Ω₁)`, `Ω₂`, and each
/// class of components together with its `V`-image. Equals 1 off a finite set.
pub fn partition_check(classification: &IntervalClassification, t: f64) -> Result<i32, SetError> {
    let sigma = &classification.sigma;
    let bad = |x: f64| x == 0.0 || (x.abs() - 1.0).abs() < 1e-14;
    if bad(t) {
        return Err(SetError::DomainError(t));
    }
    let near = |p: Point| p.is_finite() && (p.to_f64() - t).abs() <= 1e-12 * t.abs().max(1.0);
    let mut endpoints: Vec<Point> = sigma
        .omega1
        .endpoints()
        .chain(sigma.v_omega1.endpoints())
        .chain(sigma.omega2.endpoints())
        .collect();
    for c in classification.components() {
        for iv in c.real_pieces().iter().chain(c.v_pieces().iter()) {
            endpoints.push(iv.lo);
            endpoints.push(iv.hi);
        }
    }
    if endpoints.into_iter().any(near) {
        return Err(SetError::DomainError(t));
    }

    let inv = 1.0 / t;
    let ind = |b: bool| b as i32;
    let mut sum = ind(sigma.omega1.contains_f64(t)) + ind(sigma.omega1.contains_f64(inv));
    if !classification.hardy {
        sum += ind(sigma.omega2.contains_f64(t));
    }
    for c in classification.components() {
        sum += ind(c.contains_f64(t)) + ind(c.contains_f64(inv));
    }
    Ok(sum)
}
