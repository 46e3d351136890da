//! Certification of computed factors: residuals, symmetries, the modulus
//! jump across the circle, kernel identities and local `L²` convergence.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{ArcPiece, Piece, PiecewiseCircle, PiecewiseReal};
use crate::cauchy::{circle_jump_log, AnalyticFactor, EvalError, LineMethod, SingularSupport};
use crate::numbers::{Level, Point};
use crate::quadrature::{graded_breaks, integrate};
use crate::sampling::halton_box;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("the grid is empty")]
    EmptyGrid,
    #[error("grid point {0} lies on the singular support")]
    GridOnSingularSupport(Complex64),
    #[error("θ = {0} is a breakpoint of μ")]
    Breakpoint(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub name: String,
    pub grid: String,
    pub points: usize,
    pub max_deviation: f64,
    pub median_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Per-level values of checks that produce a sequence.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<f64>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl CertificationReport {
    /// Builds a report from per-point deviations; a NaN counts as infinite.
    pub fn from_deviations(name: &str, grid: &str, mut devs: Vec<f64>, tolerance: f64) -> Self {
        for d in devs.iter_mut() {
            if d.is_nan() {
                *d = f64::INFINITY;
            }
        }
        devs.sort_by(f64::total_cmp);
        let max_deviation = devs.last().copied().unwrap_or(0.0);
        let median_deviation = if devs.is_empty() {
            0.0
        } else {
            let n = devs.len();
            if n % 2 == 1 {
                devs[n / 2]
            } else {
                0.5 * (devs[n / 2 - 1] + devs[n / 2])
            }
        };
        CertificationReport {
            name: name.to_string(),
            grid: grid.to_string(),
            points: devs.len(),
            max_deviation,
            median_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
            series: Vec::new(),
            runtime: Duration::ZERO,
        }
    }

    fn timed(mut self, start: Instant) -> Self {
        self.runtime = start.elapsed();
        self
    }
}

/// `n` quasi-random points of the box keeping `exclusion` away from the
/// singular supports of every factor, at both `z` and `1/z`, and from `±1`.
pub fn certification_grid(
    n: usize,
    skip: u64,
    re: (f64, f64),
    im: (f64, f64),
    supports: &[&SingularSupport],
    exclusion: f64,
) -> Vec<Complex64> {
    let ok = |z: Complex64| {
        (z - 1.0).norm() > exclusion
            && (z + 1.0).norm() > exclusion
            && supports.iter().all(|s| s.distance(z) > exclusion)
    };
    let mut out = Vec::with_capacity(n);
    let mut offset = skip;
    while out.len() < n {
        let batch = halton_box(n, offset, re, im);
        offset += n as u64;
        for (x, y) in batch {
            let z = Complex64::new(x, y);
            if z.norm() > 0.0 && ok(z) && ok(z.inv()) {
                out.push(z);
                if out.len() == n {
                    break;
                }
            }
        }
        if offset > skip + 1000 * n as u64 {
            break;
        }
    }
    out
}

fn describe(grid: &[Complex64]) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in grid {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    format!("{} points in [{x0:.3}, {x1:.3}] x [{y0:.3}, {y1:.3}]", grid.len())
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// `|N(z) − R(z)R(1/z)| / max(1, |N(z)|)` over the grid.
pub fn residual_check(
    n: &AnalyticFactor,
    r: &AnalyticFactor,
    grid: &[Complex64],
    tol: f64,
) -> Result<CertificationReport, VerifyError> {
    if grid.is_empty() {
        return Err(VerifyError::EmptyGrid);
    }
    let start = Instant::now();
    let devs = grid
        .par_iter()
        .map(|&z| Ok(rel(r.eval(z)? * r.eval(z.inv())?, n.eval(z)?)))
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(CertificationReport::from_deviations("residual", &describe(grid), devs, tol).timed(start))
}

/// `N(1/z) = N(z)` and `N(z̄) = conj N(z)` over the grid.
pub fn symmetry_check(n: &AnalyticFactor, grid: &[Complex64], tol: f64) -> Result<CertificationReport, VerifyError> {
    if grid.is_empty() {
        return Err(VerifyError::EmptyGrid);
    }
    let start = Instant::now();
    let devs = grid
        .par_iter()
        .map(|&z| {
            let v = n.eval(z)?;
            Ok(rel(n.eval(z.inv())?, v).max(rel(n.eval(z.conj())?, v.conj())))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(CertificationReport::from_deviations("symmetry", &describe(grid), devs, tol).timed(start))
}

/// Midpoints of the arcs of `μ` and of the gaps between them, skipping the
/// neighbourhoods of `±1`.
pub fn jump_thetas(ln_mu: &PiecewiseCircle) -> Vec<f64> {
    let mut cuts = ln_mu.breakpoints();
    cuts.extend([-PI, 0.0, PI]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    cuts.windows(2)
        .map(|w| 0.5 * (w[0] + w[1]))
        .filter(|t| t.abs() > 0.05 && (PI - t.abs()) > 0.05)
        .collect()
}

/// `| |R⁺/R⁻|(e^{iθ}) − μ(θ) | / μ(θ)` from extrapolated one-sided limits.
pub fn modulus_jump_check(
    r: &AnalyticFactor,
    ln_mu: &PiecewiseCircle,
    thetas: &[f64],
    tol: f64,
) -> Result<CertificationReport, VerifyError> {
    if thetas.is_empty() {
        return Err(VerifyError::EmptyGrid);
    }
    if let Some(&t) = thetas.iter().find(|&&t| ln_mu.is_breakpoint(t)) {
        return Err(VerifyError::Breakpoint(t));
    }
    let start = Instant::now();
    let devs = thetas
        .par_iter()
        .map(|&t| {
            let mu = ln_mu.value_at(t).map_or(0.0, Level::to_f64).exp();
            let ratio = circle_jump_log(r, t)?.re.exp();
            Ok((ratio - mu).abs() / mu)
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let grid = format!("{} angles on the unit circle", thetas.len());
    Ok(CertificationReport::from_deviations("modulus_jump", &grid, devs, tol).timed(start))
}

/// Finite nonzero values of `R` at quasi-random points off `Ω ∪ 𝕋`.
pub fn holomorphy_check(r: &AnalyticFactor, grid: &[Complex64]) -> Result<CertificationReport, VerifyError> {
    if grid.is_empty() {
        return Err(VerifyError::EmptyGrid);
    }
    let start = Instant::now();
    let devs: Vec<f64> = grid
        .par_iter()
        .map(|&z| match r.eval(z) {
            Ok(v) if v.is_finite() && v.norm() > 0.0 => 0.0,
            _ => f64::INFINITY,
        })
        .collect();
    Ok(CertificationReport::from_deviations("holomorphy", &describe(grid), devs, 0.0).timed(start))
}

/// Parameters of the local `L²` Cauchy check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyParams {
    pub eps0: f64,
    pub levels: usize,
    pub tol: f64,
}

impl Default for HardyParams {
    fn default() -> Self {
        HardyParams {
            eps0: 1e-2,
            levels: 6,
            tol: 1e-3,
        }
    }
}

fn l2_difference(
    r: &AnalyticFactor,
    lo: f64,
    hi: f64,
    e0: f64,
    e1: f64,
    focus: &[f64],
) -> Result<f64, VerifyError> {
    let mut breaks: Vec<f64> = Vec::new();
    for &p in focus {
        breaks.extend(graded_breaks(lo, hi, p, e1));
    }
    let failure = std::sync::Mutex::new(None);
    let f = |t: f64| {
        let a = r.eval(Complex64::new(t, e0));
        let b = r.eval(Complex64::new(t, e1));
        match (a, b) {
            (Ok(a), Ok(b)) => Complex64::new((a - b).norm_sqr(), 0.0),
            (Err(e), _) | (_, Err(e)) => {
                failure.lock().unwrap().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let v = integrate(&f, lo, hi, 1e-8, &breaks).value.re;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(match e {
            EvalError::OnSingularSupport(z) => VerifyError::GridOnSingularSupport(z),
            e => e.into(),
        });
    }
    Ok(v.max(0.0).sqrt())
}

/// `s_n = ‖R(· ± iε_n) − R(· ± iε_{n+1})‖_{L²(lo, hi)}` with `ε_n = eps0·2^{−n}`,
/// `n = 0..=levels`, on both sides of the line. Passes iff both sequences
/// strictly decrease and end below the tolerance.
pub fn hardy_l2_check(
    r: &AnalyticFactor,
    neighborhood: (f64, f64),
    params: HardyParams,
) -> Result<CertificationReport, VerifyError> {
    let start = Instant::now();
    let (lo, hi) = neighborhood;
    if !(lo < hi) {
        return Err(VerifyError::EmptyGrid);
    }
    let eps_max = params.eps0;
    for &t in &[lo, 0.5 * (lo + hi), hi] {
        for s in [1.0, -1.0] {
            let z = Complex64::new(t, s * eps_max);
            if r.singular_support().distance(z) < 1e-12 {
                return Err(VerifyError::GridOnSingularSupport(z));
            }
        }
    }
    let sup = r.singular_support();
    let mut focus: Vec<f64> = sup.points.iter().copied().collect();
    for &(a, b) in &sup.line {
        focus.extend([a, b]);
    }
    focus.retain(|p| p.is_finite() && *p > lo && *p < hi);
    focus.sort_by(f64::total_cmp);
    focus.dedup();

    let eps: Vec<f64> = (0..=params.levels + 1).map(|n| params.eps0 * 0.5f64.powi(n as i32)).collect();
    let mut series = Vec::new();
    let mut passed = true;
    let mut finals = Vec::new();
    for side in [1.0, -1.0] {
        let s: Vec<f64> = (0..=params.levels)
            .into_par_iter()
            .map(|n| l2_difference(r, lo, hi, side * eps[n], side * eps[n + 1], &focus))
            .collect::<Result<_, _>>()?;
        passed &= s.windows(2).all(|w| w[1] < w[0]);
        let last = *s.last().unwrap();
        passed &= last < params.tol;
        finals.push(last);
        series.extend(s);
    }
    let grid = format!(
        "({lo}, {hi}) at eps0 = {} over {} levels, both sides",
        params.eps0, params.levels
    );
    let mut report = CertificationReport::from_deviations("hardy_l2", &grid, finals, params.tol);
    report.passed = passed;
    report.series = series;
    Ok(report.timed(start))
}

/// Default tolerances of the kernel identity battery.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
pub const QUADRATURE_TOL: f64 = 1e-7;

/// Size and tolerances of [`kernel_identity_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteParams {
    pub configs: usize,
    pub points: usize,
    pub closed_form_tol: f64,
    pub quadrature_tol: f64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            configs: 50,
            points: 20,
            closed_form_tol: CLOSED_FORM_TOL,
            quadrature_tol: QUADRATURE_TOL,
        }
    }
}

fn random_line(rng: &mut ChaCha8Rng) -> PiecewiseReal {
    let k = rng.gen_range(1..=5);
    let mut cuts: Vec<Point> = Vec::new();
    while cuts.len() < k + 1 {
        let p = Point::ratio(rng.gen_range(-40..=40), rng.gen_range(1..=8));
        if !cuts.iter().any(|c| c.eq_tol(&p)) {
            cuts.push(p);
        }
    }
    cuts.sort_by(|a, b| a.cmp_tol(b));
    if rng.gen_bool(0.2) {
        cuts[0] = Point::NegInf;
    }
    if rng.gen_bool(0.2) {
        cuts[k] = Point::PosInf;
    }
    let pieces = cuts
        .windows(2)
        .map(|w| Piece::new(w[0], w[1], Level::Real(rng.gen_range(-3.0..3.0))))
        .collect();
    PiecewiseReal::new(pieces).expect("sorted disjoint pieces")
}

fn random_arcs(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec<ArcPiece> {
    let k = rng.gen_range(1..=4);
    let mut cuts: Vec<f64> = (0..=k).map(|_| rng.gen_range(lo..hi)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .filter(|w| w[1] - w[0] > 1e-3)
        .map(|w| ArcPiece {
            lo: w[0],
            hi: w[1],
            value: Level::Real(rng.gen_range(-3.0..3.0)),
        })
        .collect()
}

fn random_circle(rng: &mut ChaCha8Rng) -> PiecewiseCircle {
    PiecewiseCircle::new(random_arcs(rng, -PI, PI)).expect("sorted disjoint arcs")
}

fn random_odd_circle(rng: &mut ChaCha8Rng) -> PiecewiseCircle {
    let upper = random_arcs(rng, 0.0, PI);
    let lower = upper.iter().map(|a| ArcPiece {
        lo: -a.hi,
        hi: -a.lo,
        value: -a.value,
    });
    let mut arcs: Vec<ArcPiece> = lower.chain(upper.iter().copied()).collect();
    arcs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    PiecewiseCircle::new(arcs).expect("sorted disjoint arcs")
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let w = z.inv();
        if z.im.abs() > 0.1 && w.im.abs() > 0.02 && (z.norm() - 1.0).abs() > 0.1 {
            return z;
        }
    }
}

fn log_rel(a: Complex64, b: Complex64) -> f64 {
    ((a - b).exp() - 1.0).norm()
}

/// Random battery of the identities satisfied by the line and circle
/// kernels: multiplicativity, conjugation and inversion of `P`,
/// multiplicativity of `P̂`, and `P̂(1/z) = P̂(z)` for odd data.
/// Line identities are run on both evaluation paths.
pub fn kernel_identity_suite(seed: u64, params: SuiteParams) -> Result<Vec<CertificationReport>, VerifyError> {
    let SuiteParams { configs, points, .. } = params;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(configs);
    for _ in 0..configs {
        let g1 = random_line(&mut rng);
        let g2 = random_line(&mut rng);
        let h1 = random_circle(&mut rng);
        let h2 = random_circle(&mut rng);
        let odd = random_odd_circle(&mut rng);
        let zs: Vec<Complex64> = (0..points).map(|_| random_point(&mut rng)).collect();
        cases.push((g1, g2, h1, h2, odd, zs));
    }

    let line_case = |method: LineMethod| {
        cases
            .par_iter()
            .map(|(g1, g2, _, _, _, zs)| {
                let p = |g: &PiecewiseReal| AnalyticFactor::line_with(g.clone(), method);
                let (p1, p2, p12) = (p(g1), p(g2), p(&g1.add(g2)));
                let inv = p(&g1.v_func().expect("bounded pieces").neg());
                let mut d = [0.0f64; 3];
                for &z in zs {
                    let l1 = p1.log_eval(z)?;
                    d[0] = d[0].max(log_rel(p12.log_eval(z)?, l1 + p2.log_eval(z)?));
                    d[1] = d[1].max(log_rel(p1.log_eval(z.conj())?, l1.conj()));
                    d[2] = d[2].max(log_rel(p1.log_eval(z.inv())?, inv.log_eval(z)?));
                }
                Ok(d)
            })
            .collect::<Result<Vec<[f64; 3]>, EvalError>>()
    };
    let circle_case = cases
        .par_iter()
        .map(|(_, _, h1, h2, odd, zs)| {
            let (q1, q2, q12) = (
                AnalyticFactor::circle(h1.clone()),
                AnalyticFactor::circle(h2.clone()),
                AnalyticFactor::circle(h1.add(h2)),
            );
            let qo = AnalyticFactor::circle(odd.clone());
            let mut d = [0.0f64; 2];
            for &z in zs {
                d[0] = d[0].max(log_rel(q12.log_eval(z)?, q1.log_eval(z)? + q2.log_eval(z)?));
                d[1] = d[1].max(log_rel(qo.log_eval(z.inv())?, qo.log_eval(z)?));
            }
            Ok(d)
        })
        .collect::<Result<Vec<[f64; 2]>, EvalError>>()?;

    let grid = format!("{configs} random configurations x {points} points");
    let mut reports = Vec::new();
    for (method, label, tol) in [
        (LineMethod::Closed, "closed", params.closed_form_tol),
        (LineMethod::Quadrature, "quadrature", params.quadrature_tol),
    ] {
        let d = line_case(method)?;
        for (i, name) in ["line_product", "line_conjugation", "line_inversion"].iter().enumerate() {
            let devs = d.iter().map(|x| x[i]).collect();
            reports.push(CertificationReport::from_deviations(&format!("{name}_{label}"), &grid, devs, tol));
        }
    }
    for (i, name) in ["circle_product", "circle_inversion"].iter().enumerate() {
        let devs = circle_case.iter().map(|x| x[i]).collect();
        reports.push(CertificationReport::from_deviations(name, &grid, devs, params.quadrature_tol));
    }
    let elapsed = start.elapsed();
    for r in reports.iter_mut() {
        r.runtime = elapsed;
    }
    Ok(reports)
}
