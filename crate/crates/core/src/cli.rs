//! Command-line front end: configuration parsing, the four commands and
//! their artifacts (`report.json`, `grid.csv`).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::{ArcPiece, BoundaryError, Piece, PiecewiseCircle, PiecewiseReal};
use crate::cauchy::{AnalyticFactor, SingularSupport};
use crate::factorization::{
    factorize, factorize_hardy, synthesize_n, FactorizationError, FactorizationResult, HardyCover, JoukowskiProfile,
};
use crate::numbers::{Level, Point};
use crate::sets::{validate_sigma, Interval, RealSet, SetError, SigmaDecomposition};
use crate::solver::{solve_riemann, track_argument, verify_jumps, JumpReport, ProblemInstance, SolveError};
use crate::verification::{
    certification_grid, hardy_l2_check, holomorphy_check, jump_thetas, kernel_identity_suite, modulus_jump_check,
    residual_check, symmetry_check, CertificationReport, HardyParams, SuiteParams, VerifyError,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("invalid `{field}`: {source}")]
    Validation { field: String, source: ValidationError },
    #[error("the configuration has no `{0}` section")]
    MissingSection(&'static str),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Factorization(#[from] FactorizationError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Errors raised by the module validators during configuration checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Factorization(#[from] FactorizationError),
    #[error("must be positive, got {0}")]
    NonPositive(f64),
}

fn invalid(field: &str, e: impl Into<ValidationError>) -> CliError {
    CliError::Validation {
        field: field.to_string(),
        source: e.into(),
    }
}

fn bad_field(field: &str, message: impl ToString) -> CliError {
    CliError::Field {
        field: field.to_string(),
        message: message.to_string(),
    }
}

// A number, or a string such as "3/4", "inf" or "1/3 pi".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Num {
    F(f64),
    S(String),
}

impl Num {
    fn point(&self, field: &str) -> Result<Point, CliError> {
        match self {
            Num::F(x) => Ok(Point::from_f64(*x)),
            Num::S(s) => s.parse().map_err(|e| bad_field(field, e)),
        }
    }

    fn level(&self, field: &str) -> Result<Level, CliError> {
        match self {
            Num::F(x) => Ok(Level::Real(*x)),
            Num::S(s) => s.parse().map_err(|e| bad_field(field, e)),
        }
    }

    fn real(&self, field: &str) -> Result<f64, CliError> {
        Ok(self.level(field)?.to_f64())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    lo: Num,
    hi: Num,
    value: Num,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    #[serde(default)]
    phi: Vec<RawPiece>,
    #[serde(default)]
    phi_hat: Vec<RawPiece>,
    #[serde(default)]
    ln_mu: Vec<RawPiece>,
    anchor_inner: f64,
    anchor_outer: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    #[serde(default)]
    eta: Vec<RawPiece>,
    #[serde(default = "one")]
    scale: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactorization {
    #[serde(default)]
    eta: Vec<RawPiece>,
    #[serde(default = "one")]
    scale: f64,
    #[serde(default)]
    omega1: Vec<(Num, Num)>,
    #[serde(default)]
    omega2: Vec<(Num, Num)>,
    #[serde(default)]
    ln_mu: Vec<RawPiece>,
    #[serde(default)]
    hardy_cover: Option<Vec<(Num, Num)>>,
    #[serde(default)]
    cross_check: Option<RawProfile>,
}

fn one() -> f64 {
    1.0
}

/// Certification tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub closed_form: f64,
    pub quadrature: f64,
    pub jump: f64,
    pub residual: f64,
    pub hardy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            closed_form: 1e-10,
            quadrature: 1e-7,
            jump: 1e-4,
            residual: 1e-6,
            hardy: 1e-3,
        }
    }
}

impl Tolerances {
    fn entries(&mut self) -> [(&'static str, &mut f64); 5] {
        [
            ("closed_form", &mut self.closed_form),
            ("quadrature", &mut self.quadrature),
            ("jump", &mut self.jump),
            ("residual", &mut self.residual),
            ("hardy", &mut self.hardy),
        ]
    }

    /// Applies a `NAME=VALUE` override.
    pub fn set(&mut self, entry: &str) -> Result<(), CliError> {
        let (name, value) = entry.split_once('=').ok_or_else(|| bad_field("--tol", "expected NAME=VALUE"))?;
        let value: f64 = value.trim().parse().map_err(|e| bad_field(name, e))?;
        let slot = self
            .entries()
            .into_iter()
            .find(|(n, _)| *n == name.trim())
            .map(|(_, s)| s)
            .ok_or_else(|| bad_field("--tol", format!("unknown tolerance `{name}`")))?;
        *slot = value;
        self.validate()
    }

    fn validate(&mut self) -> Result<(), CliError> {
        for (name, v) in self.entries() {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(invalid(&format!("tolerances.{name}"), ValidationError::NonPositive(*v)));
            }
        }
        Ok(())
    }
}

/// Rectangle, resolution and exclusion radius of the exported grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub resolution: (usize, usize),
    pub exclusion: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            re: (-3.0, 3.0),
            im: (-3.0, 3.0),
            resolution: (400, 400),
            exclusion: 0.02,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    problem: Option<RawProblem>,
    #[serde(default)]
    factorization: Option<RawFactorization>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    grid: GridConfig,
    #[serde(default)]
    seed: u64,
}

/// Input of the factorization commands.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationConfig {
    pub profile: JoukowskiProfile,
    pub sigma: SigmaDecomposition,
    pub ln_mu: PiecewiseCircle,
    pub hardy_cover: Option<HardyCover>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Option<ProblemInstance>,
    pub factorization: Option<FactorizationConfig>,
    pub tolerances: Tolerances,
    pub grid: GridConfig,
    pub seed: u64,
}

fn line_data(raw: &[RawPiece], field: &str) -> Result<PiecewiseReal, CliError> {
    let pieces = raw
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let f = format!("{field}[{i}]");
            Ok(Piece::new(p.lo.point(&f)?, p.hi.point(&f)?, p.value.level(&f)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    PiecewiseReal::new(pieces).map_err(|e| invalid(field, e))
}

fn circle_data(raw: &[RawPiece], field: &str) -> Result<PiecewiseCircle, CliError> {
    let arcs = raw
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let f = format!("{field}[{i}]");
            Ok(ArcPiece {
                lo: p.lo.real(&f)?,
                hi: p.hi.real(&f)?,
                value: p.value.level(&f)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    PiecewiseCircle::new(arcs).map_err(|e| invalid(field, e))
}

fn intervals(raw: &[(Num, Num)], field: &str) -> Result<Vec<Interval>, CliError> {
    raw.iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let f = format!("{field}[{i}]");
            Interval::new(a.point(&f)?, b.point(&f)?).map_err(|e| invalid(&f, e))
        })
        .collect()
}

fn real_set(raw: &[(Num, Num)], field: &str) -> Result<RealSet, CliError> {
    RealSet::new(intervals(raw, field)?).map_err(|e| invalid(field, e))
}

fn profile(eta: &[RawPiece], scale: f64, field: &str) -> Result<JoukowskiProfile, CliError> {
    let eta = line_data(eta, &format!("{field}.eta"))?;
    JoukowskiProfile::new(eta, scale).map_err(|e| invalid(&format!("{field}.scale"), e))
}

/// Parses and validates a configuration document.
pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let problem = match &raw.problem {
        None => None,
        Some(p) => Some(
            ProblemInstance::new(
                line_data(&p.phi, "problem.phi")?,
                circle_data(&p.phi_hat, "problem.phi_hat")?,
                circle_data(&p.ln_mu, "problem.ln_mu")?,
                p.anchor_inner,
                p.anchor_outer,
            )
            .map_err(|e| invalid("problem", e))?,
        ),
    };
    let factorization = match &raw.factorization {
        None => None,
        Some(f) => {
            let mut prof = profile(&f.eta, f.scale, "factorization")?;
            if let Some(cc) = &f.cross_check {
                let other = profile(&cc.eta, cc.scale, "factorization.cross_check")?;
                prof = prof.with_cross_check(synthesize_n(&other.eta, other.scale));
            }
            let sigma = validate_sigma(
                real_set(&f.omega1, "factorization.omega1")?,
                real_set(&f.omega2, "factorization.omega2")?,
            )
            .map_err(|e| invalid("factorization.omega", e))?;
            let hardy_cover = match &f.hardy_cover {
                None => None,
                Some(c) => Some(HardyCover {
                    delta_l: intervals(c, "factorization.hardy_cover")?,
                }),
            };
            Some(FactorizationConfig {
                profile: prof,
                sigma,
                ln_mu: circle_data(&f.ln_mu, "factorization.ln_mu")?,
                hardy_cover,
            })
        }
    };
    let mut tolerances = raw.tolerances;
    tolerances.validate()?;
    let grid = raw.grid;
    if !(grid.exclusion >= 0.0) || grid.resolution.0 < 2 || grid.resolution.1 < 2 {
        return Err(bad_field("grid", "resolution must be at least 2x2 and exclusion nonnegative"));
    }
    if !(grid.re.0 < grid.re.1 && grid.im.0 < grid.im.1) {
        return Err(bad_field("grid", "empty rectangle"));
    }
    Ok(RunConfig {
        problem,
        factorization,
        tolerances,
        grid,
        seed: raw.seed,
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Factorize,
    Verify,
    Grid,
}

/// Per-run switches.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub hardy: bool,
}

/// Summary of a factorization for the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationSummary {
    pub hardy_mode: bool,
    pub constant_c: f64,
    pub chosen: Vec<ChosenSummary>,
    pub nu: PiecewiseReal,
    pub nu_hat0: PiecewiseCircle,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_tilde: Option<PiecewiseReal>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChosenSummary {
    pub start: Point,
    pub end: Point,
    pub alpha_star: Point,
    pub beta_star: Point,
    pub n: i64,
}

impl FactorizationSummary {
    pub fn of(res: &FactorizationResult) -> Self {
        FactorizationSummary {
            hardy_mode: res.hardy_mode,
            constant_c: res.constant_c,
            chosen: res
                .classification
                .chosen
                .iter()
                .zip(&res.plateaus.chosen)
                .map(|(c, &n)| ChosenSummary {
                    start: c.component.start,
                    end: c.component.end,
                    alpha_star: c.alpha_star,
                    beta_star: c.beta_star,
                    n,
                })
                .collect(),
            nu: res.split.nu.clone(),
            nu_hat0: res.split.nu_hat0.clone(),
            n_tilde: res.n_tilde.clone(),
        }
    }
}

/// The document written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: Command,
    pub seed: u64,
    pub hardy: bool,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jumps: Option<JumpReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorization: Option<FactorizationSummary>,
    /// Checks keyed by name.
    pub checks: BTreeMap<String, CertificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

impl RunReport {
    fn new(command: Command, config: &RunConfig, options: RunOptions) -> Self {
        RunReport {
            command,
            seed: config.seed,
            hardy: options.hardy,
            tolerances: config.tolerances,
            jumps: None,
            factorization: None,
            checks: BTreeMap::new(),
            grid_points: None,
            error: None,
            passed: true,
        }
    }

    fn add(&mut self, r: CertificationReport) {
        self.passed &= r.passed;
        self.checks.insert(r.name.clone(), r);
    }
}

/// Artifacts of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub report: RunReport,
    pub csv: Option<String>,
}

const RESIDUAL_POINTS: usize = 200;
const HOLOMORPHY_POINTS: usize = 1000;
const CERT_BOX: (f64, f64) = (-4.0, 4.0);
const RESIDUAL_EXCLUSION: f64 = 0.05;

/// Runs the factorization selected by the options.
pub fn run_factorization(fc: &FactorizationConfig, options: RunOptions) -> Result<FactorizationResult, CliError> {
    Ok(if options.hardy {
        let cover = fc
            .hardy_cover
            .as_ref()
            .ok_or(CliError::MissingSection("factorization.hardy_cover"))?;
        factorize_hardy(&fc.profile, &fc.sigma, &fc.ln_mu, cover)?
    } else {
        factorize(&fc.profile, &fc.sigma, &fc.ln_mu)?
    })
}

// Ω ∪ 𝕋 as a singular support
fn omega_support(sigma: &SigmaDecomposition) -> SingularSupport {
    SingularSupport {
        line: sigma
            .omega()
            .intervals()
            .iter()
            .map(|iv| (iv.lo.to_f64(), iv.hi.to_f64()))
            .collect(),
        arcs: vec![(-std::f64::consts::PI, std::f64::consts::PI)],
        points: vec![-1.0, 1.0],
    }
}

/// Residual, modulus-jump and holomorphy certificates of a factorization,
/// plus the local `L²` check on each `δ_l` in the Hardy variant.
pub fn certify_factorization(
    res: &FactorizationResult,
    fc: &FactorizationConfig,
    tol: &Tolerances,
    seed: u64,
) -> Result<Vec<CertificationReport>, CliError> {
    let r = &res.assembled_r;
    let n = fc.profile.n_factor();
    let grid = certification_grid(
        RESIDUAL_POINTS,
        seed,
        CERT_BOX,
        CERT_BOX,
        &[r.singular_support(), n.singular_support()],
        RESIDUAL_EXCLUSION,
    );
    let mut out = vec![residual_check(&n, r, &grid, tol.residual)?];
    out.push(modulus_jump_check(r, &fc.ln_mu, &jump_thetas(&fc.ln_mu), tol.jump)?);
    let omega = omega_support(&fc.sigma);
    let grid = certification_grid(HOLOMORPHY_POINTS, seed + 7919, CERT_BOX, CERT_BOX, &[&omega], 0.02);
    out.push(holomorphy_check(r, &grid)?);
    if res.hardy_mode {
        if let Some(cover) = &fc.hardy_cover {
            let params = HardyParams {
                tol: tol.hardy,
                ..HardyParams::default()
            };
            for (i, d) in cover.delta_l.iter().enumerate() {
                let mut rep = hardy_l2_check(r, (d.lo.to_f64(), d.hi.to_f64()), params)?;
                rep.name = format!("hardy_l2_{i}");
                out.push(rep);
            }
        }
    }
    Ok(out)
}

fn real_anchor(support: &SingularSupport, lo: f64, hi: f64) -> f64 {
    (1..200)
        .map(|k| lo + (hi - lo) * k as f64 / 200.0)
        .max_by(|a, b| {
            let da = support.distance(Complex64::new(*a, 0.0));
            let db = support.distance(Complex64::new(*b, 0.0));
            da.total_cmp(&db).then(b.abs().total_cmp(&a.abs()))
        })
        .unwrap_or(0.0)
}

fn fmt_num(x: f64) -> String {
    format!("{x:.12e}")
}

/// CSV of `|R|` and the continued `arg R` over the configured grid,
/// row-major with `im` as the slow index; points within the exclusion
/// radius of the singular support or of `±1` are omitted.
pub fn grid_csv(r: &AnalyticFactor, grid: &GridConfig, anchors: (f64, f64)) -> (String, usize) {
    let (nx, ny) = grid.resolution;
    let support = r.singular_support();
    let rows: Vec<Vec<String>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let y = grid.im.0 + (grid.im.1 - grid.im.0) * j as f64 / (ny - 1) as f64;
            let mut lines = Vec::new();
            for i in 0..nx {
                let x = grid.re.0 + (grid.re.1 - grid.re.0) * i as f64 / (nx - 1) as f64;
                let z = Complex64::new(x, y);
                if support.distance(z) <= grid.exclusion
                    || (z - 1.0).norm() <= grid.exclusion
                    || (z + 1.0).norm() <= grid.exclusion
                {
                    continue;
                }
                let Ok(v) = r.eval(z) else { continue };
                let anchor = if z.norm() < 1.0 { anchors.0 } else { anchors.1 };
                let arg = track_argument(r, anchor, z).map(fmt_num).unwrap_or_default();
                lines.push(format!("{},{},{},{}", fmt_num(x), fmt_num(y), fmt_num(v.norm()), arg));
            }
            lines
        })
        .collect();
    let mut out = String::from("re,im,abs_R,arg_R\n");
    let mut count = 0;
    for line in rows.into_iter().flatten() {
        out.push_str(&line);
        out.push('\n');
        count += 1;
    }
    (out, count)
}

/// Executes one command on a validated configuration.
pub fn run(command: Command, config: &RunConfig, options: RunOptions) -> Result<RunOutcome, CliError> {
    let tol = &config.tolerances;
    let mut report = RunReport::new(command, config, options);
    let mut csv = None;
    match command {
        Command::Solve => {
            let inst = config.problem.as_ref().ok_or(CliError::MissingSection("problem"))?;
            let r = solve_riemann(inst)?;
            let jumps = verify_jumps(&r, inst, tol.jump);
            report.passed &= jumps.passed;
            report.jumps = Some(jumps);
        }
        Command::Factorize => {
            let fc = config
                .factorization
                .as_ref()
                .ok_or(CliError::MissingSection("factorization"))?;
            let res = run_factorization(fc, options)?;
            report.factorization = Some(FactorizationSummary::of(&res));
            for rep in certify_factorization(&res, fc, tol, config.seed)? {
                report.add(rep);
            }
        }
        Command::Verify => {
            let params = SuiteParams {
                closed_form_tol: tol.closed_form,
                quadrature_tol: tol.quadrature,
                ..SuiteParams::default()
            };
            for rep in kernel_identity_suite(config.seed, params)? {
                report.add(rep);
            }
            if let Some(inst) = &config.problem {
                let r = solve_riemann(inst)?;
                let jumps = verify_jumps(&r, inst, tol.jump);
                report.passed &= jumps.passed;
                report.jumps = Some(jumps);
            }
            if let Some(fc) = &config.factorization {
                let n = fc.profile.n_factor();
                let grid = certification_grid(
                    RESIDUAL_POINTS,
                    config.seed,
                    CERT_BOX,
                    CERT_BOX,
                    &[n.singular_support()],
                    RESIDUAL_EXCLUSION,
                );
                report.add(symmetry_check(&n, &grid, 1e-12)?);
                let res = run_factorization(fc, options)?;
                report.factorization = Some(FactorizationSummary::of(&res));
                for rep in certify_factorization(&res, fc, tol, config.seed)? {
                    report.add(rep);
                }
            }
        }
        Command::Grid => {
            let (r, anchors) = if let Some(fc) = &config.factorization {
                let r = run_factorization(fc, options)?.assembled_r;
                let s = r.singular_support().clone();
                let anchors = (real_anchor(&s, -0.95, 0.95), real_anchor(&s, 1.05, 6.0));
                (r, anchors)
            } else if let Some(inst) = &config.problem {
                (solve_riemann(inst)?, (inst.anchor_inner, inst.anchor_outer))
            } else {
                (AnalyticFactor::constant(1.0), (0.0, 2.0))
            };
            let (text, count) = grid_csv(&r, &config.grid, anchors);
            report.grid_points = Some(count);
            csv = Some(text);
        }
    }
    Ok(RunOutcome { report, csv })
}

#[derive(Debug, Parser)]
#[command(name = "riemann-factor", version, about = "Riemann problems and symmetric factorizations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Solve the Riemann problem with jumps on the line and the circle.
    Solve(CommonArgs),
    /// Factorize N(z) = R(z)R(1/z).
    Factorize {
        #[command(flatten)]
        common: CommonArgs,
        /// Use the local Hardy-class variant.
        #[arg(long)]
        hardy: bool,
    },
    /// Run the full certification battery.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        hardy: bool,
    },
    /// Export |R| and arg R on a rectangular grid.
    Grid {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        hardy: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Tolerance override, NAME=VALUE.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Report failed certifications without a nonzero exit.
    #[arg(long)]
    pub warn_only: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn write_outputs(dir: &Path, report: &RunReport, csv: Option<&str>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(dir.join("report.json"), json + "\n").map_err(io)?;
    if let Some(csv) = csv {
        fs::write(dir.join("grid.csv"), csv).map_err(io)?;
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let (command, common, hardy) = match cli.command {
        CliCommand::Solve(c) => (Command::Solve, c, false),
        CliCommand::Factorize { common, hardy } => (Command::Factorize, common, hardy),
        CliCommand::Verify { common, hardy } => (Command::Verify, common, hardy),
        CliCommand::Grid { common, hardy } => (Command::Grid, common, hardy),
    };
    let options = RunOptions { hardy };
    let config = parse_config(&common.config).and_then(|mut c| {
        for t in &common.tol {
            c.tolerances.set(t)?;
        }
        if let Some(s) = common.seed {
            c.seed = s;
        }
        Ok(c)
    });
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let (report, csv, hard_error) = match run(command, &config, options) {
        Ok(o) => (o.report, o.csv, false),
        Err(e) => {
            eprintln!("error: {e}");
            let mut r = RunReport::new(command, &config, options);
            r.error = Some(e.to_string());
            r.passed = false;
            (r, None, true)
        }
    };
    if let Err(e) = write_outputs(&common.out, &report, csv.as_deref()) {
        eprintln!("error: {e}");
        return 1;
    }
    for (name, c) in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        println!("{status} {name}: max {:.3e} (tol {:.1e})", c.max_deviation, c.tolerance);
    }
    if let Some(j) = &report.jumps {
        let status = if j.passed { "pass" } else { "FAIL" };
        println!("{status} jumps: max {:.3e} (tol {:.1e})", j.max_deviation(), j.tol);
    }
    if hard_error || (!report.passed && !common.warn_only) {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str("{}").unwrap();
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!((c.seed, c.problem.is_none()), (0, true));
    }

    #[test]
    fn pi_values_parse_exactly() {
        let c = parse_config_str(
            r#"{"factorization": {"eta": [{"lo": "10/3", "hi": "17/4", "value": "1/3 pi"}]}}"#,
        )
        .unwrap();
        let eta = &c.factorization.unwrap().profile.eta;
        assert_eq!(eta.pieces()[0].value, Level::pi_frac(1, 3));
        assert_eq!(eta.pieces()[0].interval.lo, Point::ratio(10, 3));
    }

    #[test]
    fn asymmetric_omega2_is_rejected() {
        let err = parse_config_str(r#"{"factorization": {"omega2": [[3, 4]]}}"#).unwrap_err();
        match err {
            CliError::Validation { source, .. } => assert_eq!(source, ValidationError::Set(SetError::SymmetryViolation)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_config_str("{\n  \"seed\": ,\n}") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config_str(r#"{"sed": 1}"#), Err(CliError::Parse { .. })));
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("residual=1e-3").unwrap();
        assert_eq!(t.residual, 1e-3);
        assert!(t.set("residual=-1").is_err());
        assert!(t.set("nope=1").is_err());
    }

    #[test]
    fn grid_of_the_unit_factor() {
        let g = GridConfig {
            resolution: (5, 4),
            ..GridConfig::default()
        };
        let (csv, n) = grid_csv(&AnalyticFactor::constant(1.0), &g, (0.0, 2.0));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "re,im,abs_R,arg_R");
        assert_eq!(lines.len(), n + 1);
        // points on the real axis cannot be tracked and leave arg empty
        for l in &lines[1..] {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[2].parse::<f64>().unwrap(), 1.0);
            assert!(f[3].is_empty() || f[3].parse::<f64>().unwrap() == 0.0);
        }
    }
}
