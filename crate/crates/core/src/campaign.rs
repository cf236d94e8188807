//! Seeded verification campaigns and their artifacts.
//!
//! Trial `i` of a campaign with seed `s` draws everything from the stream
//! `trial_rng(s + i, 0)` and records `s + i` in its rows, so any row can be
//! replayed on its own.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cayley::{
    verify_dissipative_formula, verify_resolvent_formulas, verify_selfadjoint_formula, CayleyConfig,
    DissipativePair, SelfAdjointPair,
};
use crate::dilation::{hs_difference_schaffer, n_dilation, schaffer_window};
use crate::error::{Error, Result};
use crate::par::{map_range, Exec};
use crate::paths::PathSpec;
use crate::report::VerificationReport;
use crate::sample::{
    analytic_polynomial_of_degree, contraction, ginibre, hermitian, hermitian_pi, normal_contraction,
    strictly_dissipative, trial_rng, trigonometric_polynomial, TrialRng,
};
use crate::semispectral::{semispectral_cdf, SemiSpectralCDF};
use crate::shift::{lambda_of, quotient_bound_test, verify_trace_formula, GammaPipeline, ShiftFunction, MIN_GRID};
use crate::truncate::{build_projections, truncation_diagnostics, truncation_gap, DiagnosticsRow, GapRow};
use crate::{ComplexMatrix, FourierFunction, C64};

pub const MAX_DIM: usize = 32;
pub const MAX_DEGREE: u32 = 24;
/// Points `z` (all with `Im z < 0`) at which the resolvent identity is checked.
pub const RESOLVENT_POINTS: [C64; 5] = [
    C64::new(0.0, -1.0),
    C64::new(0.0, -2.0),
    C64::new(0.0, -0.5),
    C64::new(0.5, -1.0),
    C64::new(-0.4, -1.2),
];
/// Random polynomials per quotient-bound check inside a linear campaign.
const BOUND_POLYNOMIALS: usize = 100;
/// Compression of the N-dilation must reproduce `T^k` to this accuracy.
const DILATION_TOL: f64 = 1e-9;
const HS_DIFFERENCE_TOL: f64 = 1e-10;
const FULL_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignKind {
    Linear,
    Mult,
    CayleySa,
    CayleyDiss,
    Dilation,
    Truncate,
}

impl CampaignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Mult => "mult",
            Self::CayleySa => "cayley_sa",
            Self::CayleyDiss => "cayley_diss",
            Self::Dilation => "dilation",
            Self::Truncate => "truncate",
        }
    }
}

impl std::str::FromStr for CampaignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub trace_formula: f64,
    /// Multiplicative moments come from adaptive quadrature, hence looser.
    pub trace_formula_mult: f64,
    pub route_agreement: f64,
    pub bound_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { trace_formula: 1e-8, trace_formula_mult: 1e-7, route_agreement: 1e-6, bound_slack: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub kind: CampaignKind,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub degrees: Vec<u32>,
    pub grid: usize,
    pub tolerances: Tolerances,
    pub exec: Exec,
    /// Output directory for artifacts.
    pub out: Option<PathBuf>,
    /// Also write a shift-function sample file next to the summary.
    pub emit_samples: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            kind: CampaignKind::Linear,
            trials: 20,
            dims: vec![2, 3, 4],
            degrees: vec![2, 4, 6],
            grid: 4096,
            tolerances: Tolerances::default(),
            exec: Exec::Parallel,
            out: None,
            emit_samples: false,
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0 || d > MAX_DIM) {
            return bad(format!("dims must be a nonempty list within 1..={MAX_DIM}"));
        }
        if self.degrees.is_empty() || self.degrees.iter().any(|&k| k == 0 || k > MAX_DEGREE) {
            return bad(format!("degrees must be a nonempty list within 1..={MAX_DEGREE}"));
        }
        if self.grid < MIN_GRID {
            return bad(format!("grid must be at least {MIN_GRID}"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("trace_formula", t.trace_formula),
            ("trace_formula_mult", t.trace_formula_mult),
            ("route_agreement", t.route_agreement),
            ("bound_slack", t.bound_slack),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance {name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }

    /// `(dim, degree)` for a trial: dims cycle fastest.
    pub fn trial_shape(&self, trial: usize) -> (usize, u32) {
        let dim = self.dims[trial % self.dims.len()];
        let degree = self.degrees[(trial / self.dims.len()) % self.degrees.len()];
        (dim, degree)
    }

    fn cayley(&self) -> CayleyConfig {
        CayleyConfig { grid: self.grid, ..CayleyConfig::default() }
    }
}

/// All reports of a campaign, in trial order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignOutcome {
    pub config: CampaignConfig,
    pub reports: Vec<VerificationReport>,
}

impl CampaignOutcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationReport> {
        self.reports.iter().filter(|r| !r.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.reports.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.reports {
            w.serialize(r.csv_row()).map_err(|e| Error::Serialization(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Writes `summary.csv` and `reports.json` into `dir`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_path = dir.join("summary.csv");
        fs::write(&csv_path, self.csv_string()?).map_err(|e| Error::io(&csv_path, e))?;
        let json_path = dir.join("reports.json");
        let json = serde_json::to_string_pretty(&self.reports).map_err(|e| Error::Serialization(e.to_string()))?;
        fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
        Ok(vec![csv_path, json_path])
    }
}

/// Runs every trial of the configured suite. Trials that error become failed
/// reports carrying the message; only an invalid config is an `Err`.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignOutcome> {
    cfg.validate()?;
    let per_trial = map_range(cfg.exec, cfg.trials, |i| {
        let seed = cfg.trial_seed(i);
        let (dim, degree) = cfg.trial_shape(i);
        run_trial(cfg, seed, dim, degree).unwrap_or_else(|e| {
            vec![VerificationReport::failure(cfg.kind.as_str(), 0.0, e.to_string())
                .with_context(cfg.kind.as_str(), seed, dim, degree as i64)]
        })
    });
    Ok(CampaignOutcome { config: cfg.clone(), reports: per_trial.into_iter().flatten().collect() })
}

/// The reports of one trial.
pub fn run_trial(cfg: &CampaignConfig, seed: u64, dim: usize, degree: u32) -> Result<Vec<VerificationReport>> {
    let mut rng = trial_rng(seed, 0);
    let kind = cfg.kind.as_str();
    let ctx = |r: VerificationReport, deg: i64| {
        let mut r = r.with_context(kind, seed, dim, deg);
        r.seed = seed;
        r
    };
    match cfg.kind {
        CampaignKind::Linear => {
            let (path, p) = sample_linear(&mut rng, dim, degree)?;
            Ok(vec![ctx(linear_trial(&path, &p, seed, &cfg.tolerances)?, degree as i64)])
        }
        CampaignKind::Mult => {
            let (path, p) = sample_mult(&mut rng, dim, degree)?;
            let shift = ShiftFunction::new(path);
            let r = verify_trace_formula(&shift, &p, cfg.tolerances.trace_formula_mult)?;
            Ok(vec![ctx(r, degree as i64)])
        }
        CampaignKind::CayleySa => {
            let (pair, phi) = sample_selfadjoint(&mut rng, dim, degree)?;
            let c = cfg.cayley();
            let mut out = vec![ctx(verify_selfadjoint_formula(&pair, &phi, &c)?, degree as i64)];
            for r in verify_resolvent_formulas(&pair, &RESOLVENT_POINTS, &c)? {
                out.push(ctx(r, 0));
            }
            Ok(out)
        }
        CampaignKind::CayleyDiss => {
            let (pair, phi) = sample_dissipative(&mut rng, dim, degree)?;
            Ok(vec![ctx(verify_dissipative_formula(&pair, &phi, &cfg.cayley())?, degree as i64)])
        }
        CampaignKind::Dilation => Ok(vec![ctx(dilation_trial(&mut rng, dim, degree)?, degree as i64)]),
        CampaignKind::Truncate => {
            Ok(vec![ctx(truncation_trial(&mut rng, seed, dim, degree, cfg.exec)?, degree as i64)])
        }
    }
}

pub fn sample_linear(rng: &mut TrialRng, dim: usize, degree: u32) -> Result<(PathSpec, FourierFunction)> {
    let t0 = contraction(rng, dim);
    let t = contraction(rng, dim);
    let p = analytic_polynomial_of_degree(rng, degree);
    Ok((PathSpec::between(&t0, &t)?, p))
}

pub fn sample_mult(rng: &mut TrialRng, dim: usize, degree: u32) -> Result<(PathSpec, FourierFunction)> {
    let t0 = contraction(rng, dim);
    let a = hermitian_pi(rng, dim);
    let p = trigonometric_polynomial(rng, degree);
    Ok((PathSpec::multiplicative(t0, a)?, p))
}

pub fn sample_selfadjoint(rng: &mut TrialRng, dim: usize, degree: u32) -> Result<(SelfAdjointPair, FourierFunction)> {
    let h = hermitian(rng, dim, 2.0);
    let h0 = hermitian(rng, dim, 2.0);
    let phi = analytic_polynomial_of_degree(rng, degree);
    Ok((SelfAdjointPair::new(h, h0)?, phi))
}

pub fn sample_dissipative(rng: &mut TrialRng, dim: usize, degree: u32) -> Result<(DissipativePair, FourierFunction)> {
    let l = strictly_dissipative(rng, dim);
    let l0 = strictly_dissipative(rng, dim);
    let phi = analytic_polynomial_of_degree(rng, degree);
    Ok((DissipativePair::new(l, l0)?, phi))
}

/// Trace formula, plus agreement of the pointwise and moment routes for
/// every moment the polynomial uses, plus the quotient bound.
fn linear_trial(path: &PathSpec, p: &FourierFunction, seed: u64, tol: &crate::campaign::Tolerances) -> Result<VerificationReport> {
    let start = Instant::now();
    let shift = ShiftFunction::new(path.clone());
    let report = verify_trace_formula(&shift, p, tol.trace_formula)?;
    let deg = p.max_index().max(0) as u32;
    let n = deg.max(1) + 2;
    let mut route = 0.0f64;
    for m in 0..=deg.saturating_sub(2) as i64 {
        let c = shift.moment(m)?;
        route = route.max((shift.pointwise_moment(m, n)? - c).norm());
    }
    let bound = quotient_bound_test(path, BOUND_POLYNOMIALS, deg.max(1), seed)?;
    Ok(report
        .and_check("route", route, tol.route_agreement)
        .and_check("quotient_bound", bound.residual, tol.bound_slack)
        .with_extra("max_ratio", bound.extra["max_ratio"])
        .timed(start))
}

/// N-dilation unitarity and compression, the `k = N + 1` control, and the
/// Schäffer HS-difference closed form against a window.
fn dilation_trial(rng: &mut TrialRng, dim: usize, degree: u32) -> Result<VerificationReport> {
    let start = Instant::now();
    let t = contraction(rng, dim);
    let t0 = contraction(rng, dim);
    let nd = n_dilation(&t, degree)?;
    let unitarity = nd.unitary().unitarity_residual();
    let powers = t.powers(degree as usize + 1);
    let mut compression = 0.0f64;
    for k in 0..=degree {
        compression = compression.max((nd.compression(k) - &powers[k as usize]).max_abs());
    }
    let control = (nd.compression(degree + 1) - &powers[degree as usize + 1]).max_abs();
    let defect = (ComplexMatrix::identity(dim) - &(&t.adjoint() * &t)).max_abs();
    let closed = hs_difference_schaffer(&t, &t0)?;
    let window = schaffer_window(&t, degree)?.hs_distance(&schaffer_window(&t0, degree)?)?;
    let lhs = nd.compression(degree).trace();
    let rhs = powers[degree as usize].trace();
    Ok(VerificationReport::from_residual("dilation", lhs, rhs, unitarity.max(compression), DILATION_TOL)
        .and_check("hs_difference", (closed - window).abs(), HS_DIFFERENCE_TOL)
        .with_extra("unitarity_residual", unitarity)
        .with_extra("compression_residual", compression)
        .with_extra("control_residual", control)
        .with_extra("defect", defect)
        .timed(start))
}

/// Random data for the truncation diagnostics: `N₀` normal, `V` with
/// `‖V‖ = 0.1`, `A` Hermitian.
pub fn sample_truncation(rng: &mut TrialRng, dim: usize) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let n0 = normal_contraction(rng, dim, 0.8);
    let g = ginibre(rng, dim);
    let v = g.scale_real(0.1 / g.op_norm()?);
    let a = hermitian(rng, dim, 1.5);
    Ok((n0, v, a))
}

/// Full-rank gaps on both path kinds and the remainder bound on every rank.
fn truncation_trial(rng: &mut TrialRng, seed: u64, dim: usize, degree: u32, exec: Exec) -> Result<VerificationReport> {
    let start = Instant::now();
    let (n0, v, a) = sample_truncation(rng, dim)?;
    let q = trigonometric_polynomial(rng, degree);
    let tables = truncation_tables(&n0, &v, &a, degree, &q, Some(seed), exec)?;
    let last = |rows: &[GapRow]| rows.last().map(|r| r.gap).unwrap_or(0.0);
    let (lin, mult) = (last(&tables.gap_linear), last(&tables.gap_mult));
    let excess = tables
        .diagnostics
        .iter()
        .map(|r| (r.exp_remainder_gap - r.remainder_bound).max(0.0))
        .fold(0.0, f64::max);
    Ok(VerificationReport::from_residual("truncation", C64::new(lin, 0.0), C64::new(0.0, 0.0), lin.max(mult), FULL_RANK_TOL)
        .and_check("remainder_bound", excess, HS_DIFFERENCE_TOL)
        .with_extra("full_rank_gap_mult", mult)
        .with_extra("first_gap_linear", tables.gap_linear[0].gap)
        .timed(start))
}

/// Per-rank tables for one data set, ranks `1..=D`.
#[derive(Debug, Clone)]
pub struct TruncationTables {
    pub diagnostics: Vec<DiagnosticsRow>,
    pub gap_linear: Vec<GapRow>,
    pub gap_mult: Vec<GapRow>,
}

/// Diagnostics for `T₀ = N₀ + V`, `T = e^{iA}T₀`, and gaps for `z^deg` on
/// the linear path `N₀ → N₀ + V` and for `q` on the multiplicative path.
pub fn truncation_tables(
    n0: &ComplexMatrix,
    v: &ComplexMatrix,
    a: &ComplexMatrix,
    degree: u32,
    q: &FourierFunction,
    rotation: Option<u64>,
    exec: Exec,
) -> Result<TruncationTables> {
    let d = n0.dim();
    let ranks: Vec<usize> = (1..=d).collect();
    let seq = build_projections(n0, &ranks, rotation)?;
    let diagnostics = truncation_diagnostics(&seq, n0, v, a, degree.max(1), exec)?;
    let p = FourierFunction::monomial(degree.max(2) as i64);
    let gap_linear = truncation_gap(&seq, &PathSpec::linear(n0.clone(), v.clone())?, &p, exec)?;
    let gap_mult = truncation_gap(&seq, &PathSpec::multiplicative(n0 + v, a.clone())?, q, exec)?;
    Ok(TruncationTables { diagnostics, gap_linear, gap_mult })
}

/// Which sample file a kind produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// `(t, re_eta, im_eta)` on `[0, 2π]`.
    Eta,
    /// `(lambda, re_xi, im_xi)` on the real line.
    Xi,
}

/// `η` at `grid` equally spaced angles including both endpoints `0` and `2π`.
pub fn eta_samples(shift: &ShiftFunction, degree: u32, grid: usize) -> Result<Vec<(f64, C64)>> {
    if grid < 2 {
        return Err(Error::domain("need at least two sample points"));
    }
    let step = shift.step_function(degree)?;
    Ok((0..grid)
        .map(|j| {
            let t = if j + 1 == grid { TAU } else { TAU * j as f64 / (grid - 1) as f64 };
            (t, step.eval(t))
        })
        .collect())
}

/// `ξ(λ)` at the images of the `grid` midpoint angles, sorted by `λ`.
pub fn xi_samples(pipeline: &GammaPipeline, grid: usize) -> Vec<(f64, C64)> {
    let mut rows: Vec<(f64, C64)> = (0..grid)
        .map(|j| {
            let l = lambda_of((j as f64 + 0.5) * TAU / grid as f64);
            (l, pipeline.xi(l))
        })
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows
}

pub fn write_samples(kind: SampleKind, rows: &[(f64, C64)], out: impl std::io::Write) -> Result<()> {
    let header = match kind {
        SampleKind::Eta => ["t", "re_eta", "im_eta"],
        SampleKind::Xi => ["lambda", "re_xi", "im_xi"],
    };
    let mut w = csv::Writer::from_writer(out);
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(header).map_err(ser)?;
    for (x, z) in rows {
        w.serialize((x, z.re, z.im)).map_err(ser)?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))
}

/// Samples for trial 0 of the config (first dim and degree). Contraction
/// kinds give `η`/`η̃`, Cayley kinds give `ξ`. Writes `eta.csv` or `xi.csv`
/// into `dir`.
pub fn emit_shift_samples(cfg: &CampaignConfig, dir: &Path) -> Result<PathBuf> {
    cfg.validate()?;
    let seed = cfg.trial_seed(0);
    let (dim, degree) = cfg.trial_shape(0);
    let mut rng = trial_rng(seed, 0);
    let (kind, rows) = match cfg.kind {
        CampaignKind::CayleySa | CampaignKind::CayleyDiss => {
            let path = if cfg.kind == CampaignKind::CayleySa {
                sample_selfadjoint(&mut rng, dim, degree)?.0.circle_path()?
            } else {
                sample_dissipative(&mut rng, dim, degree)?.0.circle_path()?
            };
            let shift = ShiftFunction::new(path);
            let pipeline = GammaPipeline::new(&shift, degree + 2, cfg.grid)?;
            (SampleKind::Xi, xi_samples(&pipeline, cfg.grid))
        }
        CampaignKind::Mult => {
            let (path, _) = sample_mult(&mut rng, dim, degree)?;
            (SampleKind::Eta, eta_samples(&ShiftFunction::new(path), degree + 2, cfg.grid)?)
        }
        _ => {
            let (path, _) = sample_linear(&mut rng, dim, degree)?;
            (SampleKind::Eta, eta_samples(&ShiftFunction::new(path), degree + 2, cfg.grid)?)
        }
    };
    write_sample_file(dir, kind, &rows)
}

pub fn write_sample_file(dir: &Path, kind: SampleKind, rows: &[(f64, C64)]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(match kind {
        SampleKind::Eta => "eta.csv",
        SampleKind::Xi => "xi.csv",
    });
    let mut buf = Vec::new();
    write_samples(kind, rows, &mut buf)?;
    fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Semi-spectral CDF of trial 0's contraction (dilation degree = first
/// degree) and the truncation tables of trial 0's data, written as
/// `cdf.json`, `diagnostics.csv`, `gap_linear.csv`, `gap_mult.csv`.
pub fn diagnose(cfg: &CampaignConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let seed = cfg.trial_seed(0);
    let (dim, degree) = cfg.trial_shape(0);
    let mut rng = trial_rng(seed, 0);
    let t = contraction(&mut rng, dim);
    let cdf: SemiSpectralCDF = semispectral_cdf(&t, degree)?;
    let (n0, v, a) = sample_truncation(&mut rng, dim)?;
    let q = trigonometric_polynomial(&mut rng, degree);
    let tables = truncation_tables(&n0, &v, &a, degree, &q, Some(seed), cfg.exec)?;

    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let cdf_path = dir.join("cdf.json");
    let json = serde_json::to_string_pretty(&cdf).map_err(|e| Error::Serialization(e.to_string()))?;
    fs::write(&cdf_path, json).map_err(|e| Error::io(&cdf_path, e))?;
    written.push(cdf_path);
    let mut table = |name: &str, f: &dyn Fn(&mut Vec<u8>) -> Result<()>| -> Result<()> {
        let path = dir.join(name);
        let mut buf = Vec::new();
        f(&mut buf)?;
        fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    table("diagnostics.csv", &|b| crate::truncate::write_csv(&tables.diagnostics, b))?;
    table("gap_linear.csv", &|b| crate::truncate::write_csv(&tables.gap_linear, b))?;
    table("gap_mult.csv", &|b| crate::truncate::write_csv(&tables.gap_mult, b))?;
    Ok(written)
}

/// Per-check counts read back from a summary CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryLine {
    pub kind: String,
    pub rows: usize,
    pub failed: usize,
    pub max_residual: f64,
}

/// Aggregates a campaign summary CSV by kind, in order of first appearance.
pub fn summarize_csv(input: impl std::io::Read) -> Result<Vec<SummaryLine>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out: Vec<SummaryLine> = Vec::new();
    for row in r.deserialize::<crate::report::CsvRow>() {
        let row = row.map_err(|e| Error::Serialization(e.to_string()))?;
        let idx = match out.iter().position(|s| s.kind == row.kind) {
            Some(i) => i,
            None => {
                out.push(SummaryLine { kind: row.kind.clone(), ..SummaryLine::default() });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.rows += 1;
        if row.verdict != "pass" {
            s.failed += 1;
        }
        // NaN residuals (errored trials) count as infinite.
        let res = if row.residual.is_nan() { f64::INFINITY } else { row.residual };
        s.max_residual = s.max_residual.max(res);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: CampaignKind, trials: usize) -> CampaignConfig {
        CampaignConfig { kind, trials, dims: vec![2, 3], degrees: vec![3, 4], grid: 512, ..CampaignConfig::default() }
    }

    #[test]
    fn config_parsing_and_validation() {
        let c = CampaignConfig::from_json(r#"{"seed": 9, "kind": "cayley_sa", "trials": 3, "dims": [2]}"#).unwrap();
        assert_eq!((c.seed, c.kind, c.trials, c.dims.clone()), (9, CampaignKind::CayleySa, 3, vec![2]));
        assert_eq!(c.tolerances, Tolerances::default());
        c.validate().unwrap();
        assert!(matches!(CampaignConfig::from_json(r#"{"trails": 3}"#), Err(Error::Config(_))));
        assert!(matches!(CampaignConfig::from_json(r#"{"kind": "quadratic"}"#), Err(Error::Config(_))));
        let zero = CampaignConfig { trials: 0, ..CampaignConfig::default() };
        assert!(matches!(run_campaign(&zero), Err(Error::Config(_))));
        let neg = CampaignConfig {
            tolerances: Tolerances { route_agreement: -1.0, ..Tolerances::default() },
            ..CampaignConfig::default()
        };
        assert!(matches!(neg.validate(), Err(Error::Config(_))));
        assert_eq!("truncate".parse::<CampaignKind>().unwrap(), CampaignKind::Truncate);
        assert!("nope".parse::<CampaignKind>().is_err());
    }

    #[test]
    fn trial_shapes_cycle() {
        let c = cfg(CampaignKind::Linear, 8);
        let shapes: Vec<_> = (0..4).map(|i| c.trial_shape(i)).collect();
        assert_eq!(shapes, vec![(2, 3), (3, 3), (2, 4), (3, 4)]);
    }

    #[test]
    fn every_kind_passes_a_small_campaign() {
        for kind in [
            CampaignKind::Linear,
            CampaignKind::Mult,
            CampaignKind::CayleySa,
            CampaignKind::CayleyDiss,
            CampaignKind::Dilation,
            CampaignKind::Truncate,
        ] {
            let out = run_campaign(&cfg(kind, 4)).unwrap();
            for r in &out.reports {
                assert!(r.passed, "{kind:?}: {r:?}");
                assert_eq!(r.kind, kind.as_str());
            }
        }
    }

    #[test]
    fn csv_is_deterministic_across_exec_modes() {
        let mut c = cfg(CampaignKind::Linear, 4);
        let a = run_campaign(&c).unwrap().csv_string().unwrap();
        c.exec = Exec::Sequential;
        let b = run_campaign(&c).unwrap().csv_string().unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("seed,dim,kind,degree,lhs_re,lhs_im,rhs_re,rhs_im,residual,verdict\n"));
        assert_eq!(a.lines().count(), 5);
    }

    #[test]
    fn flat_linear_path_gives_zero_everything() {
        let mut rng = trial_rng(1, 0);
        let t0 = contraction(&mut rng, 3);
        let path = PathSpec::linear(t0, ComplexMatrix::zeros(3)).unwrap();
        let p = analytic_polynomial_of_degree(&mut rng, 5);
        let r = linear_trial(&path, &p, 1, &Tolerances::default()).unwrap();
        assert!(r.passed && r.lhs.norm() == 0.0 && r.rhs.norm() == 0.0 && r.residual == 0.0);
        let rows = eta_samples(&ShiftFunction::new(path), 6, 300).unwrap();
        assert!(rows.iter().all(|(_, z)| z.norm() == 0.0));
    }

    #[test]
    fn eta_samples_cover_endpoints() {
        let mut rng = trial_rng(4, 0);
        let (path, _) = sample_linear(&mut rng, 3, 4).unwrap();
        let rows = eta_samples(&ShiftFunction::new(path), 6, 4096).unwrap();
        assert_eq!(rows.len(), 4096);
        assert_eq!((rows[0].0, rows[4095].0), (0.0, TAU));
        assert!(rows[0].1.norm() == 0.0 && rows[4095].1.norm() < 1e-12);
        let mut buf = Vec::new();
        write_samples(SampleKind::Eta, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,re_eta,im_eta\n"));
        assert_eq!(text.lines().count(), 4097);
    }

    #[test]
    fn summary_roundtrip() {
        let out = run_campaign(&cfg(CampaignKind::Dilation, 3)).unwrap();
        let s = summarize_csv(out.csv_string().unwrap().as_bytes()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].kind.as_str(), s[0].rows, s[0].failed), ("dilation", 3, 0));
    }
}
