//! Second-order shift functions along linear and multiplicative paths.
//!
//! Two independent representations are kept:
//!
//! * **moments**: `c_m = ∮ z^m η(z) dz` (linear paths, `m ≥ 0`) and
//!   `d_r = ∫₀^{2π} e^{irt} η̃(t) dt` (multiplicative paths, `r ≠ 0`), from
//!   `s`-integrals of traces of powers. These determine the class of the shift
//!   function and are what the trace formulas consume.
//! * **pointwise**: `η(t) = ∫₀¹ Tr[V(𝓔₀(t) − 𝓔_s(t))] ds` with `𝓔_s` the
//!   compressed spectral measure of an N-dilation of `T_s`, an exact step
//!   function for a fixed Gauss–Legendre rule in `s`.

mod gamma;
mod step;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::{Arc, RwLock};
use std::time::Instant;

pub use gamma::{angle_of, gamma_pipeline, lambda_of, mobius, polynomial_weight, resolvent_weight, GammaPipeline, MIN_GRID};
pub use step::StepFunction;

use crate::error::{Error, Result};
use crate::opcore::hs_norm;
use crate::par::{try_map_range, Exec};
use crate::paths::{PathKind, PathSpec};
use crate::quadrature::{gauss_legendre, integrate, nodes_for_degree, Adaptive};
use crate::report::VerificationReport;
use crate::sample::{analytic_polynomial, trial_rng};
use crate::semispectral::semispectral_cdf;
use crate::{FourierFunction, C64};

/// Default residual tolerance for the trace formulas.
pub const TRACE_TOL: f64 = 1e-8;
/// Default number of Gauss–Legendre nodes in `s` for pointwise evaluation.
pub const DEFAULT_S_NODES: usize = 32;

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Gauss–Legendre nodes in `s` for the pointwise representation.
    pub s_nodes: usize,
    /// Adaptive settings for multiplicative moments.
    pub adaptive: Adaptive,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { s_nodes: DEFAULT_S_NODES, adaptive: Adaptive::default() }
    }
}

/// The shift function of a path, with lazily filled caches.
///
/// Caches are append-only and guarded by locks, so a `ShiftFunction` can be
/// shared between threads.
#[derive(Debug)]
pub struct ShiftFunction {
    path: PathSpec,
    quad: QuadConfig,
    exec: Exec,
    moments: RwLock<BTreeMap<i64, C64>>,
    pointwise: RwLock<BTreeMap<u32, Arc<StepFunction>>>,
}

impl ShiftFunction {
    pub fn new(path: PathSpec) -> Self {
        Self::with_config(path, QuadConfig::default(), Exec::default())
    }

    pub fn with_config(path: PathSpec, quad: QuadConfig, exec: Exec) -> Self {
        Self { path, quad, exec, moments: RwLock::default(), pointwise: RwLock::default() }
    }

    pub fn path(&self) -> &PathSpec {
        &self.path
    }

    pub fn quad(&self) -> QuadConfig {
        self.quad
    }

    /// `c_k` for linear paths (`k ≥ 0`), `d_k` for multiplicative ones
    /// (`d_0 = 0` by convention).
    pub fn moment(&self, k: i64) -> Result<C64> {
        if let Some(&v) = self.moments.read().expect("moment cache poisoned").get(&k) {
            return Ok(v);
        }
        let v = match self.path.kind() {
            PathKind::Linear => {
                if k < 0 {
                    return Err(Error::Unsupported("linear-path moments are indexed by m >= 0".into()));
                }
                linear_moment(&self.path, k as u32)
            }
            PathKind::Multiplicative => mult_moment(&self.path, k, self.quad.adaptive)?,
        };
        self.moments.write().expect("moment cache poisoned").insert(k, v);
        Ok(v)
    }

    /// Pointwise representation with dilation degree `n`.
    pub fn step_function(&self, n: u32) -> Result<Arc<StepFunction>> {
        if let Some(f) = self.pointwise.read().expect("pointwise cache poisoned").get(&n) {
            return Ok(Arc::clone(f));
        }
        let f = Arc::new(pointwise_step(&self.path, n, self.quad.s_nodes, self.exec)?);
        let mut cache = self.pointwise.write().expect("pointwise cache poisoned");
        Ok(Arc::clone(cache.entry(n).or_insert(f)))
    }

    pub fn eval(&self, t: f64, n: u32) -> Result<C64> {
        if !(0.0..=TAU).contains(&t) {
            return Err(Error::domain(format!("angle {t} outside [0, 2pi]")));
        }
        Ok(self.step_function(n)?.eval(t))
    }

    /// The moment recomputed from the pointwise representation:
    /// `i·∫e^{i(m+1)t}η` (linear) or `∫e^{irt}η̃` (multiplicative).
    pub fn pointwise_moment(&self, k: i64, n: u32) -> Result<C64> {
        let f = self.step_function(n)?;
        Ok(match self.path.kind() {
            PathKind::Linear => C64::new(0.0, 1.0) * f.fourier(k + 1),
            PathKind::Multiplicative => f.fourier(k),
        })
    }

    /// `Σ_r p̂(r) r(r−1) c_{r−2}` (linear) or `Σ_{r≠0} p̂(r)(−r²) d_r`.
    pub fn pair_second_derivative(&self, p: &FourierFunction) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (r, c) in p.iter() {
            match self.path.kind() {
                PathKind::Linear if r >= 2 => acc += c * (r * (r - 1)) as f64 * self.moment(r - 2)?,
                PathKind::Multiplicative if r != 0 => acc += c * (-(r * r) as f64) * self.moment(r)?,
                _ => {}
            }
        }
        Ok(acc)
    }
}

/// `(1/(m+1)) ∫₀¹ Tr[V(T_s^{m+1} − T₀^{m+1})] ds`, exact Gauss–Legendre.
fn linear_moment(path: &PathSpec, m: u32) -> C64 {
    let v = path.direction();
    let p = m + 1;
    let base = (v * &path.base().pow(p)).trace();
    let (nodes, weights) = gauss_legendre(nodes_for_degree(p as usize));
    let integral: C64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&s, &w)| ((v * &path.eval_unchecked(s).pow(p)).trace() - base) * w)
        .sum();
    integral / (p as f64)
}

/// `(1/(ir)) ∫₀¹ Tr[A(T_s^{(r)} − T₀^{(r)})] ds`, adaptive Gauss–Kronrod.
fn mult_moment(path: &PathSpec, r: i64, opts: Adaptive) -> Result<C64> {
    if r == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let a = path.direction();
    let base = (a * &path.base().signed_pow(r)).trace();
    let integral = integrate(|s| (a * &path.eval_unchecked(s).signed_pow(r)).trace() - base, &[0.0, 1.0], opts)?;
    Ok(integral.value / C64::new(0.0, r as f64))
}

/// `η` (linear) or `η̃` (multiplicative) as a step function: jumps of
/// `Tr[X 𝓔₀]` minus the Gauss–Legendre average of the jumps of `Tr[X 𝓔_s]`.
fn pointwise_step(path: &PathSpec, n: u32, s_nodes: usize, exec: Exec) -> Result<StepFunction> {
    if s_nodes == 0 {
        return Err(Error::domain("need at least one s-node"));
    }
    let x = path.direction();
    let (nodes, weights) = gauss_legendre(s_nodes);
    let jumps_at = |t: &crate::ComplexMatrix, scale: f64| -> Result<Vec<(f64, C64)>> {
        let cdf = semispectral_cdf(t, n)?;
        Ok(cdf.jumps().iter().map(|j| (j.angle, (x * &j.block).trace() * scale)).collect())
    };
    let per_node = try_map_range(exec, s_nodes, |i| jumps_at(&path.eval_unchecked(nodes[i]), -weights[i]))?;
    let mut all = jumps_at(path.base(), 1.0)?;
    for j in per_node {
        all.extend(j);
    }
    Ok(StepFunction::from_jumps(all))
}

/// `c_m = ∮ z^m η(z) dz` for a linear path.
pub fn eta_moment_linear(path: &PathSpec, m: u32) -> Result<C64> {
    require(path, PathKind::Linear)?;
    Ok(linear_moment(path, m))
}

/// `η(t)` with dilation degree `n` and `s_nodes` Gauss–Legendre nodes.
pub fn eta_pointwise_linear(path: &PathSpec, t: f64, n: u32, s_nodes: usize) -> Result<C64> {
    require(path, PathKind::Linear)?;
    let quad = QuadConfig { s_nodes, ..QuadConfig::default() };
    ShiftFunction::with_config(path.clone(), quad, Exec::Sequential).eval(t, n)
}

/// `d_r = ∫₀^{2π} e^{irt} η̃(t) dt` for a multiplicative path, `r ≠ 0`.
pub fn eta_tilde_moment_mult(path: &PathSpec, r: i64, tol: f64) -> Result<C64> {
    require(path, PathKind::Multiplicative)?;
    if r == 0 {
        return Err(Error::domain("d_0 is not determined; the shift function is unique up to a constant"));
    }
    mult_moment(path, r, Adaptive { abs_tol: tol, ..Adaptive::default() })
}

/// `η̃(t)` for a multiplicative path with dilation degree `n`.
pub fn eta_tilde_pointwise_mult(path: &PathSpec, t: f64, n: u32, s_nodes: usize) -> Result<C64> {
    require(path, PathKind::Multiplicative)?;
    let quad = QuadConfig { s_nodes, ..QuadConfig::default() };
    ShiftFunction::with_config(path.clone(), quad, Exec::Sequential).eval(t, n)
}

fn require(path: &PathSpec, kind: PathKind) -> Result<()> {
    if path.kind() != kind {
        return Err(Error::Unsupported(format!("expected a {kind:?} path, got {:?}", path.kind())));
    }
    Ok(())
}

/// Compares `Tr{p(T) − p(T₀) − d/ds p(T_s)|₀}` against the moment pairing.
pub fn verify_trace_formula(shift: &ShiftFunction, p: &FourierFunction, tol: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    let path = shift.path();
    let (check, kind) = match path.kind() {
        PathKind::Linear => ("trace_formula_linear", "linear"),
        PathKind::Multiplicative => ("trace_formula_mult", "mult"),
    };
    let lhs = path.second_order_remainder(p)?;
    let degree = p.degree() as i64;
    let report = match shift.pair_second_derivative(p) {
        Ok(rhs) => VerificationReport::compare(check, lhs, rhs, tol),
        Err(e @ Error::Quadrature { .. }) => VerificationReport::failure(check, tol, e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(report.with_context(kind, 0, path.dim(), degree).timed(start))
}

pub fn verify_trace_formula_linear(path: &PathSpec, p: &FourierFunction, tol: f64) -> Result<VerificationReport> {
    require(path, PathKind::Linear)?;
    if !p.is_analytic() {
        return Err(Error::Unsupported("linear trace formula needs an analytic polynomial".into()));
    }
    verify_trace_formula(&ShiftFunction::new(path.clone()), p, tol)
}

pub fn verify_trace_formula_mult(path: &PathSpec, p: &FourierFunction, tol: f64) -> Result<VerificationReport> {
    require(path, PathKind::Multiplicative)?;
    verify_trace_formula(&ShiftFunction::new(path.clone()), p, tol)
}

/// Slack added to the quotient bound, relative to `‖direction‖₂²`.
pub const BOUND_SLACK: f64 = 1e-6;

/// `|∮ f η dz|` against `½ ‖f‖_∞ ‖V‖₂²` over random analytic polynomials.
///
/// The report's residual is the worst excess over the bound in units of
/// `‖V‖₂²`; `extra["max_ratio"]` is the largest observed ratio.
pub fn quotient_bound_test(path: &PathSpec, trials: usize, max_deg: u32, seed: u64) -> Result<VerificationReport> {
    require(path, PathKind::Linear)?;
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let start = Instant::now();
    let shift = ShiftFunction::new(path.clone());
    let moments: Vec<C64> = (0..=max_deg as i64).map(|m| shift.moment(m)).collect::<Result<_>>()?;
    let v2 = hs_norm(path.direction()).powi(2);
    let mut rng = trial_rng(seed, 0);
    let (mut max_ratio, mut max_excess) = (0.0f64, f64::NEG_INFINITY);
    let mut worst = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for _ in 0..trials {
        let f = analytic_polynomial(&mut rng, max_deg);
        let pairing: C64 = f.iter().map(|(m, c)| c * moments[m as usize]).sum();
        let bound = 0.5 * f.sup_norm_estimate() * v2;
        let ratio = if bound > 0.0 { pairing.norm() / bound } else { 0.0 };
        let excess = if v2 > 0.0 { (pairing.norm() - bound) / v2 } else { 0.0 };
        if ratio > max_ratio || (max_ratio == 0.0 && excess > max_excess) {
            worst = (C64::new(pairing.norm(), 0.0), C64::new(bound, 0.0));
        }
        max_ratio = max_ratio.max(ratio);
        max_excess = max_excess.max(excess);
    }
    let report = VerificationReport::from_residual("quotient_bound", worst.0, worst.1, max_excess.max(0.0), BOUND_SLACK)
        .with_context("bound", seed, path.dim(), max_deg as i64)
        .with_extra("max_ratio", max_ratio)
        .with_extra("trials", trials as f64);
    Ok(report.timed(start))
}
