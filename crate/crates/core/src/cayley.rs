//! Cayley transforms: self-adjoint and dissipative pairs reduced to unitary
//! and contraction pairs, and the real-line trace formulas checked against
//! the circle.
//!
//! Orientation: with `H_s = sH₀ + (1−s)H`, the path
//! `W_s = (H+i)(H_s+i)^{−1}(H₀+i) − i` starts at `W₀ = H₀`, ends at `W₁ = H`,
//! and `(i − W_s)(i + W_s)^{−1} = (1−s)U₀ + sU` exactly.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::opcore::apply_function;
use crate::paths::PathSpec;
use crate::quadrature::Adaptive;
use crate::report::{relative_residual, VerificationReport};
use crate::shift::{polynomial_weight, resolvent_weight, GammaPipeline, ShiftFunction};
use crate::{ComplexMatrix, FourierFunction, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Hermitian inputs must satisfy `‖H − H*‖_max ≤ SA_TOL (1 + ‖H‖_max)`.
pub const SA_TOL: f64 = 1e-10;
/// Cayley images must be unitary to this tolerance.
pub const UNITARY_TOL: f64 = 1e-9;
/// Smallest eigenvalue of `(L − L*)/(2i)` accepted as nonnegative.
pub const DISSIPATIVE_TOL: f64 = 1e-10;
/// `I + T` closer than this to singular makes the inverse transform degenerate.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// `(i − L)(i + L)^{−1}`.
fn transform(l: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = l.dim();
    let plus = l.shift(I);
    let minus = (-l).shift(I);
    let inv = plus
        .try_inverse()
        .map_err(|_| Error::DegenerateTransform(format!("i + L is singular at dimension {n}")))?;
    Ok(&minus * &inv)
}

fn check_hermitian(h: &ComplexMatrix, what: &str) -> Result<()> {
    if !h.is_hermitian(SA_TOL * (1.0 + h.max_abs())) {
        return Err(Error::domain(format!("{what} is not Hermitian")));
    }
    Ok(())
}

/// `U = (i − H)(i + H)^{−1}` for Hermitian `H`.
pub fn cayley_sa(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(h, "H")?;
    let u = transform(h)?;
    let res = u.unitarity_residual();
    if !(res <= UNITARY_TOL) {
        return Err(Error::Consistency(format!("Cayley image is not unitary (residual {res:e})")));
    }
    Ok(u)
}

/// `L = i(I − T)(I + T)^{−1}`; undefined when `−1` is (nearly) an eigenvalue of `T`.
pub fn inverse_cayley(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let plus = t.shift(C64::new(1.0, 0.0));
    let smin = plus.singular_values()?.last().copied().unwrap_or(0.0);
    if smin <= DEGENERATE_TOL {
        return Err(Error::DegenerateTransform(format!("I + T has singular value {smin:e}")));
    }
    let minus = (-t).shift(C64::new(1.0, 0.0));
    Ok((&minus * &plus.try_inverse()?).scale(I))
}

/// Accuracy and grid settings shared by the Cayley checks.
#[derive(Debug, Clone, Copy)]
pub struct CayleyConfig {
    pub grid: usize,
    /// Dilation degree; `None` picks one from the function being paired.
    pub degree: Option<u32>,
    pub circle_tol: f64,
    pub real_line_tol: f64,
    pub resolvent_tol: f64,
    pub real_line: Adaptive,
}

impl Default for CayleyConfig {
    fn default() -> Self {
        Self {
            grid: 4096,
            degree: None,
            circle_tol: 1e-6,
            real_line_tol: 1e-4,
            resolvent_tol: 1e-5,
            real_line: Adaptive { abs_tol: 1e-9, max_depth: 12 },
        }
    }
}

#[derive(Debug, Clone)]
pub struct SelfAdjointPair {
    h: ComplexMatrix,
    h0: ComplexMatrix,
    u: ComplexMatrix,
    u0: ComplexMatrix,
}

impl SelfAdjointPair {
    pub fn new(h: ComplexMatrix, h0: ComplexMatrix) -> Result<Self> {
        h.check_same_dim(&h0)?;
        let (u, u0) = (cayley_sa(&h)?, cayley_sa(&h0)?);
        Ok(Self { h, h0, u, u0 })
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn h0(&self) -> &ComplexMatrix {
        &self.h0
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn u0(&self) -> &ComplexMatrix {
        &self.u0
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// The linear path `U₀ → U` on the circle side.
    pub fn circle_path(&self) -> Result<PathSpec> {
        PathSpec::between(&self.u0, &self.u)
    }
}

/// `W_s = (H+i)(H_s+i)^{−1}(H₀+i) − i` with `H_s = sH₀ + (1−s)H`.
pub fn w_path(pair: &SelfAdjointPair, s: f64) -> Result<ComplexMatrix> {
    interpolated_transform_path(&pair.h, &pair.h0, s)
}

fn interpolated_transform_path(l: &ComplexMatrix, l0: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain(format!("path parameter {s} outside [0, 1]")));
    }
    let ls = l0.scale_real(s) + l.scale_real(1.0 - s);
    let inv = ls.shift(I).try_inverse()?;
    Ok((&(&l.shift(I) * &inv) * &l0.shift(I)).shift(-I))
}

/// `(i − W)(i + W)^{−1}` without the Hermitian check, for path points.
pub fn cayley_of_path_point(w: &ComplexMatrix) -> Result<ComplexMatrix> {
    transform(w)
}

fn default_degree(phi: &FourierFunction) -> u32 {
    phi.max_index().max(1) as u32 + 2
}

/// Second-order remainder on the circle side plus both right-hand sides.
fn circle_identity(
    path: &PathSpec,
    phi: &FourierFunction,
    cfg: &CayleyConfig,
    check: &str,
    kind: &str,
) -> Result<VerificationReport> {
    if !phi.is_analytic() {
        return Err(Error::Unsupported("the real-line formula needs an analytic polynomial".into()));
    }
    let start = Instant::now();
    let lhs = path.second_order_remainder(phi)?;
    let degree = cfg.degree.unwrap_or_else(|| default_degree(phi));
    let shift = ShiftFunction::new(path.clone());
    let pipeline = GammaPipeline::new(&shift, degree, cfg.grid)?;
    let rhs_a = pipeline.circle_pairing(phi)?;
    let report = VerificationReport::compare(check, lhs, rhs_a, cfg.circle_tol)
        .with_context(kind, 0, path.dim(), phi.degree() as i64)
        .with_extra("dilation_degree", degree as f64)
        .with_extra("grid", cfg.grid as f64);
    let report = match pipeline.real_line_pairing(polynomial_weight(phi), cfg.real_line) {
        Ok(rhs_b) => report
            .with_extra("rhs_real_line_re", rhs_b.re)
            .with_extra("rhs_real_line_im", rhs_b.im)
            .and_check("real_line", relative_residual(rhs_a, rhs_b), cfg.real_line_tol),
        Err(e) => report.and_check("real_line", f64::INFINITY, cfg.real_line_tol).with_warnings([e.to_string()]),
    };
    Ok(report.timed(start))
}

/// `Tr{ψ(H) − ψ(H₀) − d/ds ψ(W_s)|₀}` against `∫ ((1+λ²)ψ')' ξ dλ` with
/// `ψ(λ) = φ((i−λ)/(i+λ))`, computed on the circle (`rhs`) and on the real
/// line (`extra["rhs_real_line_*"]`).
pub fn verify_selfadjoint_formula(
    pair: &SelfAdjointPair,
    phi: &FourierFunction,
    cfg: &CayleyConfig,
) -> Result<VerificationReport> {
    circle_identity(&pair.circle_path()?, phi, cfg, "selfadjoint_formula", "cayley_sa")
}

/// `|(i − z)/(i + z)|`: modulus of the resolvent pole seen from the disk
/// (infinite at `z = −i`, where the symbol is a polynomial).
pub fn pole_modulus(z: C64) -> f64 {
    (I - z).norm() / (I + z).norm()
}

/// Dilation degree that resolves the resolvent symbol to ~1e−13.
pub fn resolvent_degree(z: C64) -> u32 {
    let tau = pole_modulus(z);
    if !tau.is_finite() {
        return 4;
    }
    let n = (13.0 * std::f64::consts::LN_10 / tau.ln()).ceil();
    n.clamp(4.0, 60.0) as u32 + 2
}

/// `Tr{(H − z)^{−1} − (H₀ − z)^{−1} − R₀(H₀ + i)M(H₀ + i)R₀}` with
/// `R₀ = (H₀ − z)^{−1}` and `M = (H + i)^{−1} − (H₀ + i)^{−1}`.
pub fn resolvent_lhs(pair: &SelfAdjointPair, z: C64) -> Result<C64> {
    let r = pair.h.shift(-z).try_inverse()?;
    let r0 = pair.h0.shift(-z).try_inverse()?;
    let m = pair.h.shift(I).try_inverse()? - pair.h0.shift(I).try_inverse()?;
    let side = &r0 * &pair.h0.shift(I);
    let side_r = &pair.h0.shift(I) * &r0;
    Ok((r - &r0 - &(&side * &m) * &side_r).trace())
}

/// The resolvent identity at each `z` (all with `Im z < 0`), sharing one
/// pipeline sized for the hardest point.
pub fn verify_resolvent_formulas(
    pair: &SelfAdjointPair,
    zs: &[C64],
    cfg: &CayleyConfig,
) -> Result<Vec<VerificationReport>> {
    if let Some(z) = zs.iter().find(|z| !(z.im < 0.0)) {
        return Err(Error::domain(format!("resolvent point {z} must have negative imaginary part")));
    }
    let degree = cfg.degree.unwrap_or_else(|| zs.iter().map(|&z| resolvent_degree(z)).max().unwrap_or(4));
    let shift = ShiftFunction::new(pair.circle_path()?);
    let pipeline = GammaPipeline::new(&shift, degree, cfg.grid)?;
    zs.iter()
        .map(|&z| {
            let start = Instant::now();
            let lhs = resolvent_lhs(pair, z)?;
            let report = match pipeline.real_line_pairing(resolvent_weight(z), cfg.real_line) {
                Ok(rhs) => VerificationReport::compare("resolvent_formula", lhs, rhs, cfg.resolvent_tol),
                Err(e) => VerificationReport::failure("resolvent_formula", cfg.resolvent_tol, e.to_string()),
            };
            Ok(report
                .with_context("cayley_sa", 0, pair.dim(), 0)
                .with_extra("z_re", z.re)
                .with_extra("z_im", z.im)
                .with_extra("pole_modulus", pole_modulus(z))
                .with_extra("dilation_degree", degree as f64)
                .timed(start))
        })
        .collect()
}

pub fn verify_resolvent_formula(pair: &SelfAdjointPair, z: C64, cfg: &CayleyConfig) -> Result<VerificationReport> {
    Ok(verify_resolvent_formulas(pair, &[z], cfg)?.remove(0))
}

/// `(L − L*)/(2i)`.
pub fn imaginary_part(l: &ComplexMatrix) -> ComplexMatrix {
    (l - &l.adjoint()).scale(C64::new(0.0, -0.5))
}

pub fn is_dissipative(l: &ComplexMatrix) -> Result<bool> {
    let min = imaginary_part(l).hermitian_eigen()?.values.into_iter().fold(f64::INFINITY, f64::min);
    Ok(min >= -DISSIPATIVE_TOL * (1.0 + l.max_abs()))
}

/// Cayley transform of a dissipative operator: a contraction without the
/// eigenvalue `−1`.
pub fn cayley_dissipative(l: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !is_dissipative(l)? {
        return Err(Error::domain("operator is not dissipative"));
    }
    let t = transform(l)?;
    let smin = t.shift(C64::new(1.0, 0.0)).singular_values()?.last().copied().unwrap_or(0.0);
    if smin <= DEGENERATE_TOL {
        return Err(Error::DegenerateTransform(format!("Cayley image has -1 within {smin:e}")));
    }
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct DissipativePair {
    l: ComplexMatrix,
    l0: ComplexMatrix,
    t: ComplexMatrix,
    t0: ComplexMatrix,
}

impl DissipativePair {
    pub fn new(l: ComplexMatrix, l0: ComplexMatrix) -> Result<Self> {
        l.check_same_dim(&l0)?;
        let (t, t0) = (cayley_dissipative(&l)?, cayley_dissipative(&l0)?);
        Ok(Self { l, l0, t, t0 })
    }

    pub fn l(&self) -> &ComplexMatrix {
        &self.l
    }

    pub fn l0(&self) -> &ComplexMatrix {
        &self.l0
    }

    pub fn t(&self) -> &ComplexMatrix {
        &self.t
    }

    pub fn t0(&self) -> &ComplexMatrix {
        &self.t0
    }

    pub fn circle_path(&self) -> Result<PathSpec> {
        PathSpec::between(&self.t0, &self.t)
    }
}

/// `Q_s = (L+i)(L_s+i)^{−1}(L₀+i) − i` with `L_s = sL₀ + (1−s)L`.
pub fn q_path(pair: &DissipativePair, s: f64) -> Result<ComplexMatrix> {
    let q = interpolated_transform_path(&pair.l, &pair.l0, s)?;
    if !is_dissipative(&q)? {
        return Err(Error::Consistency(format!("Q_s is not dissipative at s = {s}")));
    }
    Ok(q)
}

/// The contraction-pair identity for the Cayley images of a dissipative pair.
pub fn verify_dissipative_formula(
    pair: &DissipativePair,
    phi: &FourierFunction,
    cfg: &CayleyConfig,
) -> Result<VerificationReport> {
    circle_identity(&pair.circle_path()?, phi, cfg, "dissipative_formula", "cayley_diss")
}

/// `ψ(H)` for `ψ(λ) = φ((i−λ)/(i+λ))`, through the eigendecomposition of `H`.
pub fn psi_of_hermitian(phi: &FourierFunction, h: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(h, "H")?;
    let eig = h.hermitian_eigen()?;
    Ok(eig.apply(|l| phi.eval_point((I - l) / (I + l))))
}

/// `‖ψ(H) − φ(U)‖_max`.
pub fn functional_calculus_residual(phi: &FourierFunction, h: &ComplexMatrix) -> Result<f64> {
    let u = cayley_sa(h)?;
    Ok((psi_of_hermitian(phi, h)? - apply_function(phi, &u)).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pair3() -> SelfAdjointPair {
        let h = ComplexMatrix::from_rows(&[
            vec![c(0.8, 0.0), c(0.3, 0.2), c(0.0, -0.4)],
            vec![c(0.3, -0.2), c(-0.5, 0.0), c(0.6, 0.1)],
            vec![c(0.0, 0.4), c(0.6, -0.1), c(1.5, 0.0)],
        ])
        .unwrap();
        let h0 = ComplexMatrix::from_rows(&[
            vec![c(0.2, 0.0), c(0.1, 0.0), c(0.0, 0.3)],
            vec![c(0.1, 0.0), c(-1.0, 0.0), c(0.2, 0.0)],
            vec![c(0.0, -0.3), c(0.2, 0.0), c(0.7, 0.0)],
        ])
        .unwrap();
        SelfAdjointPair::new(h, h0).unwrap()
    }

    #[test]
    fn cayley_examples() {
        assert!((cayley_sa(&ComplexMatrix::zeros(1)).unwrap().get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((cayley_sa(&ComplexMatrix::identity(1)).unwrap().get(0, 0) - c(0.0, 1.0)).norm() < 1e-15);
        let h = pair3().h().clone();
        let u = cayley_sa(&h).unwrap();
        let ev = h.hermitian_eigen().unwrap();
        let mapped = ev.apply(|l| (I - l) / (I + l));
        assert!(mapped.approx_eq(&u, 1e-12));
        assert!(cayley_sa(&ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()).is_err());
    }

    #[test]
    fn inverse_cayley_recovers_and_detects_degeneracy() {
        let h = pair3().h().clone();
        assert!(inverse_cayley(&cayley_sa(&h).unwrap()).unwrap().approx_eq(&h, 1e-12));
        // Eigenvalue 1 of U (H has eigenvalue 0) is harmless; −1 is not.
        assert!(inverse_cayley(&ComplexMatrix::identity(2)).unwrap().max_abs() < 1e-15);
        assert!(matches!(
            inverse_cayley(&ComplexMatrix::scalar(c(-1.0, 0.0))),
            Err(Error::DegenerateTransform(_))
        ));
    }

    #[test]
    fn w_path_orientation() {
        let p = pair3();
        assert!(w_path(&p, 0.0).unwrap().approx_eq(p.h0(), 1e-13));
        assert!(w_path(&p, 1.0).unwrap().approx_eq(p.h(), 1e-13));
        for s in [0.0, 0.25, 0.6, 1.0] {
            let us = p.u0().scale_real(1.0 - s) + p.u().scale_real(s);
            let got = cayley_of_path_point(&w_path(&p, s).unwrap()).unwrap();
            assert!(got.approx_eq(&us, 1e-12), "s = {s}");
        }
        // H = 1, H₀ = 0 at s = 1/2.
        let sp = SelfAdjointPair::new(ComplexMatrix::identity(1), ComplexMatrix::zeros(1)).unwrap();
        let w = w_path(&sp, 0.5).unwrap().get(0, 0);
        let expected = (c(1.0, 1.0) / c(0.5, 1.0)) * I - I;
        assert!((w - expected).norm() < 1e-15);

        let same = SelfAdjointPair::new(p.h().clone(), p.h().clone()).unwrap();
        assert!(w_path(&same, 0.4).unwrap().approx_eq(p.h(), 1e-13));
    }

    #[test]
    fn functional_calculus_matches_on_both_sides() {
        let phi = FourierFunction::polynomial(&[c(0.5, 0.0), c(0.0, 1.0), c(-1.0, 0.5), c(0.3, 0.0)]);
        assert!(functional_calculus_residual(&phi, pair3().h()).unwrap() < 1e-12);
    }

    #[test]
    fn selfadjoint_examples() {
        let p = pair3();
        let cfg = CayleyConfig::default();
        let same = SelfAdjointPair::new(p.h().clone(), p.h().clone()).unwrap();
        let r = verify_selfadjoint_formula(&same, &FourierFunction::monomial(2), &cfg).unwrap();
        assert!(r.lhs.norm() < 1e-15 && r.rhs.norm() < 1e-15 && r.passed);

        let r = verify_selfadjoint_formula(&p, &FourierFunction::monomial(1), &cfg).unwrap();
        assert!(r.lhs.norm() < 1e-14 && r.rhs.norm() < 1e-14);

        let r = verify_selfadjoint_formula(&p, &FourierFunction::monomial(2), &cfg).unwrap();
        assert!(r.passed, "{r:?}");
        let phi = FourierFunction::polynomial(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.5), c(-0.4, 0.0), c(0.0, 0.0), c(0.2, 0.1)]);
        let r = verify_selfadjoint_formula(&p, &phi, &cfg).unwrap();
        assert!(r.passed && r.residual < 1e-9, "{r:?}");
        assert!(r.extra["real_line_residual"] < 1e-8);
    }

    #[test]
    fn resolvent_derivative_term_is_the_path_derivative() {
        // −R₀ Ẇ₀ R₀ with Ẇ₀ = d/ds W_s at 0, by finite differences, has the same
        // trace as the subtracted term of the resolvent identity.
        let p = pair3();
        let z = c(0.3, -1.2);
        let h = 1e-6;
        let psi = |w: &ComplexMatrix| w.shift(-z).try_inverse().unwrap();
        let d = (psi(&w_path(&p, h).unwrap()) - psi(&w_path(&p, 0.0).unwrap())).scale_real(1.0 / h);
        let fd = (psi(p.h()) - psi(p.h0()) - d).trace();
        assert!((fd - resolvent_lhs(&p, z).unwrap()).norm() < 1e-5);
    }

    #[test]
    fn resolvent_examples() {
        let cfg = CayleyConfig::default();
        let same = SelfAdjointPair::new(pair3().h().clone(), pair3().h().clone()).unwrap();
        let r = verify_resolvent_formula(&same, c(0.0, -2.0), &cfg).unwrap();
        assert!(r.lhs.norm() < 1e-15 && r.rhs.norm() < 1e-15);

        // Scalar H = 1, H₀ = 0, z = −2i: closed form of the left side.
        let sp = SelfAdjointPair::new(ComplexMatrix::identity(1), ComplexMatrix::zeros(1)).unwrap();
        let z = c(0.0, -2.0);
        let m = 1.0 / c(1.0, 1.0) - 1.0 / I;
        let expected = 1.0 / (1.0 - z) + 1.0 / z - (I * I) * m / (z * z);
        let r = verify_resolvent_formula(&sp, z, &cfg).unwrap();
        assert!((r.lhs - expected).norm() < 1e-14);
        assert!(r.passed, "{r:?}");

        let zs = [c(0.0, -1.0), c(0.0, -2.0), c(0.0, -0.5), c(0.5, -1.0), c(-0.4, -1.2)];
        for r in verify_resolvent_formulas(&pair3(), &zs, &cfg).unwrap() {
            assert!(r.passed, "{r:?}");
            assert!(r.extra["pole_modulus"] > 1.0);
        }
        assert!(matches!(verify_resolvent_formula(&sp, c(0.0, 1.0), &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn dissipative_examples() {
        let t = cayley_dissipative(&ComplexMatrix::scalar(c(0.0, 1.0))).unwrap();
        assert!(t.get(0, 0).norm() < 1e-15);
        assert!(cayley_dissipative(&ComplexMatrix::scalar(c(0.0, -1.0))).is_err());

        let cfg = CayleyConfig::default();
        let l = ComplexMatrix::from_rows(&[vec![c(0.5, 0.8), c(0.2, 0.1)], vec![c(0.1, 0.3), c(-0.4, 0.6)]]).unwrap();
        assert!(is_dissipative(&l).unwrap());
        let l0 = ComplexMatrix::from_rows(&[vec![c(0.1, 0.5), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.3, 0.4)]]).unwrap();
        let same = DissipativePair::new(l.clone(), l.clone()).unwrap();
        let r = verify_dissipative_formula(&same, &FourierFunction::monomial(3), &cfg).unwrap();
        assert!(r.lhs.norm() < 1e-15 && r.rhs.norm() < 1e-15);

        let pair = DissipativePair::new(l, l0).unwrap();
        for s in [0.0, 0.5, 1.0] {
            let ts = pair.t0().scale_real(1.0 - s) + pair.t().scale_real(s);
            assert!(cayley_of_path_point(&q_path(&pair, s).unwrap()).unwrap().approx_eq(&ts, 1e-12));
        }
        let phi = FourierFunction::polynomial(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.5, -0.5)]);
        let r = verify_dissipative_formula(&pair, &phi, &cfg).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn hermitian_limit_matches_selfadjoint_pipeline() {
        let p = pair3();
        let cfg = CayleyConfig::default();
        let phi = FourierFunction::polynomial(&[c(0.0, 0.0), c(0.3, 0.0), c(1.0, 0.0), c(0.0, 0.4)]);
        let a = verify_selfadjoint_formula(&p, &phi, &cfg).unwrap();
        let d = DissipativePair::new(p.h().clone(), p.h0().clone()).unwrap();
        let b = verify_dissipative_formula(&d, &phi, &cfg).unwrap();
        assert!(relative_residual(a.lhs, b.lhs) < 1e-8 && relative_residual(a.rhs, b.rhs) < 1e-8);
    }
}
