//! Dense complex-matrix substrate: Schatten norms, defect operators, the
//! Hermitian exponential and the trigonometric functional calculus for
//! contractions.

mod fourier;
mod matrix;

pub use fourier::FourierFunction;
pub use matrix::{ComplexMatrix, HermitianEigen, NormalEigen, Svd};

use crate::error::{Error, Result};
use crate::C64;

/// Eigenvalues of `I − T*T` in `[−PSD_CLAMP, 0]` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-10;

/// Tolerance for the Hermitian-input checks.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.inner().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace norm: the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(m.singular_values()?.iter().sum())
}

/// `σ_max(T) ≤ 1 + tol`. A failed SVD counts as "not a contraction".
pub fn is_contraction(t: &ComplexMatrix, tol: f64) -> bool {
    t.op_norm().map(|n| n <= 1.0 + tol).unwrap_or(false)
}

/// The defect operators `D_T = (I − T*T)^{1/2}` and `D_{T*} = (I − TT*)^{1/2}`.
#[derive(Clone, Debug)]
pub struct DefectPair {
    pub d_t: ComplexMatrix,
    pub d_tstar: ComplexMatrix,
}

impl DefectPair {
    /// Max residual over `D_T² = I − T*T`, `D_{T*}² = I − TT*` and `T D_T = D_{T*} T`.
    pub fn residual(&self, t: &ComplexMatrix) -> f64 {
        let id = ComplexMatrix::identity(t.dim());
        let r1 = (&self.d_t * &self.d_t) - (&id - &(&t.adjoint() * t));
        let r2 = (&self.d_tstar * &self.d_tstar) - (&id - &(t * &t.adjoint()));
        let r3 = (t * &self.d_t) - (&self.d_tstar * t);
        r1.max_abs().max(r2.max_abs()).max(r3.max_abs())
    }
}

fn conjugate_diag(w: &ComplexMatrix, diag: &[f64]) -> ComplexMatrix {
    let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
    &(w * &ComplexMatrix::from_diagonal(&d)) * &w.adjoint()
}

/// Both defects come from one SVD `T = W Σ V*`, so `D_T = V (I − Σ²)^{1/2} V*`
/// and `D_{T*} = W (I − Σ²)^{1/2} W*` share the singular values of `T` and the
/// dilation identities hold to rounding even when `‖T‖ = 1`.
pub fn defects(t: &ComplexMatrix) -> Result<DefectPair> {
    let svd = t.svd()?;
    let mut roots = Vec::with_capacity(svd.singular_values.len());
    for &s in &svd.singular_values {
        let gap = (1.0 - s) * (1.0 + s);
        if gap < -PSD_CLAMP {
            return Err(Error::NotAContraction(format!("I - T*T has eigenvalue {gap:e}")));
        }
        roots.push(gap.max(0.0).sqrt());
    }
    Ok(DefectPair { d_t: conjugate_diag(&svd.v, &roots), d_tstar: conjugate_diag(&svd.u, &roots) })
}

/// `φ(T) = Σ_{k≥0} φ̂(k) T^k + Σ_{k≥1} φ̂(−k) (T*)^k`, each half by Horner.
pub fn apply_function(f: &FourierFunction, t: &ComplexMatrix) -> ComplexMatrix {
    let d = t.dim();
    let mut out = ComplexMatrix::zeros(d);
    let max = f.max_index();
    if max >= 0 {
        let mut acc = ComplexMatrix::zeros(d);
        for k in (0..=max).rev() {
            acc = (&acc * t).shift(f.coeff(k));
        }
        out = out + acc;
    }
    let min = f.min_index();
    if min < 0 {
        let ts = t.adjoint();
        let mut acc = ComplexMatrix::zeros(d);
        for k in (1..=-min).rev() {
            acc = &(acc.shift(f.coeff(-k))) * &ts;
        }
        out = out + acc;
    }
    out
}

/// Cached eigendecomposition of a Hermitian `A` for evaluating `e^{isA}` at
/// many `s`.
#[derive(Clone, Debug)]
pub struct HermitianExp {
    eig: HermitianEigen,
}

impl HermitianExp {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let scale = 1.0 + a.max_abs();
        if !a.is_hermitian(HERMITIAN_TOL * scale) {
            return Err(Error::domain("exponent must be Hermitian"));
        }
        Ok(Self { eig: a.hermitian_eigen()? })
    }

    pub fn at(&self, s: f64) -> ComplexMatrix {
        self.eig.apply(|lam| C64::from_polar(1.0, s * lam))
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }
}

/// `e^{isA}` for Hermitian `A`.
pub fn hermitian_exp(a: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    Ok(HermitianExp::new(a)?.at(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hs_norm_examples() {
        assert_eq!(hs_norm(&ComplexMatrix::zeros(5)), 0.0);
        assert!((hs_norm(&ComplexMatrix::identity(4)) - 2.0).abs() < 1e-15);
        let m = ComplexMatrix::from_real_rows(&[vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap();
        // Entrywise oracle: sqrt(9 + 16).
        let oracle = m.inner().iter().map(|z| z.re * z.re + z.im * z.im).sum::<f64>().sqrt();
        assert!((hs_norm(&m) - oracle).abs() < 1e-15);
        assert!((hs_norm(&m) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&ComplexMatrix::identity(3)).unwrap() - 3.0).abs() < 1e-13);
        let u = [c(0.6, 0.0), c(0.0, 0.8)];
        let v = [c(1.0 / 2f64.sqrt(), 0.0), c(0.0, -1.0 / 2f64.sqrt())];
        let outer = ComplexMatrix::from_fn(2, |i, j| u[i] * v[j].conj());
        assert!((trace_norm(&outer).unwrap() - 1.0).abs() < 1e-13);
        let d = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)]);
        assert!((trace_norm(&d).unwrap() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn contraction_examples() {
        let u = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]])
            .unwrap();
        assert!(is_contraction(&u, 1e-12));
        assert!(!is_contraction(&ComplexMatrix::identity(3).scale_real(2.0), 1e-12));
        let t = ComplexMatrix::from_real_rows(&[vec![0.6, 0.8], vec![0.0, 0.0]]).unwrap();
        assert!(is_contraction(&t, 1e-12));
        let sv = t.singular_values().unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-14 && sv[1].abs() < 1e-14);
    }

    #[test]
    fn defect_examples() {
        let d = defects(&ComplexMatrix::zeros(3)).unwrap();
        assert!(d.d_t.approx_eq(&ComplexMatrix::identity(3), 1e-14));
        assert!(d.d_tstar.approx_eq(&ComplexMatrix::identity(3), 1e-14));

        let u = hermitian_exp(&ComplexMatrix::from_real_rows(&[vec![0.3, 1.0], vec![1.0, -0.7]]).unwrap(), 1.0)
            .unwrap();
        let d = defects(&u).unwrap();
        assert!(d.d_t.max_abs() < 1e-7 && d.d_tstar.max_abs() < 1e-7);

        let d = defects(&ComplexMatrix::scalar(c(0.5, 0.0))).unwrap();
        assert!((d.d_t.get(0, 0) - c(3f64.sqrt() / 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn defects_reject_expanding_operator() {
        let t = ComplexMatrix::identity(2).scale_real(1.01);
        assert!(matches!(defects(&t), Err(Error::NotAContraction(_))));
    }

    #[test]
    fn apply_function_examples() {
        let t = ComplexMatrix::from_rows(&[vec![c(0.1, 0.3), c(0.2, 0.0)], vec![c(0.0, -0.1), c(0.4, 0.1)]])
            .unwrap();
        let one = FourierFunction::constant(c(1.0, 0.0));
        assert!(apply_function(&one, &t).approx_eq(&ComplexMatrix::identity(2), 1e-15));

        let cosine = FourierFunction::from_coeffs([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]);
        assert!(apply_function(&cosine, &t).approx_eq(&(&t + &t.adjoint()), 1e-15));

        let cube = FourierFunction::monomial(3);
        let r = apply_function(&cube, &ComplexMatrix::scalar(c(0.0, 0.5)));
        assert!((r.get(0, 0) - c(0.0, -0.125)).norm() < 1e-15);
    }

    #[test]
    fn apply_function_matches_explicit_sum() {
        let t = ComplexMatrix::from_rows(&[vec![c(0.1, 0.3), c(0.2, 0.0)], vec![c(0.0, -0.1), c(0.4, 0.1)]])
            .unwrap();
        let f = FourierFunction::from_coeffs([(0, c(0.5, 0.0)), (2, c(0.0, 1.0)), (-3, c(2.0, -1.0))]);
        let explicit = t.pow(0).scale(c(0.5, 0.0)) + t.pow(2).scale(c(0.0, 1.0))
            + t.adjoint().pow(3).scale(c(2.0, -1.0));
        assert!(apply_function(&f, &t).approx_eq(&explicit, 1e-14));
    }

    #[test]
    fn hermitian_exp_examples() {
        let z = ComplexMatrix::zeros(3);
        for s in [0.0, 0.3, 1.0] {
            assert!(hermitian_exp(&z, s).unwrap().approx_eq(&ComplexMatrix::identity(3), 1e-15));
        }
        let e = hermitian_exp(&ComplexMatrix::scalar(c(PI, 0.0)), 1.0).unwrap();
        assert!((e.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-15);

        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = hermitian_exp(&x, PI / 2.0).unwrap();
        // cos(π/2) I + i sin(π/2) X
        let closed = ComplexMatrix::identity(2).scale_real((PI / 2.0).cos()) + x.scale(c(0.0, 1.0));
        assert!(e.approx_eq(&closed, 1e-15));
        assert!(e.unitarity_residual() < 1e-10);
    }

    #[test]
    fn hermitian_exp_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_exp(&m, 1.0), Err(Error::Domain(_))));
    }
}
