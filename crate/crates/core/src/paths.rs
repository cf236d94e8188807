//! Perturbation paths `s ↦ T_s` on `[0, 1]` and their Gâteaux derivatives at
//! `s = 0`, with a difference-quotient residual as an independent check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opcore::{apply_function, hs_norm, is_contraction, trace_norm, HermitianExp};
use crate::{ComplexMatrix, FourierFunction, C64};

/// Tolerance for the endpoint contraction checks.
pub const ENDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// `T_s = T₀ + sV`.
    Linear,
    /// `T_s = e^{isA} T₀` with `A` Hermitian.
    Multiplicative,
}

#[derive(Clone, Debug)]
pub struct PathSpec {
    kind: PathKind,
    base: ComplexMatrix,
    direction: ComplexMatrix,
    exp: Option<HermitianExp>,
}

impl PathSpec {
    /// Linear path from `base` in direction `direction`; both endpoints must
    /// be contractions.
    pub fn linear(base: ComplexMatrix, direction: ComplexMatrix) -> Result<Self> {
        base.check_same_dim(&direction)?;
        if !is_contraction(&base, ENDPOINT_TOL) {
            return Err(Error::NotAContraction("linear path base".into()));
        }
        if !is_contraction(&(&base + &direction), ENDPOINT_TOL) {
            return Err(Error::NotAContraction("linear path endpoint base + direction".into()));
        }
        Ok(Self { kind: PathKind::Linear, base, direction, exp: None })
    }

    /// The linear path from `t0` to `t`.
    pub fn between(t0: &ComplexMatrix, t: &ComplexMatrix) -> Result<Self> {
        t0.check_same_dim(t)?;
        Self::linear(t0.clone(), t - t0)
    }

    pub fn multiplicative(base: ComplexMatrix, a: ComplexMatrix) -> Result<Self> {
        base.check_same_dim(&a)?;
        if !is_contraction(&base, ENDPOINT_TOL) {
            return Err(Error::NotAContraction("multiplicative path base".into()));
        }
        let exp = HermitianExp::new(&a)?;
        Ok(Self { kind: PathKind::Multiplicative, base, direction: a, exp: Some(exp) })
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn base(&self) -> &ComplexMatrix {
        &self.base
    }

    /// `V` for linear paths, `A` for multiplicative ones.
    pub fn direction(&self) -> &ComplexMatrix {
        &self.direction
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `T₁`.
    pub fn endpoint(&self) -> ComplexMatrix {
        self.eval_unchecked(1.0)
    }

    pub fn eval(&self, s: f64) -> Result<ComplexMatrix> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::domain(format!("path parameter {s} outside [0, 1]")));
        }
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> ComplexMatrix {
        match self.kind {
            PathKind::Linear => &self.base + &self.direction.scale_real(s),
            PathKind::Multiplicative => {
                let exp = self.exp.as_ref().expect("multiplicative path caches its exponent");
                &exp.at(s) * &self.base
            }
        }
    }

    pub fn gateaux_monomial(&self, r: i64) -> Result<ComplexMatrix> {
        match self.kind {
            PathKind::Linear if r < 0 => Err(Error::Unsupported(format!(
                "linear-path derivative of z^{r}: only non-negative powers are defined"
            ))),
            PathKind::Linear => Ok(linear_gateaux_monomial(&self.base, &self.direction, r as u32)),
            PathKind::Multiplicative => Ok(multiplicative_gateaux_monomial(&self.base, &self.direction, r)),
        }
    }

    /// `d/ds f(T_s)` at `s = 0`.
    pub fn gateaux(&self, f: &FourierFunction) -> Result<ComplexMatrix> {
        match self.kind {
            PathKind::Linear => {
                if !f.is_analytic() {
                    return Err(Error::Unsupported(
                        "linear-path derivative needs an analytic function".into(),
                    ));
                }
                Ok(linear_gateaux(&self.base, &self.direction, f))
            }
            PathKind::Multiplicative => Ok(multiplicative_gateaux(&self.base, &self.direction, f)),
        }
    }

    /// `Tr{f(T₁) − f(T₀) − d/ds f(T_s)|₀}`.
    pub fn second_order_remainder(&self, f: &FourierFunction) -> Result<C64> {
        let d = self.gateaux(f)?;
        let x = apply_function(f, &self.endpoint()) - apply_function(f, &self.base) - d;
        Ok(x.trace())
    }

    /// `‖(f(T_t) − f(T₀))/t − d/ds f(T_s)|₀‖₁`.
    pub fn difference_quotient_residual(&self, f: &FourierFunction, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("difference step {t} outside (0, 1]")));
        }
        let d = self.gateaux(f)?;
        let q = (apply_function(f, &self.eval_unchecked(t)) - apply_function(f, &self.base)).scale_real(1.0 / t);
        trace_norm(&(q - d))
    }

    /// Constant `C` in `residual(t) ≤ C·t` for linear paths:
    /// `‖V‖₂² Σ_r |f̂(r)| r(r−1)/2`.
    pub fn difference_quotient_bound(&self, f: &FourierFunction) -> Result<f64> {
        if self.kind != PathKind::Linear {
            return Err(Error::Unsupported("bound is stated for linear paths".into()));
        }
        let v2 = hs_norm(&self.direction).powi(2);
        Ok(v2 * f.iter().map(|(r, c)| c.norm() * (r * (r - 1)) as f64 / 2.0).sum::<f64>())
    }
}

/// `Σ_{j=0}^{r−1} T₀^{r−j−1} V T₀^j`.
pub fn linear_gateaux_monomial(base: &ComplexMatrix, v: &ComplexMatrix, r: u32) -> ComplexMatrix {
    let p = base.powers(r as usize);
    sandwich_sum(&p, v, r as usize)
}

fn sandwich_sum(p: &[ComplexMatrix], v: &ComplexMatrix, r: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(v.dim());
    for j in 0..r {
        acc = acc + &(&p[r - j - 1] * v) * &p[j];
    }
    acc
}

pub fn linear_gateaux(base: &ComplexMatrix, v: &ComplexMatrix, f: &FourierFunction) -> ComplexMatrix {
    let p = base.powers(f.max_index() as usize);
    let mut acc = ComplexMatrix::zeros(base.dim());
    for (k, c) in f.iter() {
        if k >= 1 {
            acc = acc + sandwich_sum(&p, v, k as usize).scale(c);
        }
    }
    acc
}

fn mult_monomial_from_powers(
    p: &[ComplexMatrix],
    ps: &[ComplexMatrix],
    ia: &ComplexMatrix,
    r: i64,
) -> ComplexMatrix {
    let d = ia.dim();
    let mut acc = ComplexMatrix::zeros(d);
    if r >= 1 {
        let r = r as usize;
        for j in 0..r {
            acc = acc + &(&p[r - j - 1] * ia) * &p[j + 1];
        }
    } else if r <= -1 {
        let n = r.unsigned_abs() as usize;
        for j in 0..n {
            acc = acc - &(&ps[n - j] * ia) * &ps[j];
        }
    }
    acc
}

/// Derivative of `p(e^{isA}T₀)` at `s = 0` for `p = z^r`, `r ∈ ℤ`
/// (negative powers through the adjoint).
pub fn multiplicative_gateaux_monomial(base: &ComplexMatrix, a: &ComplexMatrix, r: i64) -> ComplexMatrix {
    let n = r.unsigned_abs() as usize;
    let p = base.powers(n + 1);
    let ps = base.adjoint().powers(n + 1);
    mult_monomial_from_powers(&p, &ps, &a.scale(C64::new(0.0, 1.0)), r)
}

pub fn multiplicative_gateaux(base: &ComplexMatrix, a: &ComplexMatrix, f: &FourierFunction) -> ComplexMatrix {
    let n = f.degree() as usize;
    let p = base.powers(n + 1);
    let ps = base.adjoint().powers(n + 1);
    let ia = a.scale(C64::new(0.0, 1.0));
    let mut acc = ComplexMatrix::zeros(base.dim());
    for (k, c) in f.iter() {
        if k != 0 {
            acc = acc + mult_monomial_from_powers(&p, &ps, &ia, k).scale(c);
        }
    }
    acc
}
