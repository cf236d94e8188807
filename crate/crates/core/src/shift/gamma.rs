//! From the circle shift function `η` of a linear path to the real-line
//! shift function `ξ`:
//!
//! ```text
//! Γ(t)  = η(t) − e^{it} η̂(1),            η̂(1) = (1/2π) ∫ η(t) e^{−it} dt
//! η̃(t)  = −i e^{−it} Γ(t) + ∫₀^t e^{−is} Γ(s) ds
//! ξ(λ)  = ½ η̃(t),                          e^{it} = (i − λ)/(i + λ)
//! ```
//!
//! `η` is a step function, so every integral above has a closed form.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use super::{ShiftFunction, StepFunction};
use crate::error::{Error, Result};
use crate::paths::{PathKind, PathSpec};
use crate::quadrature::{integrate, Adaptive};
use crate::{FourierFunction, C64};

/// Smallest grid accepted by the pipeline.
pub const MIN_GRID: usize = 256;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct GammaPipeline {
    eta: Arc<StepFunction>,
    eta_hat1: C64,
    /// Running sums of `δ_j e^{−ia_j}`.
    prefix_rot: Vec<C64>,
    grid: usize,
    zero_integral: C64,
    grid_eta_hat1: C64,
}

/// `λ = tan(t/2)`.
pub fn lambda_of(t: f64) -> f64 {
    (0.5 * t).tan()
}

/// Inverse of [`lambda_of`] into `[0, 2π)`.
pub fn angle_of(lambda: f64) -> f64 {
    let t = 2.0 * lambda.atan();
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

/// `(i − λ)/(i + λ)`.
pub fn mobius(lambda: f64) -> C64 {
    (I - lambda) / (I + lambda)
}

pub fn gamma_pipeline(path: &PathSpec, grid: usize, degree: u32) -> Result<GammaPipeline> {
    GammaPipeline::new(&ShiftFunction::new(path.clone()), degree, grid)
}

impl GammaPipeline {
    pub fn new(shift: &ShiftFunction, degree: u32, grid: usize) -> Result<Self> {
        if shift.path().kind() != PathKind::Linear {
            return Err(Error::Unsupported("the pipeline starts from a linear-path shift function".into()));
        }
        if grid < MIN_GRID {
            return Err(Error::domain(format!("grid must have at least {MIN_GRID} points, got {grid}")));
        }
        let eta = shift.step_function(degree)?;
        let eta_hat1 = eta.fourier(-1) / TAU;

        let mut prefix_rot = Vec::with_capacity(eta.len());
        let mut acc = C64::new(0.0, 0.0);
        for (&a, &d) in eta.angles().iter().zip(eta.deltas()) {
            acc += d * C64::from_polar(1.0, -a);
            prefix_rot.push(acc);
        }

        // Contour coefficient again, by the midpoint rule on the grid: an
        // independent check of the closed form, accurate to O(variation/grid).
        let h = TAU / grid as f64;
        let grid_eta_hat1 = (0..grid)
            .map(|j| {
                let t = (j as f64 + 0.5) * h;
                eta.eval(t) * C64::from_polar(1.0, -t)
            })
            .sum::<C64>()
            * h
            / TAU;

        let mut p = Self { eta, eta_hat1, prefix_rot, grid, zero_integral: C64::new(0.0, 0.0), grid_eta_hat1 };
        p.zero_integral = p.running_integral(TAU);

        let scale = 1.0 + p.eta.variation();
        let grid_tol = p.grid_tolerance();
        if (p.eta_hat1 - p.grid_eta_hat1).norm() > 10.0 * grid_tol {
            return Err(Error::Pipeline(format!(
                "contour coefficient {} disagrees with grid value {} beyond 10x grid tolerance {grid_tol:e}",
                p.eta_hat1, p.grid_eta_hat1
            )));
        }
        if p.zero_integral.norm() > 1e-9 * scale {
            return Err(Error::Pipeline(format!("integral of e^(-is) Gamma over the circle is {}", p.zero_integral)));
        }
        Ok(p)
    }

    pub fn eta(&self) -> &StepFunction {
        &self.eta
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// `η̂(1) = (1/2πi) ∮ η(ω) ω^{−2} dω`.
    pub fn eta_hat1(&self) -> C64 {
        self.eta_hat1
    }

    /// The same coefficient by the midpoint rule on the grid.
    pub fn grid_eta_hat1(&self) -> C64 {
        self.grid_eta_hat1
    }

    /// Accuracy of grid quadrature of `η` against a unimodular weight.
    pub fn grid_tolerance(&self) -> f64 {
        self.eta.variation() / self.grid as f64
    }

    /// `∫₀^{2π} e^{−is} Γ(s) ds`, zero up to rounding.
    pub fn zero_integral(&self) -> C64 {
        self.zero_integral
    }

    pub fn gamma(&self, t: f64) -> C64 {
        self.eta.eval(t) - C64::from_polar(1.0, t) * self.eta_hat1
    }

    /// `∫₀^t e^{−is} Γ(s) ds`.
    pub fn running_integral(&self, t: f64) -> C64 {
        let k = self.eta.rank(t);
        let (rot, plain) = if k == 0 { (C64::new(0.0, 0.0), C64::new(0.0, 0.0)) } else {
            (self.prefix_rot[k - 1], self.eta.eval(t))
        };
        (rot - C64::from_polar(1.0, -t) * plain) / I - self.eta_hat1 * t
    }

    pub fn eta_tilde(&self, t: f64) -> C64 {
        -I * C64::from_polar(1.0, -t) * self.gamma(t) + self.running_integral(t)
    }

    pub fn xi(&self, lambda: f64) -> C64 {
        0.5 * self.eta_tilde(angle_of(lambda))
    }

    /// `∫₀^{2π} e^{ikt} η̃(t) dt` for `k ≠ 0`, in closed form.
    pub fn eta_tilde_fourier(&self, k: i64) -> Result<C64> {
        if k == 0 {
            return Err(Error::Unsupported("the constant mode of the real-line shift is not determined".into()));
        }
        let kf = k as f64;
        Ok(-I * (kf - 1.0) / kf * self.eta.fourier(k - 1))
    }

    /// `∫₀^{2π} (d²/dt²){φ(e^{it})} η̃(t) dt` through Fourier data.
    pub fn circle_pairing(&self, phi: &FourierFunction) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in phi.iter() {
            if k != 0 {
                acc += c * (-(k * k) as f64) * self.eta_tilde_fourier(k)?;
            }
        }
        Ok(acc)
    }

    /// `∫_ℝ w(λ) ξ(λ) dλ`, pulled back to `t ∈ (0, 2π)` with
    /// `dλ = (1 + λ²)/2 dt` and integrated adaptively between jumps of `η`.
    pub fn real_line_pairing(&self, w: impl Fn(f64) -> C64, opts: Adaptive) -> Result<C64> {
        let r = integrate(
            |t| {
                let l = lambda_of(t);
                w(l) * self.xi_at_angle(t) * (0.5 * (1.0 + l * l))
            },
            &self.breaks(),
            opts,
        )?;
        Ok(r.value)
    }

    fn xi_at_angle(&self, t: f64) -> C64 {
        0.5 * self.eta_tilde(t)
    }

    /// `∫ |ξ(λ)| (1 + λ²)^{−1} dλ`, finite for an admissible `ξ`.
    pub fn weighted_l1(&self) -> Result<f64> {
        // (1 + λ²)^{−1} dλ = dt/2
        let opts = Adaptive { abs_tol: 1e-8, ..Adaptive::default() };
        let v = integrate(|t| C64::new(0.5 * self.xi_at_angle(t).norm(), 0.0), &self.breaks(), opts)?;
        Ok(v.value.re)
    }

    fn breaks(&self) -> Vec<f64> {
        let mut breaks = vec![0.0, PI, TAU];
        breaks.extend(self.eta.angles().iter().copied().filter(|&a| a > 0.0 && a < TAU));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        breaks
    }
}

/// `(d/dλ){(1 + λ²) ψ'(λ)}` for `ψ(λ) = φ((i − λ)/(i + λ))`:
/// `4(φ'(m) + m φ''(m))/(λ + i)²`.
pub fn polynomial_weight(phi: &FourierFunction) -> impl Fn(f64) -> C64 {
    let d1 = phi.derivative();
    let d2 = d1.derivative();
    move |l| {
        let m = mobius(l);
        4.0 * (d1.eval_point(m) + m * d2.eval_point(m)) / ((l + I) * (l + I))
    }
}

/// `2(1 + λz)/(λ − z)³`, the weight for `ψ(λ) = (λ − z)^{−1}`.
pub fn resolvent_weight(z: C64) -> impl Fn(f64) -> C64 {
    move |l| {
        let d = C64::new(l, 0.0) - z;
        2.0 * (1.0 + l * z) / (d * d * d)
    }
}
