//! Seeded random operators and symbols for verification campaigns.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, trial)`, so
//! results do not depend on how trials are scheduled across threads.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{ComplexMatrix, FourierFunction, C64};

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let mut entries = Vec::with_capacity(d * d);
    for _ in 0..d * d {
        entries.push(complex_normal(rng));
    }
    ComplexMatrix::from_fn(d, |i, j| entries[i * d + j])
}

/// `G / (σ_max(G)(1 + margin))`.
pub fn contraction_with_margin(rng: &mut impl Rng, d: usize, margin: f64) -> ComplexMatrix {
    let g = ginibre(rng, d);
    let s = g.op_norm().expect("SVD of a Gaussian matrix");
    g.scale_real(1.0 / (s * (1.0 + margin)))
}

/// Random contraction with margin drawn from `{0, 0.1}`.
pub fn contraction(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let margin = if rng.random_bool(0.5) { 0.0 } else { 0.1 };
    contraction_with_margin(rng, d, margin)
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix.
pub fn unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d).into_inner();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let fixed = DMatrix::from_fn(d, d, |i, j| {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    });
    ComplexMatrix::from_inner(fixed)
}

/// A point uniform in the closed disk of the given radius.
pub fn disk_point(rng: &mut impl Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, TAU * rng.random::<f64>())
}

/// `W diag(z) W*` with `W` Haar unitary and `z_k` uniform in the disk.
pub fn normal_contraction(rng: &mut impl Rng, d: usize, radius: f64) -> ComplexMatrix {
    let w = unitary(rng, d);
    let diag: Vec<C64> = (0..d).map(|_| disk_point(rng, radius)).collect();
    &(&w * &ComplexMatrix::from_diagonal(&diag)) * &w.adjoint()
}

/// `(G + G*)/2` rescaled to operator norm `bound · u` with `u ∈ [1/4, 1)`.
pub fn hermitian(rng: &mut impl Rng, d: usize, bound: f64) -> ComplexMatrix {
    let g = ginibre(rng, d);
    let h = (&g + &g.adjoint()).scale_real(0.5);
    let n = h.op_norm().expect("SVD of a Hermitian matrix");
    let target = bound * rng.random_range(0.25..1.0);
    let h = h.scale_real(target / n.max(f64::MIN_POSITIVE));
    (&h + &h.adjoint()).scale_real(0.5)
}

/// Hermitian with operator norm below `π`.
pub fn hermitian_pi(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    hermitian(rng, d, PI)
}

/// `H + iP` with `H` Hermitian and `P` positive definite: strictly dissipative.
pub fn strictly_dissipative(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let h = hermitian(rng, d, 2.0);
    let b = ginibre(rng, d);
    let p = (&b * &b.adjoint()).scale_real(0.5 / d as f64).shift(C64::new(0.05, 0.0));
    let p = (&p + &p.adjoint()).scale_real(0.5);
    h + p.scale(C64::new(0.0, 1.0))
}

/// Analytic polynomial with Gaussian coefficients, degree uniform in
/// `0..=max_degree`.
pub fn analytic_polynomial(rng: &mut impl Rng, max_degree: u32) -> FourierFunction {
    let deg = rng.random_range(0..=max_degree) as i64;
    FourierFunction::from_coeffs((0..=deg).map(|k| (k, complex_normal(rng))))
}

/// Analytic polynomial of exactly the given degree.
pub fn analytic_polynomial_of_degree(rng: &mut impl Rng, degree: u32) -> FourierFunction {
    FourierFunction::from_coeffs((0..=degree as i64).map(|k| (k, complex_normal(rng))))
}

/// Two-sided trigonometric polynomial supported in `[−max_index, max_index]`.
pub fn trigonometric_polynomial(rng: &mut impl Rng, max_index: u32) -> FourierFunction {
    let m = max_index as i64;
    FourierFunction::from_coeffs((-m..=m).map(|k| (k, complex_normal(rng))))
}
