use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::C64;

/// Grid size used to estimate sup-norms on the circle.
pub const SUP_GRID: usize = 2048;

/// A trigonometric polynomial `f(e^{it}) = Σ_k f̂(k) e^{ikt}` with finite
/// support. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourierFunction {
    coeffs: BTreeMap<i64, C64>,
}

impl FourierFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::from_coeffs([(0, c)])
    }

    pub fn monomial(k: i64) -> Self {
        Self::from_coeffs([(k, C64::new(1.0, 0.0))])
    }

    /// Builds from `(index, coefficient)` pairs; repeated indices accumulate.
    pub fn from_coeffs(pairs: impl IntoIterator<Item = (i64, C64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in pairs {
            *coeffs.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c: &mut C64| *c != C64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// Analytic polynomial from ascending coefficients `a_0, a_1, …`.
    pub fn polynomial(ascending: &[C64]) -> Self {
        Self::from_coeffs(ascending.iter().enumerate().map(|(k, &c)| (k as i64, c)))
    }

    pub fn coeff(&self, k: i64) -> C64 {
        self.coeffs.get(&k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Support in `ℤ≥0`: a member of the analytic class.
    pub fn is_analytic(&self) -> bool {
        self.min_index() >= 0
    }

    /// Largest index with a nonzero coefficient (0 for the zero function).
    pub fn max_index(&self) -> i64 {
        self.coeffs.keys().next_back().copied().unwrap_or(0).max(0)
    }

    /// Smallest index with a nonzero coefficient (0 for the zero function).
    pub fn min_index(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(0).min(0)
    }

    /// `max |k|` over the support.
    pub fn degree(&self) -> u32 {
        self.max_index().max(-self.min_index()) as u32
    }

    /// `Σ_k k² |f̂(k)|`.
    pub fn weight(&self) -> f64 {
        self.iter().map(|(k, c)| (k * k) as f64 * c.norm()).sum()
    }

    /// Value at `e^{it}`.
    pub fn eval_angle(&self, t: f64) -> C64 {
        self.iter().map(|(k, c)| c * C64::from_polar(1.0, k as f64 * t)).sum()
    }

    /// Value at a point `z` of the closed disk (analytic part as a
    /// polynomial in `z`, negative indices through `conj(z)`).
    pub fn eval_point(&self, z: C64) -> C64 {
        self.iter()
            .map(|(k, c)| if k >= 0 { c * z.powi(k as i32) } else { c * z.conj().powi((-k) as i32) })
            .sum()
    }

    /// Complex derivative `f'(z)` of an analytic polynomial, as a polynomial.
    pub fn derivative(&self) -> Self {
        debug_assert!(self.is_analytic());
        Self::from_coeffs(self.iter().filter(|&(k, _)| k >= 1).map(|(k, c)| (k - 1, c * k as f64)))
    }

    /// `d²/dt² f(e^{it})`, i.e. coefficients `−k² f̂(k)`.
    pub fn second_angle_derivative(&self) -> Self {
        Self::from_coeffs(self.iter().map(|(k, c)| (k, -c * (k * k) as f64)))
    }

    /// Sup-norm on the circle estimated on a uniform grid of `SUP_GRID` points.
    pub fn sup_norm_estimate(&self) -> f64 {
        (0..SUP_GRID)
            .map(|j| self.eval_angle(2.0 * PI * j as f64 / SUP_GRID as f64).norm())
            .fold(0.0, f64::max)
    }

    /// Sum of coefficient moduli; an exact upper bound on the sup-norm.
    pub fn coefficient_l1(&self) -> f64 {
        self.iter().map(|(_, c)| c.norm()).sum()
    }
}
