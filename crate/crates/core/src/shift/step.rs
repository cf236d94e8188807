use std::f64::consts::TAU;

use crate::C64;

/// A right-continuous step function on `[0, 2π]` vanishing at `0`:
/// `f(t) = Σ_{a_j ≤ t} δ_j`.
///
/// Shift functions built from compressed spectral measures of finite
/// matrices are exactly of this form, so Fourier integrals are done in
/// closed form instead of on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    angles: Vec<f64>,
    deltas: Vec<C64>,
    prefix: Vec<C64>,
}

impl StepFunction {
    /// Builds from `(angle, increment)` pairs; equal angles are merged.
    pub fn from_jumps(jumps: impl IntoIterator<Item = (f64, C64)>) -> Self {
        let mut raw: Vec<(f64, C64)> = jumps.into_iter().collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut angles: Vec<f64> = Vec::with_capacity(raw.len());
        let mut deltas: Vec<C64> = Vec::with_capacity(raw.len());
        for (a, d) in raw {
            match angles.last() {
                Some(&last) if last == a => *deltas.last_mut().unwrap() += d,
                _ => {
                    angles.push(a);
                    deltas.push(d);
                }
            }
        }
        let mut prefix = Vec::with_capacity(deltas.len());
        let mut acc = C64::new(0.0, 0.0);
        for d in &deltas {
            acc += d;
            prefix.push(acc);
        }
        Self { angles, deltas, prefix }
    }

    pub fn zero() -> Self {
        Self::from_jumps([])
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn deltas(&self) -> &[C64] {
        &self.deltas
    }

    /// Number of jumps at or before `t`.
    pub fn rank(&self, t: f64) -> usize {
        self.angles.partition_point(|&a| a <= t)
    }

    pub fn eval(&self, t: f64) -> C64 {
        match self.rank(t) {
            0 => C64::new(0.0, 0.0),
            k => self.prefix[k - 1],
        }
    }

    /// `Σ |δ_j|`, the total variation.
    pub fn variation(&self) -> f64 {
        self.deltas.iter().map(|d| d.norm()).sum()
    }

    /// `∫₀^{2π} e^{ikt} f(t) dt`, exactly.
    pub fn fourier(&self, k: i64) -> C64 {
        if k == 0 {
            return self.angles.iter().zip(&self.deltas).map(|(&a, &d)| d * (TAU - a)).sum();
        }
        let ik = C64::new(0.0, k as f64);
        self.angles
            .iter()
            .zip(&self.deltas)
            .map(|(&a, &d)| d * (C64::new(1.0, 0.0) - C64::from_polar(1.0, k as f64 * a)))
            .sum::<C64>()
            / ik
    }
}
