//! Spectral measures of unitaries and the compressed (semi-spectral)
//! measures of contractions, as cumulative functions on `[0, 2π]`.
//!
//! Angles live in `(0, 2π]`: the eigenvalue `1` sits at `2π`, so the
//! cumulative function vanishes at `0` and equals `I` at `2π`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::dilation::n_dilation;
use crate::error::{Error, Result};
use crate::{ComplexMatrix, C64};

/// Eigen-angles closer than this are merged into one jump.
pub const CLUSTER_TOL: f64 = 1e-9;
/// Unitarity tolerance for [`spectral_cdf_unitary`].
pub const UNITARY_INPUT_TOL: f64 = 1e-8;
/// Largest accepted moment residual for [`semispectral_cdf`].
pub const MOMENT_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct Jump {
    pub angle: f64,
    pub block: ComplexMatrix,
}

/// A positive operator-valued measure on the circle made of finitely many
/// jumps, stored as a cumulative function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "CdfRepr", try_from = "CdfRepr")]
pub struct SemiSpectralCDF {
    dim: usize,
    jumps: Vec<Jump>,
}

impl SemiSpectralCDF {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// `𝓔(t) = Σ_{t_j ≤ t} J_j`.
    pub fn eval(&self, t: f64) -> ComplexMatrix {
        self.jumps
            .iter()
            .take_while(|j| j.angle <= t)
            .fold(ComplexMatrix::zeros(self.dim), |acc, j| acc + &j.block)
    }

    /// `∫ e^{int} 𝓔(dt) = Σ_j e^{int_j} J_j`.
    pub fn moment(&self, n: i64) -> ComplexMatrix {
        self.jumps.iter().fold(ComplexMatrix::zeros(self.dim), |acc, j| {
            acc + j.block.scale(C64::from_polar(1.0, n as f64 * j.angle))
        })
    }

    /// `‖Σ_j J_j − I‖_max`.
    pub fn mass_residual(&self) -> f64 {
        (self.eval(TAU) - ComplexMatrix::identity(self.dim)).max_abs()
    }
}

/// `Σ_{t_j ≤ t} J_j`; zero at `t = 0`, the identity at `t = 2π`.
pub fn cdf_eval(cdf: &SemiSpectralCDF, t: f64) -> ComplexMatrix {
    cdf.eval(t)
}

pub fn moment(cdf: &SemiSpectralCDF, n: i64) -> ComplexMatrix {
    cdf.moment(n)
}

/// Angle of `z` on the unit circle, in `(0, 2π]`.
pub fn circle_angle(z: C64) -> f64 {
    let mut a = z.arg();
    if a <= 0.0 {
        a += TAU;
    }
    if a < CLUSTER_TOL || a > TAU - CLUSTER_TOL {
        TAU
    } else {
        a
    }
}

/// Eigen-angles of a unitary with orthonormal eigenvectors, clustered and
/// compressed to the first `d` coordinates.
fn compressed_jumps(u: &ComplexMatrix, d: usize) -> Result<Vec<Jump>> {
    let eig = u.unitary_eigen()?;
    let q = eig.vectors.inner();
    let mut order: Vec<(f64, usize)> = eig.values.iter().enumerate().map(|(i, &z)| (circle_angle(z), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut jumps: Vec<Jump> = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && order[end].0 - order[end - 1].0 < CLUSTER_TOL {
            end += 1;
        }
        let cluster = &order[start..end];
        let angle = cluster.iter().map(|c| c.0).sum::<f64>() / cluster.len() as f64;
        let block = ComplexMatrix::from_fn(d, |i, j| {
            cluster.iter().map(|&(_, c)| q[(i, c)] * q[(j, c)].conj()).sum::<C64>()
        });
        jumps.push(Jump { angle, block });
        start = end;
    }
    Ok(jumps)
}

pub fn spectral_cdf_unitary(u: &ComplexMatrix) -> Result<SemiSpectralCDF> {
    let res = u.unitarity_residual();
    if !(res <= UNITARY_INPUT_TOL) {
        return Err(Error::domain(format!("spectral measure needs a unitary (residual {res:e})")));
    }
    Ok(SemiSpectralCDF { dim: u.dim(), jumps: compressed_jumps(u, u.dim())? })
}

/// The compression of the spectral measure of the N-dilation of `t`. Its
/// moments reproduce `T^n` for `|n| ≤ N` (negative `n` through `T*`).
pub fn semispectral_cdf(t: &ComplexMatrix, n: u32) -> Result<SemiSpectralCDF> {
    let nd = n_dilation(t, n)?;
    let d = t.dim();
    let cdf = SemiSpectralCDF { dim: d, jumps: compressed_jumps(nd.unitary(), d)? };
    let mut power = ComplexMatrix::identity(d);
    for k in 0..=n {
        let res = (cdf.moment(k as i64) - &power).max_abs();
        if !(res <= MOMENT_TOL) {
            return Err(Error::Consistency(format!("moment {k} of the semi-spectral measure off by {res:e}")));
        }
        power = &power * t;
    }
    Ok(cdf)
}

#[derive(Serialize, Deserialize)]
struct JumpRepr {
    angle: f64,
    block_real: Vec<Vec<f64>>,
    block_imag: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct CdfRepr {
    dim: usize,
    jumps: Vec<JumpRepr>,
}

impl From<SemiSpectralCDF> for CdfRepr {
    fn from(c: SemiSpectralCDF) -> Self {
        let d = c.dim;
        let rows = |m: &ComplexMatrix, f: fn(C64) -> f64| -> Vec<Vec<f64>> {
            (0..d).map(|i| (0..d).map(|j| f(m.get(i, j))).collect()).collect()
        };
        CdfRepr {
            dim: d,
            jumps: c
                .jumps
                .iter()
                .map(|j| JumpRepr { angle: j.angle, block_real: rows(&j.block, |z| z.re), block_imag: rows(&j.block, |z| z.im) })
                .collect(),
        }
    }
}

impl TryFrom<CdfRepr> for SemiSpectralCDF {
    type Error = Error;

    fn try_from(r: CdfRepr) -> Result<Self> {
        let mut jumps = Vec::with_capacity(r.jumps.len());
        let mut last = 0.0;
        for j in r.jumps {
            if !(j.angle > last && j.angle <= TAU) {
                return Err(Error::Serialization(format!("jump angle {} out of order or range", j.angle)));
            }
            last = j.angle;
            let shape_ok = j.block_real.len() == r.dim
                && j.block_imag.len() == r.dim
                && j.block_real.iter().chain(&j.block_imag).all(|row| row.len() == r.dim);
            if !shape_ok {
                return Err(Error::Serialization("jump block has the wrong shape".into()));
            }
            let block = ComplexMatrix::from_fn(r.dim, |a, b| C64::new(j.block_real[a][b], j.block_imag[a][b]));
            jumps.push(Jump { angle: j.angle, block });
        }
        Ok(SemiSpectralCDF { dim: r.dim, jumps })
    }
}
