//! Finite-rank compression diagnostics: nested projections adapted to a
//! normal operator, the per-rank approximation quantities, and trace-norm
//! gaps between full and compressed second-order differences.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opcore::{apply_function, hermitian_exp, hs_norm, trace_norm};
use crate::par::{try_map_range, Exec};
use crate::paths::{linear_gateaux, multiplicative_gateaux, PathKind, PathSpec};
use crate::sample::trial_rng;
use crate::{ComplexMatrix, FourierFunction, C64};

pub const NORMAL_TOL: f64 = 1e-9;
/// Rotation angle between consecutive eigenvectors in the perturbed basis.
pub const ROTATION_ANGLE: f64 = 0.1;
/// Eigenvalue keys are compared on this grid so near-ties order stably.
const ORDER_QUANTUM: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ProjectionSequence {
    ambient_dim: usize,
    ranks: Vec<usize>,
    basis: ComplexMatrix,
}

impl ProjectionSequence {
    /// Nested projections onto the leading columns of `basis`.
    pub fn new(basis: ComplexMatrix, ranks: Vec<usize>) -> Result<Self> {
        let d = basis.dim();
        if ranks.is_empty() {
            return Err(Error::domain("at least one rank is required"));
        }
        if ranks.windows(2).any(|w| w[0] >= w[1]) || ranks[0] == 0 || *ranks.last().unwrap() > d {
            return Err(Error::domain(format!("ranks must increase strictly within 1..={d}, got {ranks:?}")));
        }
        let res = basis.unitarity_residual();
        if !(res <= 1e-10) {
            return Err(Error::domain(format!("basis is not unitary (residual {res:e})")));
        }
        Ok(Self { ambient_dim: d, ranks, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// `P_n`; exactly the identity at full rank.
    pub fn projection(&self, n: usize) -> ComplexMatrix {
        projection_of_rank(&self.basis, self.ranks[n])
    }

    /// `P_n M P_n`, returning `M` untouched at full rank.
    pub fn compress(&self, n: usize, m: &ComplexMatrix) -> ComplexMatrix {
        if self.ranks[n] == self.ambient_dim {
            return m.clone();
        }
        let p = self.projection(n);
        &(&p * m) * &p
    }
}

fn projection_of_rank(basis: &ComplexMatrix, r: usize) -> ComplexMatrix {
    let d = basis.dim();
    if r == d {
        return ComplexMatrix::identity(d);
    }
    let q = basis.inner();
    ComplexMatrix::from_fn(d, |i, j| (0..r).map(|k| q[(i, k)] * q[(j, k)].conj()).sum())
}

/// Orthonormal eigenbasis of a normal `N₀`, columns ordered by modulus
/// descending then argument (in `[0, 2π)`) ascending.
pub fn ordered_eigenbasis(n0: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix)> {
    let res = n0.normality_residual();
    if !(res <= NORMAL_TOL * (1.0 + n0.max_abs())) {
        return Err(Error::domain(format!("N0 is not normal (residual {res:e})")));
    }
    let eig = n0.normal_eigen()?;
    let quantize = |x: f64| (x / ORDER_QUANTUM).round() as i64;
    let mut order: Vec<usize> = (0..eig.values.len()).collect();
    order.sort_by_key(|&i| {
        let z = eig.values[i];
        let arg = z.arg().rem_euclid(std::f64::consts::TAU);
        (-quantize(z.norm()), quantize(arg), i)
    });
    let q = eig.vectors.inner();
    let basis = ComplexMatrix::from_fn(n0.dim(), |i, j| q[(i, order[j])]);
    Ok((order.iter().map(|&i| eig.values[i]).collect(), basis))
}

/// Projections adapted to `N₀`. With `rotation = Some(seed)` consecutive basis
/// vectors are mixed by Givens rotations of angle [`ROTATION_ANGLE`] with
/// seeded random phases, so the compressions no longer commute with `N₀`.
pub fn build_projections(n0: &ComplexMatrix, ranks: &[usize], rotation: Option<u64>) -> Result<ProjectionSequence> {
    let (_, mut basis) = ordered_eigenbasis(n0)?;
    if let Some(seed) = rotation {
        let mut rng = trial_rng(seed, 0);
        let (c, s) = (ROTATION_ANGLE.cos(), ROTATION_ANGLE.sin());
        let d = basis.dim();
        for j in 0..d.saturating_sub(1) {
            let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            let g = ComplexMatrix::from_fn(d, |a, b| match (a, b) {
                _ if a == j && b == j => C64::new(c, 0.0),
                _ if a == j + 1 && b == j + 1 => C64::new(c, 0.0),
                _ if a == j + 1 && b == j => -phase * s,
                _ if a == j && b == j + 1 => phase.conj() * s,
                _ if a == b => C64::new(1.0, 0.0),
                _ => C64::new(0.0, 0.0),
            });
            basis = &basis * &g;
        }
    }
    ProjectionSequence::new(basis, ranks.to_vec())
}

/// One row of approximation quantities for a projection `P` of given rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub rank: usize,
    /// `‖P^⊥N₀P‖₂`
    pub n0_off_corner: f64,
    /// `‖P^⊥V‖₂`
    pub v_tail: f64,
    /// `‖P^⊥V*‖₂`
    pub v_adj_tail: f64,
    /// `max_{1≤|k|≤cap} ‖(T^k − T_n^k)P‖₂`
    pub t_power_gap: f64,
    /// `max_{1≤|k|≤cap} ‖(T₀^k − T_{0,n}^k)P‖₂`
    pub t0_power_gap: f64,
    /// `‖P^⊥(e^{iA} − I)‖₂`
    pub exp_tail: f64,
    /// `‖P(e^{iA} − e^{iA_n})‖₂`
    pub exp_compression: f64,
    /// `‖(e^{iA} − iA − e^{iA_n} + iA_n)P‖₁`
    pub exp_remainder_gap: f64,
    /// `‖(e^{iA} − iA − I)P^⊥‖₁`
    pub exp_remainder_tail: f64,
    /// `‖A‖^{−1}(e^{‖A‖} − 1)‖A‖₂‖P^⊥AP‖₂`, an upper bound for `exp_remainder_gap`.
    pub remainder_bound: f64,
}

impl DiagnosticsRow {
    pub fn bound_holds(&self, slack: f64) -> bool {
        self.exp_remainder_gap <= self.remainder_bound + slack
    }
}

/// `(e^x − 1)/x`, continuous at 0.
fn expm1_over_x(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.exp_m1() / x
    }
}

/// Approximation quantities for `T₀ = N₀ + V`, `T = e^{iA}T₀` along `seq`,
/// with powers `1 ≤ |k| ≤ k_cap` (negative powers through adjoints).
pub fn truncation_diagnostics(
    seq: &ProjectionSequence,
    n0: &ComplexMatrix,
    v: &ComplexMatrix,
    a: &ComplexMatrix,
    k_cap: u32,
    exec: Exec,
) -> Result<Vec<DiagnosticsRow>> {
    let d = seq.ambient_dim();
    for m in [n0, v, a] {
        if m.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: m.dim() });
        }
    }
    let t0 = n0 + v;
    let ea = hermitian_exp(a, 1.0)?;
    let t = &ea * &t0;
    let ia = a.scale(C64::new(0.0, 1.0));
    let id = ComplexMatrix::identity(d);
    let a_norm = a.op_norm()?;
    let a_hs = hs_norm(a);
    let exp_rem = &(&ea - &ia) - &id;
    let powers = |m: &ComplexMatrix| -> Vec<(ComplexMatrix, ComplexMatrix)> {
        (1..=k_cap as i64).map(|k| (m.signed_pow(k), m.signed_pow(-k))).collect()
    };
    let t_pows = powers(&t);
    let t0_pows = powers(&t0);

    try_map_range(exec, seq.len(), |n| {
        let p = seq.projection(n);
        let pc = &id - &p;
        let a_n = seq.compress(n, a);
        let ea_n = hermitian_exp(&a_n, 1.0)?;
        let t0_n = seq.compress(n, &t0);
        let t_n = &ea_n * &t0_n;
        let gap = |full: &[(ComplexMatrix, ComplexMatrix)], comp: &ComplexMatrix| {
            let cp = powers(comp);
            full.iter()
                .zip(&cp)
                .map(|((fp, fm), (cp, cm))| hs_norm(&(&(fp - cp) * &p)).max(hs_norm(&(&(fm - cm) * &p))))
                .fold(0.0, f64::max)
        };
        let ia_n = a_n.scale(C64::new(0.0, 1.0));
        let rem_gap = &(&(&ea - &ea_n) - &(&ia - &ia_n)) * &p;
        Ok(DiagnosticsRow {
            rank: seq.ranks()[n],
            n0_off_corner: hs_norm(&(&(&pc * n0) * &p)),
            v_tail: hs_norm(&(&pc * v)),
            v_adj_tail: hs_norm(&(&pc * &v.adjoint())),
            t_power_gap: gap(&t_pows, &t_n),
            t0_power_gap: gap(&t0_pows, &t0_n),
            exp_tail: hs_norm(&(&pc * &(&ea - &id))),
            exp_compression: hs_norm(&(&p * &(&ea - &ea_n))),
            exp_remainder_gap: trace_norm(&rem_gap)?,
            exp_remainder_tail: trace_norm(&(&exp_rem * &pc))?,
            remainder_bound: expm1_over_x(a_norm) * a_hs * hs_norm(&(&(&pc * a) * &p)),
        })
    })
}

/// Trace-norm distance between the full second-order difference and its
/// compression at one rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub rank: usize,
    pub kind: PathKind,
    pub gap: f64,
    /// `‖p(T) − p(T₀) − D‖₁` of the uncompressed operator, for scale.
    pub full_norm: f64,
}

fn second_order_difference(path_kind: PathKind, base: &ComplexMatrix, dir: &ComplexMatrix, p: &FourierFunction) -> Result<ComplexMatrix> {
    match path_kind {
        PathKind::Linear => {
            let end = base + dir;
            Ok(&(&apply_function(p, &end) - &apply_function(p, base)) - &linear_gateaux(base, dir, p))
        }
        PathKind::Multiplicative => {
            let end = &hermitian_exp(dir, 1.0)? * base;
            Ok(&(&apply_function(p, &end) - &apply_function(p, base)) - &multiplicative_gateaux(base, dir, p))
        }
    }
}

/// Per-rank `‖X − P X_n P‖₁` where `X` is the second-order difference of `p`
/// along `path` and `X_n` the same built from compressed data: `P N P`,
/// `P N₀ P` on a linear path, `e^{iA_n} T_{0,n}` on a multiplicative one.
pub fn truncation_gap(seq: &ProjectionSequence, path: &PathSpec, p: &FourierFunction, exec: Exec) -> Result<Vec<GapRow>> {
    let d = seq.ambient_dim();
    if path.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: path.dim() });
    }
    let kind = path.kind();
    if kind == PathKind::Linear && !p.is_analytic() {
        return Err(Error::Unsupported("linear-path truncation needs an analytic polynomial".into()));
    }
    let full = second_order_difference(kind, path.base(), path.direction(), p)?;
    let full_norm = trace_norm(&full)?;
    try_map_range(exec, seq.len(), |n| {
        let compress = |m: &ComplexMatrix| seq.compress(n, m);
        let comp = compress(&second_order_difference(kind, &compress(path.base()), &compress(path.direction()), p)?);
        Ok(GapRow { rank: seq.ranks()[n], kind, gap: trace_norm(&(&full - &comp))?, full_norm })
    })
}

/// Writes rows as CSV with a header, one row per rank.
pub fn write_csv<T: Serialize>(rows: &[T], out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(())
}
