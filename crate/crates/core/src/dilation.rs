//! Unitary dilations of contractions.
//!
//! The two-sided Schäffer dilation lives on `l²(ℤ; H)`; we only ever build a
//! finite window `[−K, K]` of block indices. Its block layout is upper
//! triangular with `T` the only nonzero diagonal block, so the compression of
//! `U^k` to the centre block is exact on any window, and so is any trace over
//! the window of a polynomial difference. The N-dilation is a genuinely
//! unitary `(N+1)d × (N+1)d` matrix whose compressed powers agree with `T^k`
//! for `k ≤ N`, which is what the spectral code needs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::opcore::{defects, hs_norm, is_contraction, DefectPair};
use crate::{ComplexMatrix, C64};

/// Rank decisions on singular values use this cutoff.
pub const RANK_TOL: f64 = 1e-9;
/// Singular values strictly inside this band make the polar factor ambiguous.
pub const AMBIGUOUS_BAND: (f64, f64) = (1e-11, 1e-7);
/// Contraction tolerance for dilation inputs.
pub const INPUT_TOL: f64 = 1e-9;
/// Largest unitarity residual accepted for an N-dilation.
pub const UNITARY_TOL: f64 = 1e-8;

/// A finite window of a block operator on `l²(ℤ; H)`, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    block_dim: usize,
    lo: i64,
    hi: i64,
    blocks: BTreeMap<(i64, i64), ComplexMatrix>,
}

impl BlockOperator {
    pub fn new(block_dim: usize, lo: i64, hi: i64) -> Self {
        assert!(lo <= hi && block_dim > 0);
        Self { block_dim, lo, hi, blocks: BTreeMap::new() }
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    fn in_window(&self, i: i64) -> bool {
        (self.lo..=self.hi).contains(&i)
    }

    /// Stores `m` at block `(i, j)`. Blocks outside the window are dropped:
    /// that is what truncating to the window means.
    pub fn insert(&mut self, i: i64, j: i64, m: ComplexMatrix) -> Result<()> {
        if m.dim() != self.block_dim {
            return Err(Error::DimensionMismatch { expected: self.block_dim, got: m.dim() });
        }
        if self.in_window(i) && self.in_window(j) {
            self.blocks.insert((i, j), m);
        }
        Ok(())
    }

    pub fn get(&self, i: i64, j: i64) -> Option<&ComplexMatrix> {
        self.blocks.get(&(i, j))
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((i64, i64), &ComplexMatrix)> {
        self.blocks.iter().map(|(&k, v)| (k, v))
    }

    pub fn dense_dim(&self) -> usize {
        (self.hi - self.lo + 1) as usize * self.block_dim
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dense_dim());
        for (&(i, j), m) in &self.blocks {
            out.set_block((i - self.lo) as usize, (j - self.lo) as usize, m);
        }
        out
    }

    /// Dense index of the centre block `0`.
    pub fn centre(&self) -> usize {
        (-self.lo) as usize
    }

    /// `P_H U^k |_H`: the centre block of the k-th power.
    pub fn compress_power(&self, k: u32) -> ComplexMatrix {
        let c = self.centre();
        self.to_dense().pow(k).block(c, c, self.block_dim)
    }

    /// Hilbert–Schmidt norm of `self − other` over the common window.
    pub fn hs_distance(&self, other: &Self) -> Result<f64> {
        if self.block_dim != other.block_dim || self.window() != other.window() {
            return Err(Error::domain("block operators live on different windows"));
        }
        Ok(hs_norm(&(self.to_dense() - other.to_dense())))
    }
}

fn check_input(t: &ComplexMatrix, what: &str) -> Result<()> {
    if !is_contraction(t, INPUT_TOL) {
        return Err(Error::NotAContraction(what.to_string()));
    }
    Ok(())
}

fn shift_blocks(u: &mut BlockOperator, k: i64) -> Result<()> {
    let id = ComplexMatrix::identity(u.block_dim);
    for j in -k..=k {
        if j != 0 && j != -1 {
            u.insert(j, j + 1, id.clone())?;
        }
    }
    Ok(())
}

fn schaffer_from_defects(t: &ComplexMatrix, d: &DefectPair, k: u32) -> Result<BlockOperator> {
    let k = k as i64;
    let mut u = BlockOperator::new(t.dim(), -k, k);
    u.insert(0, 0, t.clone())?;
    u.insert(-1, 0, d.d_t.clone())?;
    u.insert(-1, 1, -t.adjoint())?;
    u.insert(0, 1, d.d_tstar.clone())?;
    shift_blocks(&mut u, k)?;
    Ok(u)
}

/// Window `[−K, K]` of the Schäffer dilation of `t`.
pub fn schaffer_window(t: &ComplexMatrix, k: u32) -> Result<BlockOperator> {
    if k == 0 {
        return Err(Error::domain("window half-width must be at least 1"));
    }
    check_input(t, "Schäffer dilation input")?;
    schaffer_from_defects(t, &defects(t)?, k)
}

/// `‖U_T − U_{T₀}‖₂` for the two-sided Schäffer dilations. Only four blocks
/// differ; the identity blocks cancel.
pub fn hs_difference_schaffer(t: &ComplexMatrix, t0: &ComplexMatrix) -> Result<f64> {
    t.check_same_dim(t0)?;
    check_input(t, "T")?;
    check_input(t0, "T0")?;
    let (d, d0) = (defects(t)?, defects(t0)?);
    let sq = |m: ComplexMatrix| hs_norm(&m).powi(2);
    let total = sq(t - t0) + sq(t.adjoint() - t0.adjoint()) + sq(&d.d_t - &d0.d_t) + sq(&d.d_tstar - &d0.d_tstar);
    Ok(total.sqrt())
}

/// Orthonormal basis of the span of the columns of `q` (assumed orthonormal),
/// chosen canonically: greedy Gram–Schmidt over the projected standard basis
/// vectors, largest remaining norm first, lowest index on ties.
fn canonical_basis(q: &[Vec<C64>], n: usize) -> Vec<Vec<C64>> {
    let k = q.len();
    let project = |i: usize| -> Vec<C64> {
        // P e_i = Σ_c q_c conj(q_c[i])
        let mut v = vec![C64::new(0.0, 0.0); n];
        for col in q {
            let w = col[i].conj();
            for (vr, cr) in v.iter_mut().zip(col) {
                *vr += cr * w;
            }
        }
        v
    };
    let mut candidates: Vec<Vec<C64>> = (0..n).map(project).collect();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let norms: Vec<f64> =
            candidates.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
        let mut best = 0;
        for i in 1..n {
            // Strictly larger by more than rounding wins; otherwise keep the lower index.
            if norms[i] > norms[best] * (1.0 + 1e-12) {
                best = i;
            }
        }
        let nb = norms[best];
        if nb < 1e-8 {
            break;
        }
        let b: Vec<C64> = candidates[best].iter().map(|z| z / nb).collect();
        for v in candidates.iter_mut() {
            let proj: C64 = b.iter().zip(v.iter()).map(|(bi, vi)| bi.conj() * vi).sum();
            for (vi, bi) in v.iter_mut().zip(&b) {
                *vi -= bi * proj;
            }
        }
        basis.push(b);
    }
    basis
}

fn columns(m: &ComplexMatrix, idx: impl Iterator<Item = usize>) -> Vec<Vec<C64>> {
    let n = m.dim();
    idx.map(|j| (0..n).map(|i| m.get(i, j)).collect()).collect()
}

/// The unitary factor `V` of a polar decomposition `T₀ = V|T₀|`, extended
/// across the kernels deterministically, plus any conditioning warnings.
pub fn polar_unitary(t0: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<String>)> {
    let n = t0.dim();
    let svd = t0.svd()?;
    let mut warnings = Vec::new();
    if let Some(s) = svd.singular_values.iter().find(|&&s| s > AMBIGUOUS_BAND.0 && s < AMBIGUOUS_BAND.1) {
        warnings.push(format!("ill-conditioned polar factor: singular value {s:e} near the rank cutoff"));
    }
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL).count();
    // Square input: dim ker T₀ = dim ker T₀* = n − rank, asserted anyway.
    let ker = columns(&svd.v, rank..n);
    let coker = columns(&svd.u, rank..n);
    let kb = canonical_basis(&ker, n);
    let cb = canonical_basis(&coker, n);
    if kb.len() != cb.len() || kb.len() != n - rank {
        return Err(Error::Construction("kernel dimensions of T0 and T0* differ".into()));
    }
    let mut v = ComplexMatrix::from_fn(n, |i, j| {
        (0..rank).map(|c| svd.u.get(i, c) * svd.v.get(j, c).conj()).sum::<C64>()
    });
    let ext = ComplexMatrix::from_fn(n, |i, j| {
        cb.iter().zip(&kb).map(|(w, z)| w[i] * z[j].conj()).sum::<C64>()
    });
    v = v + ext;
    Ok((v, warnings))
}

/// Output of [`modified_dilation`].
#[derive(Clone, Debug)]
pub struct ModifiedDilation {
    /// The extension of `T` built around the polar factor of `T₀`.
    pub modified: BlockOperator,
    /// The Schäffer dilation of `T₀` on the same window.
    pub reference: BlockOperator,
    pub polar: ComplexMatrix,
    pub warnings: Vec<String>,
}

impl ModifiedDilation {
    /// `(1 − t)U_{T₀} + tU_T` as a dense matrix.
    pub fn interpolate(&self, t: f64) -> ComplexMatrix {
        self.reference.to_dense().scale_real(1.0 - t) + self.modified.to_dense().scale_real(t)
    }
}

pub fn modified_dilation(t: &ComplexMatrix, t0: &ComplexMatrix, k: u32) -> Result<ModifiedDilation> {
    if k == 0 {
        return Err(Error::domain("window half-width must be at least 1"));
    }
    t.check_same_dim(t0)?;
    check_input(t, "T")?;
    check_input(t0, "T0")?;
    let (polar, warnings) = polar_unitary(t0)?;
    let ki = k as i64;
    let mut modified = BlockOperator::new(t.dim(), -ki, ki);
    modified.insert(0, 0, t.clone())?;
    modified.insert(-1, 1, -polar.adjoint())?;
    shift_blocks(&mut modified, ki)?;
    let reference = schaffer_from_defects(t0, &defects(t0)?, k)?;
    Ok(ModifiedDilation { modified, reference, polar, warnings })
}

/// A unitary `U` on `H^{N+1}` with `P_H U^k|_H = T^k` for `0 ≤ k ≤ N`.
#[derive(Clone, Debug)]
pub struct NDilation {
    degree: u32,
    embed_dim: usize,
    unitary: ComplexMatrix,
}

impl NDilation {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// Top-left `d × d` block of `U^k`.
    pub fn compression(&self, k: u32) -> ComplexMatrix {
        self.unitary.pow(k).corner(self.embed_dim)
    }
}

pub fn n_dilation(t: &ComplexMatrix, n: u32) -> Result<NDilation> {
    if n == 0 {
        return Err(Error::domain("dilation degree must be at least 1"));
    }
    check_input(t, "N-dilation input")?;
    let d = t.dim();
    let DefectPair { d_t, d_tstar } = defects(t)?;
    let nb = n as usize;
    let mut u = ComplexMatrix::zeros((nb + 1) * d);
    u.set_block(0, 0, t);
    u.set_block(0, nb, &d_tstar);
    u.set_block(1, 0, &d_t);
    u.set_block(1, nb, &-t.adjoint());
    let id = ComplexMatrix::identity(d);
    for j in 2..=nb {
        u.set_block(j, j - 1, &id);
    }
    let res = u.unitarity_residual();
    if !(res <= UNITARY_TOL) {
        return Err(Error::Construction(format!("N-dilation unitarity residual {res:e}")));
    }
    Ok(NDilation { degree: n, embed_dim: d, unitary: u })
}
