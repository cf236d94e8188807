use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Dense square complex matrix. Every operator in the crate lives here.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

/// Eigendecomposition `H = Q diag(λ) Q*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Spectral decomposition `N = Q diag(λ) Q*` of a normal matrix, read off a
/// complex Schur form (the triangular factor of a normal matrix is diagonal).
#[derive(Clone, Debug)]
pub struct NormalEigen {
    pub values: Vec<C64>,
    pub vectors: ComplexMatrix,
    /// Largest off-diagonal modulus left in the Schur factor.
    pub off_diagonal: f64,
}

/// Singular value decomposition `M = U diag(σ) W*` with σ sorted descending
/// (ties broken by original index).
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl ComplexMatrix {
    /// Wraps a dense matrix, rejecting non-square or non-finite input.
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::domain(format!(
                "matrix must be square, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if inner.nrows() == 0 {
            return Err(Error::domain("matrix dimension must be positive"));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        Ok(Self(inner))
    }

    pub(crate) fn from_inner(inner: DMatrix<C64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self(inner)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn scalar(z: C64) -> Self {
        Self(DMatrix::from_element(1, 1, z))
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, |i, j| f(i, j)))
    }

    /// Builds from row-major complex rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("rows must form a square matrix"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Builds from row-major real rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, z: C64) -> Self {
        Self(&self.0 * z)
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    /// `self + z·I`.
    pub fn shift(&self, z: C64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += z;
        }
        Self(m)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise equality within an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.0.iter().zip(other.0.iter()).all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() })
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// `‖M*M − I‖_max`, zero for a unitary.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.0.adjoint() * &self.0;
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// `‖MM* − M*M‖_max`, zero for a normal matrix.
    pub fn normality_residual(&self) -> f64 {
        let a = &self.0 * self.0.adjoint();
        let b = self.0.adjoint() * &self.0;
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `M^k` by repeated squaring (never through an eigendecomposition).
    pub fn pow(&self, k: u32) -> Self {
        let mut result = DMatrix::identity(self.dim(), self.dim());
        let mut base = self.0.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self(result)
    }

    /// `[I, M, M², …, M^n]` by successive multiplication.
    pub fn powers(&self, n: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(Self::identity(self.dim()));
        for k in 1..=n {
            let next = &out[k - 1] * self;
            out.push(next);
        }
        out
    }

    /// Signed power: `M^k` for `k ≥ 0`, `(M*)^{|k|}` for `k < 0`.
    pub fn signed_pow(&self, k: i64) -> Self {
        if k >= 0 {
            self.pow(k as u32)
        } else {
            self.adjoint().pow(k.unsigned_abs() as u32)
        }
    }

    pub fn try_inverse(&self) -> Result<Self> {
        self.0
            .clone()
            .try_inverse()
            .map(Self)
            .ok_or_else(|| Error::Factorization("matrix is singular".into()))
    }

    pub fn svd(&self) -> Result<Svd> {
        let svd = nalgebra::linalg::SVD::try_new(self.0.clone(), true, true, 1e-15, 10_000)
            .ok_or_else(|| Error::Factorization("SVD did not converge".into()))?;
        let u = svd.u.expect("requested U");
        let v_t = svd.v_t.expect("requested V^T");
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b))
        });
        let v = v_t.adjoint();
        let su = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
        let sv = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
        Ok(Svd {
            u: Self(su),
            singular_values: order.iter().map(|&k| svd.singular_values[k]).collect(),
            v: Self(sv),
        })
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let sv = nalgebra::linalg::SVD::try_new(self.0.clone(), false, false, 1e-15, 10_000)
            .ok_or_else(|| Error::Factorization("SVD did not converge".into()))?;
        let mut s: Vec<f64> = sv.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s)
    }

    /// Operator (spectral) norm.
    pub fn op_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    pub fn hermitian_eigen(&self) -> Result<HermitianEigen> {
        // Symmetrize so round-off in the input cannot leak into the eigensolver.
        let h = (&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::linalg::SymmetricEigen::try_new(h, 1e-15, 10_000)
            .ok_or_else(|| Error::Factorization("Hermitian eigensolver did not converge".into()))?;
        Ok(HermitianEigen {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: Self(eig.eigenvectors),
        })
    }

    /// Spectral decomposition for normal input (unitaries in particular).
    pub fn normal_eigen(&self) -> Result<NormalEigen> {
        let schur = Schur::try_new(self.0.clone(), 1e-15, 100_000)
            .ok_or_else(|| Error::Factorization("Schur iteration did not converge".into()))?;
        let (q, t) = schur.unpack();
        let n = self.dim();
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(t[(i, j)].norm());
            }
        }
        Ok(NormalEigen { values: (0..n).map(|i| t[(i, i)]).collect(), vectors: Self(q), off_diagonal: off })
    }

    /// Spectral decomposition of a unitary. Shifted QR can stall on
    /// cyclic-shift structure (dilations of unitaries), so on failure this
    /// diagonalizes the Hermitian Cayley image `i(ω − U)(ω + U)^{−1}`,
    /// which shares eigenvectors with `U` and separates distinct eigenvalues.
    pub fn unitary_eigen(&self) -> Result<NormalEigen> {
        if let Ok(e) = self.normal_eigen() {
            return Ok(e);
        }
        // Put the pole −ω where the spectrum leaves the widest gap among a
        // few candidate directions.
        let mut best = (f64::NEG_INFINITY, C64::new(1.0, 0.0));
        for j in 0..16 {
            let w = C64::from_polar(1.0, 0.37 + std::f64::consts::TAU * j as f64 / 16.0);
            let smin = self.shift(w).singular_values()?.last().copied().unwrap_or(0.0);
            if smin > best.0 {
                best = (smin, w);
            }
        }
        let w = best.1;
        let inv = self.shift(w).try_inverse()?;
        let h = (&(-self).shift(w) * &inv).scale(C64::new(0.0, 1.0));
        let q = h.hermitian_eigen()?.vectors;
        let d = &(&q.adjoint() * self) * &q;
        let n = self.dim();
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(d.get(i, j).norm());
                }
            }
        }
        Ok(NormalEigen { values: (0..n).map(|i| d.get(i, i)).collect(), vectors: q, off_diagonal: off })
    }

    /// Top-left `k×k` corner.
    pub fn corner(&self, k: usize) -> Self {
        Self(self.0.view((0, 0), (k, k)).into_owned())
    }

    /// The `(bi, bj)` block of size `b`.
    pub fn block(&self, bi: usize, bj: usize, b: usize) -> Self {
        Self(self.0.view((bi * b, bj * b), (b, b)).into_owned())
    }

    pub(crate) fn set_block(&mut self, bi: usize, bj: usize, block: &Self) {
        let b = block.dim();
        self.0.view_mut((bi * b, bj * b), (b, b)).copy_from(&block.0);
    }
}

impl HermitianEigen {
    /// `Q f(Λ) Q*`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let q = self.vectors.inner();
        let n = q.nrows();
        let mut scaled = q.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        ComplexMatrix(scaled * q.adjoint())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
        impl $tr<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        ComplexMatrix(&self.0 * rhs)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        assert!(ComplexMatrix::new(DMatrix::zeros(2, 3)).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(ComplexMatrix::new(m).is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let m = ComplexMatrix::from_rows(&[vec![c(0.1, 0.2), c(0.3, -0.1)], vec![c(-0.2, 0.0), c(0.5, 0.4)]])
            .unwrap();
        let p = m.powers(7);
        for k in 0..=7u32 {
            assert!(m.pow(k).approx_eq(&p[k as usize], 1e-14));
        }
    }

    #[test]
    fn signed_pow_negative_is_adjoint_power() {
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.5, 0.0)], vec![c(0.0, 0.0), c(0.2, 0.0)]])
            .unwrap();
        assert!(m.signed_pow(-2).approx_eq(&m.adjoint().pow(2), 1e-15));
    }

    #[test]
    fn svd_is_sorted_and_reconstructs() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 3.0, 0.0], vec![0.0, 0.0, 2.0]])
            .unwrap();
        let svd = m.svd().unwrap();
        assert_eq!(svd.singular_values.len(), 3);
        assert!((svd.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((svd.singular_values[2] - 1.0).abs() < 1e-14);
        let s = ComplexMatrix::from_diagonal(
            &svd.singular_values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(),
        );
        assert!((&(&svd.u * &s) * &svd.v.adjoint()).approx_eq(&m, 1e-13));
    }

    #[test]
    fn normal_eigen_of_diagonal_unitary() {
        let u = ComplexMatrix::from_diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let e = u.normal_eigen().unwrap();
        let mut angles: Vec<f64> = e.values.iter().map(|z| z.arg()).collect();
        angles.sort_by(f64::total_cmp);
        assert!((angles[0] + std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((angles[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn block_roundtrip() {
        let mut big = ComplexMatrix::zeros(4);
        let b = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        big.set_block(1, 0, &b);
        assert_eq!(big.block(1, 0, 2), b);
        assert_eq!(big.block(0, 0, 2), ComplexMatrix::zeros(2));
    }

    #[test]
    fn unitary_eigen_handles_cyclic_shifts() {
        let n = 40;
        let p = ComplexMatrix::from_fn(n, |i, j| if i == (j + 1) % n { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let e = p.unitary_eigen().unwrap();
        assert!(e.off_diagonal < 1e-12);
        let rebuilt = &(&e.vectors * &ComplexMatrix::from_diagonal(&e.values)) * &e.vectors.adjoint();
        assert!(rebuilt.approx_eq(&p, 1e-12));
        for z in &e.values {
            assert!((z.powu(n as u32) - c(1.0, 0.0)).norm() < 1e-11);
        }
    }
}
