//! Dense complex matrices, angular-momentum operators and Kronecker embeddings.
//!
//! Everything here works with ħ = 1. Matrices are small enough (a few hundred
//! rows at most) that dense storage is used throughout.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Square dense complex matrix.
#[derive(Clone)]
pub struct ComplexMatrix(Mat<C64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(Mat::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Mat::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(Mat::from_fn(dim, dim, f))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.0[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.0[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major rows. Panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_faer(m: Mat<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "ComplexMatrix must be square");
        Self(m)
    }

    pub fn as_faer(&self) -> &Mat<C64> {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint().to_owned())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.0[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "matmul dimension mismatch");
        Self(&self.0 * &rhs.0)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_fn(self.dim(), |i, j| self.0[(i, j)] * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self::from_fn(self.dim(), |i, j| self.0[(i, j)] * factor)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim(), rhs.dim());
        let mut out = Mat::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.0[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * rhs.0[(k, l)];
                    }
                }
            }
        }
        Self(out)
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut max = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                max = max.max(self.0[(i, j)].norm());
            }
        }
        max
    }

    pub fn frobenius_norm(&self) -> f64 {
        let n = self.dim();
        let mut sum = 0.0;
        for j in 0..n {
            for i in 0..n {
                sum += self.0[(i, j)].norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Largest entry of `|A − A†|` divided by the largest entry of `|A|`
    /// (zero for the zero matrix).
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.dim();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut max = 0.0f64;
        for i in 0..n {
            for j in i..n {
                max = max.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        max / scale
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_asymmetry() <= rel_tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim();
        Self::from_fn(n, |i, j| (self.0[(i, j)] + self.0[(j, i)].conj()) * 0.5)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order; the strict lower
    /// triangle is trusted and the upper one ignored.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if self.dim() == 0 {
            return Ok(Vec::new());
        }
        self.0
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::EigenFailure)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        writeln!(f, "ComplexMatrix({n}x{n}) [")?;
        for i in 0..n {
            write!(f, "  ")?;
            for j in 0..n {
                let z = self.0[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl PartialEq for ComplexMatrix {
    fn eq(&self, other: &Self) -> bool {
        let n = self.dim();
        n == other.dim() && (0..n).all(|i| (0..n).all(|j| self.0[(i, j)] == other.0[(i, j)]))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 -= &rhs.0;
    }
}

/// Spin quantum number stored as the integer `2s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub const fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    /// Accepts any `s` for which `2s` is a non-negative integer.
    pub fn from_f64(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !twice.is_finite() || twice < 0.0 || (twice - twice.round()).abs() > 1e-12 || twice > 1e6 {
            return Err(Error::InvalidSpin(s));
        }
        Ok(Spin(twice.round() as u32))
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Hilbert-space dimension `2s + 1`.
    pub const fn multiplicity(self) -> usize {
        self.0 as usize + 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Cartesian components of an angular-momentum operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinTriple {
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
}

impl SpinTriple {
    /// Standard matrices in the `Sz` eigenbasis ordered `m = s, s−1, …, −s`.
    pub fn for_spin(spin: Spin) -> Self {
        let d = spin.multiplicity();
        let s = spin.value();
        let m = |i: usize| s - i as f64;
        let sz = ComplexMatrix::from_real_diagonal(&(0..d).map(m).collect::<Vec<_>>());
        // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>, and |m+1> sits one row above |m>.
        let raise = |i: usize, j: usize| -> f64 {
            if j == i + 1 {
                let mj = m(j);
                (s * (s + 1.0) - mj * (mj + 1.0)).max(0.0).sqrt()
            } else {
                0.0
            }
        };
        let sx = ComplexMatrix::from_fn(d, |i, j| C64::new(0.5 * (raise(i, j) + raise(j, i)), 0.0));
        let sy = ComplexMatrix::from_fn(d, |i, j| C64::new(0.0, -0.5 * (raise(i, j) - raise(j, i))));
        SpinTriple { sx, sy, sz }
    }

    pub fn dim(&self) -> usize {
        self.sz.dim()
    }

    pub fn components(&self) -> [&ComplexMatrix; 3] {
        [&self.sx, &self.sy, &self.sz]
    }

    pub fn map(&self, mut f: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> SpinTriple {
        SpinTriple {
            sx: f(&self.sx),
            sy: f(&self.sy),
            sz: f(&self.sz),
        }
    }
}

/// Angular-momentum matrices for spin quantum number `s`.
pub fn spin_operators(s: f64) -> Result<SpinTriple> {
    Ok(SpinTriple::for_spin(Spin::from_f64(s)?))
}

/// Places `op` at position `slot` of a Kronecker product of identities with
/// the given particle dimensions.
pub fn embed(op: &ComplexMatrix, slot: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    if slot >= dims.len() {
        return Err(Error::SlotOutOfRange { slot, len: dims.len() });
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::DimensionMismatch("particle dimensions must be positive".into()));
    }
    if op.dim() != dims[slot] {
        return Err(Error::DimensionMismatch(format!(
            "operator has dimension {} but slot {slot} has dimension {}",
            op.dim(),
            dims[slot]
        )));
    }
    let left: usize = dims[..slot].iter().product();
    let right: usize = dims[slot + 1..].iter().product();
    let d = op.dim();
    let total = left * d * right;
    let mut out = ComplexMatrix::zeros(total);
    for a in 0..left {
        for i in 0..d {
            for j in 0..d {
                let v = op.get(i, j);
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..right {
                    out.set((a * d + i) * right + b, (a * d + j) * right + b, v);
                }
            }
        }
    }
    Ok(out)
}

/// Eigenvalues (ascending) and unitary eigenvectors (as columns) of a
/// Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let scaled = ComplexMatrix::from_fn(n, |i, j| v.get(i, j) * self.eigenvalues[j]);
        scaled.matmul(&v.adjoint())
    }

    /// Expresses `op` in the eigenbasis: `V†·op·V`.
    pub fn to_eigenbasis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint().matmul(op).matmul(&self.eigenvectors)
    }
}

pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let asymmetry = h.hermitian_asymmetry();
    if asymmetry > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { asymmetry });
    }
    let n = h.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0),
        });
    }
    let evd = h
        .as_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let s = evd.S().column_vector();
    let eigenvalues = (0..n).map(|i| s[i].re).collect();
    let eigenvectors = ComplexMatrix::from_faer(evd.U().to_owned());
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
