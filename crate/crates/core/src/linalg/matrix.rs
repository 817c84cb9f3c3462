//! Dense complex matrices and the Hermitian carrier type.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::HERMITIAN_CONSTRUCTION_TOL;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows of `(re, im)` pairs.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidInput("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.iter().flatten().copied().collect() })
    }

    /// Real matrix from an `f64` grid.
    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// The elementary matrix `E_ij` (1 in position `(i, j)`, 0 elsewhere).
    pub fn elementary(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, C64::new(1.0, 0.0));
        m
    }

    /// Column vector from complex entries.
    pub fn column(entries: &[C64]) -> Self {
        Self { rows: entries.len(), cols: 1, data: entries.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_assign_at(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Trace inner product `tr(self† other)`.
    pub fn trace_inner(&self, other: &Self) -> C64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += aik * other.at(k, j);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    /// Extracts column `j`.
    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    /// Hermitian part `(M + M†)/2` of a square matrix.
    pub fn hermitian_part(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.at(i, j) + self.at(j, i).conj()) * 0.5
        })
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.at(i, j));
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.at(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

/// Complex square matrix with enforced Hermitian symmetry.
///
/// Construction checks that the input is Hermitian up to
/// [`HERMITIAN_CONSTRUCTION_TOL`] and then symmetrises exactly, so stored data
/// always satisfies `m[i][j] == conj(m[j][i])` bit-for-bit and real diagonal.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
}

impl HermitianMatrix {
    /// Validating constructor: rejects non-square, non-finite or visibly
    /// asymmetric input, then symmetrises.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() == 0 {
            return Err(Error::InvalidInput("Hermitian matrix needs dim >= 1".into()));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("non-finite entries".into()));
        }
        let scale = m.max_abs().max(1.0);
        let asym = m.asymmetry();
        if asym > HERMITIAN_CONSTRUCTION_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "asymmetry {asym:.3e} exceeds construction tolerance"
            )));
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrises without the asymmetry check. For matrices that are
    /// Hermitian by construction up to roundoff.
    pub fn from_nearly_hermitian(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::InvalidInput("square matrix with dim >= 1 required".into()));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("non-finite entries".into()));
        }
        Ok(Self::symmetrize(m))
    }

    fn symmetrize(m: ComplexMatrix) -> Self {
        let n = m.rows();
        let mut out = m;
        for i in 0..n {
            let d = out.at(i, i);
            out.set(i, i, C64::new(d.re, 0.0));
            for j in (i + 1)..n {
                let avg = (out.at(i, j) + out.at(j, i).conj()) * 0.5;
                out.set(i, j, avg);
                out.set(j, i, avg.conj());
            }
        }
        Self { m: out }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: ComplexMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: ComplexMatrix::identity(n) }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, C64::new(x, 0.0));
        }
        Self { m }
    }

    /// Real-symmetric input.
    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.m.at(i, j)
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { m: &self.m - &other.m }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.scale_re(s) }
    }

    /// Real linear combination of Hermitian matrices.
    pub fn lincomb(terms: &[(f64, &Self)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, h)| h.dim())
            .ok_or_else(|| Error::InvalidInput("empty linear combination".into()))?;
        let mut acc = ComplexMatrix::zeros(n, n);
        for (c, h) in terms {
            if h.dim() != n {
                return Err(Error::InvalidInput("lincomb dimension mismatch".into()));
            }
            acc = &acc + &h.m.scale_re(*c);
        }
        Ok(Self::symmetrize(acc))
    }

    /// Real trace inner product `tr(self · other)`.
    pub fn trace_inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.m.trace_inner(&other.m).re
    }

    /// Compression `v† H v`, Hermitian by construction.
    pub fn conjugate_by(&self, v: &ComplexMatrix) -> Result<Self> {
        if v.rows() != self.dim() {
            return Err(Error::InvalidInput("conjugation dimension mismatch".into()));
        }
        let product = &v.adjoint() * &(&self.m * v);
        Self::from_nearly_hermitian(product)
    }

    /// Quadratic form `x† H x` (real for Hermitian `H`).
    pub fn quadratic_form(&self, x: &[C64]) -> f64 {
        let hx = self.m.matvec(x);
        x.iter().zip(hx.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_rejects_asymmetric() {
        let m = ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn constructor_symmetrizes_exactly() {
        let eps = 1e-14;
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, eps), C64::new(0.5, 0.3)],
            vec![C64::new(0.5, -0.3 + eps), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.at(0, 0).im, 0.0);
        assert_eq!(h.at(0, 1), h.at(1, 0).conj());
    }

    #[test]
    fn constructor_rejects_nonfinite() {
        let m = ComplexMatrix::from_real(&[vec![f64::NAN]]).unwrap();
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn matmul_identity() {
        let a = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0)],
            vec![C64::new(0.0, 1.0), C64::new(3.0, -1.0)],
        ])
        .unwrap();
        let i = ComplexMatrix::identity(2);
        assert_eq!(a.matmul(&i), a);
    }

    #[test]
    fn adjoint_involution() {
        let a = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.7)],
            vec![C64::new(0.0, 1.0), C64::new(3.0, -1.0)],
        ])
        .unwrap();
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn trace_inner_is_real_for_hermitian() {
        let h = HermitianMatrix::from_real(&[vec![1.0, 0.25], vec![0.25, -2.0]]).unwrap();
        let g = HermitianMatrix::from_real(&[vec![0.5, -1.0], vec![-1.0, 0.0]]).unwrap();
        let z = h.as_matrix().trace_inner(g.as_matrix());
        assert!(z.im.abs() < 1e-15);
        assert!((h.trace_inner(&g) - (0.5 - 0.5)).abs() < 1e-12);
    }
}
