//! Tensor-product structure: Kronecker products, partial trace and
//! transpose, realignment, psd tests.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

use super::eigen::eigh;
use super::matrix::{ComplexMatrix, HermitianMatrix};
use super::KRON_DIM_CAP;

/// Kronecker product with an explicit output-dimension cap.
pub fn kron_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("non-finite entries in kron".into()));
    }
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => {
            let mut out = ComplexMatrix::zeros(r, c);
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    let aij = a.at(i, j);
                    if aij == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..b.rows() {
                        for l in 0..b.cols() {
                            out.set(i * b.rows() + k, j * b.cols() + l, aij * b.at(k, l));
                        }
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::SizeLimit(format!(
            "kron output would exceed the {cap} dimension cap"
        ))),
    }
}

/// Kronecker product with the default cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_cap(a, b, KRON_DIM_CAP)
}

/// Kronecker product of Hermitian matrices (Hermitian again).
pub fn kron_hermitian(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    HermitianMatrix::from_nearly_hermitian(kron(a.as_matrix(), b.as_matrix())?)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(h)?.min_eigenvalue())
}

/// Positive semidefiniteness at relative tolerance `tol`:
/// `lambda_min >= -tol * max(1, max |lambda|)`.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> Result<bool> {
    if tol < 0.0 {
        return Err(Error::InvalidInput("psd tolerance must be nonnegative".into()));
    }
    let eig = eigh(h)?;
    let lo = eig.min_eigenvalue();
    let hi = eig.max_eigenvalue();
    let scale = lo.abs().max(hi.abs()).max(1.0);
    Ok(lo >= -tol * scale)
}

/// Cholesky-based psd test for dimensions where a full eigendecomposition
/// is too expensive: `H + shift I` with `shift = tol * max(1, |H|_max)` is
/// factored; success certifies `lambda_min >= -shift`.
pub fn is_psd_cholesky(h: &HermitianMatrix, tol: f64) -> bool {
    let n = h.dim();
    let shift = tol.max(0.0) * h.max_abs().max(1.0) + 1e-14 * h.max_abs();
    let mut a: Vec<C64> = h.as_matrix().data().to_vec();
    for i in 0..n {
        a[i * n + i] += C64::new(shift, 0.0);
    }
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= a[j * n + k].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = C64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = v / d;
        }
    }
    true
}

fn mixed_radix(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0usize; dims.len()];
    for k in (0..dims.len()).rev() {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    idx
}

fn flatten(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims.iter()).fold(0usize, |acc, (i, d)| acc * d + i)
}

/// Partial trace over the tensor factor `site` (0-based) of a matrix on
/// `⊗_j Mat_{dims[j]}`.
pub fn partial_trace(
    m: &HermitianMatrix,
    dims: &[usize],
    site: usize,
) -> Result<HermitianMatrix> {
    let total: usize = dims.iter().product();
    if total != m.dim() || dims.is_empty() {
        return Err(Error::InvalidInput(format!(
            "dims product {total} does not match matrix dim {}",
            m.dim()
        )));
    }
    if site >= dims.len() {
        return Err(Error::InvalidInput(format!("site {site} out of range")));
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|&j| j != site).collect();
    let out_dims: Vec<usize> = kept.iter().map(|&j| dims[j]).collect();
    let out_dim: usize = out_dims.iter().product::<usize>().max(1);

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        let r_idx = mixed_radix(r, &out_dims);
        for c in 0..out_dim {
            let c_idx = mixed_radix(c, &out_dims);
            let mut acc = C64::new(0.0, 0.0);
            let mut row_full = vec![0usize; dims.len()];
            let mut col_full = vec![0usize; dims.len()];
            for (pos, &j) in kept.iter().enumerate() {
                row_full[j] = r_idx[pos];
                col_full[j] = c_idx[pos];
            }
            for k in 0..dims[site] {
                row_full[site] = k;
                col_full[site] = k;
                acc += m.at(flatten(&row_full, dims), flatten(&col_full, dims));
            }
            out.set(r, c, acc);
        }
    }
    HermitianMatrix::from_nearly_hermitian(out)
}

/// Partial transpose on the second factor: `A ⊗ B -> A ⊗ B^T`, extended
/// linearly, for a matrix on `Mat_d ⊗ Mat_s`.
pub fn partial_transpose(m: &HermitianMatrix, d: usize, s: usize) -> Result<HermitianMatrix> {
    if d * s != m.dim() {
        return Err(Error::InvalidInput(format!(
            "{}x{} is not {d}*{s}",
            m.dim(),
            m.dim()
        )));
    }
    let out = ComplexMatrix::from_fn(d * s, d * s, |row, col| {
        let (i, k) = (row / s, row % s);
        let (j, l) = (col / s, col % s);
        m.at(i * s + l, j * s + k)
    });
    HermitianMatrix::from_nearly_hermitian(out)
}

/// Realignment of a matrix on `Mat_d ⊗ Mat_s`: the `d² x s²` matrix with
/// `R[(i,j),(k,l)] = M[(i,k),(j,l)]`. Its rank is the operator Schmidt rank.
pub fn realign(m: &HermitianMatrix, d: usize, s: usize) -> Result<ComplexMatrix> {
    if d * s != m.dim() {
        return Err(Error::InvalidInput(format!(
            "{}x{} is not {d}*{s}",
            m.dim(),
            m.dim()
        )));
    }
    Ok(ComplexMatrix::from_fn(d * d, s * s, |row, col| {
        let (i, j) = (row / d, row % d);
        let (k, l) = (col / s, col % s);
        m.at(i * s + k, j * s + l)
    }))
}
