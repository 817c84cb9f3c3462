//! Hermitian eigendecomposition via cyclic Jacobi.
//!
//! A Hermitian matrix `H = A + iB` embeds into the real symmetric matrix
//! `[[A, -B], [B, A]]` of twice the size; every eigenvalue of `H` appears
//! twice in the embedding and the paired real eigenvectors `(x; y)`,
//! `(-y; x)` both map to the complex eigenvector `x + iy` up to phase. We
//! diagonalise the embedding with cyclic Jacobi sweeps and deduplicate the
//! pairs by complex Gram-Schmidt.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, HermitianMatrix};

/// Result of [`eigh`]: eigenvalues ascending, eigenvectors as unitary columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Rebuilds `U diag(lambda) U†`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| u.at(i, k) * self.eigenvalues[k] * u.at(j, k).conj())
                .sum()
        });
        HermitianMatrix::from_nearly_hermitian(m).expect("reconstruction is square and finite")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Cyclic Jacobi diagonalisation of a dense real symmetric matrix.
///
/// Returns the eigenvalues (unsorted, as left on the diagonal) and the
/// accumulated orthogonal matrix `V` (row-major, eigenvectors in columns)
/// with `A = V diag(d) V^T`.
pub fn jacobi_real_symmetric(n: usize, a: &mut [f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    assert_eq!(a.len(), n * n);
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n == 1 {
        return Ok((vec![a[0]], v));
    }
    let scale = {
        let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        frob.max(f64::MIN_POSITIVE)
    };
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        s.sqrt()
    };
    let stop = 1e-14 * scale;
    let mut converged = false;
    for _sweep in 0..100 {
        if off(a) <= stop {
            converged = true;
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- J^T A J with J[p][q] = s, J[q][p] = -s.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(a) > 1e-11 * scale {
        return Err(Error::NumericalDegeneracy(
            "Jacobi iteration did not converge".into(),
        ));
    }
    let d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    Ok((d, v))
}

/// Hermitian eigendecomposition. Eigenvalues ascending, eigenvectors unitary.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h.at(i, j);
            a[i * m + j] = z.re;
            a[i * m + (n + j)] = -z.im;
            a[(n + i) * m + j] = z.im;
            a[(n + i) * m + (n + j)] = z.re;
        }
    }
    let (d, v) = jacobi_real_symmetric(m, &mut a)?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());

    // Each eigenvalue of H shows up twice; keep one complex vector per pair.
    let mut values: Vec<f64> = Vec::with_capacity(n);
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &k in &order {
        if values.len() == n {
            break;
        }
        let mut cand: Vec<C64> = (0..n)
            .map(|i| C64::new(v[i * m + k], v[(n + i) * m + k]))
            .collect();
        // Two Gram-Schmidt passes against the accepted vectors.
        for _ in 0..2 {
            for u in &vectors {
                let proj: C64 = u.iter().zip(cand.iter()).map(|(a, b)| a.conj() * b).sum();
                for (ci, ui) in cand.iter_mut().zip(u.iter()) {
                    *ci -= proj * ui;
                }
            }
        }
        let nrm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.25 {
            for z in cand.iter_mut() {
                *z /= nrm;
            }
            values.push(d[k]);
            vectors.push(cand);
        }
    }
    if values.len() < n {
        return Err(Error::NumericalDegeneracy(
            "failed to extract a full complex eigenbasis from the real embedding".into(),
        ));
    }
    let u = ComplexMatrix::from_fn(n, n, |i, j| vectors[j][i]);
    Ok(EigenDecomposition { eigenvalues: values, eigenvectors: u })
}
