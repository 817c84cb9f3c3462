//! Random matrix generators for heuristic searches and tests.
//!
//! Everything is driven by a caller-supplied RNG so that multi-start
//! searches stay reproducible under a single seed.

use num_complex::Complex64 as C64;
use rand::Rng;

use super::eigen::eigh;
use super::matrix::{ComplexMatrix, HermitianMatrix};

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let g = random_complex(rng, n, n);
    HermitianMatrix::from_nearly_hermitian(g.hermitian_part()).expect("finite by construction")
}

/// Gram matrix `G G†`, psd by construction.
pub fn random_psd(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let g = random_complex(rng, n, n);
    HermitianMatrix::from_nearly_hermitian(&g * &g.adjoint()).expect("finite by construction")
}

/// Random unit vector in `C^n`.
pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-3 {
            return v.into_iter().map(|z| z / nrm).collect();
        }
    }
}

/// Haar-ish random unitary: eigenvector matrix of a random Hermitian.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, n);
    eigh(&h).expect("random Hermitian diagonalises").eigenvectors
}

/// Random density matrix (psd, unit trace).
pub fn random_state(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let g = random_psd(rng, n);
    let t = g.trace();
    g.scale(1.0 / t)
}
