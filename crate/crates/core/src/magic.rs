//! Quantum magic squares, Birkhoff-von Neumann decomposition, and Naimark
//! dilation of POVMs.
//!
//! A quantum magic square is a `d x d` array of psd matrices whose rows and
//! columns are POVMs; at level 1 these are exactly the doubly stochastic
//! matrices, and quantum permutation matrices (PVM rows and columns) sit
//! over the permutation matrices.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::random::random_psd;
use crate::linalg::{eigh, is_psd, ComplexMatrix, HermitianMatrix};

/// Positive operator valued measure: psd effects summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    pub effects: Vec<HermitianMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianMatrix>, tol: f64) -> Result<Self> {
        let m = effects
            .first()
            .map(|e| e.dim())
            .ok_or_else(|| Error::InvalidInput("POVM needs at least one effect".into()))?;
        let mut sum = HermitianMatrix::zeros(m);
        for (i, e) in effects.iter().enumerate() {
            if e.dim() != m {
                return Err(Error::InvalidInput("effect sizes differ".into()));
            }
            if !is_psd(e, tol)? {
                return Err(Error::InvalidInput(format!("effect {i} is not psd")));
            }
            sum = sum.add(e);
        }
        let resid = sum.sub(&HermitianMatrix::identity(m)).frobenius_norm();
        if resid > 1e-8 * (m as f64).sqrt().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "effects sum to the identity only up to {resid:.3e}"
            )));
        }
        Ok(Self { effects })
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    /// Random `k`-outcome POVM on dimension `m`: Gram blocks normalised by
    /// the inverse square root of their sum.
    pub fn random(rng: &mut impl Rng, m: usize, k: usize) -> Result<Self> {
        let blocks: Vec<HermitianMatrix> = (0..k).map(|_| random_psd(rng, m)).collect();
        let sum = blocks.iter().fold(HermitianMatrix::zeros(m), |a, b| a.add(b));
        let eig = eigh(&sum)?;
        if eig.min_eigenvalue() <= 1e-10 {
            return Err(Error::NumericalDegeneracy("singular effect sum".into()));
        }
        let u = &eig.eigenvectors;
        let isqrt = ComplexMatrix::from_fn(m, m, |i, j| {
            (0..m)
                .map(|l| u.at(i, l) * (1.0 / eig.eigenvalues[l].sqrt()) * u.at(j, l).conj())
                .sum()
        });
        let effects = blocks
            .iter()
            .map(|g| {
                let t = &(&isqrt * g.as_matrix()) * &isqrt;
                HermitianMatrix::from_nearly_hermitian(t)
            })
            .collect::<Result<Vec<_>>>()?;
        Povm::new(effects, 1e-8)
    }
}

/// `d x d` array of psd matrices of size `s` with POVM rows and columns.
#[derive(Debug, Clone)]
pub struct QuantumMagicSquare {
    pub entries: Vec<Vec<HermitianMatrix>>,
}

impl QuantumMagicSquare {
    pub fn new(entries: Vec<Vec<HermitianMatrix>>) -> Result<Self> {
        let d = entries.len();
        if d == 0 || entries.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidInput("entries must form a square array".into()));
        }
        let s = entries[0][0].dim();
        if entries.iter().flatten().any(|e| e.dim() != s) {
            return Err(Error::InvalidInput("entry sizes differ".into()));
        }
        Ok(Self { entries })
    }

    /// Level-1 square from a real matrix.
    pub fn from_real(m: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            m.iter()
                .map(|row| row.iter().map(|&x| HermitianMatrix::diag(&[x])).collect())
                .collect(),
        )
    }

    /// Cyclic square from a PVM (or any POVM): entry `(i, j)` is effect
    /// `(i + j) mod d`, so each row and column runs through all effects.
    pub fn cyclic(effects: &[HermitianMatrix]) -> Result<Self> {
        let d = effects.len();
        Self::new(
            (0..d)
                .map(|i| (0..d).map(|j| effects[(i + j) % d].clone()).collect())
                .collect(),
        )
    }

    pub fn side(&self) -> usize {
        self.entries.len()
    }

    pub fn level(&self) -> usize {
        self.entries[0][0].dim()
    }
}

/// One failed invariant of a magic square.
#[derive(Debug, Clone)]
pub enum MagicViolation {
    EntryNotPsd { row: usize, col: usize, min_eigenvalue: f64 },
    RowSum { row: usize, residual: f64 },
    ColumnSum { col: usize, residual: f64 },
}

/// Validation report: valid iff no violations.
#[derive(Debug, Clone)]
pub struct MagicSquareReport {
    pub violations: Vec<MagicViolation>,
}

impl MagicSquareReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks psd entries and row/column sums against the identity (1e-8).
pub fn validate_magic_square(sq: &QuantumMagicSquare, tol: f64) -> Result<MagicSquareReport> {
    let d = sq.side();
    let s = sq.level();
    let id = HermitianMatrix::identity(s);
    let mut violations = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let lam = eigh(&sq.entries[i][j])?.min_eigenvalue();
            if lam < -tol.max(1e-9) * sq.entries[i][j].max_abs().max(1.0) {
                violations.push(MagicViolation::EntryNotPsd { row: i, col: j, min_eigenvalue: lam });
            }
        }
    }
    for i in 0..d {
        let sum = sq.entries[i].iter().fold(HermitianMatrix::zeros(s), |a, e| a.add(e));
        let resid = sum.sub(&id).frobenius_norm();
        if resid > 1e-8 {
            violations.push(MagicViolation::RowSum { row: i, residual: resid });
        }
    }
    for j in 0..d {
        let sum = (0..d).fold(HermitianMatrix::zeros(s), |a, i| a.add(&sq.entries[i][j]));
        let resid = sum.sub(&id).frobenius_norm();
        if resid > 1e-8 {
            violations.push(MagicViolation::ColumnSum { col: j, residual: resid });
        }
    }
    Ok(MagicSquareReport { violations })
}

/// A valid magic square is a quantum permutation matrix iff every entry is a
/// projection (`|t² - t|_F <= tol`); rows and columns are then PVMs.
pub fn is_quantum_permutation(sq: &QuantumMagicSquare, tol: f64) -> Result<bool> {
    for row in &sq.entries {
        for e in row {
            let sq_e = HermitianMatrix::from_nearly_hermitian(e.as_matrix() * e.as_matrix())?;
            if sq_e.sub(e).frobenius_norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Deterministic perfect matching on the support of `m` (entries above the
/// cutoff): augmenting paths with ascending column order.
fn support_matching(m: &[Vec<f64>], cutoff: f64) -> Option<Vec<usize>> {
    let d = m.len();
    let mut row_of_col = vec![usize::MAX; d];

    fn try_assign(
        m: &[Vec<f64>],
        cutoff: f64,
        row: usize,
        visited: &mut [bool],
        row_of_col: &mut [usize],
    ) -> bool {
        let d = m.len();
        for col in 0..d {
            if m[row][col] > cutoff && !visited[col] {
                visited[col] = true;
                if row_of_col[col] == usize::MAX
                    || try_assign(m, cutoff, row_of_col[col], visited, row_of_col)
                {
                    row_of_col[col] = row;
                    return true;
                }
            }
        }
        false
    }

    for row in 0..d {
        let mut visited = vec![false; d];
        if !try_assign(m, cutoff, row, &mut visited, &mut row_of_col) {
            return None;
        }
    }
    let mut col_of_row = vec![0usize; d];
    for (col, &row) in row_of_col.iter().enumerate() {
        col_of_row[row] = col;
    }
    Some(col_of_row)
}

/// Carathéodory pruning: while more than `(d-1)^2 + 1` permutations are in
/// play, an affine dependence among them is eliminated without changing the
/// reconstruction or making any weight negative.
fn caratheodory_prune(terms: &mut Vec<(f64, Vec<usize>)>, d: usize) -> Result<()> {
    let bound = (d - 1) * (d - 1) + 1;
    while terms.len() > bound {
        let t = terms.len();
        // rows of M: vec(P_i) followed by a 1 (affine coordinate)
        let dim = d * d + 1;
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(t);
        for (_, perm) in terms.iter() {
            let mut v = vec![0.0f64; dim];
            for (r, &c) in perm.iter().enumerate() {
                v[r * d + c] = 1.0;
            }
            v[dim - 1] = 1.0;
            cols.push(v);
        }
        let mut gram = vec![0.0f64; t * t];
        for i in 0..t {
            for j in i..t {
                let v: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                gram[i * t + j] = v;
                gram[j * t + i] = v;
            }
        }
        let (vals, vecs) = crate::linalg::jacobi_real_symmetric(t, &mut gram)?;
        let (kmin, &lmin) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let lmax = vals.iter().cloned().fold(0.0f64, f64::max);
        if lmin > 1e-18 * lmax.max(1.0) {
            // no numerically safe dependence; stop pruning
            return Ok(());
        }
        let mut gamma: Vec<f64> = (0..t).map(|i| vecs[i * t + kmin]).collect();
        let gmax = gamma.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if gmax <= 0.0 {
            for g in gamma.iter_mut() {
                *g = -*g;
            }
        }
        let step = terms
            .iter()
            .zip(&gamma)
            .filter(|(_, &g)| g > 1e-12)
            .map(|((w, _), &g)| w / g)
            .fold(f64::INFINITY, f64::min);
        if !step.is_finite() {
            return Ok(());
        }
        for ((w, _), &g) in terms.iter_mut().zip(&gamma) {
            *w -= step * g;
        }
        terms.retain(|(w, _)| *w > 1e-12);
    }
    Ok(())
}

/// Birkhoff-von Neumann decomposition of a doubly stochastic matrix into at
/// most `(d-1)^2 + 1` weighted permutations.
///
/// Greedy extraction: find a permutation in the support by bipartite
/// matching, subtract the minimal entry along it, repeat; a Carathéodory
/// step prunes any excess terms afterwards. Entries below `1e-12` count as
/// zero support. A permutation is reported as the column index per row.
pub fn birkhoff_decompose(matrix: &[Vec<f64>], tol: f64) -> Result<Vec<(f64, Vec<usize>)>> {
    let d = matrix.len();
    if d == 0 || matrix.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidInput("matrix must be square".into()));
    }
    for row in matrix {
        for &x in row {
            if !x.is_finite() || x < -tol {
                return Err(Error::InvalidInput("entries must be nonnegative".into()));
            }
        }
    }
    for i in 0..d {
        let rs: f64 = matrix[i].iter().sum();
        let cs: f64 = matrix.iter().map(|r| r[i]).sum();
        if (rs - 1.0).abs() > tol || (cs - 1.0).abs() > tol {
            return Err(Error::InvalidInput(format!(
                "matrix is not doubly stochastic (row {i} sum {rs}, column sum {cs})"
            )));
        }
    }

    let support_cutoff = 1e-12;
    let mut rem: Vec<Vec<f64>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| x.max(0.0)).collect())
        .collect();
    let mut terms: Vec<(f64, Vec<usize>)> = Vec::new();
    loop {
        let maxent = rem.iter().flatten().cloned().fold(0.0f64, f64::max);
        if maxent <= support_cutoff {
            break;
        }
        let Some(perm) = support_matching(&rem, support_cutoff) else {
            return Err(Error::InternalInconsistency(
                "no permutation in the support of a doubly stochastic remainder".into(),
            ));
        };
        let w = perm
            .iter()
            .enumerate()
            .map(|(r, &c)| rem[r][c])
            .fold(f64::INFINITY, f64::min);
        for (r, &c) in perm.iter().enumerate() {
            rem[r][c] -= w;
        }
        terms.push((w, perm));
        if terms.len() > d * d + 2 {
            return Err(Error::InternalInconsistency(
                "Birkhoff extraction did not terminate".into(),
            ));
        }
    }
    caratheodory_prune(&mut terms, d)?;
    Ok(terms)
}

/// Naimark dilation: a PVM `sigma_i = E_ii ⊗ I_m` on dimension `k * m`
/// together with the isometry `v` stacking the effect square roots, so that
/// `v† sigma_i v = tau_i`.
#[derive(Debug, Clone)]
pub struct NaimarkDilation {
    pub pvm: Vec<HermitianMatrix>,
    pub isometry: ComplexMatrix,
}

impl NaimarkDilation {
    pub fn dilation_dim(&self) -> usize {
        self.pvm[0].dim()
    }

    /// Worst residual over all dilation invariants.
    pub fn verify(&self, povm: &Povm) -> Result<f64> {
        let n = self.dilation_dim();
        let m = povm.dim();
        let v = &self.isometry;
        let gram = &v.adjoint() * v;
        let mut worst: f64 = (&gram - &ComplexMatrix::identity(m)).frobenius_norm();
        let mut sum = HermitianMatrix::zeros(n);
        for (i, p) in self.pvm.iter().enumerate() {
            let p2 = HermitianMatrix::from_nearly_hermitian(p.as_matrix() * p.as_matrix())?;
            worst = worst.max(p2.sub(p).frobenius_norm());
            for (j, q) in self.pvm.iter().enumerate() {
                if i != j {
                    worst = worst.max((p.as_matrix() * q.as_matrix()).frobenius_norm());
                }
            }
            let compressed = p.conjugate_by(v)?;
            worst = worst.max(compressed.sub(&povm.effects[i]).frobenius_norm());
            sum = sum.add(p);
        }
        worst = worst.max(sum.sub(&HermitianMatrix::identity(n)).frobenius_norm());
        Ok(worst)
    }
}

/// Square root of a psd effect; eigenvalues in `[-1e-10, 0)` are clipped to
/// zero, anything lower is rejected.
fn effect_sqrt(e: &HermitianMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(e)?;
    let floor = -1e-10 * e.max_abs().max(1.0);
    if eig.min_eigenvalue() < floor {
        return Err(Error::InvalidInput(format!(
            "effect has eigenvalue {:.3e}: not psd",
            eig.min_eigenvalue()
        )));
    }
    let m = e.dim();
    let u = &eig.eigenvectors;
    Ok(ComplexMatrix::from_fn(m, m, |i, j| {
        (0..m)
            .map(|l| u.at(i, l) * eig.eigenvalues[l].max(0.0).sqrt() * u.at(j, l).conj())
            .sum()
    }))
}

/// Explicit Naimark dilation of a POVM: `n = m * k`, `sigma_i = E_ii ⊗ I_m`,
/// `v` the column stack of the effect square roots.
pub fn naimark_dilate(povm: &Povm) -> Result<NaimarkDilation> {
    let m = povm.dim();
    let k = povm.outcomes();
    let n = m * k;
    let mut v = ComplexMatrix::zeros(n, m);
    for (i, e) in povm.effects.iter().enumerate() {
        let root = effect_sqrt(e)?;
        for r in 0..m {
            for c in 0..m {
                v.set(i * m + r, c, root.at(r, c));
            }
        }
    }
    let pvm = (0..k)
        .map(|i| {
            let mut p = ComplexMatrix::zeros(n, n);
            for r in 0..m {
                p.set(i * m + r, i * m + r, C64::new(1.0, 0.0));
            }
            HermitianMatrix::from_nearly_hermitian(p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NaimarkDilation { pvm, isometry: v })
}

/// Sinkhorn iteration: alternate row and column normalisation of a positive
/// random matrix until doubly stochastic.
pub fn sinkhorn_doubly_stochastic(rng: &mut impl Rng, d: usize, sweeps: usize) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.gen_range(0.05..1.0f64)).collect())
        .collect();
    for _ in 0..sweeps {
        for row in m.iter_mut() {
            let s: f64 = row.iter().sum();
            for x in row.iter_mut() {
                *x /= s;
            }
        }
        for j in 0..d {
            let s: f64 = m.iter().map(|r| r[j]).sum();
            for row in m.iter_mut() {
                row[j] /= s;
            }
        }
    }
    m
}
