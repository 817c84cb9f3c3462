//! Matrix product density operators: dense expansion, transfer-operator
//! moments, translation-invariant positivity scans, and purification-rank
//! bounds.
//!
//! The cyclic form is `rho = sum rho^(1)_{i1,i2} ⊗ ... ⊗ rho^(n)_{in,i1}`
//! with bond indices of dimension `r`. Moments `tr(rho^k)` only need local
//! matrix products, assembled into per-site transfer matrices of size `r^k`,
//! so they remain computable far beyond the dense cap.

mod polybound;

pub use polybound::{
    poly_bound, psd_distance_bounds, BoundSide, MomentVector, PolyBound,
};

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::random::random_hermitian;
use crate::linalg::{eigh, is_psd_cholesky, kron_with_cap, realign, svd, ComplexMatrix, HermitianMatrix};

/// Dense-expansion cap on the physical dimension product.
pub const DENSE_DIM_CAP: usize = 4096;

/// Transfer-matrix cap: `r^k` must stay at or below this.
pub const TRANSFER_DIM_CAP: usize = 4096;

/// Cyclic matrix product density operator form.
#[derive(Debug, Clone)]
pub struct Mpdo {
    pub site_count: usize,
    pub bond_dim: usize,
    pub phys_dims: Vec<usize>,
    /// `tensors[site][i * bond_dim + j]` is the `d_site x d_site` block
    /// `rho^(site)_{i,j}`.
    tensors: Vec<Vec<ComplexMatrix>>,
}

impl Mpdo {
    pub fn new(
        bond_dim: usize,
        phys_dims: Vec<usize>,
        tensors: Vec<Vec<ComplexMatrix>>,
    ) -> Result<Self> {
        let n = phys_dims.len();
        if n == 0 || bond_dim == 0 {
            return Err(Error::InvalidInput("empty chain or zero bond dimension".into()));
        }
        if tensors.len() != n {
            return Err(Error::InvalidInput("one tensor per site required".into()));
        }
        for (j, site) in tensors.iter().enumerate() {
            if site.len() != bond_dim * bond_dim {
                return Err(Error::InvalidInput(format!(
                    "site {j} needs {} blocks",
                    bond_dim * bond_dim
                )));
            }
            for b in site {
                if b.rows() != phys_dims[j] || b.cols() != phys_dims[j] {
                    return Err(Error::InvalidInput(format!(
                        "site {j} blocks must be {0}x{0}",
                        phys_dims[j]
                    )));
                }
                if !b.is_finite() {
                    return Err(Error::InvalidInput("non-finite block entry".into()));
                }
            }
        }
        Ok(Self { site_count: n, bond_dim, phys_dims, tensors })
    }

    #[inline]
    pub fn block(&self, site: usize, i: usize, j: usize) -> &ComplexMatrix {
        &self.tensors[site][i * self.bond_dim + j]
    }

    pub fn dense_dim(&self) -> usize {
        self.phys_dims.iter().product()
    }

    /// Random MPDO with Hermitian blocks (hence a Hermitian dense form).
    pub fn random_hermitian(rng: &mut impl Rng, n: usize, r: usize, d: usize) -> Self {
        let tensors: Vec<Vec<ComplexMatrix>> = (0..n)
            .map(|_| {
                (0..r * r)
                    .map(|_| random_hermitian(rng, d).scale(1.0 / r as f64).into_matrix())
                    .collect()
            })
            .collect();
        Self::new(r, vec![d; n], tensors).expect("consistent by construction")
    }
}

/// Result of a dense expansion; the matrix need not be Hermitian for
/// arbitrary local blocks, so Hermiticity is checked and reported.
#[derive(Debug, Clone)]
pub struct DenseExpansion {
    pub matrix: ComplexMatrix,
    pub is_hermitian: bool,
}

impl DenseExpansion {
    /// The Hermitian view; fails when the expansion is not Hermitian.
    pub fn hermitian(&self) -> Result<HermitianMatrix> {
        if !self.is_hermitian {
            return Err(Error::InvalidInput("dense expansion is not Hermitian".into()));
        }
        HermitianMatrix::from_nearly_hermitian(self.matrix.clone())
    }
}

/// Dense expansion by iterative bond contraction; capped at
/// [`DENSE_DIM_CAP`].
pub fn mpdo_to_dense(m: &Mpdo) -> Result<DenseExpansion> {
    let total = m.dense_dim();
    if total > DENSE_DIM_CAP {
        return Err(Error::SizeLimit(format!(
            "dense dimension {total} exceeds the {DENSE_DIM_CAP} cap"
        )));
    }
    let r = m.bond_dim;
    // carry[i1 * r + ik]: partial product over sites 0..j with open bonds
    let mut carry: Vec<ComplexMatrix> = (0..r * r)
        .map(|idx| m.block(0, idx / r, idx % r).clone())
        .collect();
    for site in 1..m.site_count {
        let d_new = carry[0].rows() * m.phys_dims[site];
        let mut next: Vec<ComplexMatrix> =
            (0..r * r).map(|_| ComplexMatrix::zeros(d_new, d_new)).collect();
        for i1 in 0..r {
            for mid in 0..r {
                let left = &carry[i1 * r + mid];
                if left.max_abs() == 0.0 {
                    continue;
                }
                for inext in 0..r {
                    let prod = kron_with_cap(left, m.block(site, mid, inext), DENSE_DIM_CAP)?;
                    next[i1 * r + inext] = &next[i1 * r + inext] + &prod;
                }
            }
        }
        carry = next;
    }
    let mut dense = ComplexMatrix::zeros(total, total);
    for i in 0..r {
        dense = &dense + &carry[i * r + i];
    }
    let is_hermitian = dense.asymmetry() <= 1e-10 * dense.max_abs().max(1.0);
    Ok(DenseExpansion { matrix: dense, is_hermitian })
}

fn decode_base(mut idx: usize, base: usize, digits: usize) -> Vec<usize> {
    let mut out = vec![0usize; digits];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

/// Per-site transfer matrix of order `k`: entries
/// `tr(rho_{i1,j1} rho_{i2,j2} ... rho_{ik,jk})` indexed by the bond
/// multi-indices `(i1..ik)` and `(j1..jk)`.
fn site_transfer(m: &Mpdo, site: usize, k: usize, dim: usize) -> ComplexMatrix {
    let r = m.bond_dim;
    ComplexMatrix::from_fn(dim, dim, |row, col| {
        let is = decode_base(row, r, k);
        let js = decode_base(col, r, k);
        let mut prod = m.block(site, is[0], js[0]).clone();
        for l in 1..k {
            prod = &prod * m.block(site, is[l], js[l]);
        }
        prod.trace()
    })
}

/// Moment `tr(rho^k)` from the cyclic product of per-site transfer
/// matrices; never materialises the dense operator.
pub fn mpdo_moments(m: &Mpdo, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(m.dense_dim() as f64);
    }
    let dim = m
        .bond_dim
        .checked_pow(k as u32)
        .filter(|&d| d <= TRANSFER_DIM_CAP)
        .ok_or_else(|| {
            Error::SizeLimit(format!(
                "transfer dimension r^k = {}^{k} exceeds the {TRANSFER_DIM_CAP} cap",
                m.bond_dim
            ))
        })?;
    let mut prod = site_transfer(m, 0, k, dim);
    for site in 1..m.site_count - 1 {
        prod = &prod * &site_transfer(m, site, k, dim);
    }
    let value: C64 = if m.site_count == 1 {
        prod.trace()
    } else {
        let last = site_transfer(m, m.site_count - 1, k, dim);
        // tr(P L) without forming the product
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += prod.at(i, j) * last.at(j, i);
            }
        }
        acc
    };
    if value.im.abs() > 1e-8 * (1.0 + value.re.abs()) {
        return Err(Error::InternalInconsistency(format!(
            "moment has imaginary part {:.3e}; the MPDO does not represent a Hermitian operator",
            value.im
        )));
    }
    Ok(value.re)
}

/// Translation-invariant block tensor `(rho_{a,b})_{a,b<=r}` with
/// `d x d` blocks.
#[derive(Debug, Clone)]
pub struct TiTensor {
    pub bond_dim: usize,
    pub phys_dim: usize,
    blocks: Vec<ComplexMatrix>,
}

impl TiTensor {
    pub fn new(bond_dim: usize, phys_dim: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != bond_dim * bond_dim {
            return Err(Error::InvalidInput("need r*r blocks".into()));
        }
        if blocks
            .iter()
            .any(|b| b.rows() != phys_dim || b.cols() != phys_dim || !b.is_finite())
        {
            return Err(Error::InvalidInput("blocks must be finite d x d".into()));
        }
        Ok(Self { bond_dim, phys_dim, blocks })
    }

    pub fn block(&self, a: usize, b: usize) -> &ComplexMatrix {
        &self.blocks[a * self.bond_dim + b]
    }

    /// Rank-one chain (`r = 1`) from a single block.
    pub fn rank_one(block: ComplexMatrix) -> Result<Self> {
        let d = block.rows();
        Self::new(1, d, vec![block])
    }

    pub fn random_hermitian(rng: &mut impl Rng, r: usize, d: usize) -> Self {
        let blocks = (0..r * r)
            .map(|_| random_hermitian(rng, d).scale(1.0 / r as f64).into_matrix())
            .collect();
        Self::new(r, d, blocks).expect("consistent by construction")
    }

    /// The uniform chain of length `n` as an [`Mpdo`].
    pub fn chain(&self, n: usize) -> Mpdo {
        Mpdo::new(
            self.bond_dim,
            vec![self.phys_dim; n],
            (0..n).map(|_| self.blocks.clone()).collect(),
        )
        .expect("consistent by construction")
    }
}

/// Dense `tau_n`: the cyclic `n`-fold contraction of the block tensor.
pub fn tau_n(t: &TiTensor, n: usize) -> Result<DenseExpansion> {
    if n == 0 {
        return Err(Error::InvalidInput("tau_n needs n >= 1".into()));
    }
    mpdo_to_dense(&t.chain(n))
}

/// Per-`n` verdict of the bounded positivity scan.
#[derive(Debug, Clone)]
pub struct TauVerdict {
    pub n: usize,
    /// `Some(v)` when decidable within the caps; dense verdicts are exact,
    /// a `false` beyond the dense cap comes from a negative odd moment.
    pub psd: Option<bool>,
    /// Smallest eigenvalue when the dense route was taken.
    pub min_eigenvalue: Option<f64>,
}

/// Bounded-`n` positivity scan report.
///
/// Evidence for the scanned sizes only; positivity for all `n` is not
/// decidable and is never claimed.
#[derive(Debug, Clone)]
pub struct TauScanReport {
    pub verdicts: Vec<TauVerdict>,
    /// Always true: the scan is evidence up to `n_max`, not a proof for
    /// all system sizes.
    pub bounded_evidence: bool,
}

/// Dimension up to which the dense verdict also reports the smallest
/// eigenvalue through the eigensolver; beyond it a Cholesky factorisation
/// decides positivity without the spectrum.
pub const EIGH_DIM_CAP: usize = 256;

/// Scans `tau_n` positivity for `n = 1..=n_max`: dense verdicts within the
/// cap (eigenvalues when small, Cholesky beyond [`EIGH_DIM_CAP`]), a
/// negative odd-moment certificate past the dense cap.
pub fn tau_psd_scan(t: &TiTensor, n_max: usize, tol: f64) -> Result<TauScanReport> {
    let mut verdicts = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let dense_size = (t.phys_dim as f64).powi(n as i32);
        if dense_size <= DENSE_DIM_CAP as f64 {
            let dense = tau_n(t, n)?;
            if !dense.is_hermitian {
                verdicts.push(TauVerdict { n, psd: Some(false), min_eigenvalue: None });
                continue;
            }
            let h = dense.hermitian()?;
            if h.dim() > EIGH_DIM_CAP {
                verdicts.push(TauVerdict {
                    n,
                    psd: Some(is_psd_cholesky(&h, tol.max(1e-12))),
                    min_eigenvalue: None,
                });
                continue;
            }
            let lam = eigh(&h)?.min_eigenvalue();
            let scale = h.max_abs().max(1.0);
            verdicts.push(TauVerdict {
                n,
                psd: Some(lam >= -tol.max(1e-12) * scale),
                min_eigenvalue: Some(lam),
            });
        } else {
            // moment evidence: tr(tau^k) < 0 for odd k rules out psd
            let chain = t.chain(n);
            let mut verdict = None;
            for k in [1usize, 3] {
                if (t.bond_dim as f64).powi(k as i32) > TRANSFER_DIM_CAP as f64 {
                    break;
                }
                let mk = mpdo_moments(&chain, k)?;
                let m2 = mpdo_moments(&chain, 2)?;
                if mk < -1e-12 * m2.powf(k as f64 / 2.0).max(1e-300) {
                    verdict = Some(false);
                    break;
                }
            }
            verdicts.push(TauVerdict { n, psd: verdict, min_eigenvalue: None });
        }
    }
    Ok(TauScanReport { verdicts, bounded_evidence: true })
}

/// Purification-rank bounds across a `d ⊗ s` cut.
#[derive(Debug, Clone)]
pub struct PurificationBounds {
    pub lower: usize,
    pub upper: usize,
    /// The canonical purification `xi = rho^{1/2}`.
    pub canonical: HermitianMatrix,
}

/// Bounds the purification rank of a psd `rho`: the canonical square root
/// `xi = rho^{1/2}` gives `purRank <= osr(xi)`, and `osr(rho) <= purRank²`
/// gives the lower bound `ceil(sqrt(osr(rho)))`.
pub fn purification_bounds(
    rho: &HermitianMatrix,
    d: usize,
    s: usize,
    tol: f64,
) -> Result<PurificationBounds> {
    if d * s != rho.dim() {
        return Err(Error::InvalidInput("cut does not match the dimension".into()));
    }
    let eig = eigh(rho)?;
    let scale = rho.max_abs().max(1.0);
    if eig.min_eigenvalue() < -tol.max(1e-9) * scale {
        return Err(Error::PreconditionViolation(format!(
            "state is not psd (lambda_min = {:.3e})",
            eig.min_eigenvalue()
        )));
    }
    let n = rho.dim();
    let u = &eig.eigenvectors;
    let root = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| u.at(i, k) * eig.eigenvalues[k].max(0.0).sqrt() * u.at(j, k).conj())
            .sum()
    });
    let xi = HermitianMatrix::from_nearly_hermitian(root)?;
    let osr_xi = svd(&realign(&xi, d, s)?)?.rank(1e-9);
    let osr_rho = svd(&realign(rho, d, s)?)?.rank(1e-9);
    let lower = (osr_rho as f64).sqrt().ceil() as usize;
    if lower > osr_xi {
        return Err(Error::InternalInconsistency(format!(
            "purification bounds crossed: lower {lower} > upper {osr_xi}"
        )));
    }
    Ok(PurificationBounds { lower, upper: osr_xi, canonical: xi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::linalg::random::random_psd;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_chain_is_a_kronecker_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 3);
        let m = Mpdo::new(
            1,
            vec![2, 3],
            vec![vec![a.as_matrix().clone()], vec![b.as_matrix().clone()]],
        )
        .unwrap();
        let dense = mpdo_to_dense(&m).unwrap();
        assert!(dense.is_hermitian);
        assert_eq!(dense.matrix.rows(), 6);
        let expected = kron(a.as_matrix(), b.as_matrix()).unwrap();
        assert!((&dense.matrix - &expected).frobenius_norm() < 1e-13);
    }

    #[test]
    fn dense_matches_brute_force_index_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let (n, r, d) = (3, 2, 2);
        let m = Mpdo::random_hermitian(&mut rng, n, r, d);
        let dense = mpdo_to_dense(&m).unwrap();
        // brute force over all bond cycles
        let total = d * d * d;
        let mut acc = ComplexMatrix::zeros(total, total);
        for i1 in 0..r {
            for i2 in 0..r {
                for i3 in 0..r {
                    let t = kron(
                        &kron(m.block(0, i1, i2), m.block(1, i2, i3)).unwrap(),
                        m.block(2, i3, i1),
                    )
                    .unwrap();
                    acc = &acc + &t;
                }
            }
        }
        assert!((&dense.matrix - &acc).frobenius_norm() < 1e-12);
    }

    #[test]
    fn moments_match_dense_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for r in 1..=3usize {
            let m = Mpdo::random_hermitian(&mut rng, 4, r, 2);
            let dense = mpdo_to_dense(&m).unwrap().hermitian().unwrap();
            let eig = eigh(&dense).unwrap();
            for k in 1..=4usize {
                let direct: f64 = eig.eigenvalues.iter().map(|l| l.powi(k as i32)).sum();
                let via_transfer = mpdo_moments(&m, k).unwrap();
                let scale = 1.0 + direct.abs();
                assert!(
                    (via_transfer - direct).abs() < 1e-9 * scale,
                    "r={r} k={k}: {via_transfer} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn product_mpdo_moments_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let sites: Vec<HermitianMatrix> = (0..3).map(|_| random_hermitian(&mut rng, 2)).collect();
        let m = Mpdo::new(
            1,
            vec![2; 3],
            sites.iter().map(|h| vec![h.as_matrix().clone()]).collect(),
        )
        .unwrap();
        for k in 1..=3usize {
            let expected: f64 = sites
                .iter()
                .map(|h| {
                    eigh(h).unwrap().eigenvalues.iter().map(|l| l.powi(k as i32)).sum::<f64>()
                })
                .product();
            let got = mpdo_moments(&m, k).unwrap();
            assert!((got - expected).abs() < 1e-10 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn rank_one_tau_follows_eigenvalue_parity() {
        // psd block: psd for every n
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let mu = random_psd(&mut rng, 2);
        let t = TiTensor::rank_one(mu.as_matrix().clone()).unwrap();
        let scan = tau_psd_scan(&t, 6, 1e-9).unwrap();
        assert!(scan.bounded_evidence);
        for v in &scan.verdicts {
            assert_eq!(v.psd, Some(true), "n = {}", v.n);
        }

        // negated psd block: the tensor-power eigenvalues carry the global
        // sign (-1)^n, so tau_n is psd exactly for even n
        let mut rng2 = ChaCha8Rng::seed_from_u64(79);
        let nu = random_psd(&mut rng2, 2);
        let t = TiTensor::rank_one(nu.scale(-1.0).into_matrix()).unwrap();
        let scan = tau_psd_scan(&t, 7, 1e-9).unwrap();
        for v in &scan.verdicts {
            assert_eq!(v.psd, Some(v.n % 2 == 0), "n = {}", v.n);
        }

        // an indefinite block like diag(1, -1) is never psd: some product
        // of eigenvalues picks an odd number of -1 factors at every n
        let t = TiTensor::rank_one(HermitianMatrix::diag(&[1.0, -1.0]).into_matrix()).unwrap();
        let scan = tau_psd_scan(&t, 6, 1e-9).unwrap();
        for v in &scan.verdicts {
            assert_eq!(v.psd, Some(false), "n = {}", v.n);
        }
    }

    #[test]
    fn tau_scan_matches_dense_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(75);
        let t = TiTensor::random_hermitian(&mut rng, 2, 2);
        let scan = tau_psd_scan(&t, 5, 1e-9).unwrap();
        for v in &scan.verdicts {
            let dense = tau_n(&t, v.n).unwrap().hermitian().unwrap();
            let lam = eigh(&dense).unwrap().min_eigenvalue();
            assert_eq!(v.psd, Some(lam >= -1e-9 * dense.max_abs().max(1.0)));
        }
    }

    #[test]
    fn tau_beyond_dense_cap_uses_moment_evidence() {
        // d = 12 caps the dense route at n = 3 (12^4 > 4096)
        let mut rng = ChaCha8Rng::seed_from_u64(76);
        let mu = random_psd(&mut rng, 12);
        let t = TiTensor::rank_one(mu.as_matrix().clone()).unwrap();
        let scan = tau_psd_scan(&t, 4, 1e-9).unwrap();
        assert_eq!(scan.verdicts[2].psd, Some(true), "n = 3 via dense Cholesky");
        assert_eq!(scan.verdicts[3].min_eigenvalue, None);
        // psd chain: no negative odd moment, so the verdict stays open
        assert_eq!(scan.verdicts[3].psd, None);

        // a clearly negative direction: mu = -I, odd n
        let t = TiTensor::rank_one(HermitianMatrix::identity(12).scale(-1.0).into_matrix())
            .unwrap();
        let scan = tau_psd_scan(&t, 5, 1e-9).unwrap();
        assert_eq!(scan.verdicts[4].psd, Some(false), "negative odd moment certifies");
    }

    #[test]
    fn purification_examples() {
        // pure product state
        let e1 = HermitianMatrix::diag(&[1.0, 0.0]);
        let prod = crate::linalg::kron_hermitian(&e1, &e1).unwrap();
        let b = purification_bounds(&prod, 2, 2, 1e-9).unwrap();
        assert_eq!((b.lower, b.upper), (1, 1));

        // maximally mixed: xi = I/2
        let mixed = HermitianMatrix::identity(4).scale(0.25);
        let b = purification_bounds(&mixed, 2, 2, 1e-9).unwrap();
        assert_eq!((b.lower, b.upper), (1, 1));
        assert!(b.canonical.sub(&HermitianMatrix::identity(4).scale(0.5)).frobenius_norm() < 1e-10);

        // random separable mixtures
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let mut rho = HermitianMatrix::zeros(4);
            for _ in 0..3 {
                let a = random_psd(&mut rng, 2);
                let b = random_psd(&mut rng, 2);
                rho = rho.add(&crate::linalg::kron_hermitian(&a, &b).unwrap());
            }
            let rho = rho.scale(1.0 / rho.trace());
            let b = purification_bounds(&rho, 2, 2, 1e-9).unwrap();
            assert!(b.lower <= b.upper);
            assert!(b.upper <= 4);
        }
    }

    #[test]
    fn purification_diagonal_state_square_root_is_diagonal() {
        let rho = HermitianMatrix::diag(&[0.4, 0.3, 0.2, 0.1]);
        let b = purification_bounds(&rho, 2, 2, 1e-9).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(b.canonical.at(i, j).norm() < 1e-12);
                }
            }
        }
        // for diagonal states both ranks come from the same realignment route
        let direct = svd(&realign(&b.canonical, 2, 2).unwrap()).unwrap().rank(1e-9);
        assert_eq!(b.upper, direct);
    }

    #[test]
    fn purification_rejects_indefinite_input() {
        let rho = HermitianMatrix::diag(&[1.0, -0.5, 0.2, 0.1]);
        assert!(matches!(
            purification_bounds(&rho, 2, 2, 1e-9),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn dense_cap_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        let m = Mpdo::random_hermitian(&mut rng, 13, 1, 2); // 2^13 > 4096
        assert!(matches!(mpdo_to_dense(&m), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn non_hermitian_expansion_is_flagged() {
        let mut nonherm = ComplexMatrix::zeros(2, 2);
        nonherm.set(0, 1, C64::new(1.0, 0.0));
        let m = Mpdo::new(1, vec![2, 2], vec![vec![nonherm.clone()], vec![nonherm]]).unwrap();
        let dense = mpdo_to_dense(&m).unwrap();
        assert!(!dense.is_hermitian);
        assert!(dense.hermitian().is_err());
    }
}
