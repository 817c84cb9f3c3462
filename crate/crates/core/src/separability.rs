//! Positivity and separability of bipartite matrices.
//!
//! Covers the Choi correspondence (complete positivity = psd Choi matrix,
//! positivity = block positivity), operator Schmidt decompositions through
//! the realignment map, the plane-cone machinery behind the constructive
//! separability of tensor-rank-2 states, and a PPT oracle that is conclusive
//! in 2x2 and 2x3.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::random::{random_psd, random_unit_vector};
use crate::linalg::{
    eigh, is_psd, kron_hermitian, partial_transpose, realign, svd, ComplexMatrix,
    HermitianMatrix,
};

/// Choi matrix of a linear map `Mat_d -> Mat_s`.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub matrix: HermitianMatrix,
    pub input_dim: usize,
    pub output_dim: usize,
}

/// Builds the Choi matrix `sum_ij E_ij ⊗ T(E_ij)` from the basis images
/// `images[i*d + j] = T(E_ij)`. Fails when the map is not
/// Hermiticity-preserving.
pub fn choi_of_map(images: &[ComplexMatrix], d: usize, s: usize) -> Result<ChoiMatrix> {
    if images.len() != d * d {
        return Err(Error::InvalidInput(format!(
            "expected {} basis images, got {}",
            d * d,
            images.len()
        )));
    }
    if images.iter().any(|m| m.rows() != s || m.cols() != s) {
        return Err(Error::InvalidInput("basis images must be s x s".into()));
    }
    let n = d * s;
    let mut c = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let img = &images[i * d + j];
            for k in 0..s {
                for l in 0..s {
                    c.add_assign_at(i * s + k, j * s + l, img.at(k, l));
                }
            }
        }
    }
    let scale = c.max_abs().max(1.0);
    if c.asymmetry() > 1e-10 * scale {
        return Err(Error::InvalidMap(
            "map is not Hermiticity-preserving: Choi matrix is not Hermitian".into(),
        ));
    }
    Ok(ChoiMatrix {
        matrix: HermitianMatrix::from_nearly_hermitian(c)?,
        input_dim: d,
        output_dim: s,
    })
}

/// A map is completely positive iff its Choi matrix is psd.
pub fn is_completely_positive(c: &ChoiMatrix, tol: f64) -> Result<bool> {
    is_psd(&c.matrix, tol)
}

/// Outcome of the one-sided block-positivity witness search.
#[derive(Debug, Clone)]
pub enum BlockPositivity {
    /// Rank-one psd witnesses `x x†`, `y y†` with
    /// `<(xx† ⊗ yy†), C> = value < -tol`.
    Violation { left: Vec<C64>, right: Vec<C64>, value: f64 },
    /// No violation was found. NOT a proof of block positivity.
    NoViolationFound { probes: usize },
}

fn product_value(c: &ChoiMatrix, x: &[C64], y: &[C64]) -> f64 {
    let s = c.output_dim;
    let xy: Vec<C64> = x
        .iter()
        .flat_map(|&xi| y.iter().map(move |&yj| xi * yj))
        .collect();
    debug_assert_eq!(xy.len(), c.input_dim * s);
    c.matrix.quadratic_form(&xy)
}

/// Contracts the left side: `M_x[k][l] = sum_ij conj(x_i) x_j C[(i,k),(j,l)]`.
fn condition_left(c: &ChoiMatrix, x: &[C64]) -> HermitianMatrix {
    let (d, s) = (c.input_dim, c.output_dim);
    let m = ComplexMatrix::from_fn(s, s, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += x[i].conj() * x[j] * c.matrix.at(i * s + k, j * s + l);
            }
        }
        acc
    });
    HermitianMatrix::from_nearly_hermitian(m).expect("conditioned matrix is Hermitian")
}

fn condition_right(c: &ChoiMatrix, y: &[C64]) -> HermitianMatrix {
    let (d, s) = (c.input_dim, c.output_dim);
    let m = ComplexMatrix::from_fn(d, d, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..s {
            for l in 0..s {
                acc += y[k].conj() * y[l] * c.matrix.at(i * s + k, j * s + l);
            }
        }
        acc
    });
    HermitianMatrix::from_nearly_hermitian(m).expect("conditioned matrix is Hermitian")
}

fn min_eigenvector(h: &HermitianMatrix) -> Result<(f64, Vec<C64>)> {
    let eig = eigh(h)?;
    Ok((eig.eigenvalues[0], eig.eigenvectors.col(0)))
}

/// Multi-start alternating search for a product-state violation of block
/// positivity of `C`: `tr((xx† ⊗ yy†) C) < -tol * max(1, |C|_max)`.
///
/// Each seed starts from a random product vector and alternates between the
/// optimal `y` for fixed `x` (smallest eigenvector of the conditioned
/// matrix) and vice versa. One-sided by design: a `NoViolationFound` answer
/// is evidence, not a certificate.
pub fn block_positivity_search(
    c: &ChoiMatrix,
    iterations: usize,
    seeds: usize,
    base_seed: u64,
    tol: f64,
) -> Result<BlockPositivity> {
    if iterations == 0 {
        return Err(Error::InvalidInput("iterations must be >= 1".into()));
    }
    let threshold = -tol * c.matrix.max_abs().max(1.0);
    let threads = crate::thread_cap().min(seeds.max(1));
    let chunk = seeds.div_ceil(threads.max(1));

    let mut results: Vec<(usize, f64, Vec<C64>, Vec<C64>)> = Vec::new();
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for t in 0..threads {
            let lo = t * chunk;
            let hi = ((t + 1) * chunk).min(seeds);
            if lo >= hi {
                break;
            }
            handles.push(scope.spawn(move || -> Result<Vec<(usize, f64, Vec<C64>, Vec<C64>)>> {
                let mut local = Vec::new();
                for seed_idx in lo..hi {
                    // deterministic sub-seed derivation
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(base_seed.wrapping_mul(0x9e3779b9).wrapping_add(seed_idx as u64));
                    let mut x = random_unit_vector(&mut rng, c.input_dim);
                    let mut y = random_unit_vector(&mut rng, c.output_dim);
                    let mut val = product_value(c, &x, &y);
                    for _ in 0..iterations {
                        let (vy, ynew) = min_eigenvector(&condition_left(c, &x))?;
                        y = ynew;
                        let (vx, xnew) = min_eigenvector(&condition_right(c, &y))?;
                        x = xnew;
                        let improved = vx.min(vy);
                        if (val - improved).abs() <= 1e-14 * (1.0 + val.abs()) {
                            val = improved;
                            break;
                        }
                        val = improved;
                    }
                    local.push((seed_idx, product_value(c, &x, &y), x, y));
                }
                Ok(local)
            }));
        }
        for h in handles {
            results.extend(h.join().expect("search thread panicked")?);
        }
        Ok(())
    })?;

    // deterministic winner: most negative value, ties by lowest seed index
    results.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    if let Some((_, val, x, y)) = results.into_iter().next() {
        if val < threshold {
            return Ok(BlockPositivity::Violation { left: x, right: y, value: val });
        }
    }
    Ok(BlockPositivity::NoViolationFound { probes: seeds * (iterations + 1) })
}

/// Operator Schmidt decomposition `rho = sum_k L_k ⊗ R_k` with Hermitian,
/// trace-orthogonal factors (singular values absorbed).
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub rank: usize,
    pub left: Vec<HermitianMatrix>,
    pub right: Vec<HermitianMatrix>,
    /// Realignment singular values, descending.
    pub singular_values: Vec<f64>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> Result<HermitianMatrix> {
        if self.rank == 0 {
            return Err(Error::InvalidInput("empty decomposition".into()));
        }
        let mut acc = kron_hermitian(&self.left[0], &self.right[0])?;
        for k in 1..self.rank {
            acc = acc.add(&kron_hermitian(&self.left[k], &self.right[k])?);
        }
        Ok(acc)
    }
}

fn unvec(v: &[C64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| v[i * n + j])
}

/// Least-squares phase `omega` with `A† ~ omega A`; `|omega| <= 1` with
/// equality iff `A` is Hermitian up to phase.
fn hermitian_phase(a: &ComplexMatrix) -> C64 {
    let n = a.rows();
    let mut num = C64::new(0.0, 0.0); // tr(A A) conjugated
    let mut den = 0.0;
    for i in 0..n {
        for j in 0..n {
            num += a.at(i, j) * a.at(j, i);
            den += a.at(i, j).norm_sqr();
        }
    }
    if den <= 0.0 {
        return C64::new(1.0, 0.0);
    }
    num.conj() / den
}

/// Operator Schmidt decomposition across the `d ⊗ s` cut.
///
/// The realignment singular vectors of a Hermitian matrix are Hermitian up
/// to a phase; each left factor is rotated onto its Hermitian representative
/// and averaged with its adjoint, the compensating phase goes to the right
/// factor, and the left family is re-orthogonalised with the inverse
/// transformation applied on the right so the sum stays exact.
pub fn operator_schmidt(
    rho: &HermitianMatrix,
    d: usize,
    s: usize,
    tol: f64,
) -> Result<SchmidtDecomposition> {
    let r_mat = realign(rho, d, s)?;
    let f = svd(&r_mat)?;
    let top = f.singular_values.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Ok(SchmidtDecomposition {
            rank: 0,
            left: vec![],
            right: vec![],
            singular_values: vec![],
        });
    }
    let rank = f.singular_values.iter().filter(|&&x| x > tol * top).count();
    let scale = 1.0 + rho.frobenius_norm();

    let mut left = Vec::with_capacity(rank);
    let mut right = Vec::with_capacity(rank);
    for k in 0..rank {
        let sigma = f.singular_values[k];
        let a = unvec(&f.u.col(k), d);
        let b_raw = unvec(&f.v.col(k), s).conj();
        // rho = sum_k sigma_k A_k ⊗ B_k at this point
        let omega = hermitian_phase(&a);
        if omega.norm() < 0.5 {
            return Err(Error::NumericalDegeneracy(format!(
                "left Schmidt factor {k} is not Hermitian up to phase (|omega| = {:.3})",
                omega.norm()
            )));
        }
        let phi = C64::from_polar(1.0, omega.arg() / 2.0);
        let a_rot = a.scale(phi);
        let b_rot = b_raw.scale(phi.conj());
        let defect = a_rot.asymmetry().max(b_rot.asymmetry());
        if defect > 1e-8 * (1.0 + a_rot.max_abs().max(b_rot.max_abs())) {
            return Err(Error::NumericalDegeneracy(format!(
                "hermitisation defect {defect:.3e} on Schmidt factor {k}"
            )));
        }
        let w = sigma.sqrt();
        left.push(HermitianMatrix::from_nearly_hermitian(a_rot.hermitian_part().scale_re(w))?);
        right.push(HermitianMatrix::from_nearly_hermitian(b_rot.hermitian_part().scale_re(w))?);
    }

    // Re-orthogonalise the left family; mirror the inverse update on the
    // right so that sum_k L_k ⊗ R_k is unchanged.
    for k in 0..rank {
        for j in 0..k {
            let denom = left[j].trace_inner(&left[j]);
            if denom <= 0.0 {
                continue;
            }
            let cjk = left[j].trace_inner(&left[k]) / denom;
            if cjk.abs() < 1e-300 {
                continue;
            }
            left[k] = left[k].sub(&left[j].scale(cjk));
            right[j] = right[j].add(&right[k].scale(cjk));
        }
    }

    let dec = SchmidtDecomposition { rank, left, right, singular_values: f.singular_values[..rank].to_vec() };
    if rank > 0 {
        let err = dec.reconstruct()?.sub(rho).frobenius_norm();
        if err > 1e-9 * scale {
            return Err(Error::NumericalDegeneracy(format!(
                "Schmidt reconstruction error {err:.3e}"
            )));
        }
    }
    Ok(dec)
}

/// Classification of the plane cone `{(a, b) : a s1 + b s2 psd}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeKind {
    /// Two independent extreme rays.
    Simplex,
    /// A single ray.
    Ray,
    /// Contains a full line (half-plane or line).
    Nonsalient,
    /// The whole plane.
    Full,
    /// Both input matrices are (numerically) zero.
    Zero,
    /// Only the origin.
    Point,
}

#[derive(Debug, Clone)]
pub struct ConeRays2D {
    pub kind: ConeKind,
    /// Unit vectors: 2 rays for `Simplex` (boundary) and `Nonsalient`
    /// (the line directions of the half-plane boundary), 1 for `Ray`,
    /// none otherwise.
    pub rays: Vec<[f64; 2]>,
}

fn lambda_min_dir(s1: &HermitianMatrix, s2: &HermitianMatrix, theta: f64) -> Result<f64> {
    let h = HermitianMatrix::lincomb(&[(theta.cos(), s1), (theta.sin(), s2)])?;
    Ok(eigh(&h)?.min_eigenvalue())
}

/// Bisects a sign change of `g(theta) = lambda_min(...)` on
/// `[neg, pos]` (g(neg) < 0 <= g(pos)) to angular precision 1e-12.
fn bisect_boundary(
    s1: &HermitianMatrix,
    s2: &HermitianMatrix,
    mut neg: f64,
    mut pos: f64,
) -> Result<f64> {
    while (pos - neg).abs() > 1e-12 {
        let mid = 0.5 * (neg + pos);
        if lambda_min_dir(s1, s2, mid)? >= 0.0 {
            pos = mid;
        } else {
            neg = mid;
        }
    }
    Ok(pos)
}

/// Classifies the plane cone `{(a,b) : a s1 + b s2 psd}` and resolves its
/// extreme rays by scanning `lambda_min(cos t s1 + sin t s2)` over directions
/// and bisecting the sign changes.
pub fn cone_rays_2d(s1: &HermitianMatrix, s2: &HermitianMatrix) -> Result<ConeRays2D> {
    if s1.dim() != s2.dim() {
        return Err(Error::InvalidInput("coefficient sizes differ".into()));
    }
    let scale = s1.frobenius_norm().max(s2.frobenius_norm());
    if scale <= 1e-14 {
        return Ok(ConeRays2D { kind: ConeKind::Zero, rays: vec![] });
    }
    let eps = 1e-12 * scale.max(1.0);

    let n_grid = 720usize;
    let thetas: Vec<f64> = (0..n_grid)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_grid as f64)
        .collect();
    let mut g = Vec::with_capacity(n_grid);
    for &t in &thetas {
        g.push(lambda_min_dir(s1, s2, t)?);
    }

    let strictly_pos: Vec<usize> = (0..n_grid).filter(|&k| g[k] > eps).collect();
    if strictly_pos.len() == n_grid {
        return Ok(ConeRays2D { kind: ConeKind::Full, rays: vec![] });
    }

    if strictly_pos.is_empty() {
        // No interior direction: the cone is {0}, a ray, or a line. Refine
        // the local maxima of g near zero to find contact directions.
        let loose = 1e-7 * scale.max(1.0);
        let mut contacts: Vec<f64> = Vec::new();
        for k in 0..n_grid {
            if g[k] < -loose {
                continue;
            }
            // local max among near-zero samples
            let prev = g[(k + n_grid - 1) % n_grid];
            let next = g[(k + 1) % n_grid];
            if g[k] < prev || g[k] < next {
                continue;
            }
            // ternary refinement of the local maximum
            let (mut lo, mut hi) = (thetas[k] - 2.0 * std::f64::consts::PI / n_grid as f64,
                                    thetas[k] + 2.0 * std::f64::consts::PI / n_grid as f64);
            for _ in 0..80 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if lambda_min_dir(s1, s2, m1)? < lambda_min_dir(s1, s2, m2)? {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            let t_star = 0.5 * (lo + hi);
            if lambda_min_dir(s1, s2, t_star)? >= -1e-10 * scale.max(1.0) {
                let t_norm = t_star.rem_euclid(2.0 * std::f64::consts::PI);
                if !contacts.iter().any(|&c| angular_close(c, t_norm)) {
                    contacts.push(t_norm);
                }
            }
        }
        return Ok(match contacts.len() {
            0 => ConeRays2D { kind: ConeKind::Point, rays: vec![] },
            1 => ConeRays2D {
                kind: ConeKind::Ray,
                rays: vec![[contacts[0].cos(), contacts[0].sin()]],
            },
            _ => {
                // antipodal pair: the cone is a line
                ConeRays2D {
                    kind: ConeKind::Nonsalient,
                    rays: contacts.iter().take(2).map(|&t| [t.cos(), t.sin()]).collect(),
                }
            }
        });
    }

    // The feasible arc has interior. Walk from an interior sample to both
    // boundaries and bisect.
    let start = strictly_pos[0];
    let mut fwd = start;
    while g[(fwd + 1) % n_grid] > eps && (fwd + 1) - start < n_grid {
        fwd += 1;
    }
    let mut bwd = start as isize;
    while g[((bwd - 1).rem_euclid(n_grid as isize)) as usize] > eps
        && start as isize - (bwd - 1) < n_grid as isize
    {
        bwd -= 1;
    }
    let step = 2.0 * std::f64::consts::PI / n_grid as f64;
    if (fwd - start) as isize - (bwd - start as isize) + 1 >= n_grid as isize {
        return Ok(ConeRays2D { kind: ConeKind::Full, rays: vec![] });
    }
    // bracket the upper boundary in [theta_fwd, first strictly negative]
    let mut hi_neg = fwd + 1;
    while g[hi_neg % n_grid] >= -eps && hi_neg - fwd < n_grid {
        hi_neg += 1;
    }
    let mut lo_neg = bwd - 1;
    while g[lo_neg.rem_euclid(n_grid as isize) as usize] >= -eps && bwd - lo_neg < n_grid as isize
    {
        lo_neg -= 1;
    }
    let theta_hi = bisect_boundary(
        s1,
        s2,
        step * hi_neg as f64,
        step * fwd as f64,
    )?;
    let theta_lo = bisect_boundary(
        s1,
        s2,
        step * lo_neg as f64,
        step * bwd as f64,
    )?;
    let width = theta_hi - theta_lo;
    if width >= 2.0 * std::f64::consts::PI - 1e-9 {
        return Ok(ConeRays2D { kind: ConeKind::Full, rays: vec![] });
    }
    if width >= std::f64::consts::PI - 1e-9 {
        return Ok(ConeRays2D {
            kind: ConeKind::Nonsalient,
            rays: vec![
                [theta_lo.cos(), theta_lo.sin()],
                [theta_hi.cos(), theta_hi.sin()],
            ],
        });
    }
    if width <= 1e-9 {
        let t = 0.5 * (theta_lo + theta_hi);
        return Ok(ConeRays2D { kind: ConeKind::Ray, rays: vec![[t.cos(), t.sin()]] });
    }
    Ok(ConeRays2D {
        kind: ConeKind::Simplex,
        rays: vec![
            [theta_lo.cos(), theta_lo.sin()],
            [theta_hi.cos(), theta_hi.sin()],
        ],
    })
}

fn angular_close(a: f64, b: f64) -> bool {
    let tau = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(tau);
    d < 1e-6 || tau - d < 1e-6
}

/// One psd ⊗ psd pair of a separable decomposition.
pub type SeparablePair = (HermitianMatrix, HermitianMatrix);

fn verify_pairs(
    pairs: &[SeparablePair],
    rho: &HermitianMatrix,
    tol: f64,
) -> Result<()> {
    let scale = 1.0 + rho.frobenius_norm();
    let mut acc = HermitianMatrix::zeros(rho.dim());
    for (i, (l, r)) in pairs.iter().enumerate() {
        for (side, h) in [("left", l), ("right", r)] {
            let lam = eigh(h)?.min_eigenvalue();
            if lam < -tol.max(1e-9) * h.max_abs().max(1.0) {
                return Err(Error::InternalInconsistency(format!(
                    "{side} factor of pair {i} has eigenvalue {lam:.3e}"
                )));
            }
        }
        acc = acc.add(&kron_hermitian(l, r)?);
    }
    let err = acc.sub(rho).frobenius_norm() / scale;
    if err > 1e-8 {
        return Err(Error::InternalInconsistency(format!(
            "separable reconstruction residual {err:.3e}"
        )));
    }
    Ok(())
}

/// Clips tiny negative eigenvalues so a factor that is psd up to roundoff
/// becomes exactly psd; genuine negativity is left alone and caught by the
/// verifier.
fn tidy_psd(h: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    let lam = eigh(h)?.min_eigenvalue();
    if lam >= 0.0 {
        return Ok(h.clone());
    }
    if lam < -tol.max(1e-9) * h.max_abs().max(1.0) {
        return Ok(h.clone());
    }
    Ok(crate::sdp::project_psd(h)?.projected)
}

/// Single-term case `rho = s ⊗ t`: flips signs so both factors are psd.
fn single_term(
    s: &HermitianMatrix,
    t: &HermitianMatrix,
    rho: &HermitianMatrix,
    tol: f64,
) -> Result<Vec<SeparablePair>> {
    let scale = 1.0 + rho.frobenius_norm();
    if s.frobenius_norm() * t.frobenius_norm() <= 1e-12 * scale {
        // rho is (numerically) zero
        if rho.frobenius_norm() > 1e-8 * scale {
            return Err(Error::InternalInconsistency(
                "vanishing factors but nonzero state".into(),
            ));
        }
        return Ok(vec![]);
    }
    let eig = eigh(s)?;
    let flip = if eig.max_eigenvalue().abs() >= eig.min_eigenvalue().abs() { 1.0 } else { -1.0 };
    let pair = (tidy_psd(&s.scale(flip), tol)?, tidy_psd(&t.scale(flip), tol)?);
    let pairs = vec![pair];
    verify_pairs(&pairs, rho, tol)?;
    Ok(pairs)
}

/// Constructive separable decomposition of a psd tensor-rank-2 matrix
/// `rho = s1 ⊗ t1 + s2 ⊗ t2` (factors Hermitian, not necessarily psd).
///
/// The plane cone `C_1 = {(a,b) : a s1 + b s2 psd}` of the pencil is
/// classified; in the generic simplex case `cone{v1, v2}`, the tuple
/// `(t1, t2)` is re-expressed over the extreme rays, which yields psd right
/// factors `eta_i` and psd left factors `v_i[0] s1 + v_i[1] s2`. Degenerate
/// cones reduce to a single tensor term. At most two pairs are returned and
/// every output is verified (factors psd, reconstruction to 1e-8 relative).
pub fn separable_rank2(
    s1: &HermitianMatrix,
    t1: &HermitianMatrix,
    s2: &HermitianMatrix,
    t2: &HermitianMatrix,
    tol: f64,
) -> Result<Vec<SeparablePair>> {
    if s1.dim() != s2.dim() || t1.dim() != t2.dim() {
        return Err(Error::InvalidInput("factor dimensions differ".into()));
    }
    let rho = kron_hermitian(s1, t1)?.add(&kron_hermitian(s2, t2)?);
    let lam = eigh(&rho)?.min_eigenvalue();
    if lam < -tol.max(1e-9) * rho.max_abs().max(1.0) {
        return Err(Error::PreconditionViolation(format!(
            "state is not psd (lambda_min = {lam:.3e})"
        )));
    }

    let scale_s = s1.frobenius_norm().max(s2.frobenius_norm());
    // vanishing left factors reduce the tensor rank immediately
    if s1.frobenius_norm() <= 1e-12 * scale_s.max(1.0) {
        return single_term(s2, t2, &rho, tol);
    }
    if s2.frobenius_norm() <= 1e-12 * scale_s.max(1.0) {
        return single_term(s1, t1, &rho, tol);
    }
    // linear dependence: s2 = c s1 collapses to one term
    let g11 = s1.trace_inner(s1);
    let g12 = s1.trace_inner(s2);
    let g22 = s2.trace_inner(s2);
    let det = g11 * g22 - g12 * g12;
    if det <= 1e-24 * g11 * g22 {
        let cfac = g12 / g11;
        let combined = t1.add(&t2.scale(cfac));
        return single_term(s1, &combined, &rho, tol);
    }

    let cone = cone_rays_2d(s1, s2)?;
    match cone.kind {
        ConeKind::Simplex => {
            let v1 = cone.rays[0];
            let v2 = cone.rays[1];
            let det = v1[0] * v2[1] - v2[0] * v1[1];
            if det.abs() < 1e-9 {
                return Err(Error::NumericalDegeneracy(
                    "simplex cone rays are numerically parallel".into(),
                ));
            }
            // (t1, t2) = eta1 * v1 + eta2 * v2, solved componentwise
            let eta1 = HermitianMatrix::lincomb(&[(v2[1] / det, t1), (-v2[0] / det, t2)])?;
            let eta2 = HermitianMatrix::lincomb(&[(-v1[1] / det, t1), (v1[0] / det, t2)])?;
            let sv1 = HermitianMatrix::lincomb(&[(v1[0], s1), (v1[1], s2)])?;
            let sv2 = HermitianMatrix::lincomb(&[(v2[0], s1), (v2[1], s2)])?;
            let mut pairs = Vec::new();
            for (sv, eta) in [(sv1, eta1), (sv2, eta2)] {
                if sv.frobenius_norm() * eta.frobenius_norm()
                    > 1e-12 * (1.0 + rho.frobenius_norm())
                {
                    pairs.push((tidy_psd(&sv, tol)?, tidy_psd(&eta, tol)?));
                }
            }
            verify_pairs(&pairs, &rho, tol)?;
            Ok(pairs)
        }
        ConeKind::Ray => {
            let v = cone.rays[0];
            let denom = v[0] * v[0] + v[1] * v[1];
            let eta = HermitianMatrix::lincomb(&[(v[0] / denom, t1), (v[1] / denom, t2)])?;
            // consistency: t_j must equal v[j] * eta
            let scale_t = 1.0 + t1.frobenius_norm().max(t2.frobenius_norm());
            let r1 = t1.sub(&eta.scale(v[0])).frobenius_norm();
            let r2 = t2.sub(&eta.scale(v[1])).frobenius_norm();
            if r1.max(r2) > 1e-7 * scale_t {
                return Err(Error::InternalInconsistency(format!(
                    "ray-cone right factors inconsistent (residuals {r1:.3e}, {r2:.3e})"
                )));
            }
            let sv = HermitianMatrix::lincomb(&[(v[0], s1), (v[1], s2)])?;
            let pairs = vec![(tidy_psd(&sv, tol)?, tidy_psd(&eta, tol)?)];
            verify_pairs(&pairs, &rho, tol)?;
            Ok(pairs)
        }
        ConeKind::Nonsalient | ConeKind::Full => {
            // Theory: a line in the cone means u1 s1 + u2 s2 = 0, i.e. the
            // left factors are linearly dependent; rotate onto that basis
            // and drop the vanishing direction.
            let u = cone.rays.first().copied().unwrap_or([1.0, 0.0]);
            let s_null = HermitianMatrix::lincomb(&[(u[0], s1), (u[1], s2)])?;
            let s_perp = HermitianMatrix::lincomb(&[(-u[1], s1), (u[0], s2)])?;
            let t_null = HermitianMatrix::lincomb(&[(u[0], t1), (u[1], t2)])?;
            let t_perp = HermitianMatrix::lincomb(&[(-u[1], t1), (u[0], t2)])?;
            let drop = s_null.frobenius_norm() * t_null.frobenius_norm();
            if drop > 1e-7 * (1.0 + rho.frobenius_norm()) {
                return Err(Error::InternalInconsistency(format!(
                    "nonsalient cone but non-vanishing dropped term ({drop:.3e})"
                )));
            }
            single_term(&s_perp, &t_perp, &rho, tol)
        }
        ConeKind::Point | ConeKind::Zero => {
            // C_1 = {0} forces rho = 0 for a psd tensor-rank-2 state.
            if rho.frobenius_norm() > 1e-8 * (1.0 + rho.frobenius_norm()) {
                return Err(Error::InternalInconsistency(
                    "trivial plane cone but nonzero psd state".into(),
                ));
            }
            Ok(vec![])
        }
    }
}

/// Verdict of the small-dimension separability oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparabilityVerdict {
    Separable,
    Entangled,
    Inconclusive,
}

/// PPT-based oracle: a negative partial-transpose eigenvalue certifies
/// entanglement in any dimension; PPT certifies separability only in
/// `2 ⊗ 2` and `2 ⊗ 3`.
pub fn separability_oracle_small(
    rho: &HermitianMatrix,
    d: usize,
    s: usize,
    tol: f64,
) -> Result<SeparabilityVerdict> {
    let pt = partial_transpose(rho, d, s)?;
    let lam = eigh(&pt)?.min_eigenvalue();
    if lam < -tol.max(1e-9) * pt.max_abs().max(1.0) {
        return Ok(SeparabilityVerdict::Entangled);
    }
    if matches!((d, s), (2, 2) | (2, 3) | (3, 2)) {
        Ok(SeparabilityVerdict::Separable)
    } else {
        Ok(SeparabilityVerdict::Inconclusive)
    }
}

/// Random psd operator-Schmidt-rank-2 instance: psd pairs are generated and
/// then mixed by a random invertible change of basis, so the individual
/// factors handed out are generically indefinite while the sum stays psd.
pub fn random_rank2_instance(
    rng: &mut impl Rng,
    d: usize,
    s: usize,
) -> (HermitianMatrix, HermitianMatrix, HermitianMatrix, HermitianMatrix) {
    loop {
        let p1 = random_psd(rng, d);
        let p2 = random_psd(rng, d);
        let q1 = random_psd(rng, s);
        let q2 = random_psd(rng, s);
        let (a, b, c, dd) = (
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0f64),
        );
        let det: f64 = a * dd - b * c;
        if det.abs() < 0.2 {
            continue;
        }
        // sigma_i = W_i1 p1 + W_i2 p2, tau_i = (W^{-T})_i1 q1 + (W^{-T})_i2 q2
        let s1 = HermitianMatrix::lincomb(&[(a, &p1), (b, &p2)]).unwrap();
        let s2 = HermitianMatrix::lincomb(&[(c, &p1), (dd, &p2)]).unwrap();
        let t1 = HermitianMatrix::lincomb(&[(dd / det, &q1), (-c / det, &q2)]).unwrap();
        let t2 = HermitianMatrix::lincomb(&[(-b / det, &q1), (a / det, &q2)]).unwrap();
        return (s1, t1, s2, t2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_complex, random_hermitian, random_unitary};
    use crate::linalg::{kron, min_eigenvalue};
    use crate::DEFAULT_TOL;

    fn identity_choi(d: usize) -> ChoiMatrix {
        let images: Vec<ComplexMatrix> = (0..d * d)
            .map(|k| ComplexMatrix::elementary(d, k / d, k % d))
            .collect();
        choi_of_map(&images, d, d).unwrap()
    }

    fn transpose_choi(d: usize) -> ChoiMatrix {
        let images: Vec<ComplexMatrix> = (0..d * d)
            .map(|k| ComplexMatrix::elementary(d, k % d, k / d))
            .collect();
        choi_of_map(&images, d, d).unwrap()
    }

    #[test]
    fn choi_of_identity_map_is_rank_one_psd() {
        let c = identity_choi(2);
        assert!(is_completely_positive(&c, DEFAULT_TOL).unwrap());
        let eig = eigh(&c.matrix).unwrap();
        assert!((eig.max_eigenvalue() - 2.0).abs() < 1e-10);
        assert_eq!(eig.eigenvalues.iter().filter(|&&l| l > 1e-9).count(), 1);
    }

    #[test]
    fn choi_of_transpose_map_is_swap_not_cp() {
        let c = transpose_choi(2);
        // the swap matrix has eigenvalue -1
        let lam = min_eigenvalue(&c.matrix).unwrap();
        assert!((lam + 1.0).abs() < 1e-10);
        assert!(!is_completely_positive(&c, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn choi_of_trace_map_is_identity() {
        let d = 2;
        let images: Vec<ComplexMatrix> = (0..d * d)
            .map(|k| {
                let (i, j) = (k / d, k % d);
                let tr = if i == j { 1.0 } else { 0.0 };
                ComplexMatrix::identity(d).scale_re(tr / d as f64)
            })
            .collect();
        let c = choi_of_map(&images, d, d).unwrap();
        assert!(is_completely_positive(&c, DEFAULT_TOL).unwrap());
        let expected = HermitianMatrix::identity(4).scale(0.5);
        assert!(c.matrix.sub(&expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn choi_rejects_non_hermiticity_preserving() {
        // T(X) = E_12-shifted nonsense that breaks T(E_ij)† = T(E_ji)
        let d = 2;
        let mut images: Vec<ComplexMatrix> = (0..4).map(|_| ComplexMatrix::zeros(2, 2)).collect();
        images[1] = ComplexMatrix::identity(2); // T(E_12) = I but T(E_21) = 0
        assert!(matches!(choi_of_map(&images, d, d), Err(Error::InvalidMap(_))));
    }

    #[test]
    fn kraus_built_choi_is_cp() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (d, s) = (2, 3);
        let kraus: Vec<ComplexMatrix> = (0..3).map(|_| random_complex(&mut rng, s, d)).collect();
        let images: Vec<ComplexMatrix> = (0..d * d)
            .map(|idx| {
                let e = ComplexMatrix::elementary(d, idx / d, idx % d);
                let mut acc = ComplexMatrix::zeros(s, s);
                for k in &kraus {
                    acc = &acc + &(&(k * &e) * &k.adjoint());
                }
                acc
            })
            .collect();
        let c = choi_of_map(&images, d, s).unwrap();
        assert!(is_completely_positive(&c, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn block_positivity_finds_product_violation() {
        // C = diag(-1, 1, 1, 1) on 2⊗2: e1 ⊗ e1 gives value -1.
        let c = ChoiMatrix {
            matrix: HermitianMatrix::diag(&[-1.0, 1.0, 1.0, 1.0]),
            input_dim: 2,
            output_dim: 2,
        };
        match block_positivity_search(&c, 20, 20, 0, DEFAULT_TOL).unwrap() {
            BlockPositivity::Violation { value, left, right } => {
                assert!((value + 1.0).abs() < 1e-9);
                assert!((left[0].norm() - 1.0).abs() < 1e-9);
                assert!((right[0].norm() - 1.0).abs() < 1e-9);
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn block_positivity_on_psd_and_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = random_psd(&mut rng, 4);
        let c = ChoiMatrix { matrix: g, input_dim: 2, output_dim: 2 };
        assert!(matches!(
            block_positivity_search(&c, 15, 25, 1, DEFAULT_TOL).unwrap(),
            BlockPositivity::NoViolationFound { .. }
        ));

        // swap matrix: tr((sigma ⊗ tau) S) = tr(sigma tau) >= 0
        let swap = transpose_choi(2);
        assert!(matches!(
            block_positivity_search(&swap, 15, 25, 2, DEFAULT_TOL).unwrap(),
            BlockPositivity::NoViolationFound { .. }
        ));
        // the algebraic identity on random product states
        for _ in 0..200 {
            let x = random_unit_vector(&mut rng, 2);
            let y = random_unit_vector(&mut rng, 2);
            assert!(product_value(&swap, &x, &y) >= -1e-12);
        }
    }

    #[test]
    fn block_positivity_search_is_deterministic() {
        let c = ChoiMatrix {
            matrix: HermitianMatrix::diag(&[-0.3, 1.0, 0.5, 1.0]),
            input_dim: 2,
            output_dim: 2,
        };
        let a = block_positivity_search(&c, 10, 16, 42, 1e-9).unwrap();
        let b = block_positivity_search(&c, 10, 16, 42, 1e-9).unwrap();
        match (a, b) {
            (
                BlockPositivity::Violation { value: v1, left: l1, .. },
                BlockPositivity::Violation { value: v2, left: l2, .. },
            ) => {
                assert_eq!(v1, v2, "same seed must give bit-identical values");
                assert_eq!(l1, l2);
            }
            other => panic!("expected identical violations, got {other:?}"),
        }
    }

    #[test]
    fn operator_schmidt_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 3);
        let rho = kron_hermitian(&a, &b).unwrap();
        let dec = operator_schmidt(&rho, 2, 3, 1e-9).unwrap();
        assert_eq!(dec.rank, 1);
        let err = dec.reconstruct().unwrap().sub(&rho).frobenius_norm();
        assert!(err < 1e-10 * (1.0 + rho.frobenius_norm()));

        let e11 = HermitianMatrix::diag(&[1.0, 0.0]);
        let e22 = HermitianMatrix::diag(&[0.0, 1.0]);
        let two = kron_hermitian(&e11, &e11).unwrap().add(&kron_hermitian(&e22, &e22).unwrap());
        assert_eq!(operator_schmidt(&two, 2, 2, 1e-9).unwrap().rank, 2);
    }

    #[test]
    fn operator_schmidt_rank3_reconstruction_and_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut rho = HermitianMatrix::zeros(9);
        for _ in 0..3 {
            let a = random_hermitian(&mut rng, 3);
            let b = random_hermitian(&mut rng, 3);
            rho = rho.add(&kron_hermitian(&a, &b).unwrap());
        }
        let dec = operator_schmidt(&rho, 3, 3, 1e-9).unwrap();
        assert_eq!(dec.rank, 3);
        let err = dec.reconstruct().unwrap().sub(&rho).frobenius_norm();
        assert!(err < 1e-9 * (1.0 + rho.frobenius_norm()), "err {err}");
        // pairwise trace orthogonality of both families
        for i in 0..3 {
            for j in 0..i {
                let li = dec.left[i].trace_inner(&dec.left[j]).abs();
                let ri = dec.right[i].trace_inner(&dec.right[j]).abs();
                let sl = dec.left[i].frobenius_norm() * dec.left[j].frobenius_norm();
                let sr = dec.right[i].frobenius_norm() * dec.right[j].frobenius_norm();
                assert!(li < 1e-8 * sl.max(1e-30), "left {i},{j}: {li}");
                assert!(ri < 1e-8 * sr.max(1e-30), "right {i},{j}: {ri}");
            }
        }
    }

    #[test]
    fn operator_schmidt_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..5 {
            let mut rho = HermitianMatrix::zeros(6);
            for _ in 0..2 {
                let a = random_hermitian(&mut rng, 2);
                let b = random_hermitian(&mut rng, 3);
                rho = rho.add(&kron_hermitian(&a, &b).unwrap());
            }
            let r0 = operator_schmidt(&rho, 2, 3, 1e-9).unwrap().rank;
            let u = random_unitary(&mut rng, 2);
            let v = random_unitary(&mut rng, 3);
            let uv = kron(&u, &v).unwrap();
            let rotated = rho.conjugate_by(&uv.adjoint()).unwrap();
            let r1 = operator_schmidt(&rotated, 2, 3, 1e-9).unwrap().rank;
            assert_eq!(r0, r1);
        }
    }

    #[test]
    fn cone_examples() {
        // positive quadrant
        let c = cone_rays_2d(&HermitianMatrix::diag(&[1.0, 0.0]), &HermitianMatrix::diag(&[0.0, 1.0]))
            .unwrap();
        assert_eq!(c.kind, ConeKind::Simplex);
        let mut rays = c.rays.clone();
        rays.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        assert!((rays[0][0] - 0.0).abs() < 1e-9 && (rays[0][1] - 1.0).abs() < 1e-9);
        assert!((rays[1][0] - 1.0).abs() < 1e-9 && (rays[1][1] - 0.0).abs() < 1e-9);

        // I, diag(1, -1): rays (1, ±1)/sqrt(2)
        let c = cone_rays_2d(&HermitianMatrix::identity(2), &HermitianMatrix::diag(&[1.0, -1.0]))
            .unwrap();
        assert_eq!(c.kind, ConeKind::Simplex);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for ray in &c.rays {
            assert!((ray[0] - r).abs() < 1e-9);
            assert!((ray[1].abs() - r).abs() < 1e-9);
        }

        // half-plane a >= 0
        let c = cone_rays_2d(&HermitianMatrix::identity(2), &HermitianMatrix::zeros(2)).unwrap();
        assert_eq!(c.kind, ConeKind::Nonsalient);

        // zero pair
        let c = cone_rays_2d(&HermitianMatrix::zeros(2), &HermitianMatrix::zeros(2)).unwrap();
        assert_eq!(c.kind, ConeKind::Zero);

        // only the origin: (sigma_z, sigma_x)
        let sx = HermitianMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = cone_rays_2d(&HermitianMatrix::diag(&[1.0, -1.0]), &sx).unwrap();
        assert_eq!(c.kind, ConeKind::Point);

        // a single ray: (sigma_z, sigma_x + I)
        let sx_plus = HermitianMatrix::from_real(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let c = cone_rays_2d(&HermitianMatrix::diag(&[1.0, -1.0]), &sx_plus).unwrap();
        assert_eq!(c.kind, ConeKind::Ray);
        assert!((c.rays[0][0]).abs() < 1e-6 && (c.rays[0][1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cone_rays_sit_on_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let s1 = random_hermitian(&mut rng, 3);
            let s2 = random_hermitian(&mut rng, 3);
            let c = cone_rays_2d(&s1, &s2).unwrap();
            if c.kind != ConeKind::Simplex {
                continue;
            }
            let scale = s1.frobenius_norm().max(s2.frobenius_norm());
            for ray in &c.rays {
                let h = HermitianMatrix::lincomb(&[(ray[0], &s1), (ray[1], &s2)]).unwrap();
                let lam = eigh(&h).unwrap().min_eigenvalue();
                assert!(lam.abs() < 1e-9 * scale.max(1.0), "boundary ray lambda {lam}");
            }
            // interior bisector strictly psd
            let bis = [
                (c.rays[0][0] + c.rays[1][0]) / 2.0,
                (c.rays[0][1] + c.rays[1][1]) / 2.0,
            ];
            let h = HermitianMatrix::lincomb(&[(bis[0], &s1), (bis[1], &s2)]).unwrap();
            assert!(eigh(&h).unwrap().min_eigenvalue() > 0.0);
        }
    }

    #[test]
    fn cone_classification_agrees_with_direction_sampling() {
        // brute-force check: the classified cone must contain exactly the
        // directions whose pencil is psd
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for trial in 0..40 {
            let n = 2 + trial % 3;
            let s1 = random_hermitian(&mut rng, n);
            let s2 = random_hermitian(&mut rng, n);
            let cone = cone_rays_2d(&s1, &s2).unwrap();
            let scale = s1.frobenius_norm().max(s2.frobenius_norm());
            for k in 0..360 {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 360.0;
                let dir = [theta.cos(), theta.sin()];
                let h = HermitianMatrix::lincomb(&[(dir[0], &s1), (dir[1], &s2)]).unwrap();
                let lam = eigh(&h).unwrap().min_eigenvalue();
                if lam.abs() < 1e-7 * scale {
                    continue; // too close to the boundary to call either way
                }
                let inside = lam > 0.0;
                let predicted = match cone.kind {
                    ConeKind::Full | ConeKind::Zero => true,
                    ConeKind::Point => false,
                    ConeKind::Ray | ConeKind::Nonsalient | ConeKind::Simplex => {
                        // inside iff the direction lies in the angular span
                        let mut hit = false;
                        if cone.kind == ConeKind::Simplex || cone.kind == ConeKind::Nonsalient {
                            let a0 = cone.rays[0][1].atan2(cone.rays[0][0]);
                            let a1 = cone.rays[1][1].atan2(cone.rays[1][0]);
                            let width = (a1 - a0).rem_euclid(2.0 * std::f64::consts::PI);
                            let off = (theta - a0).rem_euclid(2.0 * std::f64::consts::PI);
                            hit = off <= width + 1e-9;
                        }
                        hit
                    }
                };
                assert_eq!(
                    inside, predicted,
                    "trial {trial} kind {:?} theta {theta}: lambda_min {lam}",
                    cone.kind
                );
            }
        }
    }

    #[test]
    fn rank2_already_separable_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let s1 = random_psd(&mut rng, 3);
        let s2 = random_psd(&mut rng, 3);
        let t1 = random_psd(&mut rng, 3);
        let t2 = random_psd(&mut rng, 3);
        let pairs = separable_rank2(&s1, &t1, &s2, &t2, DEFAULT_TOL).unwrap();
        assert!(pairs.len() <= 2 && !pairs.is_empty());
    }

    #[test]
    fn rank2_collinear_left_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let s1 = random_psd(&mut rng, 2);
        let s2 = s1.scale(2.0);
        let t1 = random_psd(&mut rng, 2);
        let t2 = random_psd(&mut rng, 2);
        let pairs = separable_rank2(&s1, &t1, &s2, &t2, DEFAULT_TOL).unwrap();
        assert_eq!(pairs.len(), 1);
        // single pair reconstructs s1 ⊗ (t1 + 2 t2)
        let expected = kron_hermitian(&s1, &t1.add(&t2.scale(2.0))).unwrap();
        let got = kron_hermitian(&pairs[0].0, &pairs[0].1).unwrap();
        assert!(got.sub(&expected).frobenius_norm() < 1e-8 * (1.0 + expected.frobenius_norm()));
    }

    #[test]
    fn rank2_random_instances_produce_verified_decompositions() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..25 {
            let (s1, t1, s2, t2) = random_rank2_instance(&mut rng, 3, 3);
            let rho = kron_hermitian(&s1, &t1).unwrap().add(&kron_hermitian(&s2, &t2).unwrap());
            let pairs = separable_rank2(&s1, &t1, &s2, &t2, DEFAULT_TOL).unwrap();
            assert!(pairs.len() <= 2);
            // independent verification through eigh and dense reconstruction
            let mut acc = HermitianMatrix::zeros(9);
            for (l, r) in &pairs {
                assert!(eigh(l).unwrap().min_eigenvalue() >= -1e-9 * l.max_abs().max(1.0));
                assert!(eigh(r).unwrap().min_eigenvalue() >= -1e-9 * r.max_abs().max(1.0));
                acc = acc.add(&kron_hermitian(l, r).unwrap());
            }
            let err = acc.sub(&rho).frobenius_norm() / (1.0 + rho.frobenius_norm());
            assert!(err < 1e-8, "reconstruction {err}");
        }
    }

    #[test]
    fn rank2_rejects_non_psd_state() {
        // sigma_z ⊗ sigma_z + 0: indefinite
        let sz = HermitianMatrix::diag(&[1.0, -1.0]);
        let z = HermitianMatrix::zeros(2);
        assert!(matches!(
            separable_rank2(&sz, &sz, &z, &z, DEFAULT_TOL),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn oracle_small_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let a = random_psd(&mut rng, 2);
        let b = random_psd(&mut rng, 2);
        let prod = kron_hermitian(&a, &b).unwrap();
        assert_eq!(
            separability_oracle_small(&prod, 2, 2, DEFAULT_TOL).unwrap(),
            SeparabilityVerdict::Separable
        );

        // maximally entangled state
        let mut acc = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let e = ComplexMatrix::elementary(2, i, j);
                acc = &acc + &kron(&e, &e).unwrap();
            }
        }
        let phi = HermitianMatrix::new(acc.scale_re(0.5)).unwrap();
        assert_eq!(
            separability_oracle_small(&phi, 2, 2, DEFAULT_TOL).unwrap(),
            SeparabilityVerdict::Entangled
        );

        // 3x3 PPT input: maximally mixed
        let mixed = HermitianMatrix::identity(9).scale(1.0 / 9.0);
        assert_eq!(
            separability_oracle_small(&mixed, 3, 3, DEFAULT_TOL).unwrap(),
            SeparabilityVerdict::Inconclusive
        );
    }

    #[test]
    fn table_two_chain_on_random_instances() {
        // separable (oracle-conclusive) => psd => no block-positivity violation
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..20 {
            let mut rho = HermitianMatrix::zeros(4);
            for _ in 0..3 {
                let a = random_psd(&mut rng, 2);
                let b = random_psd(&mut rng, 2);
                rho = rho.add(&kron_hermitian(&a, &b).unwrap());
            }
            assert_eq!(
                separability_oracle_small(&rho, 2, 2, DEFAULT_TOL).unwrap(),
                SeparabilityVerdict::Separable
            );
            assert!(is_psd(&rho, DEFAULT_TOL).unwrap());
            let c = ChoiMatrix { matrix: rho, input_dim: 2, output_dim: 2 };
            assert!(matches!(
                block_positivity_search(&c, 10, 10, 3, DEFAULT_TOL).unwrap(),
                BlockPositivity::NoViolationFound { .. }
            ));
        }
    }
}
