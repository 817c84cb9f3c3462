//! Free spectrahedra, the matrix diamond, and joint measurability.
//!
//! A linear matrix polynomial `l = s_0 ⊗ 1 + sum_i s_i ⊗ z_i` defines a level
//! set `C_s(l) = {(t_1..t_d) : s_0 ⊗ I + sum_i s_i ⊗ t_i psd}`. The matrix
//! diamond is the free spectrahedron whose level `s` consists of the tuples
//! with `I - sum_i ±t_i` psd for every sign choice; level 1 is the 1-norm
//! unit ball. Binary quantum effects are jointly measurable exactly when the
//! diamond is contained in the spectrahedron of
//! `I ⊗ 1 - sum_i (2 s_i - I) ⊗ z_i`, and that containment is decided here
//! through the marginal-consistency SDP.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::random::random_hermitian;
use crate::linalg::{eigh, is_psd, kron, ComplexMatrix, HermitianMatrix};
use crate::sdp::{solve, SdpConstraint, SdpProblem, SdpStatus, SolveOptions};

/// Maximum number of measurements accepted by the joint-measurability SDP
/// (the block count is `2^d`).
pub const JOINT_MEAS_MAX_ARITY: usize = 10;

/// Maximum arity for matrix-diamond membership (`2^d` sign patterns).
pub const DIAMOND_MAX_ARITY: usize = 20;

/// Linear matrix polynomial `s_0 ⊗ 1 + sum_i s_i ⊗ z_i`.
#[derive(Debug, Clone)]
pub struct LinearMatrixPolynomial {
    pub constant: HermitianMatrix,
    pub coefficients: Vec<HermitianMatrix>,
}

impl LinearMatrixPolynomial {
    pub fn new(constant: HermitianMatrix, coefficients: Vec<HermitianMatrix>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput("need at least one coefficient".into()));
        }
        let m = constant.dim();
        if coefficients.iter().any(|c| c.dim() != m) {
            return Err(Error::InvalidInput("coefficient sizes differ".into()));
        }
        Ok(Self { constant, coefficients })
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficient_dim(&self) -> usize {
        self.constant.dim()
    }

    /// Evaluates `s_0 ⊗ I_s + sum_i s_i ⊗ t_i`.
    pub fn evaluate(&self, tuple: &FreeTuple) -> Result<HermitianMatrix> {
        if tuple.arity() != self.arity() {
            return Err(Error::InvalidInput(format!(
                "polynomial arity {} vs tuple arity {}",
                self.arity(),
                tuple.arity()
            )));
        }
        let s = tuple.level();
        let mut acc = kron(self.constant.as_matrix(), &ComplexMatrix::identity(s))?;
        for (sigma, tau) in self.coefficients.iter().zip(&tuple.matrices) {
            acc = &acc + &kron(sigma.as_matrix(), tau.as_matrix())?;
        }
        HermitianMatrix::from_nearly_hermitian(acc)
    }
}

/// Tuple of Hermitian matrices of a common size (the level).
#[derive(Debug, Clone)]
pub struct FreeTuple {
    pub matrices: Vec<HermitianMatrix>,
}

impl FreeTuple {
    pub fn new(matrices: Vec<HermitianMatrix>) -> Result<Self> {
        let s = matrices
            .first()
            .map(|m| m.dim())
            .ok_or_else(|| Error::InvalidInput("empty tuple".into()))?;
        if matrices.iter().any(|m| m.dim() != s) {
            return Err(Error::InvalidInput("tuple matrices differ in size".into()));
        }
        Ok(Self { matrices })
    }

    /// Level-1 tuple from real scalars.
    pub fn scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| HermitianMatrix::diag(&[v])).collect())
    }

    pub fn arity(&self) -> usize {
        self.matrices.len()
    }

    pub fn level(&self) -> usize {
        self.matrices[0].dim()
    }
}

/// Membership of a tuple in the level set of a free spectrahedron.
pub fn level_membership(
    poly: &LinearMatrixPolynomial,
    tuple: &FreeTuple,
    tol: f64,
) -> Result<bool> {
    is_psd(&poly.evaluate(tuple)?, tol)
}

/// Membership in the matrix diamond: `I - sum_i e_i t_i` psd for all sign
/// patterns `e in {-1, +1}^d`.
pub fn matrix_diamond_membership(tuple: &FreeTuple, tol: f64) -> Result<bool> {
    let d = tuple.arity();
    if d > DIAMOND_MAX_ARITY {
        return Err(Error::SizeLimit(format!(
            "diamond membership capped at arity {DIAMOND_MAX_ARITY}, got {d}"
        )));
    }
    let s = tuple.level();
    let id = HermitianMatrix::identity(s);
    for mask in 0u32..(1u32 << d) {
        let mut terms: Vec<(f64, &HermitianMatrix)> = Vec::with_capacity(d + 1);
        terms.push((1.0, &id));
        for (i, t) in tuple.matrices.iter().enumerate() {
            let sign = if mask & (1 << i) != 0 { -1.0 } else { 1.0 };
            terms.push((-sign, t));
        }
        let h = HermitianMatrix::lincomb(&terms)?;
        if !is_psd(&h, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Joint POVM over outcome strings `e in {0,1}^d`, indexed by bitmask.
#[derive(Debug, Clone)]
pub struct JointPovm {
    pub effects: Vec<HermitianMatrix>,
}

impl JointPovm {
    pub fn arity(&self) -> usize {
        self.effects.len().trailing_zeros() as usize
    }

    /// Marginal for measurement `i`: sum of effects with bit `i` set.
    pub fn marginal(&self, i: usize) -> HermitianMatrix {
        let m = self.effects[0].dim();
        let mut acc = HermitianMatrix::zeros(m);
        for (mask, g) in self.effects.iter().enumerate() {
            if mask & (1 << i) != 0 {
                acc = acc.add(g);
            }
        }
        acc
    }

    pub fn sum(&self) -> HermitianMatrix {
        let m = self.effects[0].dim();
        self.effects.iter().fold(HermitianMatrix::zeros(m), |a, g| a.add(g))
    }

    /// Checks psd effects, unit sum, and the marginals against the given
    /// target effects; returns the worst residual.
    pub fn verify(&self, targets: &[HermitianMatrix], tol: f64) -> Result<f64> {
        let m = self.effects[0].dim();
        for g in &self.effects {
            if !is_psd(g, tol.max(1e-7))? {
                return Err(Error::InternalInconsistency(
                    "joint POVM effect not psd".into(),
                ));
            }
        }
        let mut worst = self.sum().sub(&HermitianMatrix::identity(m)).frobenius_norm();
        for (i, sigma) in targets.iter().enumerate() {
            worst = worst.max(self.marginal(i).sub(sigma).frobenius_norm());
        }
        Ok(worst)
    }
}

/// Outcome of the joint-measurability test.
#[derive(Debug, Clone)]
pub enum JointMeasurability {
    Yes { povm: JointPovm, margin: f64 },
    No { margin: f64 },
}

impl JointMeasurability {
    pub fn is_compatible(&self) -> bool {
        matches!(self, JointMeasurability::Yes { .. })
    }

    pub fn margin(&self) -> f64 {
        match self {
            JointMeasurability::Yes { margin, .. } | JointMeasurability::No { margin } => *margin,
        }
    }
}

fn check_binary_effects(effects: &[HermitianMatrix], tol: f64) -> Result<usize> {
    let d = effects.len();
    if d == 0 {
        return Err(Error::InvalidInput("no effects given".into()));
    }
    if d > JOINT_MEAS_MAX_ARITY {
        return Err(Error::SizeLimit(format!(
            "joint measurability capped at {JOINT_MEAS_MAX_ARITY} effects, got {d}"
        )));
    }
    let m = effects[0].dim();
    let id = HermitianMatrix::identity(m);
    for (i, sigma) in effects.iter().enumerate() {
        if sigma.dim() != m {
            return Err(Error::InvalidInput("effect sizes differ".into()));
        }
        let lo = eigh(sigma)?.min_eigenvalue();
        let hi = eigh(&id.sub(sigma))?.min_eigenvalue();
        let t = tol.max(1e-9) * sigma.max_abs().max(1.0);
        if lo < -t || hi < -t {
            return Err(Error::PreconditionViolation(format!(
                "effect {i} is not a binary POVM element (0 <= sigma <= I fails)"
            )));
        }
    }
    Ok(m)
}

/// Orthonormal Hermitian basis of `Her_m` (dimension `m^2`).
pub(crate) fn hermitian_basis(m: usize) -> Vec<HermitianMatrix> {
    use num_complex::Complex64 as C64;
    let mut basis = Vec::with_capacity(m * m);
    for i in 0..m {
        let mut e = ComplexMatrix::zeros(m, m);
        e.set(i, i, C64::new(1.0, 0.0));
        basis.push(HermitianMatrix::from_nearly_hermitian(e).unwrap());
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..m {
        for j in (i + 1)..m {
            let mut e = ComplexMatrix::zeros(m, m);
            e.set(i, j, C64::new(r, 0.0));
            e.set(j, i, C64::new(r, 0.0));
            basis.push(HermitianMatrix::from_nearly_hermitian(e).unwrap());
            let mut f = ComplexMatrix::zeros(m, m);
            f.set(i, j, C64::new(0.0, -r));
            f.set(j, i, C64::new(0.0, r));
            basis.push(HermitianMatrix::from_nearly_hermitian(f).unwrap());
        }
    }
    basis
}

/// Decides whether binary effects `0 <= sigma_i <= I` are marginals of one
/// POVM over `{0,1}^d`.
///
/// Internally this maximises the feasibility margin `t` with
/// `G_e = Ghat_e + t I`, `Ghat_e` psd, which keeps the yes/no decision stable
/// near the compatibility boundary; the effects are jointly measurable iff
/// the optimal margin is nonnegative.
pub fn jointly_measurable(effects: &[HermitianMatrix], tol: f64) -> Result<JointMeasurability> {
    let m = check_binary_effects(effects, tol)?;
    let d = effects.len();
    let cells = 1usize << d;

    // Blocks: one per outcome string, then two scalar blocks for t = u - v.
    let mut block_dims = vec![m; cells];
    block_dims.push(1);
    block_dims.push(1);
    let mut objective: Vec<HermitianMatrix> =
        (0..cells).map(|_| HermitianMatrix::zeros(m)).collect();
    objective.push(HermitianMatrix::diag(&[-1.0])); // maximise t = u - v
    objective.push(HermitianMatrix::diag(&[1.0]));

    let basis = hermitian_basis(m);
    let id = HermitianMatrix::identity(m);
    let mut constraints = Vec::new();
    // sum_e G_e = I  and  sum_{e: e_i = 1} G_e = sigma_i, with
    // G_e = Ghat_e + t I substituted.
    for (target_bit, rhs_mat) in
        std::iter::once((None, &id)).chain((0..d).map(|i| (Some(i), &effects[i])))
    {
        let members: Vec<usize> = (0..cells)
            .filter(|&e| target_bit.map(|i| e & (1 << i) != 0).unwrap_or(true))
            .collect();
        let t_weight = members.len() as f64;
        for b in &basis {
            let mut coeffs: Vec<HermitianMatrix> =
                (0..cells).map(|_| HermitianMatrix::zeros(m)).collect();
            for &e in &members {
                coeffs[e] = b.clone();
            }
            let tr_b = b.trace();
            coeffs.push(HermitianMatrix::diag(&[t_weight * tr_b]));
            coeffs.push(HermitianMatrix::diag(&[-t_weight * tr_b]));
            constraints.push(SdpConstraint { coeffs, rhs: b.trace_inner(rhs_mat) });
        }
    }

    let problem = SdpProblem { block_dims, objective, constraints };
    let sol = solve(&problem, &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Indeterminate(format!(
            "margin SDP did not certify (status {:?})",
            sol.status
        )));
    }
    let t = sol.blocks[cells].at(0, 0).re - sol.blocks[cells + 1].at(0, 0).re;
    if t >= -tol.max(1e-9) {
        let shift = HermitianMatrix::identity(m).scale(t.max(0.0));
        let effects_out: Vec<HermitianMatrix> =
            (0..cells).map(|e| sol.blocks[e].add(&shift)).collect();
        let povm = JointPovm { effects: effects_out };
        let resid = povm.verify(effects, tol)?;
        if resid > 1e-6 {
            return Err(Error::Indeterminate(format!(
                "joint POVM residual {resid:.3e} too large"
            )));
        }
        Ok(JointMeasurability::Yes { povm, margin: t })
    } else {
        Ok(JointMeasurability::No { margin: t })
    }
}

/// The polynomial `I ⊗ 1 - sum_i (2 sigma_i - I) ⊗ z_i` whose free
/// spectrahedron contains the matrix diamond iff the effects are compatible.
pub fn effects_polynomial(effects: &[HermitianMatrix]) -> Result<LinearMatrixPolynomial> {
    let m = effects
        .first()
        .map(|e| e.dim())
        .ok_or_else(|| Error::InvalidInput("no effects".into()))?;
    let id = HermitianMatrix::identity(m);
    let coeffs = effects
        .iter()
        .map(|s| HermitianMatrix::lincomb(&[(-2.0, s), (1.0, &id)]))
        .collect::<Result<Vec<_>>>()?;
    LinearMatrixPolynomial::new(id, coeffs)
}

/// Scales a Hermitian tuple onto (or inside) the boundary of the matrix
/// diamond. Returns `None` when every sign combination is already negative
/// semidefinite (no scaling can reach the boundary).
fn scale_into_diamond(tuple: &[HermitianMatrix], shrink: f64) -> Result<Option<FreeTuple>> {
    let d = tuple.len();
    let mut worst = f64::NEG_INFINITY;
    for mask in 0u32..(1u32 << d) {
        let terms: Vec<(f64, &HermitianMatrix)> = tuple
            .iter()
            .enumerate()
            .map(|(i, t)| (if mask & (1 << i) != 0 { -1.0 } else { 1.0 }, t))
            .collect();
        let h = HermitianMatrix::lincomb(&terms)?;
        worst = worst.max(eigh(&h)?.max_eigenvalue());
    }
    if worst <= 1e-12 {
        return Ok(None);
    }
    let f = shrink / worst;
    Ok(Some(FreeTuple::new(tuple.iter().map(|t| t.scale(f)).collect())?))
}

/// Report of [`diamond_inclusion_test`].
#[derive(Debug, Clone)]
pub struct DiamondInclusionReport {
    pub included: bool,
    pub joint_povm: Option<JointPovm>,
    /// Diamond point violating the spectrahedron when `included == false`
    /// and the search succeeded.
    pub witness: Option<FreeTuple>,
    pub sampled_points: usize,
}

/// Joint measurability re-expressed as containment of the matrix diamond in
/// `C(l)`. On "yes" the necessity direction is spot-checked on sampled
/// level-1 and level-2 diamond points; on "no" a violating diamond point is
/// searched for (matched candidate `2 sigma_i - I` first, then random).
pub fn diamond_inclusion_test(
    effects: &[HermitianMatrix],
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<DiamondInclusionReport> {
    let poly = effects_polynomial(effects)?;
    let m = effects[0].dim();
    let d = effects.len();
    let verdict = jointly_measurable(effects, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    match verdict {
        JointMeasurability::Yes { povm, .. } => {
            let mut checked = 0usize;
            for k in 0..samples {
                let level = if k % 2 == 0 { 1 } else { 2 };
                let raw: Vec<HermitianMatrix> =
                    (0..d).map(|_| random_hermitian(&mut rng, level)).collect();
                let shrink = rng.gen_range(0.1..1.0);
                if let Some(point) = scale_into_diamond(&raw, shrink)? {
                    checked += 1;
                    if !level_membership(&poly, &point, tol.max(1e-8))? {
                        return Err(Error::InternalInconsistency(
                            "jointly measurable effects with a diamond point outside C(l)".into(),
                        ));
                    }
                }
            }
            Ok(DiamondInclusionReport {
                included: true,
                joint_povm: Some(povm),
                witness: None,
                sampled_points: checked,
            })
        }
        JointMeasurability::No { .. } => {
            let id = HermitianMatrix::identity(m);
            let matched: Vec<HermitianMatrix> = effects
                .iter()
                .map(|s| HermitianMatrix::lincomb(&[(2.0, s), (-1.0, &id)]))
                .collect::<Result<Vec<_>>>()?;
            let mut witness = None;
            let mut checked = 0usize;
            if let Some(point) = scale_into_diamond(&matched, 1.0)? {
                checked += 1;
                if !level_membership(&poly, &point, tol.max(1e-9))? {
                    witness = Some(point);
                }
            }
            if witness.is_none() {
                for _ in 0..samples {
                    let raw: Vec<HermitianMatrix> =
                        (0..d).map(|_| random_hermitian(&mut rng, m)).collect();
                    if let Some(point) = scale_into_diamond(&raw, 1.0)? {
                        checked += 1;
                        if !level_membership(&poly, &point, tol.max(1e-9))? {
                            witness = Some(point);
                            break;
                        }
                    }
                }
            }
            Ok(DiamondInclusionReport {
                included: false,
                joint_povm: None,
                witness,
                sampled_points: checked,
            })
        }
    }
}

/// Mixes each effect toward its trivial counterpart `tr(sigma)/m * I` with
/// weight `eta` on the original.
pub fn noisy_effects(effects: &[HermitianMatrix], eta: f64) -> Result<Vec<HermitianMatrix>> {
    effects
        .iter()
        .map(|s| {
            let m = s.dim();
            let trivial = HermitianMatrix::identity(m).scale(s.trace() / m as f64);
            HermitianMatrix::lincomb(&[(eta, s), (1.0 - eta, &trivial)])
        })
        .collect()
}

/// Bisects the noise parameter of [`noisy_effects`] for the compatibility
/// threshold. Returns `(last_feasible, first_infeasible)` with
/// `hi - lo <= width`; `(1, 1)` when the effects are compatible as given.
pub fn noise_threshold(effects: &[HermitianMatrix], tol: f64, width: f64) -> Result<(f64, f64)> {
    if width <= 0.0 {
        return Err(Error::InvalidInput("bisection width must be positive".into()));
    }
    if jointly_measurable(effects, tol)?.is_compatible() {
        return Ok((1.0, 1.0));
    }
    let mut lo = 0.0f64; // always compatible: every effect proportional to I
    let mut hi = 1.0f64;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let noisy = noisy_effects(effects, mid)?;
        if jointly_measurable(&noisy, tol)?.is_compatible() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_psd;
    use crate::DEFAULT_TOL;

    fn pauli_z() -> HermitianMatrix {
        HermitianMatrix::diag(&[1.0, -1.0])
    }

    fn pauli_x() -> HermitianMatrix {
        HermitianMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    /// The noisy orthogonal qubit pair (I + eta sigma_z)/2, (I + eta sigma_x)/2.
    fn noisy_pair(eta: f64) -> Vec<HermitianMatrix> {
        let id = HermitianMatrix::identity(2);
        vec![
            HermitianMatrix::lincomb(&[(0.5, &id), (0.5 * eta, &pauli_z())]).unwrap(),
            HermitianMatrix::lincomb(&[(0.5, &id), (0.5 * eta, &pauli_x())]).unwrap(),
        ]
    }

    #[test]
    fn free_positive_orthant_membership() {
        // p = sum_i E_ii ⊗ z_i: membership iff all tau_i psd.
        let d = 3;
        let coeffs: Vec<HermitianMatrix> = (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                HermitianMatrix::diag(&v)
            })
            .collect();
        let p = LinearMatrixPolynomial::new(HermitianMatrix::zeros(d), coeffs).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let psd_tuple = FreeTuple::new((0..d).map(|_| random_psd(&mut rng, 2)).collect()).unwrap();
        assert!(level_membership(&p, &psd_tuple, DEFAULT_TOL).unwrap());

        let bad = FreeTuple::scalars(&[1.0, -0.5, 2.0]).unwrap();
        assert!(!level_membership(&p, &bad, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn membership_respects_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let poly = LinearMatrixPolynomial::new(
            HermitianMatrix::identity(2),
            vec![random_hermitian(&mut rng, 2), random_hermitian(&mut rng, 2)],
        )
        .unwrap();
        for _ in 0..20 {
            let t1 = FreeTuple::new(vec![
                random_hermitian(&mut rng, 2).scale(0.4),
                random_hermitian(&mut rng, 2).scale(0.4),
            ])
            .unwrap();
            let t2 = FreeTuple::new(vec![
                random_hermitian(&mut rng, 3).scale(0.4),
                random_hermitian(&mut rng, 3).scale(0.4),
            ])
            .unwrap();
            let sum = FreeTuple::new(
                t1.matrices
                    .iter()
                    .zip(&t2.matrices)
                    .map(|(a, b)| {
                        HermitianMatrix::new(a.as_matrix().direct_sum(b.as_matrix())).unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let m1 = level_membership(&poly, &t1, DEFAULT_TOL).unwrap();
            let m2 = level_membership(&poly, &t2, DEFAULT_TOL).unwrap();
            let ms = level_membership(&poly, &sum, DEFAULT_TOL).unwrap();
            assert_eq!(ms, m1 && m2);
        }
    }

    #[test]
    fn diamond_level_one_is_the_one_norm_ball() {
        assert!(
            matrix_diamond_membership(&FreeTuple::scalars(&[0.5, 0.4]).unwrap(), DEFAULT_TOL)
                .unwrap()
        );
        assert!(
            !matrix_diamond_membership(&FreeTuple::scalars(&[0.9, 0.2]).unwrap(), DEFAULT_TOL)
                .unwrap()
        );

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let verdict =
                matrix_diamond_membership(&FreeTuple::scalars(&v).unwrap(), DEFAULT_TOL).unwrap();
            let one_norm: f64 = v.iter().map(|x| x.abs()).sum();
            if (one_norm - 1.0).abs() > 1e-9 {
                assert_eq!(verdict, one_norm <= 1.0);
            }
        }
    }

    #[test]
    fn diamond_pauli_boundary_pair() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let tuple = FreeTuple::new(vec![pauli_z().scale(r), pauli_x().scale(r)]).unwrap();
        // Eigenvalues of I ± (sz ± sx)/sqrt(2) are {0, 2}: boundary member.
        assert!(matrix_diamond_membership(&tuple, 1e-8).unwrap());
    }

    #[test]
    fn duplicate_and_commuting_effects_are_compatible() {
        let sigma = HermitianMatrix::diag(&[0.7, 0.2]);
        let v = jointly_measurable(&[sigma.clone(), sigma.clone()], DEFAULT_TOL).unwrap();
        assert!(v.is_compatible());

        let a = HermitianMatrix::diag(&[0.9, 0.1]);
        let b = HermitianMatrix::diag(&[0.3, 0.6]);
        let v = jointly_measurable(&[a.clone(), b.clone()], DEFAULT_TOL).unwrap();
        assert!(v.is_compatible());
        if let JointMeasurability::Yes { povm, .. } = v {
            assert!(povm.verify(&[a, b], 1e-7).unwrap() < 1e-6);
        }
    }

    #[test]
    fn single_effect_is_self_compatible() {
        let sigma = HermitianMatrix::from_real(&[vec![0.6, 0.2], vec![0.2, 0.3]]).unwrap();
        let rep = diamond_inclusion_test(&[sigma], DEFAULT_TOL, 20, 0).unwrap();
        assert!(rep.included);
    }

    #[test]
    fn invalid_effect_rejected() {
        let too_big = HermitianMatrix::diag(&[1.5, 0.0]);
        assert!(matches!(
            jointly_measurable(&[too_big], DEFAULT_TOL),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn noisy_pair_threshold_brackets() {
        // Feasible at 0.70, infeasible at 0.72 (critical noise 1/sqrt(2)).
        let v = jointly_measurable(&noisy_pair(0.70), DEFAULT_TOL).unwrap();
        assert!(v.is_compatible(), "margin {}", v.margin());
        let v = jointly_measurable(&noisy_pair(0.72), DEFAULT_TOL).unwrap();
        assert!(!v.is_compatible(), "margin {}", v.margin());
    }

    #[test]
    fn strongly_noisy_pair_yields_witness() {
        let rep = diamond_inclusion_test(&noisy_pair(0.9), DEFAULT_TOL, 50, 1).unwrap();
        assert!(!rep.included);
        let w = rep.witness.expect("violating diamond point found");
        assert!(matrix_diamond_membership(&w, 1e-7).unwrap());
        let poly = effects_polynomial(&noisy_pair(0.9)).unwrap();
        assert!(!level_membership(&poly, &w, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn compatible_effects_pass_200_sampled_diamond_points() {
        // the easy direction of the containment theorem
        let a = HermitianMatrix::from_real(&[vec![0.55, 0.1], vec![0.1, 0.45]]).unwrap();
        let b = HermitianMatrix::diag(&[0.6, 0.4]);
        let rep = diamond_inclusion_test(&[a, b], DEFAULT_TOL, 200, 5).unwrap();
        assert!(rep.included);
        assert!(rep.sampled_points >= 200);
    }

    #[test]
    fn diamond_arity_cap() {
        let t = FreeTuple::scalars(&vec![0.01; 21]).unwrap();
        assert!(matches!(
            matrix_diamond_membership(&t, DEFAULT_TOL),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn trivial_effects_compatible() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        let rep =
            diamond_inclusion_test(&[half.clone(), half.clone(), half], DEFAULT_TOL, 10, 2)
                .unwrap();
        assert!(rep.included);
    }

    #[test]
    fn three_orthogonal_noisy_effects_threshold() {
        // triple of unbiased qubit effects along z, x, y: the compatibility
        // threshold sits at 1/sqrt(3) ~ 0.577
        let id = HermitianMatrix::identity(2);
        let sz = pauli_z();
        let sx = pauli_x();
        let sy = HermitianMatrix::new(ComplexMatrix::from_rows(&[
            vec![num_complex::Complex64::new(0.0, 0.0), num_complex::Complex64::new(0.0, -1.0)],
            vec![num_complex::Complex64::new(0.0, 1.0), num_complex::Complex64::new(0.0, 0.0)],
        ]).unwrap())
        .unwrap();
        let triple = |eta: f64| -> Vec<HermitianMatrix> {
            [&sz, &sx, &sy]
                .iter()
                .map(|s| HermitianMatrix::lincomb(&[(0.5, &id), (0.5 * eta, s)]).unwrap())
                .collect()
        };
        let v = jointly_measurable(&triple(0.55), DEFAULT_TOL).unwrap();
        assert!(v.is_compatible(), "margin {}", v.margin());
        let v = jointly_measurable(&triple(0.60), DEFAULT_TOL).unwrap();
        assert!(!v.is_compatible(), "margin {}", v.margin());
    }

    #[test]
    fn compatibility_monotone_along_noise_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..3 {
            let effects: Vec<HermitianMatrix> = (0..2)
                .map(|_| {
                    let g = random_psd(&mut rng, 2);
                    let top = eigh(&g).unwrap().max_eigenvalue();
                    g.scale(1.0 / (top * 1.01))
                })
                .collect();
            let mut seen_yes = false;
            for k in 0..10 {
                let eta = 1.0 - k as f64 / 9.0;
                let v = jointly_measurable(&noisy_effects(&effects, eta).unwrap(), DEFAULT_TOL)
                    .unwrap();
                if seen_yes {
                    assert!(
                        v.is_compatible(),
                        "compatibility must not flip back as noise grows (eta {eta})"
                    );
                }
                seen_yes = seen_yes || v.is_compatible();
            }
            assert!(seen_yes, "fully noisy effects are compatible");
        }
    }
}
