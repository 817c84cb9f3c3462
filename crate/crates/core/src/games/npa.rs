//! Moment-matrix relaxations of the quantum game value.
//!
//! Generators are projectors, one per (question, answer) pair with the last
//! answer of each question eliminated. Words collapse under idempotence,
//! vanish when two different answers of the same question meet, and Alice
//! letters commute past Bob letters (canonical order: Alice first). The
//! moment matrix over all canonical words of bounded length, constrained by
//! entry identifications and psd, bounds the quantum value from above.

use std::collections::HashMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{is_psd, kron, ComplexMatrix, HermitianMatrix};
use crate::magic::{naimark_dilate, Povm};
use crate::sdp::{solve, SdpConstraint, SdpProblem, SdpStatus, SolveOptions};

use super::{CorrelationTable, NonlocalGame, QuantumStrategy};

/// Cap on the moment-matrix index set.
pub const WORD_CAP: usize = 3000;

/// One projective generator: `party` 0 is Alice, 1 is Bob; `answer` runs
/// over all but the last answer of the question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub party: u8,
    pub question: u16,
    pub answer: u16,
}

/// Canonical word: reduced Alice letters followed by reduced Bob letters.
pub type Word = Vec<Letter>;

/// Reduces one party's letter sequence: adjacent equal letters collapse,
/// adjacent different answers to the same question annihilate the word.
fn reduce_party(seq: &[Letter]) -> Option<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::with_capacity(seq.len());
    for &l in seq {
        if let Some(&last) = out.last() {
            if last == l {
                continue;
            }
            if last.question == l.question {
                return None;
            }
        }
        out.push(l);
    }
    Some(out)
}

fn canonicalize(seq: &[Letter]) -> Option<Word> {
    let alice: Vec<Letter> = seq.iter().copied().filter(|l| l.party == 0).collect();
    let bob: Vec<Letter> = seq.iter().copied().filter(|l| l.party == 1).collect();
    let mut a = reduce_party(&alice)?;
    let b = reduce_party(&bob)?;
    a.extend(b);
    Some(a)
}

fn generators(g: &NonlocalGame) -> Vec<Letter> {
    let mut gens = Vec::new();
    for q in 0..g.questions_a {
        for x in 0..g.answers_a.saturating_sub(1) {
            gens.push(Letter { party: 0, question: q as u16, answer: x as u16 });
        }
    }
    for q in 0..g.questions_b {
        for y in 0..g.answers_b.saturating_sub(1) {
            gens.push(Letter { party: 1, question: q as u16, answer: y as u16 });
        }
    }
    gens
}

/// All canonical nonzero words of length at most `level`, sorted by
/// (length, lexicographic on letters); the empty word comes first.
fn word_index_set(g: &NonlocalGame, level: usize) -> Result<Vec<Word>> {
    let gens = generators(g);
    let mut seen: HashMap<Word, ()> = HashMap::new();
    seen.insert(vec![], ());
    let mut frontier: Vec<Word> = vec![vec![]];
    for _ in 0..level {
        let mut next = Vec::new();
        for w in &frontier {
            for &gen in &gens {
                let mut seq = w.clone();
                seq.push(gen);
                if let Some(c) = canonicalize(&seq) {
                    if c.len() <= level && !seen.contains_key(&c) {
                        seen.insert(c.clone(), ());
                        next.push(c);
                    }
                }
            }
        }
        if seen.len() > WORD_CAP {
            return Err(Error::SizeLimit(format!(
                "moment index set exceeds {WORD_CAP} words"
            )));
        }
        frontier = next;
    }
    let mut words: Vec<Word> = seen.into_keys().collect();
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(words)
}

/// Hermitian coefficient matrix with `<A, M> = Re M[i, j]`.
fn re_entry(n: usize, i: usize, j: usize, weight: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    if i == j {
        m.set(i, i, C64::new(weight, 0.0));
    } else {
        m.set(i, j, C64::new(weight / 2.0, 0.0));
        m.set(j, i, C64::new(weight / 2.0, 0.0));
    }
    m
}

/// Hermitian coefficient matrix with `<A, M> = Im M[i, j]` (i != j).
fn im_entry(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m.set(i, j, C64::new(0.0, 0.5));
    m.set(j, i, C64::new(0.0, -0.5));
    m
}

/// Expanded operator terms of the effect with the last answer eliminated:
/// a list of `(coefficient, Option<Letter>)`, `None` meaning the unit.
fn effect_terms(party: u8, question: usize, answer: usize, answers: usize) -> Vec<(f64, Option<Letter>)> {
    if answer + 1 < answers {
        vec![(1.0, Some(Letter { party, question: question as u16, answer: answer as u16 }))]
    } else {
        let mut terms = vec![(1.0, None)];
        for x in 0..answers - 1 {
            terms.push((
                -1.0,
                Some(Letter { party, question: question as u16, answer: x as u16 }),
            ));
        }
        terms
    }
}

/// Moment-matrix relaxation of a game at a hierarchy level.
#[derive(Debug, Clone)]
pub struct NpaRelaxation {
    pub problem: SdpProblem,
    pub words: Vec<Word>,
    pub level: usize,
    /// Constant part of the game value under last-answer elimination.
    pub constant: f64,
}

impl NpaRelaxation {
    pub fn moment_size(&self) -> usize {
        self.words.len()
    }

    /// Game value as a function of a moment matrix.
    pub fn objective_value(&self, moment: &HermitianMatrix) -> f64 {
        // C was built as the negated value part
        self.constant - self.problem.objective[0].trace_inner(moment)
    }
}

/// Builds the level-`level` relaxation: moment matrix over canonical words,
/// unit normalisation, entry identifications from the word algebra, and the
/// game value as objective.
pub fn npa_relaxation(g: &NonlocalGame, level: usize) -> Result<NpaRelaxation> {
    if !(1..=3).contains(&level) {
        return Err(Error::InvalidInput("hierarchy level must be 1, 2 or 3".into()));
    }
    let words = word_index_set(g, level)?;
    let n = words.len();
    let index: HashMap<Word, usize> =
        words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let _ = &index;

    // group matrix positions by the canonical word of u_i* u_j
    let mut representatives: HashMap<Word, (usize, usize)> = HashMap::new();
    let mut constraints: Vec<SdpConstraint> = Vec::new();
    let mut zero_positions: Vec<(usize, usize)> = Vec::new();
    let mut identifications: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut seq: Vec<Letter> = words[i].iter().rev().copied().collect();
            seq.extend(words[j].iter().copied());
            match canonicalize(&seq) {
                None => zero_positions.push((i, j)),
                Some(w) => match representatives.get(&w) {
                    None => {
                        representatives.insert(w, (i, j));
                    }
                    Some(&rep) => {
                        if rep != (i, j) && rep != (j, i) {
                            identifications.push((rep, (i, j)));
                        }
                    }
                },
            }
        }
    }

    // unit entry
    constraints.push(SdpConstraint {
        coeffs: vec![HermitianMatrix::from_nearly_hermitian(re_entry(n, 0, 0, 1.0))?],
        rhs: 1.0,
    });
    for (i, j) in zero_positions {
        if i <= j {
            constraints.push(SdpConstraint {
                coeffs: vec![HermitianMatrix::from_nearly_hermitian(re_entry(n, i, j, 1.0))?],
                rhs: 0.0,
            });
            if i != j {
                constraints.push(SdpConstraint {
                    coeffs: vec![HermitianMatrix::from_nearly_hermitian(im_entry(n, i, j))?],
                    rhs: 0.0,
                });
            }
        }
    }
    for (rep, pos) in identifications {
        let re = &re_entry(n, rep.0, rep.1, 1.0) - &re_entry(n, pos.0, pos.1, 1.0);
        constraints.push(SdpConstraint {
            coeffs: vec![HermitianMatrix::from_nearly_hermitian(re)?],
            rhs: 0.0,
        });
        let im = &im_entry(n, rep.0, rep.1) - &im_entry(n, pos.0, pos.1);
        if im.max_abs() > 0.0 {
            constraints.push(SdpConstraint {
                coeffs: vec![HermitianMatrix::from_nearly_hermitian(im)?],
                rhs: 0.0,
            });
        }
    }

    // objective: game value = constant + sum_w coeff_w * Re phi(w)
    let mut coeffs: HashMap<Word, f64> = HashMap::new();
    let mut constant = 0.0;
    for a in 0..g.questions_a {
        for b in 0..g.questions_b {
            for x in 0..g.answers_a {
                for y in 0..g.answers_b {
                    let c = g.pi(a, b) * g.wins(a, b, x, y);
                    if c == 0.0 {
                        continue;
                    }
                    for (ca, la) in effect_terms(0, a, x, g.answers_a) {
                        for (cb, lb) in effect_terms(1, b, y, g.answers_b) {
                            let weight = c * ca * cb;
                            let seq: Vec<Letter> =
                                la.iter().chain(lb.iter()).copied().collect();
                            let w = canonicalize(&seq).expect("products of distinct-party letters never vanish");
                            if w.is_empty() {
                                constant += weight;
                            } else {
                                *coeffs.entry(w).or_insert(0.0) += weight;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut c_mat = ComplexMatrix::zeros(n, n);
    for (w, coeff) in &coeffs {
        let &(i, j) = representatives
            .get(w)
            .ok_or_else(|| Error::InternalInconsistency("objective word missing".into()))?;
        c_mat = &c_mat + &re_entry(n, i, j, -coeff);
    }

    let problem = SdpProblem {
        block_dims: vec![n],
        objective: vec![HermitianMatrix::from_nearly_hermitian(c_mat)?],
        constraints,
    };
    Ok(NpaRelaxation { problem, words, level, constant })
}

/// Certificate of an upper bound: the optimal moment matrix.
#[derive(Debug, Clone)]
pub struct NpaCertificate {
    pub level: usize,
    pub moment_matrix: HermitianMatrix,
    pub objective_bound: f64,
}

impl NpaCertificate {
    /// Unit normalisation and psd within tolerance.
    pub fn verify(&self, tol: f64) -> Result<()> {
        if (self.moment_matrix.at(0, 0).re - 1.0).abs() > 1e-6 {
            return Err(Error::InternalInconsistency("unit moment is not 1".into()));
        }
        if !is_psd(&self.moment_matrix, tol.max(1e-6))? {
            return Err(Error::InternalInconsistency("moment matrix is not psd".into()));
        }
        Ok(())
    }
}

/// Solves the relaxation: an upper bound on the quantum value of the game.
pub fn npa_upper_bound(g: &NonlocalGame, level: usize) -> Result<(f64, NpaCertificate)> {
    let relax = npa_relaxation(g, level)?;
    let sol = solve(&relax.problem, &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Indeterminate(format!(
            "moment SDP did not certify optimality (status {:?})",
            sol.status
        )));
    }
    let bound = relax.constant - sol.primal_objective;
    let cert = NpaCertificate {
        level,
        moment_matrix: sol.blocks.into_iter().next().unwrap(),
        objective_bound: bound,
    };
    cert.verify(1e-6)?;
    Ok((bound, cert))
}

/// Quantum strategy with projection-valued measurements.
#[derive(Debug, Clone)]
pub struct ProjectiveStrategy {
    pub state: HermitianMatrix,
    pub dim_a: usize,
    pub dim_b: usize,
    pub alice: Vec<Vec<HermitianMatrix>>,
    pub bob: Vec<Vec<HermitianMatrix>>,
}

fn is_projective(effects: &[HermitianMatrix]) -> Result<bool> {
    for e in effects {
        let sq = HermitianMatrix::from_nearly_hermitian(e.as_matrix() * e.as_matrix())?;
        if sq.sub(e).frobenius_norm() > 1e-10 * (1.0 + e.max_abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dilates a family of POVMs on one party to simultaneous PVMs.
///
/// POVMs are dilated one question at a time; previously processed families
/// ride along as `W . W†`-conjugated effects completed by the off-range
/// projector on outcome 0, which preserves both their POVM structure and
/// projectivity. Returns the PVM families and the total isometry from the
/// original space.
pub fn projectivize_party(
    povms: &[Povm],
) -> Result<(Vec<Vec<HermitianMatrix>>, ComplexMatrix)> {
    let n0 = povms
        .first()
        .map(|p| p.dim())
        .ok_or_else(|| Error::InvalidInput("no POVMs".into()))?;
    let mut families: Vec<Vec<HermitianMatrix>> =
        povms.iter().map(|p| p.effects.clone()).collect();
    let mut isometry = ComplexMatrix::identity(n0);
    for q in 0..families.len() {
        if is_projective(&families[q])? {
            continue;
        }
        let dim = families[q][0].dim();
        let k = families[q].len();
        if dim * k > 4096 {
            return Err(Error::SizeLimit("dilation space exceeds 4096".into()));
        }
        let povm = Povm { effects: families[q].clone() };
        let dil = naimark_dilate(&povm)?;
        let w = dil.isometry.clone();
        let proj_range = &w * &w.adjoint();
        let off_range = &ComplexMatrix::identity(dim * k) - &proj_range;
        for (r, fam) in families.iter_mut().enumerate() {
            if r == q {
                continue;
            }
            *fam = fam
                .iter()
                .enumerate()
                .map(|(x, e)| {
                    let lifted = &(&w * e.as_matrix()) * &w.adjoint();
                    let m = if x == 0 { &lifted + &off_range } else { lifted };
                    HermitianMatrix::from_nearly_hermitian(m)
                })
                .collect::<Result<Vec<_>>>()?;
        }
        families[q] = dil.pvm;
        isometry = &w * &isometry;
    }
    Ok((families, isometry))
}

/// Lifts a POVM strategy to an equivalent projective one (identical
/// correlation table).
pub fn projectivize_strategy(s: &QuantumStrategy) -> Result<ProjectiveStrategy> {
    s.validate()?;
    let (alice, va) = projectivize_party(&s.alice)?;
    let (bob, vb) = projectivize_party(&s.bob)?;
    let big = kron(&va, &vb)?;
    // state -> (VA ⊗ VB) rho (VA ⊗ VB)†
    let state = s.state.conjugate_by(&big.adjoint())?;
    Ok(ProjectiveStrategy {
        state,
        dim_a: alice[0][0].dim(),
        dim_b: bob[0][0].dim(),
        alice,
        bob,
    })
}

impl ProjectiveStrategy {
    fn letter_operator(&self, l: &Letter) -> Result<ComplexMatrix> {
        let (q, x) = (l.question as usize, l.answer as usize);
        match l.party {
            0 => kron(self.alice[q][x].as_matrix(), &ComplexMatrix::identity(self.dim_b)),
            _ => kron(&ComplexMatrix::identity(self.dim_a), self.bob[q][x].as_matrix()),
        }
    }

    /// `phi(w) = tr(rho P_{w_1} ... P_{w_k})`.
    fn phi(&self, seq: &[Letter]) -> Result<C64> {
        let n = self.dim_a * self.dim_b;
        let mut op = ComplexMatrix::identity(n);
        for l in seq {
            op = &op * &self.letter_operator(l)?;
        }
        // tr(rho op) = <rho, op> since rho is Hermitian
        Ok(self.state.as_matrix().trace_inner(&op))
    }

    /// Correlation table of the projective strategy.
    pub fn correlation(&self, g: &NonlocalGame) -> Result<CorrelationTable> {
        let mut p = Vec::new();
        for a in 0..g.questions_a {
            for b in 0..g.questions_b {
                for x in 0..g.answers_a {
                    for y in 0..g.answers_b {
                        let prod = kron(
                            self.alice[a][x].as_matrix(),
                            self.bob[b][y].as_matrix(),
                        )?;
                        p.push(self.state.as_matrix().trace_inner(&prod).re.max(0.0));
                    }
                }
            }
        }
        CorrelationTable::new(g.questions_a, g.questions_b, g.answers_a, g.answers_b, p)
    }
}

/// Evaluates the moment matrix of an explicit projective strategy on the
/// relaxation's word set; it is feasible for the SDP by construction.
pub fn moment_matrix_of_projective_strategy(
    relax: &NpaRelaxation,
    s: &ProjectiveStrategy,
) -> Result<HermitianMatrix> {
    for fam in s.alice.iter().chain(s.bob.iter()) {
        if !is_projective(fam)? {
            return Err(Error::PreconditionViolation(
                "strategy measurements must be projective; dilate first".into(),
            ));
        }
    }
    let n = relax.words.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut seq: Vec<Letter> = relax.words[i].iter().rev().copied().collect();
            seq.extend(relax.words[j].iter().copied());
            let v = s.phi(&seq)?;
            m.set(i, j, v);
            m.set(j, i, v.conj());
        }
    }
    HermitianMatrix::from_nearly_hermitian(m)
}

/// Checks that a moment matrix satisfies every linear constraint of the
/// relaxation; returns the worst residual.
pub fn constraint_residual(relax: &NpaRelaxation, m: &HermitianMatrix) -> f64 {
    relax
        .problem
        .constraints
        .iter()
        .map(|c| (c.coeffs[0].trace_inner(m) - c.rhs).abs())
        .fold(0.0, f64::max)
}
