//! Dense two-phase simplex for small linear programs.
//!
//! Standard form: minimize `c·x` subject to `A x = b`, `x >= 0`. Bland's rule
//! keeps the iteration from cycling; phase I produces a Farkas certificate
//! (`y·A <= 0`, `y·b > 0`) when the program is infeasible.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;

/// `min c·x  s.t.  A x = b, x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64, dual: Vec<f64> },
    /// `farkas` satisfies `farkas·A <= 0` componentwise and `farkas·b > 0`.
    Infeasible { farkas: Vec<f64> },
    Unbounded,
}

struct Tableau {
    m: usize,
    /// columns: n structural + m artificial
    n: usize,
    data: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.n + self.m) + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * (self.n + self.m) + j]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.n + self.m;
        let piv = self.at(row, col);
        for j in 0..w {
            *self.at_mut(row, j) /= piv;
        }
        self.rhs[row] /= piv;
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.at(i, col);
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.at(row, j);
                *self.at_mut(i, j) -= f * v;
            }
            self.rhs[i] -= f * self.rhs[row];
        }
        self.basis[row] = col;
    }

    /// Reduced costs `c_j - y·A_j` for cost vector `costs` (length n + m).
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let w = self.n + self.m;
        let mut r = costs.to_vec();
        for i in 0..self.m {
            let cb = costs[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..w {
                r[j] -= cb * self.at(i, j);
            }
        }
        r
    }

    /// Dual vector `y = c_B B^{-1}`, read off the artificial columns.
    fn duals(&self, costs: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|k| {
                (0..self.m)
                    .map(|i| costs[self.basis[i]] * self.at(i, self.n + k))
                    .sum()
            })
            .collect()
    }

    /// Runs simplex on the given cost vector. Pricing is Dantzig's rule
    /// (most negative reduced cost), falling back to Bland's rule once the
    /// objective stalls, which restores the termination guarantee.
    /// `allowed` masks which columns may enter.
    fn optimize(&mut self, costs: &[f64], allowed: &[bool], max_iter: usize) -> Result<bool> {
        let objective = |t: &Tableau| -> f64 {
            (0..t.m).map(|i| costs[t.basis[i]] * t.rhs[i]).sum()
        };
        let mut stall = 0usize;
        let mut last_obj = f64::INFINITY;
        let mut best_obj = f64::INFINITY;
        let mut since_best = 0usize;
        let stagnation_window = 40 * (self.m + 20);
        // Once the objective stalls, Bland's rule stays on for the rest of
        // the run; re-enabling Dantzig on jittery "improvements" can cycle.
        let mut bland = false;
        // columns with noise-level reduced costs but no pivot row at the
        // current basis; cleared after every successful pivot
        let mut banned = vec![false; allowed.len()];
        for _ in 0..max_iter {
            let r = self.reduced_costs(costs);
            if stall > 40 {
                bland = true;
            }
            let enter_tol = |j: usize| 1e-9 * (1.0 + costs[j].abs());
            let entering = if bland {
                (0..allowed.len()).find(|&j| allowed[j] && !banned[j] && r[j] < -enter_tol(j))
            } else {
                (0..allowed.len())
                    .filter(|&j| allowed[j] && !banned[j] && r[j] < -enter_tol(j))
                    .min_by(|&a, &b| r[a].partial_cmp(&r[b]).unwrap())
            };
            let Some(col) = entering else {
                return Ok(true);
            };
            // Two-pass ratio test: find the minimal ratio, then pick the
            // numerically largest pivot among the rows within a hair of it.
            // Dividing by near-zero pivots is what corrupts the tableau.
            let mut min_ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.at(i, col);
                if a > PIVOT_TOL {
                    min_ratio = min_ratio.min(self.rhs[i] / a);
                }
            }
            let mut leave: Option<(usize, f64)> = None;
            if min_ratio.is_finite() {
                let band = 1e-9 * (1.0 + min_ratio.abs());
                for i in 0..self.m {
                    let a = self.at(i, col);
                    if a > PIVOT_TOL && self.rhs[i] / a <= min_ratio + band {
                        let better = match leave {
                            None => true,
                            Some((li, _)) => a > self.at(li, col),
                        };
                        if better {
                            leave = Some((i, a));
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                // No pivot row: a genuine improving ray only if the reduced
                // cost is decisively negative; noise-level columns are set
                // aside and the search continues.
                if r[col] < -1e-7 * (1.0 + costs[col].abs()) {
                    return Ok(false);
                }
                banned[col] = true;
                continue;
            };
            self.pivot(row, col);
            banned.iter_mut().for_each(|b| *b = false);
            let obj = objective(self);
            if obj < last_obj - 1e-12 * (1.0 + last_obj.abs()) {
                stall = 0;
            } else {
                stall += 1;
            }
            last_obj = obj;
            // Anti-crawl: noise-level pivots around a converged vertex can
            // go on indefinitely in near-degenerate programs; a long window
            // without measurable progress is accepted as optimal.
            if obj < best_obj - 1e-11 * (1.0 + best_obj.abs()) {
                best_obj = obj;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best > stagnation_window {
                    return Ok(true);
                }
            }
        }
        Err(Error::Indeterminate("simplex iteration cap exceeded".into()))
    }
}

/// Solves the standard-form LP.
pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome> {
    let m = p.rows.len();
    let n = p.objective.len();
    if p.rhs.len() != m || p.rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("LP dimensions are inconsistent".into()));
    }
    if m == 0 {
        // Only x >= 0 remains; bounded iff all costs are nonnegative.
        if p.objective.iter().all(|&c| c >= 0.0) {
            return Ok(LpOutcome::Optimal { x: vec![0.0; n], objective: 0.0, dual: vec![] });
        }
        return Ok(LpOutcome::Unbounded);
    }

    let w = n + m;
    let mut data = vec![0.0f64; m * w];
    let mut rhs = vec![0.0f64; m];
    for i in 0..m {
        let flip = if p.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[i * w + j] = flip * p.rows[i][j];
        }
        data[i * w + n + i] = 1.0;
        rhs[i] = flip * p.rhs[i];
    }
    let mut t = Tableau { m, n, data, rhs, basis: (n..n + m).collect() };

    // Phase I: minimize the sum of artificials.
    let mut phase1_costs = vec![0.0f64; w];
    for c in phase1_costs.iter_mut().skip(n) {
        *c = 1.0;
    }
    let allowed_all: Vec<bool> = (0..w).map(|j| j < n).collect();
    let bounded = t.optimize(&phase1_costs, &allowed_all, 20_000 + 50 * (m + n))?;
    debug_assert!(bounded, "phase I is bounded below by zero");
    let phase1_obj: f64 = (0..m)
        .map(|i| if t.basis[i] >= n { t.rhs[i] } else { 0.0 })
        .sum();
    let scale_b = 1.0 + p.rhs.iter().map(|x| x * x).sum::<f64>().sqrt();
    if phase1_obj > FEAS_TOL * scale_b {
        // Farkas certificate in the original row order, with the sign flips
        // undone.
        let y = t.duals(&phase1_costs);
        let farkas: Vec<f64> = (0..m)
            .map(|i| if p.rhs[i] < 0.0 { -y[i] } else { y[i] })
            .collect();
        return Ok(LpOutcome::Infeasible { farkas });
    }

    // Drive any artificial still basic (at zero level) out of the basis.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| t.at(i, j).abs() > PIVOT_TOL) {
                t.pivot(i, col);
            }
            // A row with no structural pivot is redundant; its artificial
            // stays basic at level zero, which is harmless.
        }
    }

    // Phase II on the real objective.
    let mut costs = vec![0.0f64; w];
    costs[..n].copy_from_slice(&p.objective);
    let bounded = t.optimize(&costs, &allowed_all, 50_000 + 100 * (m + n))?;
    if !bounded {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0f64; n];
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rhs[i];
        }
    }
    let objective = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let y = t.duals(&costs);
    let dual: Vec<f64> = (0..m)
        .map(|i| if p.rhs[i] < 0.0 { -y[i] } else { y[i] })
        .collect();
    Ok(LpOutcome::Optimal { x, objective, dual })
}

/// Helper for LPs with a mix of equality rows and `>=` rows: appends slack
/// variables for the inequalities and calls [`solve_lp`].
///
/// `ge_rows[i]·x >= ge_rhs[i]` becomes `ge_rows[i]·x - s_i = ge_rhs[i]`.
pub fn solve_lp_with_inequalities(
    objective: &[f64],
    eq_rows: &[Vec<f64>],
    eq_rhs: &[f64],
    ge_rows: &[Vec<f64>],
    ge_rhs: &[f64],
) -> Result<LpOutcome> {
    let n = objective.len();
    let k = ge_rows.len();
    let mut rows = Vec::with_capacity(eq_rows.len() + k);
    let mut rhs = Vec::with_capacity(eq_rows.len() + k);
    for (r, &v) in eq_rows.iter().zip(eq_rhs) {
        let mut row = r.clone();
        row.resize(n + k, 0.0);
        rows.push(row);
        rhs.push(v);
    }
    for (i, (r, &v)) in ge_rows.iter().zip(ge_rhs).enumerate() {
        let mut row = r.clone();
        row.resize(n + k, 0.0);
        row[n + i] = -1.0;
        rows.push(row);
        rhs.push(v);
    }
    let mut c = objective.to_vec();
    c.resize(n + k, 0.0);
    let out = solve_lp(&LpProblem { objective: c, rows, rhs })?;
    Ok(match out {
        LpOutcome::Optimal { x, objective, dual } => {
            LpOutcome::Optimal { x: x[..n].to_vec(), objective, dual }
        }
        other => other,
    })
}
