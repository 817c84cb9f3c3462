//! Small dense semidefinite solver.
//!
//! Problems are in primal standard form over a product of complex Hermitian
//! psd blocks:
//!
//! ```text
//! minimize   sum_b <C_b, X_b>
//! subject to sum_b <A_{i,b}, X_b> = b_i     (i = 1..m)
//!            X_b psd
//! ```
//!
//! The algorithm is ADMM-style splitting: alternate projection onto the
//! affine constraint subspace (through a cached factorisation of `A A^T`)
//! and onto the psd cone (through the Jacobi eigensolver), with
//! over-relaxation. Complex Hermitian blocks are handled natively; callers
//! never see a realified problem. Infeasibility is declared only after a
//! Farkas-type dual ray has been verified a posteriori.

use crate::error::{Error, Result};
use crate::linalg::{eigh, jacobi_real_symmetric, ComplexMatrix, HermitianMatrix, C64};

/// One equality constraint `sum_b <coeffs[b], X_b> = rhs`.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    pub coeffs: Vec<HermitianMatrix>,
    pub rhs: f64,
}

/// Primal standard-form SDP over Hermitian psd blocks.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    /// One objective matrix per block; minimised.
    pub objective: Vec<HermitianMatrix>,
    pub constraints: Vec<SdpConstraint>,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        if self.block_dims.is_empty() {
            return Err(Error::InvalidInput("SDP needs at least one block".into()));
        }
        if self.objective.len() != self.block_dims.len() {
            return Err(Error::InvalidInput("objective/block count mismatch".into()));
        }
        for (c, &d) in self.objective.iter().zip(&self.block_dims) {
            if c.dim() != d {
                return Err(Error::InvalidInput("objective block dim mismatch".into()));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if con.coeffs.len() != self.block_dims.len() {
                return Err(Error::InvalidInput(format!(
                    "constraint {i} has wrong block count"
                )));
            }
            if !con.rhs.is_finite() {
                return Err(Error::InvalidInput(format!("constraint {i} rhs not finite")));
            }
            for (c, &d) in con.coeffs.iter().zip(&self.block_dims) {
                if c.dim() != d {
                    return Err(Error::InvalidInput(format!(
                        "constraint {i} block dim mismatch"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpResiduals {
    pub primal_feasibility: f64,
    pub dual_feasibility: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub blocks: Vec<HermitianMatrix>,
    pub dual_multipliers: Vec<f64>,
    pub primal_objective: f64,
    pub residuals: SdpResiduals,
    /// Verified dual improving ray when `status == Infeasible`.
    pub infeasibility_certificate: Option<Vec<f64>>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub over_relaxation: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iterations: 200_000, over_relaxation: 1.6 }
    }
}

/// Result of projecting onto the psd cone.
#[derive(Debug, Clone)]
pub struct PsdProjection {
    pub projected: HermitianMatrix,
    /// `sum max(-lambda_i, 0)`: trace-norm distance to the psd cone.
    pub negative_part_trace: f64,
}

/// Nearest psd matrix in Frobenius norm: `U diag(max(lambda, 0)) U†`.
pub fn project_psd(h: &HermitianMatrix) -> Result<PsdProjection> {
    let eig = eigh(h)?;
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let neg: f64 = eig.eigenvalues.iter().map(|&l| (-l).max(0.0)).sum();
    let n = h.dim();
    let u = &eig.eigenvectors;
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| u.at(i, k) * clipped[k] * u.at(j, k).conj()).sum()
    });
    Ok(PsdProjection {
        projected: HermitianMatrix::from_nearly_hermitian(m)?,
        negative_part_trace: neg,
    })
}

/// Isometric real parameterisation of Hermitian matrices: diagonal entries,
/// then `sqrt(2) * (Re, Im)` of the upper triangle. Trace inner products
/// become Euclidean dot products.
fn svec_into(h: &HermitianMatrix, out: &mut Vec<f64>) {
    let n = h.dim();
    let s = std::f64::consts::SQRT_2;
    for i in 0..n {
        out.push(h.at(i, i).re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let z = h.at(i, j);
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
}

fn unsvec(dim: usize, data: &[f64]) -> HermitianMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m.set(i, i, C64::new(data[i], 0.0));
    }
    let mut k = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = C64::new(data[k] * s, data[k + 1] * s);
            m.set(i, j, z);
            m.set(j, i, z.conj());
            k += 2;
        }
    }
    HermitianMatrix::from_nearly_hermitian(m).expect("finite by construction")
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Workspace {
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
    /// constraint rows as stacked svecs, m x total
    a_rows: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// eigendecomposition of A A^T for the pseudo-inverse
    gram_vecs: Vec<f64>,
    gram_vals: Vec<f64>,
    m: usize,
}

impl Workspace {
    fn new(p: &SdpProblem) -> Result<Self> {
        let block_dims = p.block_dims.clone();
        let mut offsets = Vec::with_capacity(block_dims.len());
        let mut total = 0usize;
        for &d in &block_dims {
            offsets.push(total);
            total += d * d;
        }
        let mut c = Vec::with_capacity(total);
        for blk in &p.objective {
            svec_into(blk, &mut c);
        }
        let m = p.constraints.len();
        let mut a_rows = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for con in &p.constraints {
            let mut row = Vec::with_capacity(total);
            for blk in &con.coeffs {
                svec_into(blk, &mut row);
            }
            a_rows.push(row);
            b.push(con.rhs);
        }
        // Gram matrix of the constraint rows.
        let mut g = vec![0.0f64; m * m];
        for i in 0..m {
            for j in i..m {
                let v = dot(&a_rows[i], &a_rows[j]);
                g[i * m + j] = v;
                g[j * m + i] = v;
            }
        }
        let (gram_vals, gram_vecs) = if m > 0 {
            jacobi_real_symmetric(m, &mut g)?
        } else {
            (vec![], vec![])
        };
        Ok(Self { block_dims, offsets, total, a_rows, b, c, gram_vecs, gram_vals, m })
    }

    fn apply_a(&self, x: &[f64]) -> Vec<f64> {
        self.a_rows.iter().map(|row| dot(row, x)).collect()
    }

    fn apply_at(&self, y: &[f64], out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = 0.0;
        }
        for (row, &yi) in self.a_rows.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o += yi * r;
            }
        }
    }

    /// `(A A^T)^+ r` through the cached eigendecomposition.
    fn gram_pinv(&self, r: &[f64]) -> Vec<f64> {
        let m = self.m;
        let top = self.gram_vals.iter().cloned().fold(0.0f64, f64::max);
        let cut = top.max(1.0) * 1e-12;
        let mut out = vec![0.0f64; m];
        for k in 0..m {
            let lam = self.gram_vals[k];
            if lam <= cut {
                continue;
            }
            let mut proj = 0.0;
            for i in 0..m {
                proj += self.gram_vecs[i * m + k] * r[i];
            }
            proj /= lam;
            for i in 0..m {
                out[i] += self.gram_vecs[i * m + k] * proj;
            }
        }
        out
    }

    /// Projects `w` onto `{x : A x = b}`; returns the multiplier
    /// `mu = (A A^T)^+ (A w - b)` alongside the projection.
    fn project_affine(&self, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
        if self.m == 0 {
            return (w.to_vec(), vec![]);
        }
        let mut res = self.apply_a(w);
        for (r, bv) in res.iter_mut().zip(&self.b) {
            *r -= bv;
        }
        let mu = self.gram_pinv(&res);
        let mut corr = vec![0.0f64; self.total];
        self.apply_at(&mu, &mut corr);
        let x: Vec<f64> = w.iter().zip(&corr).map(|(wv, cv)| wv - cv).collect();
        (x, mu)
    }

    fn project_psd_blocks(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.total);
        for (bi, &d) in self.block_dims.iter().enumerate() {
            let off = self.offsets[bi];
            let chunk = &v[off..off + d * d];
            if d == 1 {
                out.push(chunk[0].max(0.0));
                continue;
            }
            let h = unsvec(d, chunk);
            let proj = project_psd(&h)?.projected;
            svec_into(&proj, &mut out);
        }
        Ok(out)
    }

    fn blocks_from(&self, v: &[f64]) -> Vec<HermitianMatrix> {
        self.block_dims
            .iter()
            .enumerate()
            .map(|(bi, &d)| unsvec(d, &v[self.offsets[bi]..self.offsets[bi] + d * d]))
            .collect()
    }

    /// Verifies a candidate Farkas ray: `b.y > 0` and `sum_i y_i A_i` has no
    /// positive eigenvalue beyond tolerance. Returns the normalised ray.
    fn verify_ray(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        let n = norm(y);
        if n <= 1e-14 {
            return Ok(None);
        }
        let yn: Vec<f64> = y.iter().map(|v| v / n).collect();
        let scale_b = 1.0 + norm(&self.b);
        if dot(&yn, &self.b) <= 1e-7 * scale_b {
            return Ok(None);
        }
        let mut s = vec![0.0f64; self.total];
        self.apply_at(&yn, &mut s);
        let mut row_scale = 1.0f64;
        for row in &self.a_rows {
            row_scale = row_scale.max(norm(row));
        }
        for (bi, &d) in self.block_dims.iter().enumerate() {
            let h = unsvec(d, &s[self.offsets[bi]..self.offsets[bi] + d * d]);
            let top = eigh(&h)?.max_eigenvalue();
            if top > 1e-6 * row_scale {
                return Ok(None);
            }
        }
        Ok(Some(yn))
    }
}

/// Solves the SDP. `status == Optimal` is certified by independently
/// recomputed residuals, never by iterate bookkeeping.
pub fn solve(p: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    p.validate()?;
    let ws = Workspace::new(p)?;
    let total = ws.total;
    let alpha = opts.over_relaxation;

    // If b is outside the range of A, the affine subspace is empty: the
    // component of b orthogonal to range(A) is an exact improving ray.
    if ws.m > 0 {
        let gb = ws.gram_pinv(&ws.b);
        let mut reachable = vec![0.0f64; ws.m];
        // A A^T (A A^T)^+ b
        for i in 0..ws.m {
            for k in 0..ws.m {
                reachable[i] +=
                    dot(&ws.a_rows[i], &ws.a_rows[k]) * gb[k];
            }
        }
        let resid: Vec<f64> = ws.b.iter().zip(&reachable).map(|(bv, rv)| bv - rv).collect();
        if norm(&resid) > 1e-9 * (1.0 + norm(&ws.b)) {
            if let Some(ray) = ws.verify_ray(&resid)? {
                return Ok(SdpSolution {
                    status: SdpStatus::Infeasible,
                    blocks: ws.blocks_from(&vec![0.0; total]),
                    dual_multipliers: ray.clone(),
                    primal_objective: 0.0,
                    residuals: SdpResiduals {
                        primal_feasibility: f64::INFINITY,
                        dual_feasibility: 0.0,
                        gap: f64::INFINITY,
                    },
                    infeasibility_certificate: Some(ray),
                    iterations: 0,
                });
            }
        }
    }

    let mut rho = 1.0f64;
    let mut z = vec![0.0f64; total];
    let mut u = vec![0.0f64; total];
    let mut mu = vec![0.0f64; ws.m];
    let mut mu_checkpoint = vec![0.0f64; ws.m];
    let mut best: Option<(f64, SdpSolution)> = None;

    let scale_b = 1.0 + norm(&ws.b);
    let mut iter = 0usize;
    while iter < opts.max_iterations {
        iter += 1;
        // x-update: affine projection of z - u - c/rho.
        let w: Vec<f64> = (0..total).map(|k| z[k] - u[k] - ws.c[k] / rho).collect();
        let (x, mu_new) = ws.project_affine(&w);
        mu = mu_new;
        // over-relaxation, then psd projection.
        let xr: Vec<f64> = (0..total).map(|k| alpha * x[k] + (1.0 - alpha) * z[k]).collect();
        let v: Vec<f64> = (0..total).map(|k| xr[k] + u[k]).collect();
        let z_new = ws.project_psd_blocks(&v)?;
        let r_dual_vec: Vec<f64> = (0..total).map(|k| z_new[k] - z[k]).collect();
        for k in 0..total {
            u[k] += xr[k] - z_new[k];
        }
        let r_primal_vec: Vec<f64> = (0..total).map(|k| x[k] - z_new[k]).collect();
        z = z_new;

        if iter % 20 == 0 || iter == opts.max_iterations {
            let xs = norm(&x).max(norm(&z)).max(1.0);
            let r_primal = norm(&r_primal_vec) / xs;
            let r_dual = rho * norm(&r_dual_vec) / (1.0 + rho * norm(&u));
            if r_primal < opts.tol && r_dual < opts.tol {
                // certify from scratch
                let y: Vec<f64> = mu.iter().map(|v| -rho * v).collect();
                let sol = certify(&ws, &z, &y, scale_b)?;
                let score = sol.residuals.primal_feasibility.max(sol.residuals.gap);
                if sol.residuals.primal_feasibility <= 1e-7
                    && sol.residuals.gap <= 1e-6
                    && sol.residuals.dual_feasibility <= 1e-6
                {
                    return Ok(SdpSolution { status: SdpStatus::Optimal, iterations: iter, ..sol });
                }
                if best.as_ref().map(|(s, _)| score < *s).unwrap_or(true) {
                    best = Some((score, SdpSolution { iterations: iter, ..sol }));
                }
            }
            // Residual balancing.
            if iter % 60 == 0 {
                if r_primal > 10.0 * r_dual && rho < 1e6 {
                    rho *= 2.0;
                    for uv in u.iter_mut() {
                        *uv *= 0.5;
                    }
                } else if r_dual > 10.0 * r_primal && rho > 1e-6 {
                    rho *= 0.5;
                    for uv in u.iter_mut() {
                        *uv *= 2.0;
                    }
                }
            }
        }

        if iter % 100 == 0 {
            // Infeasibility probe: the multiplier drift is the candidate ray.
            let drift: Vec<f64> = mu
                .iter()
                .zip(&mu_checkpoint)
                .map(|(now, then)| -(now - then))
                .collect();
            if let Some(ray) = ws.verify_ray(&drift)? {
                return Ok(SdpSolution {
                    status: SdpStatus::Infeasible,
                    blocks: ws.blocks_from(&z),
                    dual_multipliers: ray.clone(),
                    primal_objective: dot(&ws.c, &z),
                    residuals: SdpResiduals {
                        primal_feasibility: f64::INFINITY,
                        dual_feasibility: 0.0,
                        gap: f64::INFINITY,
                    },
                    infeasibility_certificate: Some(ray),
                    iterations: iter,
                });
            }
            mu_checkpoint.copy_from_slice(&mu);
        }
    }

    let y: Vec<f64> = mu.iter().map(|v| -rho * v).collect();
    let fallback = certify(&ws, &z, &y, scale_b)?;
    let sol = match best {
        Some((score, b))
            if score < fallback.residuals.primal_feasibility.max(fallback.residuals.gap) =>
        {
            b
        }
        _ => fallback,
    };
    Ok(SdpSolution { status: SdpStatus::MaxIterations, iterations: iter, ..sol })
}

/// Recomputes all residuals of a candidate primal/dual pair from scratch.
fn certify(ws: &Workspace, z: &[f64], y: &[f64], scale_b: f64) -> Result<SdpSolution> {
    let ax = ws.apply_a(z);
    let primal_feas = ax
        .iter()
        .zip(&ws.b)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
        / scale_b;
    let pobj = dot(&ws.c, z);
    let dobj = dot(y, &ws.b);
    // dual slack S = C - A^T y, psd up to tolerance at optimality
    let mut aty = vec![0.0f64; ws.total];
    ws.apply_at(y, &mut aty);
    let mut dual_feas = 0.0f64;
    for (bi, &d) in ws.block_dims.iter().enumerate() {
        let off = ws.offsets[bi];
        let chunk: Vec<f64> = (0..d * d).map(|k| ws.c[off + k] - aty[off + k]).collect();
        let s = unsvec(d, &chunk);
        let lo = eigh(&s)?.min_eigenvalue();
        let sc = s.max_abs().max(1.0);
        dual_feas = dual_feas.max((-lo).max(0.0) / sc);
    }
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    Ok(SdpSolution {
        status: SdpStatus::MaxIterations,
        blocks: ws.blocks_from(z),
        dual_multipliers: y.to_vec(),
        primal_objective: pobj,
        residuals: SdpResiduals {
            primal_feasibility: primal_feas,
            dual_feasibility: dual_feas,
            gap,
        },
        infeasibility_certificate: None,
        iterations: 0,
    })
}
