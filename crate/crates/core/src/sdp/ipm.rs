//! Homogeneous self-dual interior-point iteration (HKM direction, Mehrotra
//! predictor-corrector).
//!
//! Embedded system, with `τ, κ > 0`:
//!
//! ```text
//!   A(X) - bτ = 0,   A*y + S - Cτ = 0,   bᵀy - ⟨C,X⟩ - κ = 0
//! ```

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use super::{
    zero_blocks, Certificate, IterationRecord, Residuals, SdpProblem, SdpSolution, SdpStatus, Sense,
    SolverOptions, SparseSym,
};
use crate::error::{Error, Result};

type Blocks = Vec<DMatrix<f64>>;

const PRUNE_REL: f64 = 1e-10;

pub fn solve_with(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 || !(opts.step_fraction > 0.0 && opts.step_fraction < 1.0) {
        return Err(Error::InvalidArgument("solver options out of range".into()));
    }
    let sizes = p.block_sizes.clone();
    let c_min = match p.sense {
        Sense::Minimize => p.objective.clone(),
        Sense::Maximize => p.objective.scaled(-1.0),
        Sense::Feasibility => SparseSym::new(),
    };

    // Row scaling.
    let norms: Vec<f64> = p.constraints.iter().map(|c| c.matrix.norm_sq().sqrt()).collect();
    let scaled: Vec<SparseSym> = p
        .constraints
        .iter()
        .zip(&norms)
        .map(|(c, &n)| if n > 0.0 { c.matrix.scaled(1.0 / n) } else { c.matrix.clone() })
        .collect();
    let b_rows: Vec<f64> = p
        .constraints
        .iter()
        .zip(&norms)
        .map(|(c, &n)| if n > 0.0 { c.rhs / n } else { c.rhs })
        .collect();

    let pruning = prune(&scaled, &norms, &b_rows);
    if let Some(y_rows) = pruning.inconsistent {
        // y_rows certifies over scaled rows with Σ y b_rows = 1 and Σ y A_scaled ≈ 0.
        let y: Vec<f64> = y_rows
            .iter()
            .zip(&norms)
            .map(|(v, &n)| if n > 0.0 { v / n } else { *v })
            .collect();
        return Ok(infeasible_from_y(p, &sizes, y, pruning.dropped, 0, Vec::new()));
    }
    let kept = pruning.kept;
    let a: Vec<SparseSym> = kept.iter().map(|&i| scaled[i].clone()).collect();
    let b_raw = DVector::from_iterator(kept.len(), kept.iter().map(|&i| b_rows[i]));
    let b_scale = b_raw.norm().max(1.0);
    let c_scale = c_min.norm_sq().sqrt().max(1.0);
    let b = &b_raw / b_scale;
    let c = c_min.scaled(1.0 / c_scale);

    let state = Ipm::new(&sizes, &a, &b, &c, opts);
    let out = state.run()?;

    // Undo scaling.
    let m_all = p.constraints.len();
    let mut y_full = vec![0.0; m_all];
    let finish = |y_full: &mut Vec<f64>, y: &DVector<f64>, factor: f64| {
        for (k, &i) in kept.iter().enumerate() {
            y_full[i] = y[k] * factor / norms[i];
        }
    };
    match out.status {
        IpmStatus::PrimalInfeasible => {
            let by = b.dot(&out.y);
            finish(&mut y_full, &out.y, 1.0 / (by * b_scale));
            Ok(infeasible_from_y(p, &sizes, y_full, pruning.dropped, out.iters, out.log))
        }
        IpmStatus::DualInfeasible => {
            let cx = c_min.dot(&out.x);
            let x: Blocks = out.x.iter().map(|m| m / (-cx)).collect();
            Ok(SdpSolution {
                status: SdpStatus::DualInfeasible,
                primal_blocks: x.clone(),
                dual_multipliers: y_full,
                dual_slack: zero_blocks(&sizes),
                objective_value: f64::NAN,
                dual_value: f64::NAN,
                residuals: out.residuals,
                certificate: Some(Certificate { y: Vec::new(), blocks: x }),
                iterations: out.iters,
                pruned: pruning.dropped,
                log: out.log,
            })
        }
        IpmStatus::Optimal | IpmStatus::MaxIter => {
            let tau = out.tau;
            let x: Blocks = out.x.iter().map(|m| m * (b_scale / tau)).collect();
            let s: Blocks = out.s.iter().map(|m| m * (c_scale / tau)).collect();
            finish(&mut y_full, &out.y, c_scale / tau);
            let primal_min = c_min.dot(&x);
            let dual_min: f64 = p.constraints.iter().zip(&y_full).map(|(c, y)| c.rhs * y).sum();
            let (obj, dual) = match p.sense {
                Sense::Minimize => (primal_min, dual_min),
                Sense::Maximize => (-primal_min, -dual_min),
                Sense::Feasibility => (0.0, 0.0),
            };
            Ok(SdpSolution {
                status: if out.status == IpmStatus::Optimal {
                    SdpStatus::Optimal
                } else {
                    SdpStatus::MaxIter
                },
                primal_blocks: x,
                dual_multipliers: y_full,
                dual_slack: s,
                objective_value: obj,
                dual_value: dual,
                residuals: out.residuals,
                certificate: None,
                iterations: out.iters,
                pruned: pruning.dropped,
                log: out.log,
            })
        }
    }
}

fn infeasible_from_y(
    p: &SdpProblem,
    sizes: &[usize],
    y: Vec<f64>,
    pruned: Vec<usize>,
    iterations: usize,
    log: Vec<IterationRecord>,
) -> SdpSolution {
    let mut s = zero_blocks(sizes);
    for (c, &yi) in p.constraints.iter().zip(&y) {
        c.matrix.add_scaled_to(-yi, &mut s);
    }
    let x = zero_blocks(sizes);
    let gap = p.constraints.iter().zip(&y).map(|(c, yi)| c.rhs * yi).sum::<f64>();
    SdpSolution {
        status: SdpStatus::PrimalInfeasible,
        primal_blocks: x,
        dual_multipliers: y.clone(),
        dual_slack: s.clone(),
        objective_value: f64::NAN,
        dual_value: f64::NAN,
        residuals: Residuals {
            primal: f64::NAN,
            dual: f64::NAN,
            gap,
        },
        certificate: Some(Certificate { y, blocks: s }),
        iterations,
        pruned,
        log,
    }
}

struct Pruning {
    kept: Vec<usize>,
    dropped: Vec<usize>,
    /// Row-space combination with `Σ y b = 1` and `Σ y A ≈ 0`, if the
    /// dropped rows contradict the kept ones.
    inconsistent: Option<Vec<f64>>,
}

/// Pivoted Cholesky of the Gram matrix of the (unit-norm) constraints.
fn prune(a: &[SparseSym], norms: &[f64], b: &[f64]) -> Pruning {
    let m = a.len();
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = a[i].inner(&a[j]);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let scale = (0..m).map(|i| gram[(i, i)]).fold(0.0, f64::max);
    let thresh = PRUNE_REL * scale.max(f64::MIN_POSITIVE);
    let mut diag: Vec<f64> = (0..m).map(|i| gram[(i, i)]).collect();
    let mut l = DMatrix::<f64>::zeros(m, m);
    let mut order: Vec<usize> = Vec::new();
    let mut used = vec![false; m];
    for k in 0..m {
        let (piv, &best) = match diag
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap().then(y.0.cmp(&x.0)))
        {
            Some(v) => v,
            None => break,
        };
        if best <= thresh {
            break;
        }
        used[piv] = true;
        order.push(piv);
        let lkk = best.sqrt();
        l[(piv, k)] = lkk;
        for i in 0..m {
            if used[i] {
                continue;
            }
            let mut v = gram[(i, piv)];
            for j in 0..k {
                v -= l[(i, j)] * l[(piv, j)];
            }
            let lik = v / lkk;
            l[(i, k)] = lik;
            diag[i] -= lik * lik;
        }
    }
    let r = order.len();
    let mut kept = order.clone();
    kept.sort_unstable();
    let dropped: Vec<usize> = (0..m).filter(|i| !used[*i]).collect();

    let _ = norms;
    let mut inconsistent = None;
    if !dropped.is_empty() {
        // L_K: r×r lower-triangular rows of the pivots.
        let lk = DMatrix::from_fn(r, r, |i, j| l[(order[i], j)]);
        let b_k = DVector::from_iterator(r, order.iter().map(|&i| b[i]));
        let b_scale = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
        for &i in &dropped {
            let li = DVector::from_iterator(r, (0..r).map(|j| l[(i, j)]));
            let coeffs = lk
                .transpose()
                .solve_upper_triangular(&li)
                .unwrap_or_else(|| DVector::zeros(r));
            let mismatch = b[i] - coeffs.dot(&b_k);
            if mismatch.abs() > 1e-8 * b_scale * (1.0 + coeffs.amax()) {
                let mut y = vec![0.0; m];
                y[i] = 1.0 / mismatch;
                for (k, &row) in order.iter().enumerate() {
                    y[row] = -coeffs[k] / mismatch;
                }
                inconsistent = Some(y);
                break;
            }
        }
    }
    Pruning {
        kept,
        dropped,
        inconsistent,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IpmStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
}

struct IpmOutput {
    status: IpmStatus,
    x: Blocks,
    y: DVector<f64>,
    s: Blocks,
    tau: f64,
    residuals: Residuals,
    iters: usize,
    log: Vec<IterationRecord>,
}

struct Ipm<'a> {
    sizes: &'a [usize],
    a: &'a [SparseSym],
    /// Both orientations of every off-diagonal entry, grouped by block.
    expanded: Vec<Vec<(usize, usize, usize, f64)>>,
    b: &'a DVector<f64>,
    c: &'a SparseSym,
    c_dense: Blocks,
    opts: &'a SolverOptions,
}

struct Direction {
    dx: Blocks,
    dy: DVector<f64>,
    ds: Blocks,
    dtau: f64,
    dkappa: f64,
}

impl<'a> Ipm<'a> {
    fn new(
        sizes: &'a [usize],
        a: &'a [SparseSym],
        b: &'a DVector<f64>,
        c: &'a SparseSym,
        opts: &'a SolverOptions,
    ) -> Self {
        let expanded = a
            .iter()
            .map(|ai| {
                let mut e = Vec::with_capacity(2 * ai.entries().len());
                for &(blk, r, col, v) in ai.entries() {
                    e.push((blk, r, col, v));
                    if r != col {
                        e.push((blk, col, r, v));
                    }
                }
                e
            })
            .collect();
        Self {
            sizes,
            a,
            expanded,
            b,
            c,
            c_dense: c.to_dense(sizes),
            opts,
        }
    }

    fn a_op(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|ai| ai.dot(x)))
    }

    fn a_op_general(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|ai| ai.dot_general(x)))
    }

    fn a_adj(&self, y: &DVector<f64>) -> Blocks {
        let mut out = zero_blocks(self.sizes);
        for (ai, &yi) in self.a.iter().zip(y.iter()) {
            ai.add_scaled_to(yi, &mut out);
        }
        out
    }

    /// `M_ij = tr(A_i X A_j S⁻¹)`.
    fn schur(&self, x: &[DMatrix<f64>], sinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.a.len();
        let mut mat = DMatrix::<f64>::zeros(m, m);
        let mut p = zero_blocks(self.sizes);
        let mut touched = vec![false; self.sizes.len()];
        for i in 0..m {
            for &(blk, r, col, v) in &self.expanded[i] {
                touched[blk] = true;
                p[blk].ger(v, &x[blk].column(r), &sinv[blk].column(col), 1.0);
            }
            for j in i..m {
                let v = self.a[j].dot_general(&p);
                mat[(i, j)] = v;
                mat[(j, i)] = v;
            }
            for (blk, t) in touched.iter_mut().enumerate() {
                if *t {
                    p[blk].fill(0.0);
                    *t = false;
                }
            }
        }
        mat
    }

    fn run(&self) -> Result<IpmOutput> {
        let n_total: usize = self.sizes.iter().sum();
        let nu = (n_total + 1) as f64;
        let m = self.a.len();
        let mut x: Blocks = self.sizes.iter().map(|&n| DMatrix::identity(n, n)).collect();
        let mut s = x.clone();
        let mut y = DVector::<f64>::zeros(m);
        let (mut tau, mut kappa) = (1.0f64, 1.0f64);
        let b_norm = self.b.norm();
        let c_norm = self.c.norm_sq().sqrt();
        let mut log = Vec::new();
        let tol = self.opts.tol;
        let mut last_step = 0.0;
        let mut residuals = Residuals {
            primal: f64::INFINITY,
            dual: f64::INFINITY,
            gap: f64::INFINITY,
        };

        for iter in 0..=self.opts.max_iter {
            let ax = self.a_op(&x);
            let rp = &ax - self.b * tau;
            let mut rd = self.a_adj(&y);
            for k in 0..rd.len() {
                rd[k] += &s[k] - &self.c_dense[k] * tau;
            }
            let cx = self.c.dot(&x);
            let by = self.b.dot(&y);
            let rg = cx - by + kappa;
            let xs = blocks_dot(&x, &s);
            let mu = (xs + tau * kappa) / nu;

            let pobj = cx / tau;
            let dobj = by / tau;
            residuals = Residuals {
                primal: rp.norm() / tau / (1.0 + b_norm),
                dual: blocks_norm(&rd) / tau / (1.0 + c_norm),
                gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
            };
            if self.opts.record_log {
                log.push(IterationRecord {
                    iter,
                    mu,
                    primal_residual: residuals.primal,
                    dual_residual: residuals.dual,
                    gap_residual: residuals.gap,
                    tau,
                    kappa,
                    step: last_step,
                    primal_objective: pobj,
                    dual_objective: dobj,
                    residual_correction: (y.dot(&rp) - blocks_dot(&rd, &x)) / (tau * tau),
                });
            }

            if residuals.primal <= tol && residuals.dual <= tol && residuals.gap <= tol {
                return Ok(self.output(IpmStatus::Optimal, x, y, s, tau, residuals, iter, log));
            }
            if by > 0.0 {
                let mut aty_s = self.a_adj(&y);
                for k in 0..aty_s.len() {
                    aty_s[k] += &s[k];
                }
                if blocks_norm(&aty_s) / by <= tol {
                    return Ok(self.output(IpmStatus::PrimalInfeasible, x, y, s, tau, residuals, iter, log));
                }
            }
            if cx < 0.0 && ax.norm() / (-cx) <= tol {
                return Ok(self.output(IpmStatus::DualInfeasible, x, y, s, tau, residuals, iter, log));
            }
            if iter == self.opts.max_iter {
                break;
            }

            let sinv: Blocks = s
                .iter()
                .map(spd_inverse)
                .collect::<Option<_>>()
                .ok_or_else(|| Error::SolverBreakdown(format!("dual slack lost definiteness at iteration {iter}")))?;
            let chol = self.factor_schur(&x, &sinv, iter)?;

            let xcs: Blocks = (0..x.len()).map(|k| &x[k] * &self.c_dense[k] * &sinv[k]).collect();
            let g = self.a_op_general(&xcs);
            let h = self.c.dot_general(&xcs);
            let dy2 = chol.solve(&(self.b + &g));
            let xrs: Blocks = (0..x.len()).map(|k| &x[k] * &rd[k] * &sinv[k]).collect();
            let a_xrs = self.a_op_general(&xrs);
            let c_xrs = self.c.dot_general(&xrs);
            let gmb = &g - self.b;
            let den = gmb.dot(&dy2) - h - kappa / tau;

            let direction = |eta: f64, rc: &Blocks, rtk: f64| -> Direction {
                let rhs1 = -(&rp * eta) - self.a_op(rc) - &a_xrs * eta;
                let dy1 = chol.solve(&rhs1);
                let num = -eta * rg - self.c.dot(rc) - eta * c_xrs - rtk / tau - gmb.dot(&dy1);
                let dtau = num / den;
                let dy = dy1 + &dy2 * dtau;
                let mut ds = self.a_adj(&dy);
                for k in 0..ds.len() {
                    ds[k] = -&ds[k] - &rd[k] * eta + &self.c_dense[k] * dtau;
                }
                let dx: Blocks = (0..x.len())
                    .map(|k| {
                        let t = &x[k] * &ds[k] * &sinv[k];
                        &rc[k] - (&t + t.transpose()) * 0.5
                    })
                    .collect();
                let dkappa = (rtk - kappa * dtau) / tau;
                Direction {
                    dx,
                    dy,
                    ds,
                    dtau,
                    dkappa,
                }
            };

            // Predictor.
            let rc_aff: Blocks = x.iter().map(|xk| -xk).collect();
            let aff = direction(1.0, &rc_aff, -tau * kappa);
            let alpha_aff = self.max_step(&x, &s, tau, kappa, &aff).min(1.0);
            let mut xs_aff = 0.0;
            for k in 0..x.len() {
                let xa = &x[k] + &aff.dx[k] * alpha_aff;
                let sa = &s[k] + &aff.ds[k] * alpha_aff;
                xs_aff += xa.dot(&sa);
            }
            let mu_aff = (xs_aff + (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) / nu;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // Corrector.
            let rc: Blocks = (0..x.len())
                .map(|k| {
                    let t = &aff.dx[k] * &aff.ds[k] * &sinv[k];
                    &sinv[k] * (sigma * mu) - &x[k] - (&t + t.transpose()) * 0.5
                })
                .collect();
            let rtk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
            let dir = direction(1.0 - sigma, &rc, rtk);
            let alpha = (self.opts.step_fraction * self.max_step(&x, &s, tau, kappa, &dir)).min(1.0);
            if !(alpha > 1e-12) {
                return Err(Error::SolverBreakdown(format!("step length collapsed at iteration {iter}")));
            }
            last_step = alpha;
            for k in 0..x.len() {
                x[k] += &dir.dx[k] * alpha;
                s[k] += &dir.ds[k] * alpha;
                symmetrize(&mut x[k]);
                symmetrize(&mut s[k]);
            }
            y += &dir.dy * alpha;
            tau += alpha * dir.dtau;
            kappa += alpha * dir.dkappa;
        }
        Ok(self.output(IpmStatus::MaxIter, x, y, s, tau, residuals, self.opts.max_iter, log))
    }

    fn factor_schur(&self, x: &[DMatrix<f64>], sinv: &[DMatrix<f64>], iter: usize) -> Result<Cholesky<f64, Dyn>> {
        let mat = self.schur(x, sinv);
        if let Some(ch) = Cholesky::new(mat.clone()) {
            return Ok(ch);
        }
        let scale = mat.diagonal().amax().max(f64::MIN_POSITIVE);
        let mut reg = 1e-14 * scale;
        for _ in 0..6 {
            let mut shifted = mat.clone();
            for i in 0..shifted.nrows() {
                shifted[(i, i)] += reg;
            }
            if let Some(ch) = Cholesky::new(shifted) {
                return Ok(ch);
            }
            reg *= 100.0;
        }
        Err(Error::SolverBreakdown(format!(
            "Schur complement not positive definite at iteration {iter}"
        )))
    }

    fn max_step(&self, x: &[DMatrix<f64>], s: &[DMatrix<f64>], tau: f64, kappa: f64, d: &Direction) -> f64 {
        let mut alpha = f64::INFINITY;
        for k in 0..x.len() {
            alpha = alpha.min(psd_step(&x[k], &d.dx[k]));
            alpha = alpha.min(psd_step(&s[k], &d.ds[k]));
        }
        if d.dtau < 0.0 {
            alpha = alpha.min(-tau / d.dtau);
        }
        if d.dkappa < 0.0 {
            alpha = alpha.min(-kappa / d.dkappa);
        }
        alpha
    }

    #[allow(clippy::too_many_arguments)]
    fn output(
        &self,
        status: IpmStatus,
        x: Blocks,
        y: DVector<f64>,
        s: Blocks,
        tau: f64,
        residuals: Residuals,
        iters: usize,
        log: Vec<IterationRecord>,
    ) -> IpmOutput {
        IpmOutput {
            status,
            x,
            y,
            s,
            tau,
            residuals,
            iters,
            log,
        }
    }
}

fn blocks_dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn blocks_norm(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let inv = Cholesky::new(m.clone())?.inverse();
    let t = inv.transpose();
    Some((inv + t) * 0.5)
}

/// Largest `α` with `x + α d ⪰ 0`, for `x ≻ 0`.
fn psd_step(x: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let l = match Cholesky::new(x.clone()) {
        Some(ch) => ch.unpack(),
        None => return 0.0,
    };
    let w = match l.solve_lower_triangular(d) {
        Some(w) => w,
        None => return 0.0,
    };
    let w = match l.solve_lower_triangular(&w.transpose()) {
        Some(w) => w,
        None => return 0.0,
    };
    let sym = (&w + w.transpose()) * 0.5;
    let lam = SymmetricEigen::new(sym).eigenvalues.min();
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}
