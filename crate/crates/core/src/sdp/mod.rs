//! Block-diagonal semidefinite programs in standard primal form
//!
//! ```text
//!   min ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X = diag(X_1, .., X_k) ⪰ 0
//! ```
//!
//! solved by a homogeneous self-dual interior-point method, and the
//! real embedding used to pose Hermitian problems.

mod ipm;

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, HermitianOperator, C64};

pub use ipm::solve_with;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
    Feasibility,
}

/// Symmetric matrix spread over the blocks of a block-diagonal space,
/// stored as upper-triangle entries `(block, row, col, value)` with
/// `row <= col`; the mirrored entry is implied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseSym {
    entries: Vec<(usize, usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accumulates `value` at `(row, col)` and its mirror.
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, usize, f64)>,
    {
        let mut acc: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        for (b, r, c, v) in entries {
            let key = if r <= c { (b, r, c) } else { (b, c, r) };
            *acc.entry(key).or_default() += v;
        }
        Self {
            entries: acc
                .into_iter()
                .filter(|(_, v)| *v != 0.0)
                .map(|((b, r, c), v)| (b, r, c, v))
                .collect(),
        }
    }

    pub fn from_dense(block: usize, m: &DMatrix<f64>) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in r..m.ncols() {
                if m[(r, c)] != 0.0 {
                    entries.push((block, r, c, m[(r, c)]));
                }
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ_{rc} A_rc X_rc` over all blocks.
    pub fn dot(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|&(b, r, c, v)| if r == c { v * x[b][(r, c)] } else { 2.0 * v * x[b][(r, c)] })
            .sum()
    }

    pub fn add_scaled_to(&self, s: f64, out: &mut [DMatrix<f64>]) {
        for &(b, r, c, v) in &self.entries {
            out[b][(r, c)] += s * v;
            if r != c {
                out[b][(c, r)] += s * v;
            }
        }
    }

    /// `Σ_{rc} A_rc P_rc` for a possibly non-symmetric `p`.
    pub fn dot_general(&self, p: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|&(b, r, c, v)| if r == c { v * p[b][(r, c)] } else { v * (p[b][(r, c)] + p[b][(c, r)]) })
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, r, c, v)| if r == c { v * v } else { 2.0 * v * v })
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|&(b, r, c, v)| (b, r, c, v * s)).collect(),
        }
    }

    /// `⟨A, B⟩` for two sorted sparse matrices.
    pub fn inner(&self, other: &SparseSym) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            let ka = (a[i].0, a[i].1, a[i].2);
            let kb = (b[j].0, b[j].1, b[j].2);
            match ka.cmp(&kb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = if ka.1 == ka.2 { 1.0 } else { 2.0 };
                    acc += w * a[i].3 * b[j].3;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn to_dense(&self, block_sizes: &[usize]) -> Vec<DMatrix<f64>> {
        let mut out = zero_blocks(block_sizes);
        self.add_scaled_to(1.0, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub matrix: SparseSym,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub block_sizes: Vec<usize>,
    pub objective: SparseSym,
    pub constraints: Vec<Constraint>,
    pub sense: Sense,
}

impl SdpProblem {
    pub fn new(block_sizes: Vec<usize>, sense: Sense) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::InvalidArgument("block sizes must be positive".into()));
        }
        Ok(Self {
            block_sizes,
            objective: SparseSym::new(),
            constraints: Vec::new(),
            sense,
        })
    }

    pub fn set_objective_block(&mut self, block: usize, m: &DMatrix<f64>) -> Result<()> {
        self.check_dense(block, m)?;
        let mut entries: Vec<_> = self
            .objective
            .entries
            .iter()
            .copied()
            .filter(|e| e.0 != block)
            .collect();
        entries.extend(SparseSym::from_dense(block, m).entries);
        self.objective = SparseSym::from_entries(entries);
        Ok(())
    }

    pub fn set_objective(&mut self, objective: SparseSym) -> Result<()> {
        self.check_sparse(&objective)?;
        self.objective = objective;
        Ok(())
    }

    /// One dense symmetric matrix per listed block; other blocks are zero.
    pub fn add_constraint_dense(&mut self, blocks: &[(usize, DMatrix<f64>)], rhs: f64) -> Result<()> {
        let mut entries = Vec::new();
        for (b, m) in blocks {
            self.check_dense(*b, m)?;
            entries.extend(SparseSym::from_dense(*b, m).entries);
        }
        self.constraints.push(Constraint {
            matrix: SparseSym::from_entries(entries),
            rhs,
        });
        Ok(())
    }

    pub fn add_constraint(&mut self, matrix: SparseSym, rhs: f64) -> Result<()> {
        self.check_sparse(&matrix)?;
        self.constraints.push(Constraint { matrix, rhs });
        Ok(())
    }

    pub fn total_size(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    fn check_dense(&self, block: usize, m: &DMatrix<f64>) -> Result<()> {
        let size = *self.block_sizes.get(block).ok_or(Error::FactorOutOfRange {
            index: block,
            count: self.block_sizes.len(),
        })?;
        if m.nrows() != size || m.ncols() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: m.nrows(),
            });
        }
        let dev = (m - m.transpose()).amax();
        if dev > SYMMETRY_TOL {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol: SYMMETRY_TOL,
            });
        }
        Ok(())
    }

    fn check_sparse(&self, m: &SparseSym) -> Result<()> {
        for &(b, r, c, _) in &m.entries {
            let size = *self.block_sizes.get(b).ok_or(Error::FactorOutOfRange {
                index: b,
                count: self.block_sizes.len(),
            })?;
            if c >= size || r > c {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    found: c + 1,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// Farkas-type certificate.
///
/// Primal infeasibility: `y` with `bᵀy = 1` and `blocks = -Σ y_i A_i ⪰ 0`.
/// Dual infeasibility: `blocks = X ⪰ 0` with `A(X) = 0` and `⟨C, X⟩ = -1`
/// (for the minimization form actually solved).
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub y: Vec<f64>,
    pub blocks: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub mu: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap_residual: f64,
    pub tau: f64,
    pub kappa: f64,
    pub step: f64,
    /// `⟨C,X⟩/τ` and `bᵀy/τ` of the iterate.
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `(yᵀr_p - ⟨r_d, X⟩)/τ²`; the duality gap minus this equals `⟨X,S⟩/τ²`.
    pub residual_correction: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_blocks: Vec<DMatrix<f64>>,
    pub dual_multipliers: Vec<f64>,
    pub dual_slack: Vec<DMatrix<f64>>,
    /// In the problem's own sense.
    pub objective_value: f64,
    pub dual_value: f64,
    pub residuals: Residuals,
    pub certificate: Option<Certificate>,
    pub iterations: usize,
    /// Indices of constraints removed as linearly dependent.
    pub pruned: Vec<usize>,
    pub log: Vec<IterationRecord>,
}

impl SdpSolution {
    pub fn write_log_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,mu,primal_residual,dual_residual,gap_residual,tau,kappa,step")?;
        for r in &self.log {
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{}",
                r.iter, r.mu, r.primal_residual, r.dual_residual, r.gap_residual, r.tau, r.kappa, r.step
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
    pub record_log: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            step_fraction: 0.98,
            record_log: false,
        }
    }
}

pub fn solve(p: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    solve_with(
        p,
        &SolverOptions {
            tol,
            max_iter,
            ..SolverOptions::default()
        },
    )
}

pub(crate) fn zero_blocks(sizes: &[usize]) -> Vec<DMatrix<f64>> {
    sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect()
}

/// `[[Re h, -Im h], [Im h, Re h]]`.
pub fn embed_complex(h: &HermitianOperator) -> DMatrix<f64> {
    embed_matrix(h.matrix())
}

pub fn embed_matrix(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = h[(r, c)];
            out[(r, c)] = z.re;
            out[(n + r, n + c)] = z.re;
            out[(r, n + c)] = -z.im;
            out[(n + r, c)] = z.im;
        }
    }
    out
}

/// Inverse of [`embed_matrix`] after projecting onto the embedded form.
pub fn unembed(x: &DMatrix<f64>) -> CMatrix {
    let n = x.nrows() / 2;
    let mut out = CMatrix::from_fn(n, n, |r, c| {
        C64::new(
            0.5 * (x[(r, c)] + x[(n + r, n + c)]),
            0.5 * (x[(n + r, c)] - x[(r, n + c)]),
        )
    });
    let adj = out.adjoint();
    out = (out + adj).map(|z| z * 0.5);
    out
}

/// Real-embedded constraint matrix of a Hermitian `h` given by upper-triangle
/// entries `(row, col, value)`, so that `⟨A, embed(X)⟩ = tr(h X)`.
pub fn embed_hermitian_entries<I>(block: usize, n: usize, entries: I) -> SparseSym
where
    I: IntoIterator<Item = (usize, usize, C64)>,
{
    let mut out = Vec::new();
    for (r, c, z) in entries {
        let (r, c, z) = if r <= c { (r, c, z) } else { (c, r, z.conj()) };
        if r == c {
            out.push((block, r, r, 0.5 * z.re));
            out.push((block, n + r, n + r, 0.5 * z.re));
        } else {
            out.push((block, r, c, 0.5 * z.re));
            out.push((block, n + r, n + c, 0.5 * z.re));
            out.push((block, r, n + c, -0.5 * z.im));
            out.push((block, c, n + r, 0.5 * z.im));
        }
    }
    SparseSym::from_entries(out)
}

/// Upper-triangle entries of a dense Hermitian matrix.
pub fn hermitian_entries(h: &CMatrix, cutoff: f64) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for c in 0..h.ncols() {
        for r in 0..=c {
            if h[(r, c)].norm() > cutoff {
                out.push((r, c, h[(r, c)]));
            }
        }
    }
    out
}
