//! Separability certificates from rank loops in PPT symmetric extensions,
//! and a reweighted-trace heuristic that searches for low-rank extensions.
//!
//! If `Λ` on `H_A ⊗ Sym^N` is PPT across `A B^K | B^{N-K}` and
//! `rank Λ ≤ max(rank Λ_{AB^K}, rank Λ_{B^{N-K}})`, its two-party
//! reduction is separable.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extension::{
    build_weighted_sdp, check_membership, ExtensionQuery, ExtensionSpace, Mode, PptCuts, ReducedConstraint, Verdict,
};
use crate::hermitian::{eigh, eigvalsh, hermitize, CMatrix, HermitianOperator, C64};
use crate::sdp::{solve_with, unembed, SdpStatus};
use crate::symmetric::{partial_transpose_map, reduction_map, SymmetricBasis};

pub const DEFAULT_RANK_TOL: f64 = 1e-7;
/// Residual allowed on heuristic iterates.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// Eigenvalues above `tol · max(λ_max, 1)`.
pub fn numerical_rank(x: &HermitianOperator, tol: f64) -> Result<usize> {
    matrix_rank(x.matrix(), tol)
}

pub(crate) fn matrix_rank(x: &CMatrix, tol: f64) -> Result<usize> {
    let ev = eigvalsh(&hermitize(x.clone()))?;
    let cut = tol * ev.first().copied().unwrap_or(0.0).max(1.0);
    Ok(ev.iter().filter(|&&l| l > cut).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankProfile {
    pub rank_full: usize,
    pub rank_left: usize,
    pub rank_right: usize,
    pub k: usize,
    pub tol: f64,
}

impl RankProfile {
    pub fn is_loop(&self) -> bool {
        self.rank_full <= self.rank_left.max(self.rank_right)
    }
}

/// Rank comparison for a compressed extension on `H_A ⊗ Sym^N`, splitting
/// the copies as `A B^K | B^{N-K}`. PPT across that cut is the caller's
/// responsibility.
pub fn rank_loop_check(
    extension: &CMatrix,
    d_a: usize,
    basis: &SymmetricBasis,
    k: usize,
    tol: f64,
) -> Result<(bool, RankProfile)> {
    let side = d_a * basis.dim();
    if extension.shape() != (side, side) {
        return Err(Error::DimensionMismatch { expected: side, found: extension.nrows() });
    }
    let (d, n) = (basis.local_dim(), basis.copies());
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("K must lie in 1..{n}, got {k}")));
    }
    let left = reduction_map(d_a, d, n, k, true).apply(extension);
    let right = reduction_map(d_a, d, n, n - k, false).apply(extension);
    let profile = RankProfile {
        rank_full: matrix_rank(extension, tol)?,
        rank_left: matrix_rank(&left, tol)?,
        rank_right: matrix_rank(&right, tol)?,
        k,
        tol,
    };
    Ok((profile.is_loop(), profile))
}

/// Smallest eigenvalue of the extension transposed on its last `N - K`
/// copies.
pub fn cut_min_eigenvalue(extension: &CMatrix, d_a: usize, basis: &SymmetricBasis, k: usize) -> Result<f64> {
    let map = partial_transpose_map(d_a, basis.local_dim(), basis.copies(), basis.copies() - k);
    Ok(eigvalsh(&hermitize(map.apply(extension)))?.last().copied().unwrap_or(0.0))
}

#[derive(Debug, Clone)]
pub struct RankMinResult {
    /// Lowest-rank feasible iterate.
    pub extension: CMatrix,
    pub rank: usize,
    /// Rank of every round's iterate, in order.
    pub ranks: Vec<usize>,
}

/// Reweighted-trace (log-det surrogate) search for a low-rank extension.
///
/// Round 0 minimizes `tr X`; round `k` minimizes `⟨(X_{k-1} + εI)⁻¹, X⟩`.
/// For cone queries `objective_floor` adds `tr(objective · Λ) ≥ floor`.
pub fn rank_min_heuristic(q: &ExtensionQuery, objective_floor: Option<f64>, rounds: usize) -> Result<RankMinResult> {
    let (d_a, d_b) = match q.rho.dims() {
        [a, b] => (*a, *b),
        _ => return Err(Error::InvalidArgument("expected a bipartite query".into())),
    };
    let space = ExtensionSpace::bipartite(d_a, d_b, q.n, q.ppt, q.cuts)?;
    let (constraint, rho, floor) = match q.mode {
        Mode::Membership => (ReducedConstraint::TraceMatch, Some(&q.rho), None),
        Mode::ConeOptimize => {
            let obj = q
                .objective
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("cone optimization needs an objective".into()))?;
            let rho = (q.reduced_constraint == ReducedConstraint::TraceMatch).then_some(&q.rho);
            (q.reduced_constraint, rho, objective_floor.map(|f| (obj, f)))
        }
    };
    let side = space.side;
    let mut weight = -CMatrix::identity(side, side);
    let mut best: Option<(usize, CMatrix)> = None;
    let mut ranks = Vec::new();
    let mut stalled = 0;
    for _ in 0..rounds.max(1) {
        let p = build_weighted_sdp(&space, &weight, constraint, rho, floor)?;
        let sol = solve_with(&p, &q.solver)?;
        match sol.status {
            SdpStatus::Optimal | SdpStatus::MaxIter => {}
            SdpStatus::PrimalInfeasible => return Err(Error::Infeasible),
            SdpStatus::DualInfeasible => return Err(Error::SolverBreakdown("reweighted program unbounded".into())),
        }
        let x = hermitize(unembed(&sol.primal_blocks[0]));
        let rank = matrix_rank(&x, DEFAULT_RANK_TOL)?;
        ranks.push(rank);
        if iterate_is_feasible(&space, &x, constraint, rho, floor)? {
            if best.as_ref().is_none_or(|(r, _)| rank < *r) {
                best = Some((rank, x.clone()));
                stalled = 0;
            } else {
                stalled += 1;
            }
        }
        if rank <= 1 || stalled >= 2 {
            break;
        }
        weight = reweight(&x)?;
    }
    let (rank, extension) = best.ok_or(Error::Infeasible)?;
    Ok(RankMinResult { extension, rank, ranks })
}

/// `-(X + εI)⁻¹` scaled to unit spectral norm, with `ε` tied to `λ_max(X)`.
fn reweight(x: &CMatrix) -> Result<CMatrix> {
    let e = eigh(x)?;
    let top = e.values.first().copied().unwrap_or(1.0).max(1e-12);
    let eps = 1e-3 * top;
    let inv: Vec<f64> = e.values.iter().map(|&l| 1.0 / (l.max(0.0) + eps)).collect();
    let scale = inv.iter().cloned().fold(0.0, f64::max);
    let mut w = CMatrix::zeros(x.nrows(), x.ncols());
    for (j, &v) in inv.iter().enumerate() {
        let col = e.vectors.column(j);
        w -= (col * col.adjoint()) * C64::new(v / scale, 0.0);
    }
    Ok(hermitize(w))
}

fn iterate_is_feasible(
    space: &ExtensionSpace,
    x: &CMatrix,
    constraint: ReducedConstraint,
    rho: Option<&HermitianOperator>,
    floor: Option<(&HermitianOperator, f64)>,
) -> Result<bool> {
    let min = |m: &CMatrix| -> Result<f64> { Ok(eigvalsh(&hermitize(m.clone()))?.last().copied().unwrap_or(0.0)) };
    if min(x)? < -FEASIBILITY_TOL {
        return Ok(false);
    }
    for map in &space.ppt {
        if min(&map.apply(x))? < -FEASIBILITY_TOL {
            return Ok(false);
        }
    }
    let residual = match constraint {
        ReducedConstraint::TraceMatch => {
            let rho = rho.ok_or_else(|| Error::InvalidArgument("trace matching needs a target state".into()))?;
            (space.reduce.apply(x) - rho.matrix()).norm()
        }
        ReducedConstraint::IdentityMarginal => {
            let m = space
                .marginal
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("this space has no marginal map".into()))?
                .apply(x);
            (&m - CMatrix::identity(m.nrows(), m.ncols())).norm()
        }
        ReducedConstraint::UnitTrace => (x.trace().re - 1.0).abs(),
    };
    if residual > FEASIBILITY_TOL {
        return Ok(false);
    }
    if let Some((obj, value)) = floor {
        if space.reduced(x).inner(obj) < value - FEASIBILITY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub enum Certificate {
    Entangled {
        n: usize,
        witness: HermitianOperator,
        witness_value: f64,
    },
    Separable {
        n: usize,
        profile: RankProfile,
        extension: CMatrix,
    },
    Undecided {
        max_n: usize,
    },
}

impl Certificate {
    pub fn label(&self) -> &'static str {
        match self {
            Certificate::Entangled { .. } => "entangled",
            Certificate::Separable { .. } => "separable",
            Certificate::Undecided { .. } => "undecided",
        }
    }

    /// `{"verdict", "N", "ranks", "witness"}`.
    pub fn to_json(&self) -> Value {
        match self {
            Certificate::Entangled { n, witness, witness_value } => json!({
                "verdict": self.label(),
                "N": n,
                "ranks": [],
                "witness": witness,
                "witness_value": witness_value,
            }),
            Certificate::Separable { n, profile, .. } => json!({
                "verdict": self.label(),
                "N": n,
                "K": profile.k,
                "ranks": [profile.rank_full, profile.rank_left, profile.rank_right],
                "witness": Value::Null,
            }),
            Certificate::Undecided { max_n } => json!({
                "verdict": self.label(),
                "N": max_n,
                "ranks": [],
                "witness": Value::Null,
            }),
        }
    }
}

/// PPT extension tests for `N = 2..=max_n`: an infeasible level yields a
/// witness, a feasible one is searched for a rank loop. `rank_tol` is the
/// relative eigenvalue threshold used for ranks.
pub fn certify(rho: &HermitianOperator, max_n: usize, rank_tol: f64) -> Result<Certificate> {
    let d_a = match rho.dims() {
        [a, _] => *a,
        _ => return Err(Error::InvalidArgument("expected a bipartite state".into())),
    };
    let d_b = rho.dims()[1];
    if max_n < 2 {
        return Err(Error::InvalidArgument("max N must be at least 2".into()));
    }
    for n in 2..=max_n {
        let q = ExtensionQuery::membership(rho.clone(), n, true).with_cuts(PptCuts::Half);
        let m = check_membership(&q)?;
        match m.verdict {
            Verdict::Infeasible => {
                let witness = m.witness.expect("infeasible verdict carries a witness");
                let witness_value = m.witness_value.unwrap_or_else(|| witness.inner(rho));
                return Ok(Certificate::Entangled { n, witness, witness_value });
            }
            Verdict::Undecided => continue,
            Verdict::Feasible => {}
        }
        let basis = SymmetricBasis::new(d_b, n)?;
        let found = match rank_min_heuristic(&q, None, 10) {
            Ok(r) => r.extension,
            Err(Error::Infeasible) | Err(Error::SolverBreakdown(_)) => match m.extension {
                Some(x) => x,
                None => continue,
            },
            Err(e) => return Err(e),
        };
        // the imposed cut first, then the others if they happen to be PPT
        let imposed = n.div_ceil(2);
        let mut ks = vec![imposed];
        ks.extend((1..n).filter(|&k| k != imposed));
        for k in ks {
            if k != imposed && cut_min_eigenvalue(&found, d_a, &basis, k)? < -FEASIBILITY_TOL {
                continue;
            }
            let (is_loop, profile) = rank_loop_check(&found, d_a, &basis, k, rank_tol)?;
            if is_loop {
                return Ok(Certificate::Separable { n, profile, extension: found });
            }
        }
    }
    Ok(Certificate::Undecided { max_n })
}
