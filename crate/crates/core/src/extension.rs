//! Symmetric-extension SDPs: membership tests for the (PPT) Bose-symmetric
//! extension cones and linear optimization over them.
//!
//! The decision variable is the compressed extension `X` on
//! `H_A ⊗ Sym^N(H_B)`. Membership is posed as
//!
//! ```text
//!   max t  s.t.  tr_{B^{N-1}} X = ρ,  X - tI ⪰ 0,  [P(X) - tI ⪰ 0]
//! ```
//!
//! which is strictly feasible on both sides; `t* ≥ 0` means an extension
//! exists and a negative optimum comes with a dual witness.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{eigvalsh, hermitize, CMatrix, HermitianOperator, C64};
use crate::sdp::{
    embed_hermitian_entries, hermitian_entries, solve_with, unembed, SdpProblem, SdpSolution, SdpStatus, Sense,
    SolverOptions, SparseSym,
};
use crate::symmetric::{partial_transpose_map, reduction_map, sym_dim, EntryMap, SymmetricBasis};

pub const BUDGET_ENV: &str = "DPSKIT_BUDGET_DIM";
pub const DEFAULT_BUDGET_DIM: usize = 128;
/// Slack below which a membership optimum still counts as feasible, and
/// the witness margin required for an infeasible verdict.
pub const FEASIBILITY_MARGIN: f64 = 1e-7;

/// Cap on `d_A · sym_dim(d_B, N)` (or the tripartite analogue).
pub fn budget_dim() -> usize {
    parse_budget(std::env::var(BUDGET_ENV).ok().as_deref())
}

fn parse_budget(raw: Option<&str>) -> usize {
    raw.and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET_DIM)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Membership,
    ConeOptimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedConstraint {
    /// `tr_{B^{N-1}} X = ρ`.
    TraceMatch,
    /// `tr_{B^N} X = I_A`.
    IdentityMarginal,
    /// `tr X = 1`.
    UnitTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PptCuts {
    /// Transpose the last `⌊N/2⌋` copies only.
    Half,
    /// Every cut `A B^{N-k} | B^k`, `k = 1..=N`.
    All,
}

#[derive(Debug, Clone)]
pub struct ExtensionQuery {
    pub rho: HermitianOperator,
    pub n: usize,
    pub ppt: bool,
    pub mode: Mode,
    pub objective: Option<HermitianOperator>,
    pub reduced_constraint: ReducedConstraint,
    pub cuts: PptCuts,
    pub solver: SolverOptions,
}

impl ExtensionQuery {
    pub fn membership(rho: HermitianOperator, n: usize, ppt: bool) -> Self {
        Self {
            rho,
            n,
            ppt,
            mode: Mode::Membership,
            objective: None,
            reduced_constraint: ReducedConstraint::TraceMatch,
            cuts: PptCuts::Half,
            solver: default_solver(),
        }
    }

    /// `max tr(objective · Λ)` over `Λ` in the cone with `Λ_A = I`; the
    /// dimensions are taken from `objective`.
    pub fn cone(objective: HermitianOperator, n: usize, ppt: bool) -> Self {
        Self {
            rho: objective.clone(),
            n,
            ppt,
            mode: Mode::ConeOptimize,
            objective: Some(objective),
            reduced_constraint: ReducedConstraint::IdentityMarginal,
            cuts: PptCuts::Half,
            solver: default_solver(),
        }
    }

    pub fn with_constraint(mut self, c: ReducedConstraint) -> Self {
        self.reduced_constraint = c;
        self
    }

    pub fn with_cuts(mut self, cuts: PptCuts) -> Self {
        self.cuts = cuts;
        self
    }

    fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.rho.dims() {
            [a, b] => Ok((*a, *b)),
            other => Err(Error::InvalidArgument(format!(
                "expected a bipartite operator, got {} factors",
                other.len()
            ))),
        }
    }
}

fn default_solver() -> SolverOptions {
    SolverOptions {
        tol: 1e-9,
        max_iter: 200,
        ..SolverOptions::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Undecided,
}

#[derive(Debug, Clone)]
pub struct MembershipResult {
    pub verdict: Verdict,
    /// Compressed extension on `H_A ⊗ Sym^N` (or the tripartite space).
    pub extension: Option<CMatrix>,
    /// Unit Frobenius norm; `tr(W ρ) < 0` and nonnegative on the cone.
    pub witness: Option<HermitianOperator>,
    pub witness_value: Option<f64>,
    /// Optimal `t`: largest uniform shift keeping the extension PSD.
    pub slack: f64,
    pub status: SdpStatus,
}

#[derive(Debug, Clone)]
pub struct ConeResult {
    pub value: f64,
    /// Reduction of the optimal extension to `H_A ⊗ H_B`.
    pub optimizer: HermitianOperator,
    pub extension: CMatrix,
    pub status: SdpStatus,
}

/// Linear maps defining one extension space.
#[derive(Debug, Clone)]
pub struct ExtensionSpace {
    /// Complex side of the compressed variable.
    pub side: usize,
    /// Factor dimensions of the reduced operator.
    pub reduced_dims: Vec<usize>,
    pub reduce: EntryMap,
    /// Partial trace down to the untouched first factor.
    pub marginal: Option<EntryMap>,
    pub ppt: Vec<EntryMap>,
}

impl ExtensionSpace {
    pub fn bipartite(d_a: usize, d_b: usize, n: usize, ppt: bool, cuts: PptCuts) -> Result<Self> {
        if n == 0 || d_a == 0 || d_b == 0 {
            return Err(Error::InvalidArgument("dimensions and N must be positive".into()));
        }
        let side = d_a * sym_dim(d_b, n);
        check_budget(side)?;
        let ppt_maps = if ppt {
            let ks: Vec<usize> = match cuts {
                PptCuts::Half => vec![n / 2],
                PptCuts::All => (1..=n).collect(),
            };
            ks.into_iter()
                .filter(|&k| k > 0)
                .map(|k| partial_transpose_map(d_a, d_b, n, k))
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            side,
            reduced_dims: vec![d_a, d_b],
            reduce: reduction_map(d_a, d_b, n, 1, true),
            marginal: Some(reduction_map(d_a, d_b, n, 0, true)),
            ppt: ppt_maps,
        })
    }

    /// `H_1 ⊗ Sym^N(H_2) ⊗ Sym^N(H_3)`, PPT across
    /// `1 2^{⌈N/2⌉} 3^{⌈N/2⌉} | 2^{⌊N/2⌋} 3^{⌊N/2⌋}`.
    pub fn tripartite(d1: usize, d2: usize, d3: usize, n: usize, ppt: bool) -> Result<Self> {
        if n == 0 || d1 == 0 || d2 == 0 || d3 == 0 {
            return Err(Error::InvalidArgument("dimensions and N must be positive".into()));
        }
        let side = d1 * sym_dim(d2, n) * sym_dim(d3, n);
        check_budget(side)?;
        let id = EntryMap::identity(d1);
        let reduce = id
            .kron(&reduction_map(1, d2, n, 1, true))
            .kron(&reduction_map(1, d3, n, 1, true));
        let k = n / 2;
        let ppt_maps = if ppt && k > 0 {
            vec![id
                .kron(&partial_transpose_map(1, d2, n, k))
                .kron(&partial_transpose_map(1, d3, n, k))]
        } else {
            Vec::new()
        };
        Ok(Self {
            side,
            reduced_dims: vec![d1, d2, d3],
            reduce,
            marginal: None,
            ppt: ppt_maps,
        })
    }

    pub fn reduced_side(&self) -> usize {
        self.reduced_dims.iter().product()
    }

    /// Lifts a compressed operator's reduction into a `HermitianOperator`.
    pub fn reduced(&self, x: &CMatrix) -> HermitianOperator {
        HermitianOperator::with_tolerance(self.reduced_dims.clone(), hermitize(self.reduce.apply(x)), f64::INFINITY)
            .expect("reduction of a Hermitian operator")
    }
}

fn check_budget(side: usize) -> Result<()> {
    check_budget_with(side, budget_dim())
}

fn check_budget_with(side: usize, budget: usize) -> Result<()> {
    if side > budget {
        return Err(Error::BudgetExceeded { required: side, budget });
    }
    Ok(())
}

/// Orthonormal Hermitian basis of `D × D` matrices (diagonal units, then
/// symmetric and antisymmetric pairs), as full entry lists.
pub fn hermitian_basis(dim: usize) -> Vec<Vec<(usize, usize, C64)>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        out.push(vec![(j, j, C64::new(1.0, 0.0))]);
    }
    for j in 0..dim {
        for k in j + 1..dim {
            out.push(vec![(j, k, C64::new(s, 0.0)), (k, j, C64::new(s, 0.0))]);
            out.push(vec![(j, k, C64::new(0.0, s)), (k, j, C64::new(0.0, -s))]);
        }
    }
    out
}

type OutputTable = HashMap<(usize, usize), Vec<((usize, usize), f64)>>;

/// Upper-triangle entries of `M†(E)` for a sparse Hermitian `E`.
fn adjoint_entries(table: &OutputTable, e: &[(usize, usize, C64)]) -> Vec<(usize, usize, C64)> {
    let mut acc: HashMap<(usize, usize), C64> = HashMap::new();
    for &(r, c, v) in e {
        if let Some(sources) = table.get(&(r, c)) {
            for &((ir, ic), coeff) in sources {
                if ir <= ic {
                    *acc.entry((ir, ic)).or_default() += v * coeff;
                }
            }
        }
    }
    let mut out: Vec<_> = acc.into_iter().filter(|(_, v)| v.norm() > 0.0).map(|((r, c), v)| (r, c, v)).collect();
    out.sort_by_key(|e| (e.0, e.1));
    out
}

fn trace_of(entries: &[(usize, usize, C64)]) -> f64 {
    entries.iter().filter(|e| e.0 == e.1).map(|e| e.2.re).sum()
}

fn entry_trace_against(e: &[(usize, usize, C64)], rho: &CMatrix) -> f64 {
    // tr(E ρ) = Σ E_rc ρ_cr
    e.iter().map(|&(r, c, v)| (v * rho[(c, r)]).re).sum()
}

/// Row bookkeeping for decoding multipliers.
#[derive(Debug, Clone)]
pub struct Layout {
    pub side: usize,
    pub ppt_sides: Vec<usize>,
    /// Rows `0..reduced_rows` constrain the reduction (membership only).
    pub reduced_rows: usize,
    pub basis: Vec<Vec<(usize, usize, C64)>>,
    pub shift: f64,
}

fn ppt_link_rows(
    p: &mut SdpProblem,
    space: &ExtensionSpace,
    shift_coeff: Option<f64>,
) -> Result<()> {
    let n = space.side;
    for (j, map) in space.ppt.iter().enumerate() {
        let table = map.by_output();
        let block = 2 + j;
        let ny = map.out_side;
        for f in hermitian_basis(ny) {
            let pf = adjoint_entries(&table, &f);
            let mut entries: Vec<(usize, usize, usize, f64)> = Vec::new();
            entries.extend(embed_hermitian_entries(block, ny, f.iter().copied().filter(|e| e.0 <= e.1)).entries().iter().copied());
            entries.extend(
                embed_hermitian_entries(0, n, pf.iter().copied())
                    .scaled(-1.0)
                    .entries()
                    .iter()
                    .copied(),
            );
            let mut rhs = 0.0;
            if let Some(shift) = shift_coeff {
                // Y = P(Z + tI) - tI with t = u - shift
                let c = trace_of(&pf) - trace_of(&f);
                if c != 0.0 {
                    entries.push((1, 0, 0, -c));
                    rhs = -shift * c;
                }
            }
            p.add_constraint(SparseSym::from_entries(entries), rhs)?;
        }
    }
    Ok(())
}

/// Membership SDP with the shifted-identity slack, for any extension space.
pub fn build_membership_sdp(space: &ExtensionSpace, rho: &HermitianOperator) -> Result<(SdpProblem, Layout)> {
    if rho.dim() != space.reduced_side() {
        return Err(Error::DimensionMismatch {
            expected: space.reduced_side(),
            found: rho.dim(),
        });
    }
    let n = space.side;
    let mut sizes = vec![2 * n, 1];
    sizes.extend(space.ppt.iter().map(|m| 2 * m.out_side));
    let mut p = SdpProblem::new(sizes, Sense::Maximize)?;
    p.set_objective(SparseSym::from_entries([(1, 0, 0, 1.0)]))?;
    let shift = rho.trace().abs().max(1.0);

    let table = space.reduce.by_output();
    let basis = hermitian_basis(space.reduced_side());
    for e in &basis {
        let te = adjoint_entries(&table, e);
        let tau = trace_of(&te);
        let mut m = embed_hermitian_entries(0, n, te.iter().copied()).entries().to_vec();
        if tau != 0.0 {
            m.push((1, 0, 0, tau));
        }
        let rhs = entry_trace_against(e, rho.matrix()) + shift * tau;
        p.add_constraint(SparseSym::from_entries(m), rhs)?;
    }
    ppt_link_rows(&mut p, space, Some(shift))?;
    let layout = Layout {
        side: n,
        ppt_sides: space.ppt.iter().map(|m| m.out_side).collect(),
        reduced_rows: basis.len(),
        basis,
        shift,
    };
    Ok((p, layout))
}

/// Builds the membership SDP of a bipartite query.
pub fn build_bse_sdp(q: &ExtensionQuery) -> Result<SdpProblem> {
    let (d_a, d_b) = q.bipartite_dims()?;
    let space = ExtensionSpace::bipartite(d_a, d_b, q.n, q.ppt, q.cuts)?;
    match q.mode {
        Mode::Membership => Ok(build_membership_sdp(&space, &q.rho)?.0),
        Mode::ConeOptimize => {
            let obj = q
                .objective
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("cone optimization needs an objective".into()))?;
            build_cone_sdp(&space, obj, q.reduced_constraint, Some(&q.rho))
        }
    }
}

pub fn build_tripartite_sdp(rho: &HermitianOperator, n: usize, ppt: bool) -> Result<SdpProblem> {
    let space = tripartite_space(rho, n, ppt)?;
    Ok(build_membership_sdp(&space, rho)?.0)
}

fn tripartite_space(rho: &HermitianOperator, n: usize, ppt: bool) -> Result<ExtensionSpace> {
    match rho.dims() {
        [a, b, c] => ExtensionSpace::tripartite(*a, *b, *c, n, ppt),
        other => Err(Error::InvalidArgument(format!(
            "expected a tripartite operator, got {} factors",
            other.len()
        ))),
    }
}

/// The `(trace_map, ppt_map)` pair on `H_A ⊗ Sym^N`.
pub fn compressed_maps(d_a: usize, basis: &SymmetricBasis, ppt: bool) -> (EntryMap, Option<EntryMap>) {
    let (d, n) = (basis.local_dim(), basis.copies());
    let trace = reduction_map(d_a, d, n, 1, true);
    let ppt_map = (ppt && n / 2 > 0).then(|| partial_transpose_map(d_a, d, n, n / 2));
    (trace, ppt_map)
}

pub fn check_membership(q: &ExtensionQuery) -> Result<MembershipResult> {
    if q.mode != Mode::Membership {
        return Err(Error::InvalidArgument("query is not a membership query".into()));
    }
    let (d_a, d_b) = q.bipartite_dims()?;
    let space = ExtensionSpace::bipartite(d_a, d_b, q.n, q.ppt, q.cuts)?;
    membership_in_space(&space, &q.rho, &q.solver)
}

pub fn check_tripartite_membership(rho: &HermitianOperator, n: usize, ppt: bool) -> Result<MembershipResult> {
    let space = tripartite_space(rho, n, ppt)?;
    membership_in_space(&space, rho, &default_solver())
}

pub fn membership_in_space(
    space: &ExtensionSpace,
    rho: &HermitianOperator,
    solver: &SolverOptions,
) -> Result<MembershipResult> {
    let (p, layout) = build_membership_sdp(space, rho)?;
    let sol = match solve_with(&p, solver) {
        Ok(s) => s,
        Err(Error::SolverBreakdown(_)) => {
            return Ok(MembershipResult {
                verdict: Verdict::Undecided,
                extension: None,
                witness: None,
                witness_value: None,
                slack: f64::NAN,
                status: SdpStatus::MaxIter,
            })
        }
        Err(e) => return Err(e),
    };
    decode_membership(space, rho, &layout, &sol)
}

fn decode_membership(
    space: &ExtensionSpace,
    rho: &HermitianOperator,
    layout: &Layout,
    sol: &SdpSolution,
) -> Result<MembershipResult> {
    let witness_from = |y: &[f64]| -> Option<(HermitianOperator, f64)> {
        let dim = space.reduced_side();
        let mut w = CMatrix::zeros(dim, dim);
        for (e, &yk) in layout.basis.iter().zip(&y[..layout.reduced_rows]) {
            for &(r, c, v) in e {
                w[(r, c)] -= v * yk;
            }
        }
        let norm = w.norm();
        if !(norm > 0.0) {
            return None;
        }
        let w = HermitianOperator::with_tolerance(space.reduced_dims.clone(), hermitize(w / C64::new(norm, 0.0)), 1e-6).ok()?;
        let value = w.inner(rho);
        Some((w, value))
    };
    let mut result = MembershipResult {
        verdict: Verdict::Undecided,
        extension: None,
        witness: None,
        witness_value: None,
        slack: f64::NAN,
        status: sol.status,
    };
    match sol.status {
        SdpStatus::Optimal => {
            let t = sol.objective_value - layout.shift;
            result.slack = t;
            let scale = rho.trace().abs().max(1.0);
            if t >= -FEASIBILITY_MARGIN * scale {
                let mut x = unembed(&sol.primal_blocks[0]);
                for i in 0..x.nrows() {
                    x[(i, i)] += C64::new(t, 0.0);
                }
                result.extension = Some(x);
                result.verdict = Verdict::Feasible;
            } else if let Some((w, value)) = witness_from(&sol.dual_multipliers) {
                if value < -FEASIBILITY_MARGIN {
                    result.verdict = Verdict::Infeasible;
                    result.witness = Some(w);
                    result.witness_value = Some(value);
                }
            }
        }
        SdpStatus::PrimalInfeasible => {
            if let Some(cert) = &sol.certificate {
                if let Some((w, value)) = witness_from(&cert.y) {
                    if value < -FEASIBILITY_MARGIN {
                        result.verdict = Verdict::Infeasible;
                        result.witness = Some(w);
                        result.witness_value = Some(value);
                    }
                }
            }
        }
        SdpStatus::DualInfeasible | SdpStatus::MaxIter => {}
    }
    Ok(result)
}

/// Cone SDP: maximize `tr(objective · T(X))` subject to the chosen
/// normalization.
pub fn build_cone_sdp(
    space: &ExtensionSpace,
    objective: &HermitianOperator,
    constraint: ReducedConstraint,
    rho: Option<&HermitianOperator>,
) -> Result<SdpProblem> {
    check_reduced_dim(space, objective)?;
    let t_obj = hermitize(space.reduce.adjoint_apply(objective.matrix()));
    build_weighted_sdp(space, &t_obj, constraint, rho, None)
}

fn check_reduced_dim(space: &ExtensionSpace, op: &HermitianOperator) -> Result<()> {
    if op.dim() != space.reduced_side() {
        return Err(Error::DimensionMismatch {
            expected: space.reduced_side(),
            found: op.dim(),
        });
    }
    Ok(())
}

/// Maximize `⟨weight, X⟩` over compressed extensions `X` under the chosen
/// normalization, optionally with `tr(obj · T(X)) ≥ floor`.
pub fn build_weighted_sdp(
    space: &ExtensionSpace,
    weight: &CMatrix,
    constraint: ReducedConstraint,
    rho: Option<&HermitianOperator>,
    floor: Option<(&HermitianOperator, f64)>,
) -> Result<SdpProblem> {
    let n = space.side;
    if weight.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: weight.nrows() });
    }
    let mut sizes = vec![2 * n, 1];
    sizes.extend(space.ppt.iter().map(|m| 2 * m.out_side));
    let mut p = SdpProblem::new(sizes, Sense::Maximize)?;
    p.set_objective(embed_hermitian_entries(0, n, hermitian_entries(weight, 0.0)))?;

    match constraint {
        ReducedConstraint::TraceMatch => {
            let rho = rho.ok_or_else(|| Error::InvalidArgument("trace matching needs a target state".into()))?;
            check_reduced_dim(space, rho)?;
            let table = space.reduce.by_output();
            for e in hermitian_basis(space.reduced_side()) {
                let te = adjoint_entries(&table, &e);
                p.add_constraint(embed_hermitian_entries(0, n, te), entry_trace_against(&e, rho.matrix()))?;
            }
        }
        ReducedConstraint::IdentityMarginal => {
            let marginal = space
                .marginal
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("this space has no marginal map".into()))?;
            let table = marginal.by_output();
            for e in hermitian_basis(marginal.out_side) {
                let te = adjoint_entries(&table, &e);
                let rhs = e.iter().filter(|x| x.0 == x.1).map(|x| x.2.re).sum();
                p.add_constraint(embed_hermitian_entries(0, n, te), rhs)?;
            }
        }
        ReducedConstraint::UnitTrace => {
            let diag = (0..n).map(|i| (i, i, C64::new(1.0, 0.0)));
            p.add_constraint(embed_hermitian_entries(0, n, diag), 1.0)?;
        }
    }
    match floor {
        // the 1×1 block is the slack of the floor constraint
        Some((obj, value)) => {
            check_reduced_dim(space, obj)?;
            let t_obj = hermitize(space.reduce.adjoint_apply(obj.matrix()));
            let mut entries = embed_hermitian_entries(0, n, hermitian_entries(&t_obj, 0.0)).entries().to_vec();
            entries.push((1, 0, 0, -1.0));
            p.add_constraint(SparseSym::from_entries(entries), value)?;
        }
        // otherwise it is unused; pin it to zero
        None => p.add_constraint(SparseSym::from_entries([(1, 0, 0, 1.0)]), 0.0)?,
    }
    ppt_link_rows(&mut p, space, None)?;
    Ok(p)
}

pub fn optimize_over_cone(q: &ExtensionQuery) -> Result<ConeResult> {
    if q.mode != Mode::ConeOptimize {
        return Err(Error::InvalidArgument("query is not a cone optimization".into()));
    }
    let objective = q
        .objective
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("cone optimization needs an objective".into()))?;
    let (d_a, d_b) = match objective.dims() {
        [a, b] => (*a, *b),
        _ => return Err(Error::InvalidArgument("objective must be bipartite".into())),
    };
    let space = ExtensionSpace::bipartite(d_a, d_b, q.n, q.ppt, q.cuts)?;
    optimize_in_space(&space, objective, q.reduced_constraint, Some(&q.rho), &q.solver)
}

pub fn optimize_in_space(
    space: &ExtensionSpace,
    objective: &HermitianOperator,
    constraint: ReducedConstraint,
    rho: Option<&HermitianOperator>,
    solver: &SolverOptions,
) -> Result<ConeResult> {
    let p = build_cone_sdp(space, objective, constraint, rho)?;
    let sol = solve_with(&p, solver)?;
    match sol.status {
        SdpStatus::Optimal | SdpStatus::MaxIter => {
            let x = unembed(&sol.primal_blocks[0]);
            Ok(ConeResult {
                value: sol.objective_value,
                optimizer: space.reduced(&x),
                extension: x,
                status: sol.status,
            })
        }
        SdpStatus::PrimalInfeasible => Err(Error::Infeasible),
        SdpStatus::DualInfeasible => Err(Error::SolverBreakdown("cone program reported unbounded".into())),
    }
}

/// `min tr(W σ)` over unit-trace members of the tested cone; a valid
/// witness gives a value `≥ 0` up to solver accuracy.
pub fn witness_cone_minimum(w: &HermitianOperator, n: usize, ppt: bool) -> Result<f64> {
    let (d_a, d_b) = match w.dims() {
        [a, b] => (*a, *b),
        _ => return Err(Error::InvalidArgument("witness must be bipartite".into())),
    };
    let space = ExtensionSpace::bipartite(d_a, d_b, n, ppt, PptCuts::Half)?;
    let r = optimize_in_space(&space, &w.scaled(-1.0), ReducedConstraint::UnitTrace, None, &default_solver())?;
    Ok(-r.value)
}

/// Smallest eigenvalues of the extension and of each imposed partial
/// transpose, for residual checks.
pub fn extension_min_eigenvalues(space: &ExtensionSpace, x: &CMatrix) -> Result<(f64, Vec<f64>)> {
    let min = |m: &CMatrix| -> Result<f64> { Ok(eigvalsh(&hermitize(m.clone()))?.last().copied().unwrap_or(0.0)) };
    let own = min(x)?;
    let ppt = space.ppt.iter().map(|p| min(&p.apply(x))).collect::<Result<Vec<_>>>()?;
    Ok((own, ppt))
}

/// Random member of the `N`-extendible set: a seeded random state on
/// `H_A ⊗ Sym^N(H_B)` of the given rank, returned with its reduction.
pub fn random_extendible_state(
    d_a: usize,
    d_b: usize,
    n: usize,
    rank: usize,
    seed: u64,
) -> Result<(HermitianOperator, CMatrix)> {
    let space = ExtensionSpace::bipartite(d_a, d_b, n, false, PptCuts::Half)?;
    let x = HermitianOperator::random_state(vec![space.side], rank, seed)?.into_matrix();
    Ok((space.reduced(&x), x))
}
