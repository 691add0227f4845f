//! Linear optimizations over separable operators, bracketed between
//! extension-cone upper bounds and lower bounds from the disentangling maps:
//! state-estimation fidelity, channel output purity and geometric
//! entanglement of tripartite pure states.

use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bounds::g_n;
use crate::error::{Error, Result};
use crate::extension::{optimize_over_cone, ConeResult, ExtensionQuery, ReducedConstraint};
use crate::hermitian::{CMatrix, HermitianOperator, C64};
use crate::sdp::SdpStatus;

const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEntry {
    pub p: f64,
    /// State handed to the estimator, on `H_A`.
    pub encoded: HermitianOperator,
    /// Pure source state, on `H_B`.
    pub source: HermitianOperator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EstimationJson", into = "EstimationJson")]
pub struct EstimationProblem {
    ensemble: Vec<EnsembleEntry>,
}

#[derive(Serialize, Deserialize)]
struct EstimationJson {
    ensemble: Vec<EnsembleEntry>,
}

impl TryFrom<EstimationJson> for EstimationProblem {
    type Error = Error;
    fn try_from(j: EstimationJson) -> Result<Self> {
        Self::new(j.ensemble)
    }
}

impl From<EstimationProblem> for EstimationJson {
    fn from(p: EstimationProblem) -> Self {
        Self { ensemble: p.ensemble }
    }
}

impl EstimationProblem {
    pub fn new(ensemble: Vec<EnsembleEntry>) -> Result<Self> {
        let first = ensemble
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
        let (d_a, d_b) = (first.encoded.dim(), first.source.dim());
        let mut total = 0.0;
        for e in &ensemble {
            if !(e.p >= 0.0) {
                return Err(Error::InvalidProbability(e.p));
            }
            total += e.p;
            if e.encoded.dim() != d_a {
                return Err(Error::DimensionMismatch { expected: d_a, found: e.encoded.dim() });
            }
            if e.source.dim() != d_b {
                return Err(Error::DimensionMismatch { expected: d_b, found: e.source.dim() });
            }
            if (e.source.trace() - 1.0).abs() > STATE_TOL || (e.source.inner(&e.source) - 1.0).abs() > STATE_TOL {
                return Err(Error::InvalidArgument("source states must be pure and normalized".into()));
            }
        }
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { ensemble })
    }

    pub fn ensemble(&self) -> &[EnsembleEntry] {
        &self.ensemble
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ensemble[0].encoded.dim(), self.ensemble[0].source.dim())
    }
}

/// `Σ p_i Ψ'_i ⊗ Ψ_i` on `H_A ⊗ H_B`.
pub fn estimation_operator(p: &EstimationProblem) -> HermitianOperator {
    let (d_a, d_b) = p.dims();
    let mut acc = CMatrix::zeros(d_a * d_b, d_a * d_b);
    for e in p.ensemble() {
        acc += e.encoded.matrix().kronecker(e.source.matrix()) * C64::new(e.p, 0.0);
    }
    HermitianOperator::new(vec![d_a, d_b], acc).expect("sum of Hermitian products")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub upper: f64,
    pub lower: f64,
    pub n: usize,
    pub ppt: bool,
    pub status: SdpStatus,
}

/// Lower bound carried by the disentangled optimizer: `(1-p) upper + p c/d`
/// where `c = tr(obj · Λ_A ⊗ I_B)` (at least `constant`).
fn affine_lower(upper: f64, d: usize, n: usize, ppt: bool, constant: f64) -> f64 {
    let df = d as f64;
    if ppt {
        let g = g_n(d, n);
        (1.0 - df * g / (2.0 * (df - 1.0))) * upper + g / (2.0 * (df - 1.0)) * constant
    } else {
        n as f64 / (n as f64 + df) * upper + constant / (n as f64 + df)
    }
}

fn cone_upper(obj: &HermitianOperator, n: usize, ppt: bool, c: ReducedConstraint) -> Result<ConeResult> {
    optimize_over_cone(&ExtensionQuery::cone(obj.clone(), n, ppt).with_constraint(c))
}

pub fn fidelity_bounds(p: &EstimationProblem, n: usize, ppt: bool) -> Result<BoundPair> {
    let rho = estimation_operator(p);
    let (_, d) = p.dims();
    let r = cone_upper(&rho, n, ppt, ReducedConstraint::IdentityMarginal)?;
    Ok(BoundPair {
        upper: r.value,
        lower: affine_lower(r.value, d, n, ppt, 1.0),
        n,
        ppt,
        status: r.status,
    })
}

fn ket(amps: &[f64]) -> DVector<C64> {
    DVector::from_iterator(amps.len(), amps.iter().map(|&a| C64::new(a, 0.0)))
}

/// Four equiprobable qubit states `|0⟩, |1⟩, |+⟩, |-⟩`, each delivered as
/// two copies degraded by `Ω^{(ε)}`.
pub fn bb84_two_copy_problem(epsilon: f64) -> Result<EstimationProblem> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidProbability(epsilon));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let kets = [ket(&[1.0, 0.0]), ket(&[0.0, 1.0]), ket(&[s, s]), ket(&[s, -s])];
    let ensemble = kets
        .iter()
        .map(|k| {
            let source = HermitianOperator::pure(vec![2], k)?;
            let noisy = source.depolarize(epsilon, 0)?;
            let encoded = noisy.kron(&noisy).with_dims(vec![4])?;
            Ok(EnsembleEntry { p: 0.25, encoded, source })
        })
        .collect::<Result<Vec<_>>>()?;
    EstimationProblem::new(ensemble)
}

/// `|ψ_ij⟩ = cos(jπ/6)|0⟩ + sin(jπ/6)cos(iπ/6)|1⟩ + sin(jπ/6)sin(iπ/6)|2⟩`,
/// `i, j = 0..5`, uniform, one copy through `Ω^{(ε)}`.
pub fn qutrit_grid_problem(epsilon: f64) -> Result<EstimationProblem> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidProbability(epsilon));
    }
    let step = std::f64::consts::PI / 6.0;
    let mut ensemble = Vec::with_capacity(36);
    for i in 0..6 {
        for j in 0..6 {
            let (ti, tj) = (i as f64 * step, j as f64 * step);
            let psi = ket(&[tj.cos(), tj.sin() * ti.cos(), tj.sin() * ti.sin()]);
            let source = HermitianOperator::pure(vec![3], &psi)?;
            let encoded = source.depolarize(epsilon, 0)?;
            ensemble.push(EnsembleEntry { p: 1.0 / 36.0, encoded, source });
        }
    }
    EstimationProblem::new(ensemble)
}

/// Choi operator `Σ_ij |i⟩⟨j| ⊗ ω(|i⟩⟨j|)` of the channel with the given
/// Kraus operators, input first. Then `ω(ρ) = tr_A(Ω · ρ^T ⊗ I)` and
/// trace preservation reads `tr_B Ω = I_A`.
pub fn choi_from_kraus(kraus: &[CMatrix]) -> Result<HermitianOperator> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidArgument("no Kraus operators".into()))?;
    let (d_out, d_in) = first.shape();
    let mut omega = CMatrix::zeros(d_in * d_out, d_in * d_out);
    for k in kraus {
        if k.shape() != (d_out, d_in) {
            return Err(Error::DimensionMismatch { expected: d_out * d_in, found: k.len() });
        }
        // vec(K) = Σ_i |i⟩ ⊗ K|i⟩
        let mut v = DVector::<C64>::zeros(d_in * d_out);
        for i in 0..d_in {
            for o in 0..d_out {
                v[i * d_out + o] = k[(o, i)];
            }
        }
        omega += &v * v.adjoint();
    }
    HermitianOperator::new(vec![d_in, d_out], omega)
}

/// Choi operator of `Ω^{(p)}` on a `d`-level system.
pub fn depolarizing_choi(d: usize, p: f64) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut phi = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            phi[(i * d + i, j * d + j)] = C64::new(1.0 - p, 0.0);
        }
    }
    for i in 0..d * d {
        phi[(i, i)] += C64::new(p / d as f64, 0.0);
    }
    HermitianOperator::new(vec![d, d], phi)
}

/// `ω(ρ) = tr_A(Ω · ρ^T ⊗ I_B)`.
pub fn apply_choi(choi: &HermitianOperator, rho: &HermitianOperator) -> Result<HermitianOperator> {
    let (d_in, d_out) = match choi.dims() {
        [a, b] => (*a, *b),
        _ => return Err(Error::InvalidArgument("Choi operator must be bipartite".into())),
    };
    if rho.dim() != d_in {
        return Err(Error::DimensionMismatch { expected: d_in, found: rho.dim() });
    }
    let rt = rho.matrix().transpose().kronecker(&CMatrix::identity(d_out, d_out));
    let prod = choi.matrix() * rt;
    let mut out = CMatrix::zeros(d_out, d_out);
    for a in 0..d_in {
        for i in 0..d_out {
            for j in 0..d_out {
                out[(i, j)] += prod[(a * d_out + i, a * d_out + j)];
            }
        }
    }
    HermitianOperator::with_tolerance(vec![d_out], out, 1e-9)
}

fn check_choi_marginal(choi: &HermitianOperator) -> Result<()> {
    let marg = choi.reduce_to(&[0])?;
    let d = marg.dim();
    let dev = (marg.matrix() - CMatrix::identity(d, d)).norm();
    if dev > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "Choi operator's input marginal deviates from identity by {dev:.3e}"
        )));
    }
    Ok(())
}

/// Bounds on `max_ρ ‖ω(ρ)‖_∞`, extending the output factor.
pub fn output_purity_bounds(choi: &HermitianOperator, n: usize, ppt: bool) -> Result<BoundPair> {
    check_choi_marginal(choi)?;
    let d = choi.dims()[1];
    let r = cone_upper(choi, n, ppt, ReducedConstraint::UnitTrace)?;
    Ok(BoundPair {
        upper: r.value,
        lower: affine_lower(r.value, d, n, ppt, 1.0),
        n,
        ppt,
        status: r.status,
    })
}

/// Bounds on `max |⟨φ_A φ_B φ_C|Ψ⟩|²`, extending the middle factor.
pub fn geometric_entanglement_bounds(psi: &HermitianOperator, n: usize, ppt: bool) -> Result<BoundPair> {
    if psi.dims().len() != 3 {
        return Err(Error::InvalidArgument("expected a tripartite state".into()));
    }
    if (psi.trace() - 1.0).abs() > STATE_TOL || (psi.inner(psi) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("expected a normalized pure state".into()));
    }
    let rho_ab = psi.partial_trace(&[2])?;
    let lambda_a = rho_ab.reduce_to(&[0])?.min_eigenvalue()?;
    let d = psi.dims()[1];
    let r = cone_upper(&rho_ab, n, ppt, ReducedConstraint::UnitTrace)?;
    Ok(BoundPair {
        upper: r.value,
        lower: affine_lower(r.value, d, n, ppt, lambda_a.max(0.0)),
        n,
        ppt,
        status: r.status,
    })
}

/// One row of an `N` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub ppt: bool,
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    pub status: String,
    pub wall_time_s: f64,
}

impl SweepRow {
    pub const CSV_HEADER: [&'static str; 6] = ["N", "ppt", "upper", "lower", "status", "wall_time_s"];

    pub fn csv_row(&self) -> Vec<String> {
        let f = |x: Option<f64>| x.map(|v| format!("{v:.10}")).unwrap_or_default();
        vec![
            self.n.to_string(),
            self.ppt.to_string(),
            f(self.upper),
            f(self.lower),
            self.status.clone(),
            format!("{:.3}", self.wall_time_s),
        ]
    }
}

/// Runs one sweep point, turning errors into status rows.
pub fn sweep_point<F>(n: usize, ppt: bool, f: F) -> SweepRow
where
    F: FnOnce(usize, bool) -> Result<BoundPair>,
{
    let start = Instant::now();
    let out = f(n, ppt);
    let wall_time_s = start.elapsed().as_secs_f64();
    match out {
        Ok(b) => SweepRow {
            n,
            ppt,
            upper: Some(b.upper),
            lower: Some(b.lower),
            status: status_label(b.status).into(),
            wall_time_s,
        },
        Err(e) => SweepRow {
            n,
            ppt,
            upper: None,
            lower: None,
            status: error_label(&e).into(),
            wall_time_s,
        },
    }
}

pub fn status_label(s: SdpStatus) -> &'static str {
    match s {
        SdpStatus::Optimal => "optimal",
        SdpStatus::PrimalInfeasible => "primal_infeasible",
        SdpStatus::DualInfeasible => "dual_infeasible",
        SdpStatus::MaxIter => "max_iter",
    }
}

pub fn error_label(e: &Error) -> &'static str {
    match e {
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::SolverBreakdown(_) => "breakdown",
        Error::Infeasible => "infeasible",
        _ => "error",
    }
}

pub fn ghz_state() -> HermitianOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![0.0; 8];
    v[0] = s;
    v[7] = s;
    HermitianOperator::pure(vec![2, 2, 2], &ket(&v)).expect("normalized")
}

pub fn w_state() -> HermitianOperator {
    let s = 1.0 / 3f64.sqrt();
    let mut v = vec![0.0; 8];
    v[1] = s;
    v[2] = s;
    v[4] = s;
    HermitianOperator::pure(vec![2, 2, 2], &ket(&v)).expect("normalized")
}

/// `max tr(ρ · φ_A ⊗ φ_B)` over product pure states by alternating
/// top-eigenvector updates from seeded random starts. A local search: a
/// lower estimate of the true maximum.
pub fn product_overlap_search(rho: &HermitianOperator, starts: usize, seed: u64) -> Result<f64> {
    let (d_a, d_b) = match rho.dims() {
        [a, b] => (*a, *b),
        _ => return Err(Error::InvalidArgument("expected a bipartite operator".into())),
    };
    let m = rho.matrix();
    // ⟨φ|_A ρ |φ⟩_A on B, and the analogue on A
    let on_b = |a: &DVector<C64>| -> CMatrix {
        CMatrix::from_fn(d_b, d_b, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for x in 0..d_a {
                for y in 0..d_a {
                    s += a[x].conj() * m[(x * d_b + i, y * d_b + j)] * a[y];
                }
            }
            s
        })
    };
    let on_a = |b: &DVector<C64>| -> CMatrix {
        CMatrix::from_fn(d_a, d_a, |x, y| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..d_b {
                for j in 0..d_b {
                    s += b[i].conj() * m[(x * d_b + i, y * d_b + j)] * b[j];
                }
            }
            s
        })
    };
    let top = |h: CMatrix| -> Result<(f64, DVector<C64>)> {
        let e = crate::hermitian::eigh(&h)?;
        Ok((e.values[0], e.vectors.column(0).into_owned()))
    };
    let mut best = f64::NEG_INFINITY;
    for s in 0..starts {
        let start = HermitianOperator::random_state(vec![d_a], 1, seed.wrapping_add(s as u64))?;
        let (_, mut a) = top(start.into_matrix())?;
        let mut val = f64::NEG_INFINITY;
        for _ in 0..500 {
            let (_, b) = top(on_b(&a))?;
            let (v, a_new) = top(on_a(&b))?;
            a = a_new;
            if (v - val).abs() < 1e-15 {
                val = v;
                break;
            }
            val = v;
        }
        best = best.max(val);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pure_qubit(amps: &[f64]) -> HermitianOperator {
        HermitianOperator::pure(vec![2], &ket(amps)).unwrap()
    }

    #[test]
    fn estimation_operator_cases() {
        let zero = pure_qubit(&[1.0, 0.0]);
        let one = pure_qubit(&[0.0, 1.0]);
        let single = EstimationProblem::new(vec![EnsembleEntry { p: 1.0, encoded: zero.clone(), source: one.clone() }]).unwrap();
        let rho = estimation_operator(&single);
        assert!((rho.matrix() - zero.kron(&one).matrix()).norm() < 1e-15);

        let uniform = EstimationProblem::new(vec![
            EnsembleEntry { p: 0.5, encoded: zero.clone(), source: zero.clone() },
            EnsembleEntry { p: 0.5, encoded: one.clone(), source: one.clone() },
        ])
        .unwrap();
        let want = HermitianOperator::diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((estimation_operator(&uniform).matrix() - want.matrix()).norm() < 1e-15);

        let bb = estimation_operator(&bb84_two_copy_problem(0.3).unwrap());
        assert_eq!(bb.dims(), &[4, 2]);
        assert_abs_diff_eq!(bb.trace(), 1.0, epsilon = 1e-12);
        let rank = bb.eigenvalues().unwrap().iter().filter(|&&l| l > 1e-10).count();
        assert!(rank <= 8);
        assert!(bb.min_eigenvalue().unwrap() > -1e-12);
    }

    #[test]
    fn problem_validation() {
        let zero = pure_qubit(&[1.0, 0.0]);
        let mixed = HermitianOperator::maximally_mixed(vec![2]);
        assert!(EstimationProblem::new(vec![EnsembleEntry { p: 0.5, encoded: zero.clone(), source: zero.clone() }]).is_err());
        assert!(EstimationProblem::new(vec![EnsembleEntry { p: 1.0, encoded: zero.clone(), source: mixed }]).is_err());
        assert!(EstimationProblem::new(Vec::new()).is_err());
        let p = bb84_two_copy_problem(0.1).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: EstimationProblem = serde_json::from_str(&json).unwrap();
        assert_eq!(back.dims(), (4, 2));
        assert!(serde_json::from_str::<EstimationProblem>(r#"{"ensemble": []}"#).is_err());
    }

    #[test]
    fn qutrit_grid_structure() {
        let p = qutrit_grid_problem(0.2).unwrap();
        assert_eq!(p.ensemble().len(), 36);
        for e in p.ensemble() {
            assert_abs_diff_eq!(e.source.trace(), 1.0, epsilon = 1e-12);
        }
        let zero = HermitianOperator::pure(vec![3], &ket(&[1.0, 0.0, 0.0])).unwrap();
        // j = 0 entries are the first of each block of six
        let dup = p.ensemble().iter().step_by(6).filter(|e| (e.source.matrix() - zero.matrix()).norm() < 1e-12).count();
        assert_eq!(dup, 6);
    }

    #[test]
    fn single_state_fidelity() {
        let zero = pure_qubit(&[1.0, 0.0]);
        let p = EstimationProblem::new(vec![EnsembleEntry { p: 1.0, encoded: zero.clone(), source: zero }]).unwrap();
        let b = fidelity_bounds(&p, 2, false).unwrap();
        assert_abs_diff_eq!(b.upper, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(b.lower, 0.75, epsilon = 1e-6);
        // the affine maps send 1 to (N+1)/(N+d)
        for n in 1..6 {
            assert_abs_diff_eq!(affine_lower(1.0, 3, n, false, 1.0), (n + 1) as f64 / (n + 3) as f64, epsilon = 1e-15);
        }
    }

    #[test]
    fn bb84_fidelity_monotone_and_symmetric() {
        let p = bb84_two_copy_problem(0.3).unwrap();
        let mut last = f64::INFINITY;
        for n in 1..=3 {
            let plain = fidelity_bounds(&p, n, false).unwrap();
            let with_ppt = fidelity_bounds(&p, n, true).unwrap();
            assert!(plain.upper <= last + 1e-7);
            assert!(with_ppt.upper <= plain.upper + 1e-7);
            assert!(with_ppt.lower <= with_ppt.upper + 1e-7);
            last = plain.upper;
        }
        // relabel |0⟩↔|+⟩, |1⟩↔|−⟩
        let e = p.ensemble();
        let swapped = EstimationProblem::new(vec![e[2].clone(), e[3].clone(), e[0].clone(), e[1].clone()]).unwrap();
        let a = fidelity_bounds(&p, 2, true).unwrap().upper;
        let b = fidelity_bounds(&swapped, 2, true).unwrap().upper;
        assert_abs_diff_eq!(a, b, epsilon = 1e-6);
    }

    #[test]
    fn choi_conventions() {
        let id = choi_from_kraus(&[CMatrix::identity(2, 2)]).unwrap();
        let rho = HermitianOperator::random_state(vec![2], 2, 5).unwrap();
        let out = apply_choi(&id, &rho).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-13);

        let dep = depolarizing_choi(2, 0.3).unwrap();
        let out = apply_choi(&dep, &rho).unwrap();
        let want = rho.depolarize(0.3, 0).unwrap();
        assert!((out.matrix() - want.matrix()).norm() < 1e-13);
        check_choi_marginal(&dep).unwrap();
        assert!(check_choi_marginal(&dep.scaled(0.5)).is_err());
    }

    #[test]
    fn identity_channel_purity() {
        let id = choi_from_kraus(&[CMatrix::identity(2, 2)]).unwrap();
        let b = output_purity_bounds(&id, 2, true).unwrap();
        assert_abs_diff_eq!(b.upper, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn depolarizing_purity() {
        for p in [0.2, 0.5] {
            let b = output_purity_bounds(&depolarizing_choi(2, p).unwrap(), 2, true).unwrap();
            assert_abs_diff_eq!(b.upper, 1.0 - p / 2.0, epsilon = 1e-5);
            assert!(b.lower <= 1.0 - p / 2.0 + 1e-7);
        }
    }

    fn random_unital_choi(seed: u64) -> HermitianOperator {
        // mixture of a random unitary and its composition with Pauli-Z
        let g = HermitianOperator::random_state(vec![2], 2, seed).unwrap();
        let u = crate::hermitian::eigh(g.matrix()).unwrap().vectors;
        let z = CMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
        let q = 0.15 + 0.7 * ((seed % 7) as f64 / 7.0);
        let k1 = &u * C64::new(q.sqrt(), 0.0);
        let k2 = &z * &u * C64::new((1.0 - q).sqrt(), 0.0);
        choi_from_kraus(&[k1, k2]).unwrap()
    }

    fn purity_by_grid(choi: &HermitianOperator) -> f64 {
        let mut best: f64 = 0.0;
        let steps = 120;
        for i in 0..=steps {
            let theta = std::f64::consts::PI * i as f64 / steps as f64;
            for j in 0..(2 * steps) {
                let phi = std::f64::consts::PI * j as f64 / steps as f64;
                let v = DVector::from_vec(vec![
                    C64::new((theta / 2.0).cos(), 0.0),
                    C64::from_polar((theta / 2.0).sin(), phi),
                ]);
                let rho = HermitianOperator::pure(vec![2], &v).unwrap();
                best = best.max(apply_choi(choi, &rho).unwrap().eigenvalues().unwrap()[0]);
            }
        }
        best
    }

    #[test]
    fn purity_sandwich_on_unital_channels() {
        for seed in 0..4 {
            let choi = random_unital_choi(seed);
            let nu = purity_by_grid(&choi);
            for (n, ppt) in [(1, false), (2, false), (2, true)] {
                let b = output_purity_bounds(&choi, n, ppt).unwrap();
                assert!(b.lower <= nu + 1e-7, "seed {seed}: {} > {nu}", b.lower);
                assert!(nu <= b.upper + 1e-6, "seed {seed}: {nu} > {}", b.upper);
            }
        }
    }

    #[test]
    fn geometric_entanglement_oracles() {
        let prod = HermitianOperator::pure(vec![2, 2, 2], &ket(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(geometric_entanglement_bounds(&prod, 2, true).unwrap().upper, 1.0, epsilon = 1e-6);

        for (psi, want) in [(ghz_state(), 0.5), (w_state(), 4.0 / 9.0)] {
            let rho_ab = psi.partial_trace(&[2]).unwrap();
            let oracle = product_overlap_search(&rho_ab, 20, 11).unwrap();
            assert_abs_diff_eq!(oracle, want, epsilon = 1e-6);
            let b = geometric_entanglement_bounds(&psi, 2, true).unwrap();
            assert!((b.upper - oracle).abs() < 1e-3, "{} vs {oracle}", b.upper);
            assert!(b.lower <= oracle + 1e-7);
            let plain = geometric_entanglement_bounds(&psi, 2, false).unwrap();
            assert!(plain.upper >= b.upper - 1e-7);
        }
    }

    #[test]
    fn sweep_rows_record_errors() {
        let row = sweep_point(3, true, |_, _| Err(Error::BudgetExceeded { required: 10, budget: 1 }));
        assert_eq!(row.status, "budget_exceeded");
        assert_eq!(row.csv_row()[2], "");
        let row = sweep_point(2, false, |n, ppt| {
            Ok(BoundPair { upper: 0.9, lower: 0.8, n, ppt, status: SdpStatus::Optimal })
        });
        assert_eq!(&row.csv_row()[..5], &["2", "false", "0.9000000000", "0.8000000000", "optimal"]);
    }
}
