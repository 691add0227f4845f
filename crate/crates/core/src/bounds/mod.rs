//! Closed-form disentangling maps, noise levels and distance bounds for
//! the (PPT) symmetric-extension hierarchy.

pub mod bessel;
pub mod jacobi;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianOperator, C64};
use crate::CMatrix;

pub use bessel::{bessel_j, bessel_zero_first};
pub use jacobi::{g_n, g_n_via_pencil, g_n_via_roots, jacobi_eval, tridiagonal_c, JacobiRecurrence};

/// Tolerance used when checking that an input is PPT.
pub const PPT_TOL: f64 = 1e-9;

fn check_bipartite(rho: &HermitianOperator) -> Result<(usize, usize)> {
    match rho.dims() {
        [a, b] => Ok((*a, *b)),
        other => Err(Error::InvalidArgument(format!(
            "expected a bipartite operator, got dims {other:?}"
        ))),
    }
}

/// Mixing weight of the symmetric-extension disentangler, `d/(N+d)`.
pub fn p_sym(d: usize, n: usize) -> f64 {
    d as f64 / (n + d) as f64
}

/// Mixing weight of the PPT disentangler, `d g_N / (2(d-1))`.
pub fn p_ppt(d: usize, n: usize) -> f64 {
    d as f64 * g_n(d, n) / (2.0 * (d - 1) as f64)
}

/// `N/(N+d) ρ + 1/(N+d) ρ_A ⊗ I_B`.
pub fn disentangle_sym(rho: &HermitianOperator, n: usize) -> Result<HermitianOperator> {
    let (_, d) = check_bipartite(rho)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    rho.depolarize(p_sym(d, n), 1)
}

/// `(1 - d g_N/(2(d-1))) ρ + g_N/(2(d-1)) ρ_A ⊗ I_B`.
pub fn disentangle_ppt(rho: &HermitianOperator, n: usize) -> Result<HermitianOperator> {
    let (_, d) = check_bipartite(rho)?;
    if n == 0 || d < 2 {
        return Err(Error::InvalidArgument("need N ≥ 1 and d_B ≥ 2".into()));
    }
    rho.depolarize(p_ppt(d, n).min(1.0), 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub d_a: usize,
    pub d_b: usize,
    pub n: usize,
    pub g_n: f64,
    pub p_c_sym: f64,
    pub p_c_ppt: f64,
    pub robustness_sym: f64,
    pub robustness_ppt: f64,
    pub dist_trace_sym: f64,
    pub dist_op_sym: f64,
    pub dist_trace_ppt: f64,
    pub dist_op_ppt: f64,
    pub g_n_asymptotic: f64,
    /// `j_{d_B-2,1}`.
    pub bessel_zero: f64,
    /// The PPT distance bounds assume `N ≥ 2`.
    pub ppt_distance_valid: bool,
}

impl BoundReport {
    pub const CSV_HEADER: [&'static str; 10] = [
        "dA", "dB", "N", "gN", "pc_sym", "pc_ppt", "R_sym", "R_ppt", "dtr_sym", "dtr_ppt",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.d_a.to_string(),
            self.d_b.to_string(),
            self.n.to_string(),
            fmt_f(self.g_n),
            fmt_f(self.p_c_sym),
            fmt_f(self.p_c_ppt),
            fmt_f(self.robustness_sym),
            fmt_f(self.robustness_ppt),
            fmt_f(self.dist_trace_sym),
            fmt_f(self.dist_trace_ppt),
        ]
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn bound_report(d_a: usize, d_b: usize, n: usize) -> Result<BoundReport> {
    if d_a == 0 || d_b < 2 || n == 0 {
        return Err(Error::InvalidArgument("need d_A ≥ 1, d_B ≥ 2, N ≥ 1".into()));
    }
    let d = d_b as f64;
    let nf = n as f64;
    let g = g_n(d_b, n);
    let j = bessel_zero_first((d_b - 2) as f64);
    Ok(BoundReport {
        d_a,
        d_b,
        n,
        g_n: g,
        p_c_sym: p_sym(d_b, n),
        p_c_ppt: p_ppt(d_b, n),
        robustness_sym: (d - 1.0) / nf,
        robustness_ppt: g / (2.0 - d / (d - 1.0) * g),
        dist_trace_sym: 2.0 * (d - 1.0) / (nf + d - 1.0),
        dist_op_sym: (d - 1.0) / (nf + d - 1.0),
        dist_trace_ppt: g,
        dist_op_ppt: g / 2.0,
        g_n_asymptotic: 2.0 * (j / nf).powi(2),
        bessel_zero: j,
        ppt_distance_valid: n >= 2,
    })
}

/// `‖ρ - ρ̃‖_F` in closed form, `p √(tr ρ² - tr ρ_A²/d)` with `p` the
/// disentangler's mixing weight.
pub fn frobenius_distance_exact(rho: &HermitianOperator, n: usize, ppt: bool) -> Result<f64> {
    let (_, d) = check_bipartite(rho)?;
    let p = if ppt { p_ppt(d, n) } else { p_sym(d, n) };
    let rho_a = rho.reduce_to(&[0])?;
    let purity = rho.inner(rho);
    let purity_a = rho_a.inner(&rho_a);
    Ok(p * (purity - purity_a / d as f64).max(0.0).sqrt())
}

/// Smallest `N` whose trace-distance bound drops to `δ`.
pub fn required_n(delta: f64, d_b: usize, ppt: bool) -> Result<usize> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} must lie in (0, 2)")));
    }
    if d_b < 2 {
        return Err(Error::InvalidArgument("d_B must be at least 2".into()));
    }
    let d = (d_b - 1) as f64;
    if !ppt {
        return Ok(((2.0 - delta) * d / delta - 1e-12).ceil().max(0.0) as usize);
    }
    let j = bessel_zero_first((d_b - 2) as f64);
    let mut n = ((2f64.sqrt() * j / delta.sqrt()) - 1e-12).ceil().max(1.0) as usize;
    while g_n(d_b, n) > delta {
        n += 1;
    }
    Ok(n)
}

/// Natural logarithms of the dominant operation counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub n_sym: usize,
    pub n_ppt: usize,
    pub sym_ops: f64,
    pub ppt_ops: f64,
    pub sym_simplified: f64,
    pub ppt_simplified: f64,
}

fn ln_sym_dim(d: usize, n: usize) -> f64 {
    ln_binomial((n + d - 1) as u64, (d - 1) as u64)
}

pub fn complexity_estimate(d_a: usize, d_b: usize, delta: f64) -> Result<ComplexityEstimate> {
    if d_a == 0 {
        return Err(Error::InvalidArgument("d_A must be positive".into()));
    }
    let n_sym = required_n(delta, d_b, false)?;
    let n_ppt = required_n(delta, d_b, true)?;
    let la = (d_a as f64).ln();
    let db = d_b as f64;
    Ok(ComplexityEstimate {
        n_sym,
        n_ppt,
        sym_ops: 6.0 * la + 6.0 * ln_sym_dim(d_b, n_sym),
        ppt_ops: 6.0 * la + 4.0 * ln_sym_dim(d_b, n_ppt) + 4.0 * ln_sym_dim(d_b, n_ppt.div_ceil(2)),
        sym_simplified: 6.0 * la + 6.0 * db * (2.0 * std::f64::consts::E / delta).ln(),
        ppt_simplified: 6.0 * la + 4.0 * db * (2.0 - delta.ln()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PptAlone {
    pub p_a: f64,
    pub p_b: f64,
    /// `Ω^{(p_A)} ⊗ Ω^{(p_B)}(ρ)`, separable.
    pub tilde: HermitianOperator,
    /// Upper bound on the global robustness.
    pub rg_bound: f64,
    /// Upper bound on the trace distance to the separable set.
    pub trace_bound: f64,
}

/// Local depolarizing weights that make every PPT state separable.
pub fn ppt_alone(rho: &HermitianOperator) -> Result<PptAlone> {
    let (d_a, d_b) = check_bipartite(rho)?;
    if d_a < 3 || d_b < 2 {
        return Err(Error::InvalidArgument(format!(
            "need d_A ≥ 3 and d_B ≥ 2, got {d_a}×{d_b}"
        )));
    }
    let min_eig = rho.partial_transpose(&[1])?.min_eigenvalue()?;
    if min_eig < -PPT_TOL {
        return Err(Error::NotPpt { min_eig });
    }
    let (a, b) = (d_a as f64, d_b as f64);
    let p_a = a * (a - 3.0) / (a * a - 1.0);
    let p_b = b * (b - 2.0) / (b * b - 1.0);
    let tilde = rho.depolarize(p_a, 0)?.depolarize(p_b, 1)?;
    let (rg_bound, trace_bound) = ppt_alone_bounds(d_a, d_b);
    Ok(PptAlone {
        p_a,
        p_b,
        tilde,
        rg_bound,
        trace_bound,
    })
}

/// `((d_A+1)(d_B+1)/12 - 1, 2 - 24/((d_A+1)(d_B+1)))`.
pub fn ppt_alone_bounds(d_a: usize, d_b: usize) -> (f64, f64) {
    let prod = ((d_a + 1) * (d_b + 1)) as f64;
    ((prod - 12.0) / 12.0, 2.0 - 24.0 / prod)
}

/// Per-party depolarizing weights for a state on
/// `H_1 ⊗ H_2 ⊗ .. ⊗ H_m` with extensions of every party but the first.
pub fn multipartite_probs(dims: &[usize], n: usize, ppt: bool) -> Result<Vec<f64>> {
    if n == 0 || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidArgument("need N ≥ 1 and all d_i ≥ 2".into()));
    }
    Ok(dims
        .iter()
        .map(|&d| if ppt { p_ppt(d, n) } else { p_sym(d, n) })
        .collect())
}

/// Two-qubit state `(K-1)/(2(2K-1)) (|00⟩⟨00| + |11⟩⟨11|)
/// + K/(2(2K-1)) (|01⟩ + |10⟩)(⟨01| + ⟨10|)`.
pub fn example_state(k: usize) -> Result<HermitianOperator> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let kf = k as f64;
    let den = 2.0 * (2.0 * kf - 1.0);
    let diag = (kf - 1.0) / den;
    let off = kf / den;
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = C64::new(diag, 0.0);
    m[(3, 3)] = C64::new(diag, 0.0);
    for i in [1, 2] {
        for j in [1, 2] {
            m[(i, j)] = C64::new(off, 0.0);
        }
    }
    HermitianOperator::new(vec![2, 2], m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::random_extendible_state;
    use crate::hermitian::NormKind;
    use crate::symmetric::dicke_overlap_state;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn bell() -> HermitianOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let psi = DVector::from_vec(vec![C64::new(s, 0.0), z, z, C64::new(s, 0.0)]);
        HermitianOperator::pure(vec![2, 2], &psi).unwrap()
    }

    #[test]
    fn sym_disentangler_on_bell() {
        let out = disentangle_sym(&bell(), 1).unwrap();
        let want = bell().combine(1.0 / 3.0, &HermitianOperator::identity(vec![2, 2]), 1.0 / 6.0).unwrap();
        assert!((out.matrix() - want.matrix()).norm() < 1e-14);
        let min = out.partial_transpose(&[1]).unwrap().min_eigenvalue().unwrap();
        assert_abs_diff_eq!(min, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ppt_disentangler_on_bell() {
        assert_abs_diff_eq!(p_ppt(2, 1), 2.0 / 3.0, epsilon = 1e-12);
        let out = disentangle_ppt(&bell(), 1).unwrap();
        let want = bell().combine(1.0 / 3.0, &HermitianOperator::identity(vec![2, 2]), 1.0 / 6.0).unwrap();
        assert!((out.matrix() - want.matrix()).norm() < 1e-12);
        assert!(out.is_ppt(&[1], 1e-12).unwrap());
    }

    #[test]
    fn disentanglers_preserve_trace_and_marginal() {
        let rho = HermitianOperator::random_state(vec![3, 2], 4, 7).unwrap();
        for out in [disentangle_sym(&rho, 3).unwrap(), disentangle_ppt(&rho, 3).unwrap()] {
            assert_abs_diff_eq!(out.trace(), rho.trace(), epsilon = 1e-12);
            let diff = out.reduce_to(&[0]).unwrap().matrix() - rho.reduce_to(&[0]).unwrap().matrix();
            assert!(diff.norm() < 1e-12);
        }
        let id = HermitianOperator::maximally_mixed(vec![2, 3]);
        let out = disentangle_ppt(&id, 4).unwrap();
        assert!((out.matrix() - id.matrix()).norm() < 1e-14);
    }

    #[test]
    fn product_input_stays_product() {
        let a = HermitianOperator::random_state(vec![2], 1, 1).unwrap();
        let b = HermitianOperator::random_state(vec![3], 1, 2).unwrap();
        let rho = a.kron(&b).with_dims(vec![2, 3]).unwrap();
        let out = disentangle_sym(&rho, 2).unwrap();
        let b_out = b.depolarize(p_sym(3, 2), 0).unwrap();
        let want = a.kron(&b_out);
        assert!((out.matrix() - want.matrix()).norm() < 1e-13);
    }

    #[test]
    fn ppt_weight_below_sym_weight() {
        for d in 2..=6 {
            for n in d..=40 {
                assert!(p_ppt(d, n) <= p_sym(d, n), "d={d} N={n}");
            }
        }
    }

    #[test]
    fn report_spot_values() {
        let r = bound_report(2, 2, 1).unwrap();
        assert_abs_diff_eq!(r.robustness_sym, 1.0, epsilon = 1e-15);
        assert!(!r.ppt_distance_valid);
        let r = bound_report(2, 2, 3).unwrap();
        assert_abs_diff_eq!(r.robustness_sym, 1.0 / 3.0, epsilon = 1e-15);
        let r = bound_report(2, 2, 2).unwrap();
        assert_abs_diff_eq!(r.dist_trace_ppt, 1.0 - 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.bessel_zero, 2.404_825_557_7, epsilon = 1e-8);
        assert_eq!(r.csv_row().len(), BoundReport::CSV_HEADER.len());
    }

    #[test]
    fn report_invariants() {
        for d_b in 2..=6 {
            for n in 1..=40 {
                let r = bound_report(3, d_b, n).unwrap();
                assert!(r.g_n > 0.0 && r.g_n < 2.0);
                for p in [r.p_c_sym, r.p_c_ppt] {
                    assert!(p > 0.0 && p < 1.0, "d={d_b} N={n}: {p}");
                }
                for x in [r.dist_trace_sym, r.dist_op_sym, r.dist_trace_ppt, r.dist_op_ppt] {
                    assert!(x > 0.0 && x <= 2.0);
                }
                if n >= 2.max(d_b) {
                    assert!(r.robustness_ppt <= r.robustness_sym, "d={d_b} N={n}");
                }
            }
        }
    }

    #[test]
    fn asymptotic_law() {
        // relative error of 2(j/N)² decays like 1/N; shifting N by d
        // absorbs the leading correction
        for d in 2..=4 {
            let mut last = f64::INFINITY;
            for n in [200, 400, 800] {
                let r = bound_report(2, d, n).unwrap();
                let j2 = r.bessel_zero.powi(2);
                let rel = (r.g_n * (n * n) as f64 / 2.0 - j2).abs() / j2;
                assert!(rel < 0.05 && rel < 0.55 * last, "d={d} N={n}: {rel}");
                last = rel;
                let shifted = (r.g_n * ((n + d) * (n + d)) as f64 / 2.0 - j2).abs() / j2;
                assert!(shifted < 2.0 / n as f64, "d={d} N={n}: {shifted}");
            }
        }
        let r = bound_report(2, 2, 200).unwrap();
        assert_abs_diff_eq!(r.g_n, 2.806_604_702e-4, epsilon = 1e-12);
    }

    #[test]
    fn frobenius_spot_values() {
        let mixed = HermitianOperator::maximally_mixed(vec![2, 2]);
        assert_abs_diff_eq!(frobenius_distance_exact(&mixed, 3, false).unwrap(), 0.0, epsilon = 1e-12);
        let f = frobenius_distance_exact(&bell(), 1, false).unwrap();
        assert_abs_diff_eq!(f, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        let direct = bell().combine(1.0, &disentangle_sym(&bell(), 1).unwrap(), -1.0).unwrap();
        assert_abs_diff_eq!(direct.norm(NormKind::Frobenius).unwrap(), f, epsilon = 1e-12);
    }

    #[test]
    fn required_n_values() {
        assert_eq!(required_n(0.1, 2, false).unwrap(), 19);
        let n = required_n(0.1, 2, true).unwrap();
        assert!(n >= 11);
        assert!(g_n(2, n) <= 0.1);
        assert!(required_n(1.999, 2, false).unwrap() <= 1);
        assert!(required_n(2.0, 2, false).is_err());
        // closed form for the symmetric bound
        let n = required_n(0.05, 4, false).unwrap();
        assert!(2.0 * 3.0 / (n as f64 + 3.0) <= 0.05 + 1e-12);
        assert!(2.0 * 3.0 / (n as f64 + 2.0) > 0.05);
    }

    #[test]
    fn complexity_values() {
        let c = complexity_estimate(2, 2, 0.1).unwrap();
        assert_eq!(c.n_sym, 19);
        assert_abs_diff_eq!(c.sym_ops, (64.0 * 20f64.powi(6)).ln(), epsilon = 1e-9);
        let c = complexity_estimate(2, 3, 0.01).unwrap();
        assert!(c.ppt_ops < c.sym_ops);
        let mut last = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for delta in [1.5, 1.0, 0.5, 0.1, 0.01, 0.001] {
            let c = complexity_estimate(3, 3, delta).unwrap();
            assert!(c.sym_simplified > last.0 && c.ppt_simplified > last.1);
            last = (c.sym_simplified, c.ppt_simplified);
        }
    }

    #[test]
    fn ppt_alone_spot_values() {
        let rho = HermitianOperator::random_state(vec![3, 2], 6, 3).unwrap();
        let rho = disentangle_sym(&rho, 1).unwrap();
        assert!(rho.is_ppt(&[1], 1e-12).unwrap());
        let out = ppt_alone(&rho).unwrap();
        assert_eq!(out.p_a, 0.0);
        assert_eq!(out.p_b, 0.0);
        assert_eq!(out.tilde.matrix(), rho.matrix());

        assert_eq!(ppt_alone_bounds(3, 3).0, 1.0 / 3.0);
        let first_trivial = (2..=20).find(|&d| ppt_alone_bounds(d, d).0 > (d - 1) as f64).unwrap();
        assert_eq!(first_trivial, 10);
        assert_abs_diff_eq!(ppt_alone_bounds(10, 10).0, 121.0 / 12.0 - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ppt_alone_rejects() {
        let rho = HermitianOperator::random_state(vec![3, 3], 1, 4).unwrap();
        assert!(matches!(ppt_alone(&rho), Err(Error::NotPpt { .. })));
        assert!(ppt_alone(&bell()).is_err());
    }

    #[test]
    fn multipartite_values() {
        assert_eq!(multipartite_probs(&[3], 5, false).unwrap(), vec![3.0 / 8.0]);
        let p = multipartite_probs(&[2, 2], 3, false).unwrap();
        assert_abs_diff_eq!(p[0], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.4, epsilon = 1e-15);
        let p = multipartite_probs(&[2, 3], 2, true).unwrap();
        assert_abs_diff_eq!(p[0], g_n(2, 2), epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.75 * g_n(3, 2), epsilon = 1e-15);
    }

    #[test]
    fn example_family() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let psi = DVector::from_vec(vec![z, C64::new(s, 0.0), C64::new(s, 0.0), z]);
        let pure = HermitianOperator::pure(vec![2, 2], &psi).unwrap();
        assert!((example_state(1).unwrap().matrix() - pure.matrix()).norm() < 1e-15);

        let pt = example_state(2).unwrap().partial_transpose(&[1]).unwrap();
        let eig = pt.eig().unwrap();
        let (idx, min) = eig
            .values
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert_abs_diff_eq!(min, -1.0 / 6.0, epsilon = 1e-12);
        let v = eig.vectors.column(idx);
        let overlap = (v[0] * s - v[3] * s).norm();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-10);

        for k in 1..=4 {
            let full = dicke_overlap_state(k).unwrap();
            let traced: Vec<usize> = (2..2 * k).collect();
            let red = full.partial_trace(&traced).unwrap();
            let want = example_state(k).unwrap();
            assert!((red.matrix() - want.matrix()).norm() < 1e-12, "K={k}");
            let neg = want.negativity(&[1]).unwrap();
            assert_abs_diff_eq!(neg, 1.0 / (2.0 * (2 * k - 1) as f64), epsilon = 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sym_output_is_ppt_on_extendible_states(n in 2usize..=3, rank in 1usize..=6, seed in any::<u64>()) {
            let (rho, _) = random_extendible_state(2, 2, n, rank, seed).unwrap();
            let out = disentangle_sym(&rho, n).unwrap();
            let min = out.partial_transpose(&[1]).unwrap().min_eigenvalue().unwrap();
            prop_assert!(min >= -1e-10, "min eig {min}");
            let diff = rho.combine(1.0, &out, -1.0).unwrap();
            let r = bound_report(2, 2, n).unwrap();
            prop_assert!(diff.norm(NormKind::Trace).unwrap() <= r.dist_trace_sym + 1e-10);
            prop_assert!(diff.norm(NormKind::Operator).unwrap() <= r.dist_op_sym + 1e-10);
            let f = frobenius_distance_exact(&rho, n, false).unwrap();
            prop_assert!((diff.norm(NormKind::Frobenius).unwrap() - f).abs() < 1e-9);
        }

        #[test]
        fn frobenius_formula_matches_direct_norm(d_a in 1usize..=3, d_b in 2usize..=3, n in 1usize..=6, seed in any::<u64>(), ppt in any::<bool>()) {
            let rho = HermitianOperator::random_state(vec![d_a, d_b], d_a * d_b, seed).unwrap();
            let out = if ppt { disentangle_ppt(&rho, n) } else { disentangle_sym(&rho, n) }.unwrap();
            let direct = rho.combine(1.0, &out, -1.0).unwrap().norm(NormKind::Frobenius).unwrap();
            prop_assert!((direct - frobenius_distance_exact(&rho, n, ppt).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn ppt_alone_keeps_ppt(seed in any::<u64>(), d_a in 3usize..=4, d_b in 2usize..=3) {
            let rho = HermitianOperator::random_state(vec![d_a, d_b], 2, seed).unwrap();
            // push into the PPT set by heavy local noise
            let rho = rho.depolarize(0.95, 1).unwrap();
            prop_assume!(rho.is_ppt(&[1], 0.0).unwrap());
            let out = ppt_alone(&rho).unwrap();
            prop_assert!(out.tilde.is_ppt(&[1], 1e-12).unwrap());
        }
    }
}
