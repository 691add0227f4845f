//! The noise level `g_N`: one minus the largest root of a Jacobi
//! polynomial, computed three ways.
//!
//! Even `N` uses `P^{(d-2,0)}_{N/2+1}`, odd `N` uses `P^{(d-2,1)}_{(N+1)/2}`.
//! With weight `(1-y)^a (1+y)^b` on `[-1, 1]`, the orthonormal polynomials obey
//! `y p_n = a_n p_n + b_n p_{n+1} + b_{n-1} p_{n-1}` with
//!
//! ```text
//!   a_0 = (b - a) / (a + b + 2)
//!   a_n = (b² - a²) / ((2n+a+b)(2n+a+b+2))
//!   b_n = 2/(2n+a+b+2) · sqrt((n+1)(n+a+1)(n+b+1)(n+a+b+1) / ((2n+a+b+1)(2n+a+b+3)))
//! ```
//!
//! so `(1-y) p_n = α_n p_n + β_n p_{n+1} + γ_n p_{n-1}` with `α_n = 1 - a_n`,
//! `β_n = -b_n`, `γ_n = -b_{n-1}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `P_n^{(α,β)}(x)` by the standard three-term recurrence.
pub fn jacobi_eval(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut p0 = 1.0;
    let mut p1 = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Parameters `(a, b)` and polynomial degree attached to `(d, N)`.
pub fn jacobi_parameters(d: usize, n: usize) -> (f64, f64, usize) {
    assert!(d >= 2 && n >= 1, "need d ≥ 2 and N ≥ 1");
    let a = (d - 2) as f64;
    if n.is_multiple_of(2) {
        (a, 0.0, n / 2 + 1)
    } else {
        (a, 1.0, n.div_ceil(2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRecurrence {
    pub alpha: f64,
    pub beta: f64,
    /// Coefficients of `(1-y) p_n` on `p_n`, `p_{n+1}`, `p_{n-1}`.
    pub alpha_n: Vec<f64>,
    pub beta_n: Vec<f64>,
    pub gamma_n: Vec<f64>,
}

impl JacobiRecurrence {
    /// First `len` coefficient triples.
    pub fn new(alpha: f64, beta: f64, len: usize) -> Self {
        let (a, b) = (alpha, beta);
        let diag = |k: usize| -> f64 {
            if k == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                let s = 2.0 * k as f64 + a + b;
                (b * b - a * a) / (s * (s + 2.0))
            }
        };
        let off = |k: usize| -> f64 {
            let k = k as f64;
            let s = 2.0 * k + a + b;
            2.0 / (s + 2.0) * ((k + 1.0) * (k + a + 1.0) * (k + b + 1.0) * (k + a + b + 1.0) / ((s + 1.0) * (s + 3.0))).sqrt()
        };
        let alpha_n = (0..len).map(|k| 1.0 - diag(k)).collect();
        let beta_n = (0..len).map(|k| -off(k)).collect();
        let gamma_n = (0..len).map(|k| if k == 0 { 0.0 } else { -off(k - 1) }).collect();
        Self {
            alpha,
            beta,
            alpha_n,
            beta_n,
            gamma_n,
        }
    }

    pub fn for_level(d: usize, n: usize) -> Self {
        let (a, b, len) = jacobi_parameters(d, n);
        Self::new(a, b, len)
    }

    pub fn len(&self) -> usize {
        self.alpha_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha_n.is_empty()
    }

    /// Symmetric tridiagonal matrix of `1 - y` on `span{p_0, .., p_{len-1}}`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = self.alpha_n[k];
            if k + 1 < n {
                m[(k, k + 1)] = self.beta_n[k];
                m[(k + 1, k)] = self.gamma_n[k + 1];
            }
        }
        m
    }

    /// `(p_0(y), .., p_{len-1}(y))` up to a common factor.
    pub fn values(&self, y: f64) -> DVector<f64> {
        let n = self.len();
        let mut v = DVector::zeros(n);
        v[0] = 1.0;
        for k in 0..n.saturating_sub(1) {
            // (1-y) p_k = α_k p_k + β_k p_{k+1} + γ_k p_{k-1}
            let prev = if k == 0 { 0.0 } else { v[k - 1] };
            v[k + 1] = ((1.0 - y) * v[k] - self.alpha_n[k] * v[k] - self.gamma_n[k] * prev) / self.beta_n[k];
        }
        v
    }
}

/// Tridiagonal matrix whose smallest eigenvalue is `g_N`.
pub fn tridiagonal_c(d: usize, n: usize) -> DMatrix<f64> {
    JacobiRecurrence::for_level(d, n).matrix()
}

/// `g_N` from the smallest eigenvalue of the tridiagonal matrix.
pub fn g_n(d: usize, n: usize) -> f64 {
    let m = tridiagonal_c(d, n);
    SymmetricEigen::new(m).eigenvalues.min()
}

/// `g_N` by bracketing the largest root of the Jacobi polynomial from
/// `x = 1` downwards and bisecting.
pub fn g_n_via_roots(d: usize, n: usize) -> f64 {
    let (a, b, deg) = jacobi_parameters(d, n);
    let f = |x: f64| jacobi_eval(deg, a, b, x);
    let step = 0.1 / (deg * deg) as f64;
    let mut hi = 1.0;
    let f_hi = f(hi);
    let mut lo = hi - step;
    while f(lo).signum() == f_hi.signum() {
        hi = lo;
        lo -= step;
        assert!(lo > -1.0, "no root found in (-1, 1)");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == f_hi.signum() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    1.0 - 0.5 * (lo + hi)
}

/// Exact rational `p! / q!` for `p ≤ q`.
fn factorial_ratio(p: usize, q: usize) -> BigRational {
    let mut den = BigInt::one();
    for k in p + 1..=q {
        den *= BigInt::from(k);
    }
    BigRational::new(BigInt::one(), den)
}

/// `2(d-1) · λ_min(Ã, B̃)` for the moment pencil
///
/// ```text
///   even N:  B̃_nm = (n+m)!/(n+m+d-1)!,    Ã_nm = (n+m)!/(n+m+d)!,      n,m ≤ N/2
///   odd N:   B̃_nm = (n+m+1)!/(n+m+d)!,    Ã_nm = (n+m+1)!/(n+m+d+1)!,  n,m ≤ (N-1)/2
/// ```
///
/// The Hankel matrices are badly conditioned, so `B̃ = L D Lᵀ` and
/// `L⁻¹ Ã L⁻ᵀ` are formed in exact rational arithmetic and only the final
/// symmetric matrix `D^{-1/2} L⁻¹ Ã L⁻ᵀ D^{-1/2}` is rounded.
pub fn g_n_via_pencil(d: usize, n: usize) -> Result<f64> {
    if d < 2 || n == 0 {
        return Err(Error::InvalidArgument("need d ≥ 2 and N ≥ 1".into()));
    }
    let (size, shift) = if n.is_multiple_of(2) { (n / 2 + 1, 0) } else { (n.div_ceil(2), 1) };
    let b_mat: Vec<Vec<BigRational>> = (0..size)
        .map(|i| (0..size).map(|j| factorial_ratio(i + j + shift, i + j + shift + d - 1)).collect())
        .collect();
    let a_mat: Vec<Vec<BigRational>> = (0..size)
        .map(|i| (0..size).map(|j| factorial_ratio(i + j + shift, i + j + shift + d)).collect())
        .collect();

    // B̃ = L D Lᵀ, L unit lower triangular.
    let mut l = vec![vec![BigRational::zero(); size]; size];
    let mut dg = vec![BigRational::zero(); size];
    for j in 0..size {
        let mut djj = b_mat[j][j].clone();
        for k in 0..j {
            djj -= &l[j][k] * &l[j][k] * &dg[k];
        }
        if djj.is_zero() || djj < BigRational::zero() {
            return Err(Error::InvalidArgument("pencil matrix is singular".into()));
        }
        l[j][j] = BigRational::one();
        for i in j + 1..size {
            let mut v = b_mat[i][j].clone();
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &dg[k];
            }
            l[i][j] = v / &djj;
        }
        dg[j] = djj;
    }

    // W = L⁻¹ Ã by forward substitution, then K' = W L⁻ᵀ.
    let forward = |rhs: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        let mut out = rhs.clone();
        for col in 0..size {
            for i in 0..size {
                let mut v = rhs[i][col].clone();
                for k in 0..i {
                    v -= &l[i][k] * &out[k][col];
                }
                out[i][col] = v;
            }
        }
        out
    };
    let w = forward(&a_mat);
    let wt: Vec<Vec<BigRational>> = (0..size).map(|i| (0..size).map(|j| w[j][i].clone()).collect()).collect();
    let kp = forward(&wt);

    let dsq: Vec<f64> = dg
        .iter()
        .map(|v| v.to_f64().map(f64::sqrt))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidArgument("pencil entries out of floating range".into()))?;
    let mut k = DMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            let v = kp[i][j]
                .to_f64()
                .ok_or_else(|| Error::InvalidArgument("pencil entries out of floating range".into()))?;
            k[(i, j)] = v / (dsq[i] * dsq[j]);
        }
    }
    let k = (&k + k.transpose()) * 0.5;
    let lambda = SymmetricEigen::new(k).eigenvalues.min();
    Ok(2.0 * (d - 1) as f64 * lambda)
}
