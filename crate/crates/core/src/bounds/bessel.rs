//! Bessel functions of the first kind and their first positive zero.

use statrs::function::gamma::ln_gamma;

/// `J_ν(x)` for `ν ≥ 0`, `x > 0`, by Miller's backward recurrence
/// normalized with `(x/2)^ν / Γ(ν+1) = Σ_k c_k J_{ν+2k}(x)`,
/// `c_0 = 1`, `c_k = (ν+2k)/k · Π_{j<k} (ν+j)/j`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(nu >= 0.0, "order must be nonnegative");
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    assert!(x > 0.0, "argument must be positive");
    let mut m = (x.max(nu) as usize) + 60 + (x.sqrt() * 4.0) as usize;
    m += m % 2;

    // f_k ≈ J_{ν+k} up to a common factor, for k = m..0
    let mut f_next = 0.0f64;
    let mut f_cur = 1e-300f64;
    let mut f0 = 0.0;
    let mut norm = 0.0f64;
    let mut ck = coefficients(nu, m);
    for k in (0..=m).rev() {
        if k % 2 == 0 {
            norm += ck.pop().expect("one coefficient per even order") * f_cur;
        }
        if k == 0 {
            f0 = f_cur;
            break;
        }
        let f_prev = 2.0 * (nu + k as f64) / x * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        if f_cur.abs() > 1e250 {
            f_cur *= 1e-250;
            f_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    let lead = (nu * (x / 2.0).ln() - ln_gamma(nu + 1.0)).exp();
    lead * f0 / norm
}

/// `c_0, c_1, ..` for even orders `0, 2, .., m`, returned so that `pop`
/// yields the highest order first.
fn coefficients(nu: f64, m: usize) -> Vec<f64> {
    let count = m / 2 + 1;
    let mut out = Vec::with_capacity(count);
    out.push(1.0);
    let mut prod = 1.0;
    for k in 1..count {
        let kf = k as f64;
        if k > 1 {
            prod *= (nu + kf - 1.0) / (kf - 1.0);
        }
        out.push((nu + 2.0 * kf) / kf * prod);
    }
    out
}

/// First positive zero `j_{ν,1}` to about `1e-12` absolute.
pub fn bessel_zero_first(nu: f64) -> f64 {
    assert!((0.0..=50.0).contains(&nu), "order must lie in [0, 50]");
    let step = 0.1;
    let mut lo = if nu > 0.0 { nu } else { step };
    let mut hi = lo + step;
    while bessel_j(nu, hi) > 0.0 {
        lo = hi;
        hi += step;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bessel_j(nu, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Ascending series, fine for small arguments.
    fn series(nu: usize, x: f64) -> f64 {
        let mut term = (x / 2.0).powi(nu as i32) / (1..=nu).map(|k| k as f64).product::<f64>();
        let mut sum = term;
        for k in 1..80 {
            term *= -(x * x / 4.0) / (k as f64 * (k + nu) as f64);
            sum += term;
        }
        sum
    }

    fn series_zero(nu: usize, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if series(nu, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn recurrence_matches_series() {
        for nu in 0..=3 {
            for &x in &[0.1, 0.5, 1.0, 2.4, 3.8, 6.0] {
                assert_abs_diff_eq!(bessel_j(nu as f64, x), series(nu, x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn first_zeros() {
        let z0 = bessel_zero_first(0.0);
        let z1 = bessel_zero_first(1.0);
        assert_abs_diff_eq!(z0, 2.404_825_56, epsilon = 1e-8);
        assert_abs_diff_eq!(z1, 3.831_705_97, epsilon = 1e-8);
        assert_abs_diff_eq!(z0, series_zero(0, 2.0, 3.0), epsilon = 1e-10);
        assert_abs_diff_eq!(z1, series_zero(1, 3.5, 4.0), epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_zero_first(2.0), 5.135_622_30, epsilon = 1e-8);
    }

    #[test]
    fn large_order_asymptotics() {
        let nu = 30.0;
        let z = bessel_zero_first(nu);
        let c = nu.powf(1.0 / 3.0);
        // leading term alone is off by about 6% at this order
        let lead = 1.855_757 * c;
        assert!(((z - nu) - lead).abs() / lead < 0.06, "{z}");
        let two_terms = nu + lead + 1.033_150 / c;
        assert_abs_diff_eq!(z, two_terms, epsilon = 1e-3);
        assert_abs_diff_eq!(z, 36.098_336_956_7, epsilon = 1e-8);
        assert!(bessel_j(nu, z).abs() < 1e-12);
    }

    #[test]
    fn half_integer_order() {
        // J_{1/2}(x) = sqrt(2/(πx)) sin x, first zero π
        let x = 1.3;
        let want = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
        assert_abs_diff_eq!(bessel_j(0.5, x), want, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_zero_first(0.5), std::f64::consts::PI, epsilon = 1e-10);
    }
}
