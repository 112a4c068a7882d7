//! Special functions used throughout the crate.
//!
//! Log-gamma, digamma and the incomplete gamma ratios come from `statrs`. The
//! pieces that need extra care at extreme shapes (Stirling remainders,
//! digamma differences, the incomplete beta continued fraction with a
//! caller-supplied log prefactor) live here.

use std::f64::consts::SQRT_2;

use statrs::function::{erf, gamma};

use crate::error::{Error, Result};

pub const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

pub fn digamma(x: f64) -> f64 {
    gamma::digamma(x)
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma::gamma_lr(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        gamma::gamma_ur(a, x)
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / SQRT_2)
}

pub fn normal_sf(x: f64) -> f64 {
    0.5 * erf::erfc(x / SQRT_2)
}

pub fn normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erf::erfc_inv(2.0 * p)
}

/// Remainder of Stirling's series, `ln Γ(x) − (x − ½) ln x + x − ½ ln 2π`.
///
/// Small for large `x`, which is what lets ratios of gamma functions with
/// huge arguments be formed without cancelling two enormous numbers.
pub fn stirling_correction(x: f64) -> f64 {
    if x < 10.0 {
        return ln_gamma(x) - (x - 0.5) * x.ln() + x - HALF_LN_2PI;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    // Bernoulli terms B_{2k} / (2k (2k-1)) up to k = 6.
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0
            - r2 * (1.0 / 1260.0
                - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0 - r2 * (691.0 / 360_360.0))))))
}

/// `ψ(a + b) − ψ(a)` with relative accuracy when `b ≪ a`.
pub fn digamma_diff(a: f64, b: f64) -> f64 {
    if a < 20.0 {
        return digamma(a + b) - digamma(a);
    }
    // ψ(z) ~ ln z − 1/(2z) − Σ B_{2k}/(2k z^{2k})
    let tail = |z: f64| {
        let r2 = 1.0 / (z * z);
        r2 * (1.0 / 12.0 - r2 * (1.0 / 120.0 - r2 * (1.0 / 252.0 - r2 * (1.0 / 240.0))))
    };
    (b / a).ln_1p() + b / (2.0 * a * (a + b)) - (tail(a + b) - tail(a))
}

/// `ln x − ψ(x)`, accurate for large `x` where both terms are nearly equal.
pub fn ln_minus_digamma(x: f64) -> f64 {
    if x < 10.0 {
        return x.ln() - digamma(x);
    }
    let r = 1.0 / x;
    let r2 = r * r;
    0.5 * r
        + r2 * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0 - r2 * (1.0 / 132.0 - r2 * (691.0 / 32760.0 - r2 / 12.0))))))
}

/// `ln(1 + e^t)` without overflow.
#[inline]
pub fn softplus(t: f64) -> f64 {
    if t > 36.0 {
        t + (-t).exp()
    } else if t < -36.0 {
        t.exp()
    } else {
        t.exp().ln_1p()
    }
}

/// `1 / (1 + e^{-t})`.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^x − 1)` for `x > 0`.
#[inline]
pub fn ln_expm1(x: f64) -> f64 {
    if x > 36.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

const CF_MAX_ITER: usize = 200_000;

/// Regularized incomplete beta `(I_y(a, b), 1 − I_y(a, b))`.
///
/// `one_minus_y` must be supplied separately so that neither tail loses
/// precision, and `ln_front` is `a ln y + b ln(1−y) − ln B(a, b)`, which the
/// caller is expected to have formed stably.
pub fn incomplete_beta(
    a: f64,
    b: f64,
    y: f64,
    one_minus_y: f64,
    ln_front: f64,
) -> Result<(f64, f64)> {
    if y <= 0.0 {
        return Ok((0.0, 1.0));
    }
    if one_minus_y <= 0.0 {
        return Ok((1.0, 0.0));
    }
    let front = ln_front.exp();
    if y < (a + 1.0) / (a + b + 2.0) {
        let lower = (front * beta_continued_fraction(a, b, y, one_minus_y)? / a).min(1.0);
        Ok((lower, 1.0 - lower))
    } else {
        let upper = (front * beta_continued_fraction(b, a, one_minus_y, y)? / b).min(1.0);
        Ok((1.0 - upper, upper))
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64, one_minus_x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    // 1 − qab x / qap written so that it stays accurate when x is near 1.
    let mut d = 1.0 - qab * x / qap;
    if x > 0.5 {
        d = (qap - qab + qab * one_minus_x) / qap;
    }
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Convergence {
        what: "incomplete beta continued fraction",
        iterations: CF_MAX_ITER,
    })
}

/// Paulson's normal approximation to `Pr(F ≤ f)` for an F(d1, d2) variate.
///
/// Used only when both degrees of freedom are so large that the continued
/// fraction stops converging; its error shrinks like `1/d`.
pub fn paulson_f_cdf(f: f64, d1: f64, d2: f64) -> (f64, f64) {
    let c1 = 2.0 / (9.0 * d1);
    let c2 = 2.0 / (9.0 * d2);
    let f3 = f.cbrt();
    let z = ((1.0 - c2) * f3 - (1.0 - c1)) / (c2 * f3 * f3 + c1).sqrt();
    (normal_cdf(z), normal_sf(z))
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_correction_is_continuous_at_switch() {
        let below = ln_gamma(10.0) - (10.0 - 0.5) * 10f64.ln() + 10.0 - HALF_LN_2PI;
        assert!((stirling_correction(10.0) - below).abs() < 1e-13);
        for &x in &[12.5, 40.0, 1e3, 1e8] {
            let direct = ln_gamma(x) - (x - 0.5) * x.ln() + x - HALF_LN_2PI;
            assert!(
                (stirling_correction(x) - direct).abs() < 1e-12 * (1.0 + x.ln() * x * 1e-4),
                "x={x}"
            );
        }
    }

    #[test]
    fn digamma_diff_matches_direct_difference() {
        for &(a, b) in &[(25.0, 3.0), (100.0, 0.5), (1e3, 2e3), (50.0, 1e-3)] {
            let direct = digamma(a + b) - digamma(a);
            let rel = (digamma_diff(a, b) - direct).abs() / direct.abs();
            assert!(rel < 1e-10, "a={a} b={b} rel={rel}");
        }
        // Far beyond where the direct difference still has any digits left.
        let a = 1e12;
        let d = digamma_diff(a, 2.0);
        assert!((d - 2.0 / a).abs() / (2.0 / a) < 1e-9);
    }

    #[test]
    fn ln_minus_digamma_is_continuous() {
        for &x in &[10.0f64, 11.0, 50.0] {
            let direct = x.ln() - digamma(x);
            assert!((ln_minus_digamma(x) - direct).abs() < 1e-13, "x={x}");
        }
        assert!((ln_minus_digamma(1e12) - 0.5e-12).abs() < 1e-24);
    }

    #[test]
    fn incomplete_beta_agrees_with_statrs() {
        for &(a, b, y) in &[(2.0, 3.0, 0.3), (0.5, 0.7, 0.9), (10.0, 4.0, 0.75), (1.0, 1.0, 0.2)] {
            let ln_front = a * f64::ln(y) + b * f64::ln(1.0 - y) - statrs::function::beta::ln_beta(a, b);
            let (lo, up) = incomplete_beta(a, b, y, 1.0 - y, ln_front).unwrap();
            let reference = statrs::function::beta::beta_reg(a, b, y);
            assert!((lo - reference).abs() < 1e-13, "a={a} b={b} y={y}");
            assert!((lo + up - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn helpers_are_stable_in_the_tails() {
        assert_eq!(softplus(800.0), 800.0);
        assert!((softplus(-800.0)).abs() < 1e-300);
        assert!((sigmoid(-800.0)) >= 0.0);
        assert!((log_add_exp(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((ln_expm1(1e-10) - (1e-10f64).ln()).abs() < 1e-9);
        assert!((ln_expm1(100.0) - 100.0).abs() < 1e-15);
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-12);
    }
}
