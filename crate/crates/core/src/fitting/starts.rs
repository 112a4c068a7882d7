//! Start values that do not depend on other fits.

/// Fallback when the moment equations have no admissible solution.
pub const MOMENT_FALLBACK_ALPHA: f64 = 3.0;
pub const MOMENT_FALLBACK_THETA: f64 = 1.0;
/// Relative standard error of the third sample moment above which it is
/// considered too unstable to use.
pub const THIRD_MOMENT_MAX_RSE: f64 = 0.2;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn variance(v: &[f64], m: f64) -> f64 {
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
}

/// Moment estimates of the extended Pareto `(α, θ, β)`.
///
/// With `R2 = m2/m1²`, `R3 = m3/m1³` and `t = 1/(α − 1)`, the Burr moment
/// ratios reduce to `R2 = (1+1/θ)/(1−t)` and `R3 = R2 (1+2/θ)/(1−2t)`, which
/// solve in closed form. Falls back to `(3, 1, mean)` when the third sample
/// moment is unstable or the solution leaves `α > 3, θ > 0`.
pub fn moment_start_extended_pareto(values: &[f64]) -> (f64, f64, f64) {
    let m1 = mean(values);
    let fallback = (MOMENT_FALLBACK_ALPHA, MOMENT_FALLBACK_THETA, m1);
    if values.len() < 3 || !(m1 > 0.0) {
        return fallback;
    }
    let n = values.len() as f64;
    let m2 = values.iter().map(|z| z * z).sum::<f64>() / n;
    let cubes: Vec<f64> = values.iter().map(|z| z * z * z).collect();
    let m3 = mean(&cubes);
    let rse = (cubes.iter().map(|c| (c - m3).powi(2)).sum::<f64>()).sqrt() / (n * m3);
    if !(rse.is_finite() && rse <= THIRD_MOMENT_MAX_RSE) {
        return fallback;
    }
    let r2 = m2 / (m1 * m1);
    let r3 = m3 / (m1 * m1 * m1);
    let denom = 2.0 * r2 * r2 - 2.0 * r3;
    let t = (2.0 * r2 * r2 - r2 - r3) / denom;
    if !(t > 0.0 && t < 0.5) {
        return fallback;
    }
    let s = r2 * (1.0 - t) - 1.0;
    if !(s > 0.0) {
        return fallback;
    }
    let alpha = 1.0 + 1.0 / t;
    let theta = 1.0 / s;
    let beta = m1 * (alpha - 1.0) / alpha;
    if [alpha, theta, beta].iter().all(|v| v.is_finite() && *v > 0.0) {
        (alpha, theta, beta)
    } else {
        fallback
    }
}

/// Closed-form log-normal estimate `(mean ln z, rms deviation of ln z)`.
pub fn lognormal_mle(values: &[f64]) -> (f64, f64) {
    let logs: Vec<f64> = values.iter().map(|z| z.ln()).collect();
    let xi = mean(&logs);
    (xi, variance(&logs, xi).sqrt())
}

/// Method of moments for the mean/shape Gamma.
pub fn gamma_start(values: &[f64]) -> Vec<f64> {
    let m = mean(values);
    let v = variance(values, m);
    let shape = if v > 0.0 { (m * m / v).clamp(1e-6, 1e10) } else { 1e10 };
    vec![m, shape]
}

/// Log-moment matching for Weibull: `sd(ln Z) = π / (k √6)`.
pub fn weibull_start(values: &[f64]) -> Vec<f64> {
    let (ml, sl) = lognormal_mle(values);
    let shape = if sl > 0.0 {
        (std::f64::consts::PI / (sl * 6f64.sqrt())).clamp(1e-6, 1e10)
    } else {
        1e10
    };
    vec![shape, (ml + EULER_GAMMA / shape).exp()]
}

/// Moments of `ln(1 + Z) = ξ G_θ`.
pub fn loggamma_start(values: &[f64]) -> Vec<f64> {
    let y: Vec<f64> = values.iter().map(|z| z.ln_1p()).collect();
    let m = mean(&y);
    let v = variance(&y, m);
    let theta = if v > 0.0 { (m * m / v).clamp(1e-6, 1e10) } else { 1e10 };
    vec![m, theta]
}

/// Pareto start from the sample median and 90% point.
///
/// Solves `ln(1 + q90/β) / ln(1 + q50/β) = ln 10 / ln 2` for β, then sets α
/// from the median. Samples lighter-tailed than that ratio allows get a large
/// scale with α matched to the mean.
pub fn pareto_start(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| v[((p * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)];
    let (q50, q90) = (q(0.5), q(0.9));
    let m = mean(values);
    let target = 10f64.ln() / 2f64.ln();
    let ratio = |ln_b: f64| {
        let b = ln_b.exp();
        (q90 / b).ln_1p() / (q50 / b).ln_1p()
    };
    if !(q50 > 0.0 && q90 > q50 && q90 / q50 > target) {
        let beta = 1e3 * m;
        return vec![beta / m + 1.0, beta];
    }
    // ratio is increasing in β, from 1 (β → 0) to q90/q50 (β → ∞).
    let (mut lo, mut hi) = (q50.ln() - 40.0, q50.ln() + 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = (0.5 * (lo + hi)).exp();
    let alpha = 2f64.ln() / (q50 / beta).ln_1p();
    vec![alpha.clamp(1e-6, 1e10), beta]
}
