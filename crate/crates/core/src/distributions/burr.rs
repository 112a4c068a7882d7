//! The Burr (beta-prime) law of `X = G_θ / G_α` with unit-mean Gammas.
//!
//! Everything is evaluated through `ln(x g(x))`, which is the beta density of
//! `y = θx/(α+θx)`. Forming it from Stirling remainders rather than raw
//! log-gammas keeps it accurate for shapes as large as `e^30`, where the
//! individual `ln Γ` terms are around `10^14` and would cancel catastrophically.

use crate::error::{positive, Result};
use crate::special::{
    digamma_diff, incomplete_beta, log_add_exp, paulson_f_cdf, sigmoid, softplus,
    stirling_correction, HALF_LN_2PI,
};

/// Precomputed constants for one `(α, θ)` pair.
#[derive(Debug, Clone, Copy)]
pub struct BurrKernel {
    pub alpha: f64,
    pub theta: f64,
    ln_alpha: f64,
    ln_theta: f64,
    ln_sum: f64,
    constant: f64,
    /// `ψ(α+θ) − ψ(α)` and `ψ(α+θ) − ψ(θ)`
    psi_alpha: f64,
    psi_theta: f64,
}

impl BurrKernel {
    pub fn new(alpha: f64, theta: f64) -> Self {
        Self::with_logs(alpha, alpha.ln(), theta, theta.ln())
    }

    pub fn with_logs(alpha: f64, ln_alpha: f64, theta: f64, ln_theta: f64) -> Self {
        let sum = alpha + theta;
        // ½ ln α + ½ ln θ − ½ ln(α+θ), without cancelling two large logs.
        let (lo, hi, ln_lo) = if alpha <= theta {
            (alpha, theta, ln_alpha)
        } else {
            (theta, alpha, ln_theta)
        };
        let constant = 0.5 * ln_lo - 0.5 * (lo / hi).ln_1p() + stirling_correction(sum)
            - stirling_correction(alpha)
            - stirling_correction(theta)
            - HALF_LN_2PI;
        Self {
            alpha,
            theta,
            ln_alpha,
            ln_theta,
            ln_sum: sum.ln(),
            constant,
            psi_alpha: digamma_diff(alpha, theta),
            psi_theta: digamma_diff(theta, alpha),
        }
    }

    /// `ln(x g(x))` given `ln x`.
    pub fn ln_xg(&self, ln_x: f64) -> f64 {
        let (a, t) = (self.alpha, self.theta);
        let s = a + t;
        let kernel = if ln_x.abs() < 700.0 {
            if a >= t {
                let x = ln_x.exp();
                t * ln_x - s * (t * (x - 1.0) / s).ln_1p()
            } else {
                let inv = (-ln_x).exp();
                -a * ln_x - s * (a * (inv - 1.0) / s).ln_1p()
            }
        } else {
            t * ln_x - s * (log_add_exp(self.ln_alpha, self.ln_theta + ln_x) - self.ln_sum)
        };
        self.constant + kernel
    }

    pub fn ln_pdf(&self, ln_x: f64) -> f64 {
        self.ln_xg(ln_x) - ln_x
    }

    /// `(F(x), 1 − F(x))` given `ln x`.
    pub fn cdf_sf(&self, ln_x: f64) -> (f64, f64) {
        if ln_x == f64::NEG_INFINITY {
            return (0.0, 1.0);
        }
        if ln_x == f64::INFINITY {
            return (1.0, 0.0);
        }
        // y = θx/(α+θx) and 1−y, both from their logs so neither tail rounds to 1.
        let r = self.ln_alpha - self.ln_theta - ln_x;
        let y = (-softplus(r)).exp();
        let one_minus_y = (-softplus(-r)).exp();
        match incomplete_beta(self.theta, self.alpha, y, one_minus_y, self.ln_xg(ln_x)) {
            Ok(pair) => pair,
            // Both shapes enormous: X is F(2θ, 2α) and nearly normal on the cube-root scale.
            Err(_) => paulson_f_cdf(ln_x.exp(), 2.0 * self.theta, 2.0 * self.alpha),
        }
    }

    /// `(∂/∂α, ∂/∂θ)` of `ln g(x)` at fixed `x`.
    pub fn shape_partials(&self, ln_x: f64) -> (f64, f64) {
        let (a, t) = (self.alpha, self.theta);
        // ln(θx/α), and s = θx/(α+θx) from it.
        let ln_q = self.ln_theta + ln_x - self.ln_alpha;
        let s = sigmoid(ln_q);
        let d_alpha = self.psi_alpha - softplus(ln_q) + s - (t / a) * (1.0 - s);
        let d_theta = self.psi_theta - softplus(-ln_q) + (1.0 - s) - (a / t) * s;
        (d_alpha, d_theta)
    }

    /// `s = θx/(α+θx)`.
    pub fn share(&self, ln_x: f64) -> f64 {
        sigmoid(self.ln_theta + ln_x - self.ln_alpha)
    }
}

pub fn burr_log_pdf(x: f64, alpha: f64, theta: f64) -> Result<f64> {
    positive("x", x)?;
    positive("alpha", alpha)?;
    positive("theta", theta)?;
    Ok(BurrKernel::new(alpha, theta).ln_pdf(x.ln()))
}

pub fn burr_cdf(x: f64, alpha: f64, theta: f64) -> Result<f64> {
    positive("x", x)?;
    positive("alpha", alpha)?;
    positive("theta", theta)?;
    Ok(BurrKernel::new(alpha, theta).cdf_sf(x.ln()).0)
}
