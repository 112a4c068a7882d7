//! Classical families reached as limits of PowerBurr.
//!
//! Each row gives the PowerBurr parameters that approximate the family when
//! the parameters marked "→ ∞" are set to a large finite `limit` (and those
//! marked "→ 0" to `1/limit`). The mappings are built on the log scale: at
//! `limit = 1e6` the log-normal row has `β ≈ e^{-1000σ}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::Distribution;
use crate::error::{positive, Error, Result};
use crate::params::{ParamVector, Positive};
use crate::special::{gamma_q, normal_cdf};

pub const DEFAULT_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalKind {
    /// `Z = b G_c / G_a`
    Burr,
    /// `F̄(z) = (1 + z/b)^-a`
    Pareto,
    /// `Z = b G_c`
    Gamma,
    /// `Z = b / G_a`
    InverseGamma,
    /// `log(1 + Z) = b G_c`
    LogGamma,
    /// `F̄(z) = 1 / (1 − a + a e^{z/b})`
    Logistic,
    /// `F̄(z) = 1 / {1 + (z/b)^a}`
    LogLogistic,
    /// `Z = b G_1^a`
    Weibull,
    /// `F(z) = exp{−(z/b)^-a}`
    Frechet,
    /// `log Z ~ N(a, b²)` (`a = ξ`, `b = σ`)
    LogNormal,
}

impl ClassicalKind {
    pub const ALL: [ClassicalKind; 10] = [
        ClassicalKind::Burr,
        ClassicalKind::Pareto,
        ClassicalKind::Gamma,
        ClassicalKind::InverseGamma,
        ClassicalKind::LogGamma,
        ClassicalKind::Logistic,
        ClassicalKind::LogLogistic,
        ClassicalKind::Weibull,
        ClassicalKind::Frechet,
        ClassicalKind::LogNormal,
    ];
}

impl fmt::Display for ClassicalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassicalKind::Burr => "burr",
            ClassicalKind::Pareto => "pareto",
            ClassicalKind::Gamma => "gamma",
            ClassicalKind::InverseGamma => "inverse-gamma",
            ClassicalKind::LogGamma => "log-gamma",
            ClassicalKind::Logistic => "logistic",
            ClassicalKind::LogLogistic => "log-logistic",
            ClassicalKind::Weibull => "weibull",
            ClassicalKind::Frechet => "frechet",
            ClassicalKind::LogNormal => "log-normal",
        };
        f.write_str(s)
    }
}

impl FromStr for ClassicalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassicalKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnsupportedKind(s.to_string()))
    }
}

/// A classical family with its shape/scale values `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialCase {
    pub kind: ClassicalKind,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SpecialCase {
    pub fn new(kind: ClassicalKind, a: f64, b: f64, c: f64) -> Result<Self> {
        if kind == ClassicalKind::LogNormal {
            if !a.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "xi",
                    value: a,
                    reason: "must be finite",
                });
            }
        } else {
            positive("a", a)?;
        }
        positive("b", b)?;
        positive("c", c)?;
        Ok(Self { kind, a, b, c })
    }

    /// Cumulative distribution function of the classical family itself.
    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        let (a, b, c) = (self.a, self.b, self.c);
        match self.kind {
            ClassicalKind::Burr => {
                let phi = ParamVector::burr(a, c, b).expect("validated");
                Distribution::PowerBurr(super::powerburr::PowerBurr::new(phi)).cdf(z)
            }
            ClassicalKind::Pareto => -(-a * (z / b).ln_1p()).exp_m1(),
            ClassicalKind::Gamma => Distribution::Gamma { mean: b, shape: c }.cdf(z),
            ClassicalKind::InverseGamma => gamma_q(a, a * b / z),
            ClassicalKind::LogGamma => Distribution::LogGamma { xi: b, theta: c }.cdf(z),
            ClassicalKind::Logistic => {
                let e = (z / b).exp_m1();
                a * e / (1.0 + a * e)
            }
            ClassicalKind::LogLogistic => {
                let r = (a * (z / b).ln()).exp();
                r / (1.0 + r)
            }
            ClassicalKind::Weibull => -(-(z / b).powf(1.0 / a)).exp_m1(),
            ClassicalKind::Frechet => (-(z / b).powf(-a)).exp(),
            ClassicalKind::LogNormal => normal_cdf((z.ln() - a) / b),
        }
    }
}

/// PowerBurr parameters approximating `case`, with `limit` standing in for ∞.
pub fn special_case_params(case: &SpecialCase, limit: f64) -> Result<ParamVector> {
    positive("limit_magnitude", limit)?;
    let (a, b, c) = (case.a, case.b, case.c);
    let ln_l = limit.ln();
    let p = |name, v: f64| Positive::new(name, v);
    let lp = |name, v: f64| Positive::from_ln(name, v);
    let one = Positive::ONE;
    let (alpha, theta, beta, tau, gamma) = match case.kind {
        ClassicalKind::Burr => (p("alpha", a)?, p("theta", c)?, p("beta", b)?, one, one),
        // Burr(a, 1) with unit-mean Gammas is Lomax with scale a, hence β = b/a.
        ClassicalKind::Pareto => (p("alpha", a)?, one, p("beta", b / a)?, one, one),
        ClassicalKind::Gamma => (lp("alpha", ln_l)?, p("theta", c)?, p("beta", b)?, one, one),
        ClassicalKind::InverseGamma => (p("alpha", a)?, lp("theta", ln_l)?, p("beta", b)?, one, one),
        ClassicalKind::LogGamma => (
            lp("alpha", ln_l)?,
            p("theta", c)?,
            one,
            lp("tau", ln_l - b.ln())?,
            lp("gamma", ln_l)?,
        ),
        // Z ≈ βγ log(1 + X/τ) with X log-logistic(1, 1).
        ClassicalKind::Logistic => (
            one,
            one,
            lp("beta", b.ln() + ln_l)?,
            p("tau", a)?,
            lp("gamma", -ln_l)?,
        ),
        // The remaining rows use Z ≈ β (X/τ)^γ as τ → 0, so β = b τ^γ.
        ClassicalKind::LogLogistic => {
            let g = 1.0 / a;
            (one, one, lp("beta", b.ln() - g * ln_l)?, lp("tau", -ln_l)?, p("gamma", g)?)
        }
        ClassicalKind::Weibull => (
            lp("alpha", ln_l)?,
            one,
            lp("beta", b.ln() - a * ln_l)?,
            lp("tau", -ln_l)?,
            p("gamma", a)?,
        ),
        ClassicalKind::Frechet => {
            let g = 1.0 / a;
            (
                one,
                lp("theta", ln_l)?,
                lp("beta", b.ln() - g * ln_l)?,
                lp("tau", -ln_l)?,
                p("gamma", g)?,
            )
        }
        ClassicalKind::LogNormal => {
            let (xi, sigma) = (a, b);
            // α must outrun θ, hence α = limit².
            let sqrt_theta = limit.sqrt();
            (
                lp("alpha", 2.0 * ln_l)?,
                lp("theta", ln_l)?,
                lp("beta", -sqrt_theta * sigma + xi + 0.5)?,
                p("tau", sqrt_theta * sigma)?,
                p("gamma", limit * sigma * sigma)?,
            )
        }
    };
    Ok(ParamVector {
        alpha,
        theta,
        beta,
        tau,
        gamma,
        eta: one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burr_row_is_exact() {
        let case = SpecialCase::new(ClassicalKind::Burr, 3.0, 2.0, 1.5).unwrap();
        let phi = special_case_params(&case, DEFAULT_LIMIT).unwrap();
        assert_eq!(phi.values(), [3.0, 1.5, 2.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn pareto_row_has_lomax_scale() {
        let case = SpecialCase::new(ClassicalKind::Pareto, 3.0, 2.0, 1.0).unwrap();
        let phi = special_case_params(&case, DEFAULT_LIMIT).unwrap();
        assert_eq!(phi.alpha.get(), 3.0);
        assert_eq!(phi.theta.get(), 1.0);
        assert!((phi.beta.get() - 2.0 / 3.0).abs() < 1e-15);
        // Exact, not a limit: the CDFs coincide.
        let d = Distribution::PowerBurr(super::super::powerburr::PowerBurr::new(phi));
        for &z in &[0.1, 1.0, 7.5] {
            assert!((d.cdf(z) - case.cdf(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn lognormal_beta_lives_on_log_scale() {
        let case = SpecialCase::new(ClassicalKind::LogNormal, -0.5, 1.0, 1.0).unwrap();
        let phi = special_case_params(&case, DEFAULT_LIMIT).unwrap();
        assert_eq!(phi.beta.get(), 0.0);
        assert!((phi.beta.ln() - (-1000.0 - 0.5 + 0.5)).abs() < 1e-9);
        assert!((phi.alpha.get() / 1e12 - 1.0).abs() < 1e-12);
    }
}
