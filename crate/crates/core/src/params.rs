//! The six PowerBurr parameters.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A strictly positive real, carried together with its logarithm.
///
/// The logarithm is authoritative: limit mappings produce values such as
/// `e^{-1000}` that are meaningful on the log scale but underflow as `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positive {
    value: f64,
    ln: f64,
}

impl Positive {
    pub fn new(name: &'static str, value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self { value, ln: value.ln() })
        } else {
            Err(Error::InvalidParameter {
                name,
                value,
                reason: "must be finite and strictly positive",
            })
        }
    }

    pub fn from_ln(name: &'static str, ln: f64) -> Result<Self> {
        if ln.is_finite() {
            Ok(Self { value: ln.exp(), ln })
        } else {
            Err(Error::InvalidParameter {
                name,
                value: ln,
                reason: "log-parameter must be finite",
            })
        }
    }

    pub const ONE: Positive = Positive { value: 1.0, ln: 0.0 };

    #[inline]
    pub fn get(self) -> f64 {
        self.value
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn is_one(self) -> bool {
        self.ln == 0.0
    }
}

impl Serialize for Positive {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Positive {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Positive::new("parameter", v).map_err(serde::de::Error::custom)
    }
}

/// Φ = (α, θ, β, τ, γ, η).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub alpha: Positive,
    pub theta: Positive,
    pub beta: Positive,
    pub tau: Positive,
    pub gamma: Positive,
    pub eta: Positive,
}

pub const PARAM_NAMES: [&str; 6] = ["alpha", "theta", "beta", "tau", "gamma", "eta"];

impl ParamVector {
    pub fn new(alpha: f64, theta: f64, beta: f64, tau: f64, gamma: f64, eta: f64) -> Result<Self> {
        Ok(Self {
            alpha: Positive::new("alpha", alpha)?,
            theta: Positive::new("theta", theta)?,
            beta: Positive::new("beta", beta)?,
            tau: Positive::new("tau", tau)?,
            gamma: Positive::new("gamma", gamma)?,
            eta: Positive::new("eta", eta)?,
        })
    }

    /// Pure Burr: `τ = γ = η = 1`.
    pub fn burr(alpha: f64, theta: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, theta, beta, 1.0, 1.0, 1.0)
    }

    pub fn from_logs(logs: [f64; 6]) -> Result<Self> {
        Ok(Self {
            alpha: Positive::from_ln("alpha", logs[0])?,
            theta: Positive::from_ln("theta", logs[1])?,
            beta: Positive::from_ln("beta", logs[2])?,
            tau: Positive::from_ln("tau", logs[3])?,
            gamma: Positive::from_ln("gamma", logs[4])?,
            eta: Positive::from_ln("eta", logs[5])?,
        })
    }

    pub fn logs(&self) -> [f64; 6] {
        [
            self.alpha.ln(),
            self.theta.ln(),
            self.beta.ln(),
            self.tau.ln(),
            self.gamma.ln(),
            self.eta.ln(),
        ]
    }

    pub fn values(&self) -> [f64; 6] {
        [
            self.alpha.get(),
            self.theta.get(),
            self.beta.get(),
            self.tau.get(),
            self.gamma.get(),
            self.eta.get(),
        ]
    }

    pub fn is_pure_burr(&self) -> bool {
        self.tau.is_one() && self.gamma.is_one() && self.eta.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        assert!(ParamVector::new(1.0, 1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ParamVector::new(1.0, f64::NAN, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ParamVector::new(1.0, 1.0, 1.0, 1.0, -2.0, 1.0).is_err());
    }

    #[test]
    fn log_scale_survives_underflow() {
        let p = ParamVector::from_logs([0.0, 0.0, -1000.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.beta.get(), 0.0);
        assert_eq!(p.beta.ln(), -1000.0);
    }

    #[test]
    fn serde_round_trip() {
        let p = ParamVector::new(4.0, 2.0, 4.0, 10.0, 1.2, 1.3).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: ParamVector = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
