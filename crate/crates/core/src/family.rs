//! The ten severity families and their parameter layouts.
//!
//! | kind           | params                  |
//! |----------------|-------------------------|
//! | LogNormal      | (ξ, σ)                  |
//! | LogGamma       | (ξ, θ): log(1+Z) = ξ G_θ |
//! | Weibull        | (shape, scale)          |
//! | Pareto         | (α, β): F̄ = (1+z/β)^-α   |
//! | Gamma          | (mean ξ, shape α)       |
//! | ExtendedPareto | (α, θ, β)               |
//! | FourParam      | (α, θ, β, η)            |
//! | FiveParam      | (α, θ, β, τ, γ)         |
//! | FiveParam2     | (α, θ, β, η, γ)         |
//! | SixParam       | (α, θ, β, η, τ, γ)      |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParamVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    LogNormal,
    LogGamma,
    Weibull,
    Pareto,
    Gamma,
    ExtendedPareto,
    FourParam,
    FiveParam,
    FiveParam2,
    SixParam,
}

impl FamilyKind {
    /// Table ordering: classical families first, then the Burr hierarchy.
    pub const ALL: [FamilyKind; 10] = [
        FamilyKind::LogNormal,
        FamilyKind::LogGamma,
        FamilyKind::Weibull,
        FamilyKind::Pareto,
        FamilyKind::Gamma,
        FamilyKind::ExtendedPareto,
        FamilyKind::FourParam,
        FamilyKind::FiveParam,
        FamilyKind::FiveParam2,
        FamilyKind::SixParam,
    ];

    /// The six families reported as truths by default.
    pub const CLASSICAL: [FamilyKind; 6] = [
        FamilyKind::LogNormal,
        FamilyKind::LogGamma,
        FamilyKind::Weibull,
        FamilyKind::Pareto,
        FamilyKind::Gamma,
        FamilyKind::ExtendedPareto,
    ];

    pub fn arity(self) -> usize {
        match self {
            FamilyKind::LogNormal
            | FamilyKind::LogGamma
            | FamilyKind::Weibull
            | FamilyKind::Pareto
            | FamilyKind::Gamma => 2,
            FamilyKind::ExtendedPareto => 3,
            FamilyKind::FourParam => 4,
            FamilyKind::FiveParam | FamilyKind::FiveParam2 => 5,
            FamilyKind::SixParam => 6,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyKind::LogNormal => &["xi", "sigma"],
            FamilyKind::LogGamma => &["xi", "theta"],
            FamilyKind::Weibull => &["shape", "scale"],
            FamilyKind::Pareto => &["alpha", "beta"],
            FamilyKind::Gamma => &["mean", "shape"],
            FamilyKind::ExtendedPareto => &["alpha", "theta", "beta"],
            FamilyKind::FourParam => &["alpha", "theta", "beta", "eta"],
            FamilyKind::FiveParam => &["alpha", "theta", "beta", "tau", "gamma"],
            FamilyKind::FiveParam2 => &["alpha", "theta", "beta", "eta", "gamma"],
            FamilyKind::SixParam => &["alpha", "theta", "beta", "eta", "tau", "gamma"],
        }
    }

    /// Short label used in the bias/RMSE tables.
    pub fn label(self) -> &'static str {
        match self {
            FamilyKind::LogNormal => "L-N",
            FamilyKind::LogGamma => "L-G",
            FamilyKind::Weibull => "We",
            FamilyKind::Pareto => "Pa",
            FamilyKind::Gamma => "Ga",
            FamilyKind::ExtendedPareto => "E. Pa.",
            FamilyKind::FourParam => "4-par.",
            FamilyKind::FiveParam => "5-par.",
            FamilyKind::FiveParam2 => "5-par. 2",
            FamilyKind::SixParam => "6-par.",
        }
    }

    /// Identifier accepted on the command line and in config files.
    pub fn slug(self) -> &'static str {
        match self {
            FamilyKind::LogNormal => "lognormal",
            FamilyKind::LogGamma => "loggamma",
            FamilyKind::Weibull => "weibull",
            FamilyKind::Pareto => "pareto",
            FamilyKind::Gamma => "gamma",
            FamilyKind::ExtendedPareto => "extpareto",
            FamilyKind::FourParam => "4par",
            FamilyKind::FiveParam => "5par",
            FamilyKind::FiveParam2 => "5par2",
            FamilyKind::SixParam => "6par",
        }
    }

    pub fn is_burr_based(self) -> bool {
        matches!(
            self,
            FamilyKind::ExtendedPareto
                | FamilyKind::FourParam
                | FamilyKind::FiveParam
                | FamilyKind::FiveParam2
                | FamilyKind::SixParam
        )
    }

    /// The parameter set used for this family in the simulation study.
    pub fn study_params(self) -> &'static [f64] {
        match self {
            FamilyKind::LogNormal => &[-0.5, 1.0],
            FamilyKind::LogGamma => &[0.75, 5.0],
            FamilyKind::Weibull => &[2.0, 1.13],
            FamilyKind::Pareto => &[3.0, 2.0],
            FamilyKind::Gamma => &[1.0, 2.0],
            FamilyKind::ExtendedPareto => &[3.0, 2.0, 1.0],
            FamilyKind::FourParam => &[4.0, 2.0, 0.6, 1.3],
            FamilyKind::FiveParam => &[4.0, 2.0, 2.7, 5.0, 1.3],
            FamilyKind::FiveParam2 => &[4.0, 2.0, 0.5, 1.2, 1.1],
            FamilyKind::SixParam => &[4.0, 2.0, 4.0, 1.3, 10.0, 1.2],
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_', ' ', '.'], "");
        let kind = match key.as_str() {
            "lognormal" | "ln" => FamilyKind::LogNormal,
            "loggamma" | "lg" => FamilyKind::LogGamma,
            "weibull" | "we" => FamilyKind::Weibull,
            "pareto" | "pa" => FamilyKind::Pareto,
            "gamma" | "ga" => FamilyKind::Gamma,
            "extpareto" | "extendedpareto" | "epa" | "burr" => FamilyKind::ExtendedPareto,
            "4par" | "fourparam" => FamilyKind::FourParam,
            "5par" | "fiveparam" => FamilyKind::FiveParam,
            "5par2" | "fiveparam2" => FamilyKind::FiveParam2,
            "6par" | "sixparam" => FamilyKind::SixParam,
            _ => return Err(Error::UnsupportedKind(s.to_string())),
        };
        Ok(kind)
    }
}

/// A family together with its parameters in the family's own layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub params: Vec<f64>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, params: Vec<f64>) -> Result<Self> {
        if params.len() != kind.arity() {
            return Err(Error::Arity {
                kind,
                expected: kind.arity(),
                got: params.len(),
            });
        }
        for (i, (&v, &name)) in params.iter().zip(kind.param_names()).enumerate() {
            // The log-normal location is the only parameter allowed to be non-positive.
            let real_valued = kind == FamilyKind::LogNormal && i == 0;
            let ok = v.is_finite() && (real_valued || v > 0.0);
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: if real_valued {
                        "must be finite"
                    } else {
                        "must be finite and strictly positive"
                    },
                });
            }
        }
        Ok(Self { kind, params })
    }

    pub fn study_default(kind: FamilyKind) -> Self {
        Self::new(kind, kind.study_params().to_vec()).expect("study parameters are valid")
    }

    /// The PowerBurr parameters of a Burr-based family, or of Pareto (which is
    /// exactly Burr with θ = 1).
    pub fn to_param_vector(&self) -> Result<ParamVector> {
        let p = &self.params;
        match self.kind {
            FamilyKind::Pareto => ParamVector::burr(p[0], 1.0, p[1] / p[0]),
            FamilyKind::ExtendedPareto => ParamVector::burr(p[0], p[1], p[2]),
            FamilyKind::FourParam => ParamVector::new(p[0], p[1], p[2], 1.0, 1.0, p[3]),
            FamilyKind::FiveParam => ParamVector::new(p[0], p[1], p[2], p[3], p[4], 1.0),
            FamilyKind::FiveParam2 => ParamVector::new(p[0], p[1], p[2], 1.0, p[4], p[3]),
            FamilyKind::SixParam => ParamVector::new(p[0], p[1], p[2], p[4], p[5], p[3]),
            other => Err(Error::UnsupportedKind(format!(
                "{other} has no exact PowerBurr representation"
            ))),
        }
    }

    /// Project a full parameter vector onto a Burr-based family's layout.
    /// Components the family fixes are dropped.
    pub fn from_param_vector(kind: FamilyKind, phi: &ParamVector) -> Result<Self> {
        let [a, t, b, tau, g, e] = phi.values();
        let params = match kind {
            FamilyKind::ExtendedPareto => vec![a, t, b],
            FamilyKind::FourParam => vec![a, t, b, e],
            FamilyKind::FiveParam => vec![a, t, b, tau, g],
            FamilyKind::FiveParam2 => vec![a, t, b, e, g],
            FamilyKind::SixParam => vec![a, t, b, e, tau, g],
            other => {
                return Err(Error::UnsupportedKind(format!(
                    "{other} is not a PowerBurr family"
                )))
            }
        };
        Self::new(kind, params)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind)?;
        for (i, v) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}
