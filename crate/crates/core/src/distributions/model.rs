//! A `FamilySpec` compiled into something that can be evaluated repeatedly.

use super::burr::BurrKernel;
use super::powerburr::PowerBurr;
use super::quantile::solve_ln;
use crate::error::{positive, probability, Error, Result};
use crate::family::{FamilyKind, FamilySpec};
use crate::special::{gamma_p, gamma_q, ln_gamma, normal_cdf, normal_quantile, normal_sf, HALF_LN_2PI};

#[derive(Debug, Clone, Copy)]
pub enum Distribution {
    LogNormal { xi: f64, sigma: f64 },
    /// `log(1 + Z) = ξ G_θ` with `G_θ` a unit-mean Gamma.
    LogGamma { xi: f64, theta: f64 },
    Weibull { shape: f64, scale: f64 },
    /// Lomax form, `F̄(z) = (1 + z/β)^-α`.
    Pareto { alpha: f64, beta: f64 },
    Gamma { mean: f64, shape: f64 },
    PowerBurr(PowerBurr),
}

impl Distribution {
    pub fn new(spec: &FamilySpec) -> Result<Self> {
        let p = &spec.params;
        if p.len() != spec.kind.arity() {
            return Err(Error::Arity {
                kind: spec.kind,
                expected: spec.kind.arity(),
                got: p.len(),
            });
        }
        Ok(match spec.kind {
            FamilyKind::LogNormal => Distribution::LogNormal { xi: p[0], sigma: positive("sigma", p[1])? },
            FamilyKind::LogGamma => Distribution::LogGamma {
                xi: positive("xi", p[0])?,
                theta: positive("theta", p[1])?,
            },
            FamilyKind::Weibull => Distribution::Weibull {
                shape: positive("shape", p[0])?,
                scale: positive("scale", p[1])?,
            },
            FamilyKind::Pareto => Distribution::Pareto {
                alpha: positive("alpha", p[0])?,
                beta: positive("beta", p[1])?,
            },
            FamilyKind::Gamma => Distribution::Gamma {
                mean: positive("mean", p[0])?,
                shape: positive("shape", p[1])?,
            },
            _ => Distribution::PowerBurr(PowerBurr::new(spec.to_param_vector()?)),
        })
    }

    /// Log density at `ln z`.
    pub fn ln_pdf_ln(&self, ln_z: f64) -> Result<f64> {
        Ok(match *self {
            Distribution::LogNormal { xi, sigma } => {
                let u = (ln_z - xi) / sigma;
                -ln_z - sigma.ln() - HALF_LN_2PI - 0.5 * u * u
            }
            Distribution::LogGamma { xi, theta } => {
                let y = ln_z.exp().ln_1p();
                theta * theta.ln() - theta * xi.ln() - ln_gamma(theta) + (theta - 1.0) * y.ln()
                    - theta * y / xi
                    - y
            }
            Distribution::Weibull { shape, scale } => {
                let lr = ln_z - scale.ln();
                shape.ln() - scale.ln() + (shape - 1.0) * lr - (shape * lr).exp()
            }
            Distribution::Pareto { alpha, beta } => {
                alpha.ln() - beta.ln() - (alpha + 1.0) * (ln_z - beta.ln()).exp().ln_1p()
            }
            Distribution::Gamma { mean, shape } => {
                shape * shape.ln() - shape * mean.ln() - ln_gamma(shape) + (shape - 1.0) * ln_z
                    - shape * ln_z.exp() / mean
            }
            Distribution::PowerBurr(ref pb) => pb.ln_pdf_ln(ln_z)?,
        })
    }

    pub fn ln_pdf(&self, z: f64) -> Result<f64> {
        positive("z", z)?;
        self.ln_pdf_ln(z.ln())
    }

    /// `(F(z), 1 − F(z))` at `ln z`.
    pub fn cdf_sf_ln(&self, ln_z: f64) -> (f64, f64) {
        match *self {
            Distribution::LogNormal { xi, sigma } => {
                let u = (ln_z - xi) / sigma;
                (normal_cdf(u), normal_sf(u))
            }
            Distribution::LogGamma { xi, theta } => {
                let x = theta * ln_z.exp().ln_1p() / xi;
                (gamma_p(theta, x), gamma_q(theta, x))
            }
            Distribution::Weibull { shape, scale } => {
                let h = (shape * (ln_z - scale.ln())).exp();
                (-(-h).exp_m1(), (-h).exp())
            }
            Distribution::Pareto { alpha, beta } => {
                let l = -alpha * (ln_z - beta.ln()).exp().ln_1p();
                (-l.exp_m1(), l.exp())
            }
            Distribution::Gamma { mean, shape } => {
                let x = shape * ln_z.exp() / mean;
                (gamma_p(shape, x), gamma_q(shape, x))
            }
            Distribution::PowerBurr(ref pb) => pb.cdf_sf_ln(ln_z),
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        self.cdf_sf_ln(z.ln()).0
    }

    pub fn sf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        self.cdf_sf_ln(z.ln()).1
    }

    /// The `p`-quantile.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        probability(p)?;
        Ok(match *self {
            Distribution::LogNormal { xi, sigma } => (xi + sigma * normal_quantile(p)).exp(),
            Distribution::LogGamma { xi, theta } => (xi * gamma_unit_mean_quantile(theta, p)?).exp_m1(),
            Distribution::Weibull { shape, scale } => scale * (-(-p).ln_1p()).powf(1.0 / shape),
            Distribution::Pareto { alpha, beta } => beta * (-(-p).ln_1p() / alpha).exp_m1(),
            Distribution::Gamma { mean, shape } => mean * gamma_unit_mean_quantile(shape, p)?,
            Distribution::PowerBurr(ref pb) => {
                let ln_x = burr_quantile_ln(&pb.kernel, p)?;
                pb.forward_ln(ln_x).exp()
            }
        })
    }

    pub fn kind_is_burr(&self) -> bool {
        matches!(self, Distribution::PowerBurr(_))
    }
}

/// `ln` of the Burr(α, θ) `p`-quantile.
pub fn burr_quantile_ln(kernel: &BurrKernel, p: f64) -> Result<f64> {
    solve_ln(
        p,
        |t| {
            let (f, s) = kernel.cdf_sf(t);
            (f, s, kernel.ln_xg(t).exp())
        },
        0.0,
    )
}

pub fn burr_quantile(p: f64, alpha: f64, theta: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("theta", theta)?;
    Ok(burr_quantile_ln(&BurrKernel::new(alpha, theta), p)?.exp())
}

/// Quantile of a Gamma variable with unit mean and the given shape.
pub fn gamma_unit_mean_quantile(shape: f64, p: f64) -> Result<f64> {
    let ln_norm = shape * shape.ln() - ln_gamma(shape);
    let t = solve_ln(
        p,
        |t| {
            let x = t.exp();
            let d = (ln_norm + shape * t - shape * x).exp();
            (gamma_p(shape, shape * x), gamma_q(shape, shape * x), d)
        },
        0.0,
    )?;
    Ok(t.exp())
}

/// `quantile(p, spec)`.
pub fn quantile(p: f64, spec: &FamilySpec) -> Result<f64> {
    Distribution::new(spec)?.quantile(p)
}
