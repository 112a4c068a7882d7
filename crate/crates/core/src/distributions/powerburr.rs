//! The power-transformed Burr family.
//!
//! `Z = β{(1 + X^η/τ)^γ − 1}` with `X` Burr(α, θ). The inverse used here is the
//! exact algebraic one, `x = [τ{(z/β + 1)^{1/γ} − 1}]^{1/η}`. All work is done
//! on log scales so that the limit parameterisations (β near `e^-1000`, α near
//! `e^30`) stay representable.

use serde::{Deserialize, Serialize};

use super::burr::BurrKernel;
use crate::error::{positive, Error, Result};
use crate::params::ParamVector;
use crate::special::{ln_expm1, sigmoid, softplus};

/// A loss amount together with its Burr coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub z: f64,
    pub x: f64,
    pub log_density: f64,
}

/// Intermediate quantities of the inverse transform at one observation.
#[derive(Debug, Clone, Copy)]
pub struct InverseParts {
    pub ln_x: f64,
    /// `ln u`, `u = w − 1`
    pub ln_u: f64,
    /// `ln w = ln(1 + z/β) / γ`
    pub lw: f64,
    /// `(z/β) / (1 + z/β)`
    pub sigma: f64,
    /// `w / u`
    pub w_over_u: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerBurr {
    pub phi: ParamVector,
    pub kernel: BurrKernel,
    ln_jacobian_const: f64,
}

impl PowerBurr {
    pub fn new(phi: ParamVector) -> Self {
        let kernel = BurrKernel::with_logs(
            phi.alpha.get(),
            phi.alpha.ln(),
            phi.theta.get(),
            phi.theta.ln(),
        );
        Self {
            phi,
            kernel,
            ln_jacobian_const: -phi.beta.ln() - phi.gamma.ln() - phi.eta.ln(),
        }
    }

    /// `ln z` as a function of `ln x`.
    pub fn forward_ln(&self, ln_x: f64) -> f64 {
        let p = &self.phi;
        let inner = softplus(p.eta.get() * ln_x - p.tau.ln());
        p.beta.ln() + ln_expm1(p.gamma.get() * inner)
    }

    pub fn inverse_parts(&self, ln_z: f64) -> Result<InverseParts> {
        let p = &self.phi;
        let r = ln_z - p.beta.ln();
        let lw = softplus(r) / p.gamma.get();
        if lw <= 0.0 {
            return Err(Error::Underflow("inverse transform"));
        }
        let ln_u = ln_expm1(lw);
        let ln_x = (p.tau.ln() + ln_u) / p.eta.get();
        Ok(InverseParts {
            ln_x,
            ln_u,
            lw,
            sigma: sigmoid(r),
            w_over_u: -1.0 / (-lw).exp_m1(),
        })
    }

    pub fn inverse_ln(&self, ln_z: f64) -> Result<f64> {
        Ok(self.inverse_parts(ln_z)?.ln_x)
    }

    /// Log density at `ln z`, reusing precomputed inverse parts.
    pub fn ln_pdf_parts(&self, parts: &InverseParts) -> f64 {
        self.kernel.ln_xg(parts.ln_x) - parts.ln_u + self.ln_jacobian_const
            - (self.phi.gamma.get() - 1.0) * parts.lw
    }

    pub fn ln_pdf_ln(&self, ln_z: f64) -> Result<f64> {
        Ok(self.ln_pdf_parts(&self.inverse_parts(ln_z)?))
    }

    pub fn density_point(&self, z: f64) -> Result<DensityPoint> {
        positive("z", z)?;
        let parts = self.inverse_parts(z.ln())?;
        Ok(DensityPoint {
            z,
            x: parts.ln_x.exp(),
            log_density: self.ln_pdf_parts(&parts),
        })
    }

    /// `(F(z), 1 − F(z))`.
    pub fn cdf_sf_ln(&self, ln_z: f64) -> (f64, f64) {
        match self.inverse_parts(ln_z) {
            Ok(parts) => self.kernel.cdf_sf(parts.ln_x),
            Err(_) => (0.0, 1.0),
        }
    }
}

pub fn forward_transform(x: f64, phi: &ParamVector) -> Result<f64> {
    positive("x", x)?;
    let z = PowerBurr::new(*phi).forward_ln(x.ln()).exp();
    if z.is_infinite() {
        return Err(Error::Overflow("forward transform"));
    }
    Ok(z)
}

pub fn inverse_transform(z: f64, phi: &ParamVector) -> Result<f64> {
    positive("z", z)?;
    let ln_x = PowerBurr::new(*phi).inverse_ln(z.ln())?;
    let x = ln_x.exp();
    if x == 0.0 {
        return Err(Error::Underflow("inverse transform"));
    }
    if x.is_infinite() {
        return Err(Error::Overflow("inverse transform"));
    }
    Ok(x)
}

pub fn powerburr_log_pdf(z: f64, phi: &ParamVector) -> Result<f64> {
    positive("z", z)?;
    PowerBurr::new(*phi).ln_pdf_ln(z.ln())
}
