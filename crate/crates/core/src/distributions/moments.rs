//! Raw moments `E(Z^r)`.
//!
//! Closed forms for the classical families; for the Burr-based families the
//! integral is taken over `t = ln x` against `x g(x)`, mapped onto the whole
//! real line and centred at the Burr median.

use serde::{Deserialize, Serialize};

use super::model::{burr_quantile_ln, Distribution};
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::quadrature::{integrate_real_line, Tolerance};
use crate::special::{ln_binomial, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Moment::Infinite)
    }
}

const MOMENT_TOL: Tolerance = Tolerance {
    rel: 1e-10,
    abs: 0.0,
    max_intervals: 8000,
};

impl Distribution {
    pub fn raw_moment(&self, r: u32) -> Result<Moment> {
        if r == 0 {
            return Err(Error::InvalidParameter {
                name: "r",
                value: 0.0,
                reason: "moment order must be at least 1",
            });
        }
        let rf = r as f64;
        Ok(match *self {
            Distribution::LogNormal { xi, sigma } => {
                Moment::Finite((rf * xi + 0.5 * rf * rf * sigma * sigma).exp())
            }
            Distribution::Gamma { mean, shape } => Moment::Finite(
                (rf * mean.ln() + ln_gamma(shape + rf) - ln_gamma(shape) - rf * shape.ln()).exp(),
            ),
            Distribution::Weibull { shape, scale } => {
                Moment::Finite((rf * scale.ln() + ln_gamma(1.0 + rf / shape)).exp())
            }
            Distribution::Pareto { alpha, beta } => {
                if rf >= alpha {
                    Moment::Infinite
                } else {
                    Moment::Finite(
                        (rf * beta.ln() + ln_gamma(rf + 1.0) + ln_gamma(alpha - rf) - ln_gamma(alpha))
                            .exp(),
                    )
                }
            }
            Distribution::LogGamma { xi, theta } => {
                // E(e^{ξG} − 1)^r by the binomial expansion of the Gamma mgf.
                if rf * xi >= theta {
                    Moment::Infinite
                } else {
                    let mut total = 0.0;
                    for k in 0..=r {
                        let mgf = (-theta * (-(k as f64) * xi / theta).ln_1p()).exp();
                        let sign = if (r - k) % 2 == 0 { 1.0 } else { -1.0 };
                        total += sign * ln_binomial(r as u64, k as u64).exp() * mgf;
                    }
                    Moment::Finite(total)
                }
            }
            Distribution::PowerBurr(ref pb) => {
                let phi = &pb.phi;
                if rf * phi.eta.get() * phi.gamma.get() >= phi.alpha.get() {
                    return Ok(Moment::Infinite);
                }
                let center = burr_quantile_ln(&pb.kernel, 0.5)?;
                let q1 = burr_quantile_ln(&pb.kernel, 0.25)?;
                let q3 = burr_quantile_ln(&pb.kernel, 0.75)?;
                let width = (q3 - q1).max(1e-6);
                // Factor out the size of z at the centre so the integrand is O(1) there.
                let scale = rf * pb.forward_ln(center);
                let value = integrate_real_line(
                    |t| (rf * pb.forward_ln(t) - scale + pb.kernel.ln_xg(t)).exp(),
                    center,
                    width,
                    MOMENT_TOL,
                )?;
                Moment::Finite(value * scale.exp())
            }
        })
    }

    /// `(E Z, sd Z)`; the standard deviation is infinite when the second
    /// moment is.
    pub fn mean_sd(&self) -> Result<(Moment, Moment)> {
        let m1 = self.raw_moment(1)?;
        let m1v = match m1 {
            Moment::Finite(v) => v,
            Moment::Infinite => return Ok((Moment::Infinite, Moment::Infinite)),
        };
        let sd = match self.raw_moment(2)? {
            Moment::Finite(m2) => Moment::Finite((m2 - m1v * m1v).max(0.0).sqrt()),
            Moment::Infinite => Moment::Infinite,
        };
        Ok((m1, sd))
    }
}

/// `moments(spec, r)`.
pub fn moments(spec: &FamilySpec, r: u32) -> Result<Moment> {
    Distribution::new(spec)?.raw_moment(r)
}
