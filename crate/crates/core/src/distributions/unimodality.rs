//! Sufficient conditions for a single mode, plus a brute-force grid scan used
//! to check them.

use serde::{Deserialize, Serialize};

use super::model::burr_quantile_ln;
use super::powerburr::PowerBurr;
use crate::params::ParamVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnimodalityCondition {
    GammaGeOne,
    ThetaGeOne,
    AlgebraicEq4,
    NotGuaranteed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnimodalityVerdict {
    pub is_guaranteed_unimodal: bool,
    pub condition_used: UnimodalityCondition,
}

impl UnimodalityVerdict {
    fn from(condition: UnimodalityCondition) -> Self {
        Self {
            is_guaranteed_unimodal: condition != UnimodalityCondition::NotGuaranteed,
            condition_used: condition,
        }
    }
}

pub fn unimodality_check(phi: &ParamVector) -> UnimodalityVerdict {
    let [alpha, theta, _, tau, gamma, _] = phi.values();
    if gamma >= 1.0 {
        return UnimodalityVerdict::from(UnimodalityCondition::GammaGeOne);
    }
    if !phi.eta.is_one() {
        return UnimodalityVerdict::from(UnimodalityCondition::NotGuaranteed);
    }
    if theta >= 1.0 {
        return UnimodalityVerdict::from(UnimodalityCondition::ThetaGeOne);
    }
    // With η = 1 the sign of the density slope is that of a quadratic
    // P(x) = −(α+γ)x² + Bx + τ(θ−1)α/θ; for θ < 1 it has no positive root
    // exactly when B is below the discriminant bound.
    let b = alpha * (1.0 - gamma / theta) - tau * (1.0 + alpha);
    let bound = 2.0 * ((1.0 - theta).abs() * tau * (alpha + gamma) * alpha / theta).sqrt();
    if b <= bound {
        UnimodalityVerdict::from(UnimodalityCondition::AlgebraicEq4)
    } else {
        UnimodalityVerdict::from(UnimodalityCondition::NotGuaranteed)
    }
}

/// Number of strict local maxima of the density of `Z` on `points`
/// log-spaced abscissae covering all but `1e-10` of the Burr mass in each tail.
///
/// Local maxima are counted on the sequence of log-density values, after
/// discarding differences at the level of rounding noise.
pub fn grid_scan_maxima(phi: &ParamVector, points: usize) -> usize {
    let pb = PowerBurr::new(*phi);
    let lo = burr_quantile_ln(&pb.kernel, 1e-10).unwrap_or(-50.0);
    let hi = burr_quantile_ln(&pb.kernel, 1.0 - 1e-10).unwrap_or(50.0);
    let step = (hi - lo) / (points - 1) as f64;
    let mut values = Vec::with_capacity(points);
    for i in 0..points {
        let ln_x = lo + step * i as f64;
        let ln_z = pb.forward_ln(ln_x);
        if let Ok(v) = pb.ln_pdf_ln(ln_z) {
            if v.is_finite() {
                values.push(v);
            }
        }
    }
    count_strict_maxima(&values)
}

fn count_strict_maxima(values: &[f64]) -> usize {
    let mut maxima = 0;
    let mut rising: Option<bool> = None;
    for pair in values.windows(2) {
        let d = pair[1] - pair[0];
        let noise = 1e-11 * (1.0 + pair[0].abs());
        if d.abs() <= noise {
            continue;
        }
        let up = d > 0.0;
        if rising == Some(true) && !up {
            maxima += 1;
        }
        rising = Some(up);
    }
    maxima
}
