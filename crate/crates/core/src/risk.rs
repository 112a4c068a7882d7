//! Compound-Poisson total loss and Monte Carlo reserves.
//!
//! The reserve is the upper `1 − ε` quantile of the total loss
//! `X = Z_1 + … + Z_N`, `N ~ Poisson(λ)`, estimated by the order statistic of
//! rank `⌈(1 − ε) m⌉` among `m` simulated totals.
//!
//! Totals are generated in fixed chunks, chunk `c` drawing from
//! `stream.derive(c)`. Chunks may run on any worker; results are concatenated
//! in chunk order, so the output does not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, probability, Error, Result};
use crate::family::FamilySpec;
use crate::sampling::{RngStream, Sampler, StreamId};
use rand_distr::{Distribution as _, Poisson};

/// Totals per chunk.
pub const CHUNK: usize = 4096;
/// Simulation count used when none is given.
pub const DEFAULT_M: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSpec {
    /// Number of policies.
    pub j: u64,
    /// Claim intensity per policy-year.
    pub mu: f64,
    /// Years.
    pub t: f64,
    /// Expected claim count `J μ T`.
    pub lambda: f64,
}

impl PortfolioSpec {
    pub fn new(j: u64, mu: f64, t: f64) -> Result<Self> {
        if j == 0 {
            return Err(Error::Domain {
                what: "policy count",
                value: 0.0,
            });
        }
        positive("mu", mu)?;
        positive("T", t)?;
        Ok(Self {
            j,
            mu,
            t,
            lambda: positive("lambda", j as f64 * mu * t)?,
        })
    }

    /// A portfolio given only by its expected claim count (`J = T = 1`).
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        Self::new(1, lambda, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveEstimate {
    pub epsilon: f64,
    pub m: usize,
    pub lambda: f64,
    pub q_star: f64,
    /// Distribution-free standard error of `q_star`.
    pub standard_error: f64,
    pub seed: StreamId,
    pub totals_retained: bool,
    #[serde(skip)]
    pub totals: Option<Vec<f64>>,
}

fn poisson(lambda: f64) -> Result<Poisson<f64>> {
    Poisson::new(lambda).map_err(|_| Error::InvalidParameter {
        name: "lambda",
        value: lambda,
        reason: "outside the Poisson sampler's supported range",
    })
}

/// `m` totals from an already compiled sampler.
pub fn simulate_totals_with(
    sampler: &Sampler,
    lambda: f64,
    m: usize,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    let counts = poisson(positive("lambda", lambda)?)?;
    let chunks = m.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.derive(c as u64);
            let len = CHUNK.min(m - c * CHUNK);
            (0..len)
                .map(|_| {
                    let n = counts.sample(&mut rng) as u64;
                    (0..n).map(|_| sampler.draw(&mut rng)).sum::<f64>()
                })
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

pub fn simulate_totals(
    portfolio: &PortfolioSpec,
    spec: &FamilySpec,
    m: usize,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::Config("simulation count m must be at least 1".into()));
    }
    simulate_totals_with(&Sampler::from_spec(spec)?, portfolio.lambda, m, stream)
}

fn rank(m: usize, epsilon: f64) -> usize {
    // Guard against (1 − ε)m landing a hair above an integer.
    let r = ((1.0 - epsilon) * m as f64 - 1e-9).ceil() as usize;
    r.clamp(1, m)
}

/// Reserve from totals already sorted ascending.
pub fn reserve_sorted(sorted: &[f64], epsilon: f64) -> Result<f64> {
    probability(epsilon)?;
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(sorted[rank(sorted.len(), epsilon) - 1])
}

/// The `⌈(1 − ε) m⌉`-th smallest total.
pub fn reserve(totals: &[f64], epsilon: f64) -> Result<f64> {
    let mut sorted = totals.to_vec();
    sorted.sort_by(f64::total_cmp);
    reserve_sorted(&sorted, epsilon)
}

/// Half the spread between the order statistics one binomial standard
/// deviation of rank either side of the reserve.
pub fn reserve_standard_error(sorted: &[f64], epsilon: f64) -> Result<f64> {
    probability(epsilon)?;
    let m = sorted.len();
    if m == 0 {
        return Err(Error::EmptySample);
    }
    let r = rank(m, epsilon);
    let k = ((m as f64 * epsilon * (1.0 - epsilon)).sqrt().ceil() as usize).max(1);
    let lo = r.saturating_sub(k).max(1);
    let hi = (r + k).min(m);
    Ok(0.5 * (sorted[hi - 1] - sorted[lo - 1]) * (2 * k) as f64 / (hi - lo).max(1) as f64)
}

/// Reserves at several levels from one set of simulated totals.
pub fn reserves_from_model(
    portfolio: &PortfolioSpec,
    spec: &FamilySpec,
    epsilons: &[f64],
    m: usize,
    stream: &RngStream,
) -> Result<Vec<ReserveEstimate>> {
    for &e in epsilons {
        probability(e)?;
    }
    let mut totals = simulate_totals(portfolio, spec, m, stream)?;
    totals.sort_by(f64::total_cmp);
    epsilons
        .iter()
        .map(|&epsilon| {
            Ok(ReserveEstimate {
                epsilon,
                m,
                lambda: portfolio.lambda,
                q_star: reserve_sorted(&totals, epsilon)?,
                standard_error: reserve_standard_error(&totals, epsilon)?,
                seed: stream.id(),
                totals_retained: false,
                totals: None,
            })
        })
        .collect()
}

pub fn reserve_from_model(
    portfolio: &PortfolioSpec,
    spec: &FamilySpec,
    epsilon: f64,
    m: usize,
    stream: &RngStream,
) -> Result<ReserveEstimate> {
    Ok(reserves_from_model(portfolio, spec, &[epsilon], m, stream)?.remove(0))
}

/// `q*(θ̂) − q_ε = E1 + E2 + E3`: Monte Carlo, estimation and model error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorDecomposition {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl ErrorDecomposition {
    pub fn total(&self) -> f64 {
        self.e1 + self.e2 + self.e3
    }
}

/// Arguments: Monte Carlo reserve under the fitted model, exact reserve under
/// the fitted model, exact reserve under the best approximation within the
/// fitted family, exact reserve under the true model.
pub fn error_decomposition(
    q_star_fitted: f64,
    q_fitted_exact: f64,
    q_pseudo_true: f64,
    q_true: f64,
) -> ErrorDecomposition {
    ErrorDecomposition {
        e1: q_star_fitted - q_fitted_exact,
        e2: q_fitted_exact - q_pseudo_true,
        e3: q_pseudo_true - q_true,
    }
}
