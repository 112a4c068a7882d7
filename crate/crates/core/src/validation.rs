//! Parametric bootstrap intervals and the binomial back-test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{probability, Error, Result};
use crate::family::FamilySpec;
use crate::fitting::{Fitter, FitOptions};
use crate::risk::{reserve_sorted, simulate_totals_with};
use crate::sample::ClaimSample;
use crate::sampling::{RngStream, Sampler};
use crate::special::ln_binomial;

/// Share of failed refits above which a bootstrap is abandoned.
pub const MAX_FAILED_SHARE: f64 = 0.1;
pub const MIN_REPLICATES: usize = 100;

/// The functional whose sampling distribution is bootstrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    /// Claim-size quantile at `1 − ε`.
    Quantile { epsilon: f64 },
    /// Monte Carlo reserve with `m` simulated totals.
    Reserve { lambda: f64, epsilon: f64, m: usize },
}

impl Statistic {
    pub fn evaluate(&self, spec: &FamilySpec, stream: &RngStream) -> Result<f64> {
        let dist = Distribution::new(spec)?;
        match *self {
            Statistic::Quantile { epsilon } => dist.quantile(1.0 - probability(epsilon)?),
            Statistic::Reserve { lambda, epsilon, m } => {
                let mut t = simulate_totals_with(&Sampler::new(&dist)?, lambda, m, stream)?;
                t.sort_by(f64::total_cmp);
                reserve_sorted(&t, epsilon)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCI {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub m_b: usize,
    pub failed_refits: usize,
}

/// Bootstrap replicates of a statistic, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReplicates {
    pub point: f64,
    pub values: Vec<f64>,
    pub m_b: usize,
    pub failed_refits: usize,
}

/// Linear-interpolation sample quantile (R type 7) of sorted data.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BootstrapReplicates {
    pub fn interval(&self, level: f64) -> Result<BootstrapCI> {
        probability(level)?;
        let a = 0.5 * (1.0 - level);
        Ok(BootstrapCI {
            point: self.point,
            lower: percentile(&self.values, a),
            upper: percentile(&self.values, 1.0 - a),
            level,
            m_b: self.m_b,
            failed_refits: self.failed_refits,
        })
    }
}

/// Draw `m_b` samples of size `n` from `spec`, refit the same family to each
/// and evaluate the statistic. Replicate `b` uses `stream.derive(b)`.
pub fn bootstrap_replicates(
    spec: &FamilySpec,
    n: usize,
    statistic: Statistic,
    m_b: usize,
    stream: &RngStream,
    fit: FitOptions,
) -> Result<BootstrapReplicates> {
    if m_b < MIN_REPLICATES {
        return Err(Error::Config(format!(
            "at least {MIN_REPLICATES} bootstrap replicates are required, got {m_b}"
        )));
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let sampler = Sampler::from_spec(spec)?;
    let point = statistic.evaluate(spec, &stream.derive(u64::MAX))?;
    let reps: Vec<Option<f64>> = (0..m_b)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.derive(b as u64);
            let values = sampler.draw_n(&mut rng, n);
            let refit = Fitter::from_values(&values, fit).fit(spec.kind).ok()?;
            statistic
                .evaluate(&refit.spec, &rng.derive(0))
                .ok()
                .filter(|v| v.is_finite())
        })
        .collect();
    let mut values: Vec<f64> = reps.iter().flatten().copied().collect();
    let failed = m_b - values.len();
    if failed as f64 > MAX_FAILED_SHARE * m_b as f64 {
        return Err(Error::BootstrapRefits {
            failed,
            total: m_b,
        });
    }
    values.sort_by(f64::total_cmp);
    Ok(BootstrapReplicates {
        point,
        values,
        m_b,
        failed_refits: failed,
    })
}

/// Percentile interval at `level` from a parametric bootstrap.
pub fn bootstrap_ci(
    spec: &FamilySpec,
    n: usize,
    statistic: Statistic,
    level: f64,
    m_b: usize,
    stream: &RngStream,
) -> Result<BootstrapCI> {
    bootstrap_replicates(spec, n, statistic, m_b, stream, FitOptions::default())?.interval(level)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub n: usize,
    pub level: f64,
    pub threshold: Option<f64>,
    pub exceedances: usize,
    pub expected: f64,
    pub p_value: f64,
}

/// Relative slack when comparing outcome probabilities against the observed
/// one, so that exact ties are not lost to rounding.
const TIE_TOL: f64 = 1e-7;

/// Two-sided exact binomial test: the total probability of all outcomes no
/// more likely than the observed one.
pub fn binomial_two_sided_p(n: usize, epsilon: f64, k: usize) -> Result<f64> {
    probability(epsilon)?;
    if k > n {
        return Err(Error::Config(format!("{k} exceedances out of {n} observations")));
    }
    let (lp, lq) = (epsilon.ln(), (-epsilon).ln_1p());
    let ln_pmf = |i: usize| ln_binomial(n as u64, i as u64) + i as f64 * lp + (n - i) as f64 * lq;
    let observed = ln_pmf(k);
    let cutoff = observed + TIE_TOL.ln_1p();
    let p: f64 = (0..=n)
        .map(ln_pmf)
        .filter(|&l| l <= cutoff)
        .map(f64::exp)
        .sum();
    Ok(p.min(1.0))
}

pub fn backtest_counts(n: usize, epsilon: f64, exceedances: usize) -> Result<BacktestReport> {
    Ok(BacktestReport {
        n,
        level: epsilon,
        threshold: None,
        exceedances,
        expected: n as f64 * epsilon,
        p_value: binomial_two_sided_p(n, epsilon, exceedances)?,
    })
}

/// Count the claims strictly above `q` and test against Binomial(n, ε).
pub fn binomial_backtest(sample: &ClaimSample, q: f64, epsilon: f64) -> Result<BacktestReport> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain {
            what: "back-test threshold",
            value: q,
        });
    }
    let k = sample.values().iter().filter(|&&z| z > q).count();
    let mut r = backtest_counts(sample.len(), epsilon, k)?;
    r.threshold = Some(q);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_agreement_gives_one() {
        assert!((binomial_two_sided_p(100, 0.05, 5).unwrap() - 1.0).abs() < 1e-12);
        assert!((binomial_two_sided_p(10, 0.5, 5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_case_by_hand() {
        // n = 3, p = 0.5: pmf 1/8, 3/8, 3/8, 1/8.
        assert!((binomial_two_sided_p(3, 0.5, 0).unwrap() - 0.25).abs() < 1e-12);
        assert!((binomial_two_sided_p(3, 0.5, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn percentile_type7() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert!((percentile(&v, 0.5) - 2.5).abs() < 1e-15);
        assert!((percentile(&v, 0.25) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn constant_replicates_give_zero_width() {
        let r = BootstrapReplicates {
            point: 2.0,
            values: vec![2.0; 200],
            m_b: 200,
            failed_refits: 0,
        };
        let ci = r.interval(0.95).unwrap();
        assert_eq!((ci.lower, ci.upper), (2.0, 2.0));
    }
}
