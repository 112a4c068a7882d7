//! Maximum-likelihood fitting for all ten families.
//!
//! Fits run in log-parameter space from several start vectors and keep the
//! best. Start vectors for the Burr-based families are built from earlier fits
//! (Gamma and Pareto feed the extended Pareto, which feeds the four- and
//! five-parameter families, and so on), so a [`Fitter`] memoises fits per
//! sample. Because every richer family is started at the optimum of a family
//! it nests, and the optimiser never accepts a step that lowers the
//! likelihood, the cascade is monotone in the nesting order.

pub mod loglik;
pub mod optimizer;
pub mod starts;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilyKind, FamilySpec};
use crate::sample::ClaimSample;

pub use loglik::{
    gradient, log_gradient, loglik, loglik_phi, loglik_values, objective, Gradient,
    LogLikelihood, Prepared,
};
pub use optimizer::{minimize, OptimOptions, OptimResult};
pub use starts::moment_start_extended_pareto;

use loglik::{coords_from_params, params_from_coords};

/// Stand-in for the "→ ∞" start entries.
pub const LARGE: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub optim: OptimOptions,
    /// Starts whose log-likelihoods differ by less than `tie_tol · n` are
    /// considered tied; the earliest wins.
    pub tie_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            optim: OptimOptions::default(),
            tie_tol: 1e-9,
        }
    }
}

/// Ordered start vectors in the family's own parameter layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSet {
    pub kind: FamilyKind,
    pub starts: Vec<Vec<f64>>,
}

impl StartSet {
    pub fn new(kind: FamilyKind, starts: Vec<Vec<f64>>) -> Result<Self> {
        if starts.is_empty() {
            return Err(Error::Config(format!("empty start set for {kind}")));
        }
        for s in &starts {
            FamilySpec::new(kind, s.clone())?;
        }
        Ok(Self { kind, starts })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub spec: FamilySpec,
    pub loglik: f64,
    pub converged: bool,
    pub start_index: usize,
    pub iterations: usize,
    /// Max-norm of the projected gradient in optimisation coordinates.
    pub gradient_norm: f64,
    /// Log-likelihood reached from each start (`None` if the start failed).
    pub start_logliks: Vec<Option<f64>>,
}

/// Memoising fitter for one sample.
pub struct Fitter {
    data: Prepared,
    opts: FitOptions,
    memo: HashMap<FamilyKind, Result<FitResult>>,
}

impl Fitter {
    pub fn new(sample: &ClaimSample, opts: FitOptions) -> Self {
        Self::from_values(sample.values(), opts)
    }

    pub fn from_values(values: &[f64], opts: FitOptions) -> Self {
        Self {
            data: Prepared::from_values(values),
            opts,
            memo: HashMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    /// Fit with the default start recipe, memoised.
    pub fn fit(&mut self, kind: FamilyKind) -> Result<FitResult> {
        if let Some(r) = self.memo.get(&kind) {
            return r.clone();
        }
        let result = if kind == FamilyKind::LogNormal {
            self.fit_lognormal()
        } else {
            let starts = self.default_starts(kind);
            self.fit_from(&starts)
        };
        self.memo.insert(kind, result.clone());
        result
    }

    fn fit_lognormal(&self) -> Result<FitResult> {
        let (xi, sigma) = starts::lognormal_mle(&self.data.z);
        let spec = FamilySpec::new(FamilyKind::LogNormal, vec![xi, sigma]).map_err(|e| {
            Error::AllStartsFailed {
                kind: FamilyKind::LogNormal,
                diagnostics: vec![format!("closed form: {e}")],
            }
        })?;
        let u = coords_from_params(FamilyKind::LogNormal, &spec.params);
        let (value, grad) = objective(FamilyKind::LogNormal, &u, &self.data, true)?;
        Ok(FitResult {
            spec,
            loglik: value,
            converged: true,
            start_index: 0,
            iterations: 0,
            gradient_norm: grad.iter().fold(0.0, |m, g| m.max(g.abs())),
            start_logliks: vec![Some(value)],
        })
    }

    /// Run the optimiser from every start in `starts` and keep the best.
    pub fn fit_from(&self, starts: &StartSet) -> Result<FitResult> {
        let kind = starts.kind;
        let n = self.data.n() as f64;
        let mut best: Option<(FitResult, f64)> = None;
        let mut diagnostics = Vec::new();
        let mut logliks = Vec::with_capacity(starts.starts.len());
        for (index, start) in starts.starts.iter().enumerate() {
            let u0 = coords_from_params(kind, start);
            let run = minimize(
                |u| {
                    objective(kind, u, &self.data, true)
                        .ok()
                        .map(|(v, g)| (-v, g.into_iter().map(|d| -d).collect()))
                },
                &u0,
                &self.opts.optim,
            );
            let Some(run) = run else {
                diagnostics.push(format!("start {index}: objective not finite at the start"));
                logliks.push(None);
                continue;
            };
            let params = params_from_coords(kind, &run.x);
            let spec = match FamilySpec::new(kind, params) {
                Ok(s) => s,
                Err(e) => {
                    diagnostics.push(format!("start {index}: {e}"));
                    logliks.push(None);
                    continue;
                }
            };
            let ll = -run.value;
            logliks.push(Some(ll));
            let candidate = FitResult {
                spec,
                loglik: ll,
                converged: run.converged,
                start_index: index,
                iterations: run.iterations,
                gradient_norm: run.projected_grad_norm,
                start_logliks: Vec::new(),
            };
            let better = match &best {
                None => true,
                Some((b, _)) => ll > b.loglik + self.opts.tie_tol * n,
            };
            if better {
                best = Some((candidate, ll));
            }
        }
        match best {
            Some((mut r, _)) => {
                r.start_logliks = logliks;
                Ok(r)
            }
            None => Err(Error::AllStartsFailed { kind, diagnostics }),
        }
    }

    fn fitted_or(&mut self, kind: FamilyKind, fallback: impl FnOnce(&mut Self) -> Vec<f64>) -> Vec<f64> {
        match self.fit(kind) {
            Ok(r) => r.spec.params,
            Err(_) => fallback(self),
        }
    }

    /// The start recipe for `kind`; failed prerequisite fits are replaced by
    /// that family's own first start.
    pub fn default_starts(&mut self, kind: FamilyKind) -> StartSet {
        let z = &self.data.z;
        let starts = match kind {
            FamilyKind::LogNormal => {
                let (xi, sigma) = starts::lognormal_mle(z);
                vec![vec![xi, sigma.max(1e-12)]]
            }
            FamilyKind::Gamma => vec![starts::gamma_start(z)],
            FamilyKind::Weibull => vec![starts::weibull_start(z)],
            FamilyKind::LogGamma => vec![starts::loggamma_start(z)],
            FamilyKind::Pareto => vec![starts::pareto_start(z)],
            FamilyKind::ExtendedPareto => {
                let (a, t, b) = moment_start_extended_pareto(z);
                let ga = self.fitted_or(FamilyKind::Gamma, |f| starts::gamma_start(&f.data.z));
                let pa = self.fitted_or(FamilyKind::Pareto, |f| starts::pareto_start(&f.data.z));
                vec![
                    vec![a, t, b],
                    vec![LARGE, ga[1], ga[0]],
                    // Lomax scale β^pa corresponds to Burr scale β^pa / α^pa.
                    vec![pa[0], 1.0, pa[1] / pa[0]],
                ]
            }
            FamilyKind::FourParam => {
                let ep = self.ep_or_start();
                let we = self.fitted_or(FamilyKind::Weibull, |f| starts::weibull_start(&f.data.z));
                vec![
                    vec![ep[0], ep[1], ep[2], 1.0],
                    vec![LARGE, 1.0, we[1], 1.0 / we[0]],
                ]
            }
            FamilyKind::FiveParam => {
                let ep = self.ep_or_start();
                let lga = self.fitted_or(FamilyKind::LogGamma, |f| starts::loggamma_start(&f.data.z));
                vec![
                    vec![ep[0], ep[1], ep[2], 1.0, 1.0],
                    vec![LARGE, lga[1], 1.0, LARGE, lga[0] * LARGE],
                ]
            }
            FamilyKind::FiveParam2 => {
                let fp = self.fitted_or(FamilyKind::FourParam, |f| {
                    let s = f.default_starts(FamilyKind::FourParam);
                    s.starts[0].clone()
                });
                vec![vec![fp[0], fp[1], fp[2], fp[3], 1.0]]
            }
            FamilyKind::SixParam => {
                let fip = self.fitted_or(FamilyKind::FiveParam, |f| {
                    f.default_starts(FamilyKind::FiveParam).starts[0].clone()
                });
                let fip2 = self.fitted_or(FamilyKind::FiveParam2, |f| {
                    f.default_starts(FamilyKind::FiveParam2).starts[0].clone()
                });
                vec![
                    vec![fip[0], fip[1], fip[2], 1.0, fip[3], fip[4]],
                    vec![fip2[0], fip2[1], fip2[2], fip2[3], 1.0, fip2[4]],
                ]
            }
        };
        StartSet { kind, starts }
    }

    fn ep_or_start(&mut self) -> Vec<f64> {
        self.fitted_or(FamilyKind::ExtendedPareto, |f| {
            let (a, t, b) = moment_start_extended_pareto(&f.data.z);
            vec![a, t, b]
        })
    }

    /// Standard errors of the natural parameters from the observed
    /// information, by central differences of the analytic gradient.
    pub fn standard_errors(&self, spec: &FamilySpec) -> Result<Vec<f64>> {
        let kind = spec.kind;
        let u = coords_from_params(kind, &spec.params);
        let k = u.len();
        let mut hess = vec![vec![0.0; k]; k];
        for j in 0..k {
            let h = 1e-5 * u[j].abs().max(1.0);
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let (_, gu) = objective(kind, &up, &self.data, true)?;
            let (_, gd) = objective(kind, &dn, &self.data, true)?;
            for i in 0..k {
                hess[i][j] = -(gu[i] - gd[i]) / (2.0 * h);
            }
        }
        for i in 0..k {
            for j in 0..i {
                let m = 0.5 * (hess[i][j] + hess[j][i]);
                hess[i][j] = m;
                hess[j][i] = m;
            }
        }
        let inv = invert(hess).ok_or(Error::Convergence {
            what: "observed information inversion",
            iterations: 0,
        })?;
        Ok((0..k)
            .map(|i| {
                let se_u = inv[i][i].max(0.0).sqrt();
                if kind == FamilyKind::LogNormal && i == 0 {
                    se_u
                } else {
                    se_u * spec.params[i]
                }
            })
            .collect())
    }
}

/// Gauss–Jordan inverse with partial pivoting.
fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// `fit(sample, kind, starts)`: with `None`, the default recipe is used.
pub fn fit(sample: &ClaimSample, kind: FamilyKind, starts: Option<&StartSet>) -> Result<FitResult> {
    fit_with(sample, kind, starts, FitOptions::default())
}

pub fn fit_with(
    sample: &ClaimSample,
    kind: FamilyKind,
    starts: Option<&StartSet>,
    opts: FitOptions,
) -> Result<FitResult> {
    let mut fitter = Fitter::new(sample, opts);
    match starts {
        Some(s) if s.kind == kind => fitter.fit_from(s),
        Some(s) => Err(Error::Config(format!(
            "start set is for {} but {} was requested",
            s.kind, kind
        ))),
        None => fitter.fit(kind),
    }
}

/// `default_starts(kind, sample)`.
pub fn default_starts(kind: FamilyKind, sample: &ClaimSample) -> StartSet {
    Fitter::new(sample, FitOptions::default()).default_starts(kind)
}

/// Fit every family in `kinds` on one sample, sharing the cascade.
pub fn fit_all(values: &[f64], kinds: &[FamilyKind], opts: FitOptions) -> Vec<Result<FitResult>> {
    let mut fitter = Fitter::from_values(values, opts);
    kinds.iter().map(|&k| fitter.fit(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_small_matrix() {
        let a = vec![vec![4.0, 1.0], vec![2.0, 3.0]];
        let inv = invert(a).unwrap();
        assert!((inv[0][0] - 0.3).abs() < 1e-15);
        assert!((inv[0][1] + 0.1).abs() < 1e-15);
        assert!((inv[1][0] + 0.2).abs() < 1e-15);
        assert!((inv[1][1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn start_counts_follow_the_recipe() {
        let values: Vec<f64> = (1..200).map(|i| (i as f64 / 50.0).powf(1.3)).collect();
        let sample = ClaimSample::synthetic(values).unwrap();
        assert_eq!(default_starts(FamilyKind::ExtendedPareto, &sample).starts.len(), 3);
        assert_eq!(default_starts(FamilyKind::FourParam, &sample).starts.len(), 2);
        assert_eq!(default_starts(FamilyKind::FiveParam, &sample).starts.len(), 2);
        assert_eq!(default_starts(FamilyKind::FiveParam2, &sample).starts.len(), 1);
        assert_eq!(default_starts(FamilyKind::SixParam, &sample).starts.len(), 2);
    }
}
