//! Simulation-study harness: bias and RMSE of fitted quantiles and reserves.
//!
//! Replication `k` draws its sample from stream `k` of the master seed, fits
//! every requested family, and evaluates each target under every fit.
//! Replications run in parallel; their results are folded in index order, so
//! the output is independent of the worker count.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{probability, Error, Result};
use crate::family::{FamilyKind, FamilySpec};
use crate::fitting::{fit_all, FitOptions};
use crate::risk::{reserve_sorted, simulate_totals_with};
use crate::sampling::{RngStream, Sampler};

/// Written in place of cells with no successful replication.
pub const MISSING: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// N = 100, m = 10⁴.
    Desk,
    /// N = 1000, m = 10⁵.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub true_spec: FamilySpec,
    pub n: usize,
    pub replications: usize,
    pub lambdas: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// Simulations per fitted reserve.
    pub m: usize,
    /// Simulations for the reference ("true") reserve.
    pub truth_m: usize,
    pub master_seed: u64,
    pub families: Vec<FamilyKind>,
    pub fit: FitOptions,
    #[serde(default)]
    pub progress: bool,
}

impl StudyConfig {
    pub fn profile(true_spec: FamilySpec, profile: Profile) -> Self {
        let (replications, m) = match profile {
            Profile::Desk => (100, 10_000),
            Profile::Full => (1000, 100_000),
        };
        Self {
            true_spec,
            n: 5000,
            replications,
            lambdas: vec![10.0, 100.0, 1000.0],
            epsilons: vec![0.05, 0.01],
            m,
            truth_m: 1_000_000,
            master_seed: 1,
            families: FamilyKind::ALL.to_vec(),
            fit: FitOptions::default(),
            progress: false,
        }
    }

    pub fn desk(true_spec: FamilySpec) -> Self {
        Self::profile(true_spec, Profile::Desk)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.replications == 0 {
            return Err(Error::Config("n and the replication count must be positive".into()));
        }
        if self.epsilons.is_empty() {
            return Err(Error::Config("at least one epsilon is required".into()));
        }
        if self.families.is_empty() {
            return Err(Error::Config("at least one fitted family is required".into()));
        }
        for &e in &self.epsilons {
            probability(e)?;
        }
        for &l in &self.lambdas {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Config(format!("lambda must be positive, got {l}")));
            }
        }
        if !self.lambdas.is_empty() && (self.m == 0 || self.truth_m == 0) {
            return Err(Error::Config("reserve targets need m ≥ 1 and truth_m ≥ 1".into()));
        }
        Ok(())
    }

    /// Quantile targets for each ε, then reserve targets for each (λ, ε).
    pub fn targets(&self) -> Vec<Target> {
        let mut t: Vec<Target> = self
            .epsilons
            .iter()
            .map(|&epsilon| Target {
                lambda: None,
                epsilon,
            })
            .collect();
        for &l in &self.lambdas {
            t.extend(self.epsilons.iter().map(|&epsilon| Target {
                lambda: Some(l),
                epsilon,
            }));
        }
        t
    }
}

/// A claim-size quantile (`lambda = None`) or a reserve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub lambda: Option<f64>,
    pub epsilon: f64,
}

impl Target {
    pub fn label(&self) -> String {
        match self.lambda {
            None => format!("quantile eps={}", self.epsilon),
            Some(l) => format!("reserve lambda={l} eps={}", self.epsilon),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub bias: Option<f64>,
    pub rmse: Option<f64>,
    /// Standard error of the bias (sd of the errors over √successes).
    pub se: Option<f64>,
    pub successes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCells {
    pub family: FamilyKind,
    pub replication_failures: usize,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub targets: Vec<Target>,
    pub truths: Vec<f64>,
    /// Reference reserves come from one run of `truth_m` totals on a
    /// dedicated stream.
    pub truth_method: String,
    pub families: Vec<FamilyCells>,
}

impl StudyResult {
    pub fn cell(&self, family: FamilyKind, target: &Target) -> Option<&Cell> {
        let t = self.targets.iter().position(|x| x == target)?;
        self.families
            .iter()
            .find(|f| f.family == family)
            .map(|f| &f.cells[t])
    }
}

/// Stream id of the truth run for the `i`-th λ, far from replication ids.
fn truth_stream(seed: u64, i: usize) -> RngStream {
    RngStream::new(seed, u64::MAX - i as u64)
}

fn true_values(config: &StudyConfig, targets: &[Target]) -> Result<Vec<f64>> {
    let dist = Distribution::new(&config.true_spec)?;
    let sampler = Sampler::new(&dist)?;
    let mut out = Vec::with_capacity(targets.len());
    let mut sorted_by_lambda: Vec<(f64, Vec<f64>)> = Vec::new();
    for t in targets {
        match t.lambda {
            None => out.push(dist.quantile(1.0 - t.epsilon)?),
            Some(l) => {
                if !sorted_by_lambda.iter().any(|(x, _)| *x == l) {
                    let i = config.lambdas.iter().position(|&x| x == l).unwrap_or(0);
                    let mut totals =
                        simulate_totals_with(&sampler, l, config.truth_m, &truth_stream(config.master_seed, i))?;
                    totals.sort_by(f64::total_cmp);
                    sorted_by_lambda.push((l, totals));
                }
                let totals = &sorted_by_lambda.iter().find(|(x, _)| *x == l).unwrap().1;
                out.push(reserve_sorted(totals, t.epsilon)?);
            }
        }
    }
    Ok(out)
}

/// Estimates for one replication: per family, `None` on fit failure.
fn replicate(config: &StudyConfig, sampler: &Sampler, k: usize) -> Vec<Option<Vec<f64>>> {
    let mut rng = RngStream::new(config.master_seed, k as u64);
    let values = sampler.draw_n(&mut rng, config.n);
    let fits = fit_all(&values, &config.families, config.fit);
    fits.into_iter()
        .enumerate()
        .map(|(fi, fit)| {
            let spec = fit.ok()?.spec;
            let dist = Distribution::new(&spec).ok()?;
            let mut est = Vec::new();
            for &e in &config.epsilons {
                est.push(dist.quantile(1.0 - e).ok()?);
            }
            if !config.lambdas.is_empty() {
                let fs = Sampler::new(&dist).ok()?;
                for (li, &l) in config.lambdas.iter().enumerate() {
                    let s = rng.derive(((fi as u64) << 32) | li as u64);
                    let mut totals = simulate_totals_with(&fs, l, config.m, &s).ok()?;
                    totals.sort_by(f64::total_cmp);
                    for &e in &config.epsilons {
                        est.push(reserve_sorted(&totals, e).ok()?);
                    }
                }
            }
            est.iter().all(|v| v.is_finite()).then_some(est)
        })
        .collect()
}

pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let targets = config.targets();
    let truths = true_values(config, &targets)?;
    let sampler = Sampler::from_spec(&config.true_spec)?;
    let done = AtomicUsize::new(0);
    let reps: Vec<Vec<Option<Vec<f64>>>> = (0..config.replications)
        .into_par_iter()
        .map(|k| {
            let r = replicate(config, &sampler, k);
            let d = done.fetch_add(1, Ordering::Relaxed) + 1;
            if config.progress && (d % 10 == 0 || d == config.replications) {
                eprintln!("[{}] {d}/{} replications", config.true_spec.kind, config.replications);
            }
            r
        })
        .collect();

    let families = config
        .families
        .iter()
        .enumerate()
        .map(|(fi, &family)| {
            let ok: Vec<&Vec<f64>> = reps.iter().filter_map(|r| r[fi].as_ref()).collect();
            let cells = (0..targets.len())
                .map(|t| {
                    let errs: Vec<f64> = ok.iter().map(|e| e[t] - truths[t]).collect();
                    aggregate(&errs)
                })
                .collect();
            FamilyCells {
                family,
                replication_failures: config.replications - ok.len(),
                cells,
            }
        })
        .collect();

    Ok(StudyResult {
        config: config.clone(),
        targets,
        truths,
        truth_method: format!(
            "quantiles exact; reserves from {} simulated totals on a dedicated stream",
            config.truth_m
        ),
        families,
    })
}

fn aggregate(errs: &[f64]) -> Cell {
    let n = errs.len();
    if n == 0 {
        return Cell {
            bias: None,
            rmse: None,
            se: None,
            successes: 0,
        };
    }
    let nf = n as f64;
    let bias = errs.iter().sum::<f64>() / nf;
    let rmse = (errs.iter().map(|e| e * e).sum::<f64>() / nf).sqrt();
    let se = if n > 1 {
        (errs.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt() / nf.sqrt()
    } else {
        0.0
    };
    Cell {
        bias: Some(bias),
        rmse: Some(rmse.max(bias.abs())),
        se: Some(se),
        successes: n,
    }
}

/// Applied families down, true families across; bias block above RMSE block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub target: Target,
    pub columns: Vec<FamilyKind>,
    pub rows: Vec<FamilyKind>,
    pub bias: Vec<Vec<Option<f64>>>,
    pub rmse: Vec<Vec<Option<f64>>>,
}

/// Collect one target from several single-truth results into a table.
pub fn emit_table(results: &[StudyResult], target: &Target) -> Table {
    let mut cols: Vec<&StudyResult> = results.iter().collect();
    cols.sort_by_key(|r| r.config.true_spec.kind);
    let mut rows: Vec<FamilyKind> = Vec::new();
    for r in &cols {
        for f in &r.families {
            if !rows.contains(&f.family) {
                rows.push(f.family);
            }
        }
    }
    rows.sort();
    let pick = |row: FamilyKind, get: fn(&Cell) -> Option<f64>| -> Vec<Option<f64>> {
        cols.iter()
            .map(|r| r.cell(row, target).and_then(get))
            .collect()
    };
    Table {
        target: *target,
        columns: cols.iter().map(|r| r.config.true_spec.kind).collect(),
        bias: rows.iter().map(|&r| pick(r, |c| c.bias)).collect(),
        rmse: rows.iter().map(|&r| pick(r, |c| c.rmse)).collect(),
        rows,
    }
}

fn fmt_cell(v: Option<f64>, digits: Option<usize>) -> String {
    match (v, digits) {
        (None, _) => MISSING.to_string(),
        (Some(x), Some(d)) => format!("{x:.d$}"),
        (Some(x), None) => format!("{x}"),
    }
}

impl Table {
    fn blocks(&self) -> [(&'static str, &Vec<Vec<Option<f64>>>); 2] {
        [("bias", &self.bias), ("rmse", &self.rmse)]
    }

    /// Full-precision CSV: `block,A\T,<true families…>`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("block,A\\T");
        for c in &self.columns {
            let _ = write!(s, ",{}", c.label());
        }
        s.push('\n');
        for (name, block) in self.blocks() {
            for (row, vals) in self.rows.iter().zip(block) {
                let _ = write!(s, "{name},{}", row.label());
                for v in vals {
                    let _ = write!(s, ",{}", fmt_cell(*v, None));
                }
                s.push('\n');
            }
        }
        s
    }

    /// Aligned text rounded to `digits` decimals.
    pub fn to_text(&self, digits: usize) -> String {
        let width = 10.max(digits + 6);
        let mut s = format!("{}\n", self.target.label());
        let _ = write!(s, "{:<10}", "A\\T");
        for c in &self.columns {
            let _ = write!(s, "{:>width$}", c.label());
        }
        s.push('\n');
        for (name, block) in self.blocks() {
            let _ = writeln!(s, "{name}");
            for (row, vals) in self.rows.iter().zip(block) {
                let _ = write!(s, "{:<10}", row.label());
                for v in vals {
                    let _ = write!(s, "{:>width$}", fmt_cell(*v, Some(digits)));
                }
                s.push('\n');
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_single_replication() {
        let c = aggregate(&[-0.25]);
        assert_eq!(c.bias, Some(-0.25));
        assert_eq!(c.rmse, Some(0.25));
        assert!(aggregate(&[]).bias.is_none());
    }

    #[test]
    fn targets_order() {
        let mut c = StudyConfig::desk(FamilySpec::study_default(FamilyKind::Gamma));
        c.lambdas = vec![10.0];
        let t = c.targets();
        assert_eq!(t.len(), 4);
        assert_eq!(t[0].lambda, None);
        assert_eq!(t[3], Target { lambda: Some(10.0), epsilon: 0.01 });
    }
}
