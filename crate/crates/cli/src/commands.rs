use std::path::Path;
use std::time::Instant;

use powerburr::distributions::Distribution;
use powerburr::fitting::{FitResult, Fitter, StartSet};
use powerburr::risk::{reserves_from_model, PortfolioSpec, ReserveEstimate};
use powerburr::sample::SampleSummary;
use powerburr::sampling::Sampler;
use powerburr::study::{emit_table, run_study, StudyConfig, StudyResult, Target};
use powerburr::validation::{
    backtest_counts, binomial_backtest, bootstrap_replicates, BacktestReport, BootstrapCI,
    Statistic,
};
use powerburr::{ClaimSample, FamilyKind, FamilySpec, RngStream};
use serde::Serialize;

use crate::args::{BacktestArgs, FitArgs, InputArgs, ProfileArg, ReserveArgs, SampleArgs, StudyArgs};
use crate::config::{parse_families, parse_spec, parse_vector, Resolved};
use crate::error::CliError;
use crate::ingest::{ingest, parse_delimiter, Column, IngestOptions};

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub source: String,
    pub deductible_subtracted: bool,
    pub summary: SampleSummary,
}

#[derive(Debug, Serialize)]
pub struct FitSummary {
    pub family: FamilyKind,
    pub label: &'static str,
    pub params: Option<Vec<f64>>,
    pub loglik: Option<f64>,
    pub converged: bool,
    pub start_index: Option<usize>,
    pub iterations: usize,
    pub gradient_norm: Option<f64>,
    /// `(ε, quantile at 1 − ε)` under the fitted model.
    pub quantiles: Vec<(f64, f64)>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ReserveRow {
    pub model: String,
    pub estimate: ReserveEstimate,
    pub scaled: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CiRow {
    pub model: String,
    pub statistic: Statistic,
    pub interval: BootstrapCI,
}

#[derive(Debug, Serialize)]
pub struct BacktestRow {
    pub model: Option<String>,
    pub report: BacktestReport,
}

/// Everything needed to rerun a command and the numbers it produced.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub config: Resolved,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub starts: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<FitSummary>,
    /// Fitted families by decreasing log-likelihood.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ranking: Vec<FamilyKind>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reserves: Vec<ReserveRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bootstrap: Vec<CiRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub backtests: Vec<BacktestRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl RunReport {
    fn new(command: &'static str, config: Resolved) -> Self {
        Self {
            command,
            config,
            input: None,
            starts: Vec::new(),
            fits: Vec::new(),
            ranking: Vec::new(),
            reserves: Vec::new(),
            bootstrap: Vec::new(),
            backtests: Vec::new(),
            wall_clock_seconds: None,
        }
    }
}

fn load_input(args: &InputArgs) -> Result<Option<ClaimSample>, CliError> {
    let Some(path) = &args.input else {
        return Ok(None);
    };
    let opts = IngestOptions {
        column: Column::parse(&args.column),
        delimiter: parse_delimiter(&args.delimiter)?,
        deductible: args.deductible,
    };
    let sample = ingest(path, &opts)?;
    let s = sample.summary();
    eprintln!(
        "read {} claims from {} (mean {:.6}, sd {:.6}, max {:.6})",
        s.n,
        path.display(),
        s.mean,
        s.sd,
        s.max
    );
    Ok(Some(sample))
}

fn input_info(sample: &ClaimSample) -> InputInfo {
    InputInfo {
        source: sample.source.clone(),
        deductible_subtracted: sample.deductible_subtracted,
        summary: sample.summary(),
    }
}

fn summarize(kind: FamilyKind, fit: &Result<FitResult, powerburr::Error>, epsilons: &[f64]) -> FitSummary {
    match fit {
        Ok(r) => {
            let quantiles = Distribution::new(&r.spec)
                .map(|d| {
                    epsilons
                        .iter()
                        .filter_map(|&e| d.quantile(1.0 - e).ok().map(|q| (e, q)))
                        .collect()
                })
                .unwrap_or_default();
            FitSummary {
                family: kind,
                label: kind.label(),
                params: Some(r.spec.params.clone()),
                loglik: Some(r.loglik),
                converged: r.converged,
                start_index: Some(r.start_index),
                iterations: r.iterations,
                gradient_norm: Some(r.gradient_norm),
                quantiles,
                error: None,
            }
        }
        Err(e) => FitSummary {
            family: kind,
            label: kind.label(),
            params: None,
            loglik: None,
            converged: false,
            start_index: None,
            iterations: 0,
            gradient_norm: None,
            quantiles: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

fn ranking(fits: &[FitSummary]) -> Vec<FamilyKind> {
    let mut ok: Vec<(FamilyKind, f64)> = fits
        .iter()
        .filter_map(|f| f.loglik.map(|l| (f.family, l)))
        .collect();
    ok.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ok.into_iter().map(|(k, _)| k).collect()
}

/// Fit the requested families; fails only if every one of them failed.
fn fit_families(
    sample: &ClaimSample,
    cfg: &Resolved,
    custom: Option<StartSet>,
) -> Result<(Vec<FitSummary>, Vec<FamilySpec>), CliError> {
    let mut fitter = Fitter::new(sample, cfg.fit);
    let mut summaries = Vec::new();
    let mut specs = Vec::new();
    for &kind in &cfg.families {
        let r = match &custom {
            Some(s) => fitter.fit_from(s),
            None => fitter.fit(kind),
        };
        if let Ok(f) = &r {
            specs.push(f.spec.clone());
        }
        summaries.push(summarize(kind, &r, &cfg.epsilons));
    }
    if specs.is_empty() {
        let why: Vec<String> = summaries.iter().filter_map(|s| s.error.clone()).collect();
        return Err(CliError::Fit(why.join("; ")));
    }
    Ok((summaries, specs))
}

fn family_index(kind: FamilyKind) -> u64 {
    FamilyKind::ALL.iter().position(|&k| k == kind).unwrap_or(0) as u64
}

fn bootstrap_m(cfg: &Resolved) -> usize {
    cfg.m.unwrap_or(match cfg.profile {
        ProfileArg::Desk => 10_000,
        ProfileArg::Full => 100_000,
    })
}

pub fn cmd_fit(args: &FitArgs, cfg: Resolved) -> Result<RunReport, CliError> {
    let clock = Instant::now();
    let sample = load_input(&args.input)?
        .ok_or_else(|| CliError::Config("fit needs --input".into()))?;
    let custom = if args.starts.is_empty() {
        None
    } else {
        if cfg.families.len() != 1 {
            return Err(CliError::Config("--start requires exactly one --family".into()));
        }
        let starts = args.starts.iter().map(|s| parse_vector(s)).collect::<Result<_, _>>()?;
        Some(StartSet::new(cfg.families[0], starts)?)
    };
    let mut report = RunReport::new("fit", cfg.clone());
    report.input = Some(input_info(&sample));
    if let Some(s) = &custom {
        report.starts = s.starts.clone();
    }
    let (fits, specs) = fit_families(&sample, &cfg, custom)?;
    report.ranking = ranking(&fits);
    report.fits = fits;
    if let Some(m_b) = args.bootstrap {
        for spec in &specs {
            let stream = RngStream::new(cfg.seed, 1_000 + family_index(spec.kind));
            for (i, &epsilon) in cfg.epsilons.iter().enumerate() {
                let statistic = Statistic::Quantile { epsilon };
                let reps = bootstrap_replicates(spec, sample.len(), statistic, m_b, &stream.derive(i as u64), cfg.fit)?;
                report.bootstrap.push(CiRow {
                    model: spec.to_string(),
                    statistic,
                    interval: reps.interval(args.level)?,
                });
            }
        }
    }
    if args.common.timing {
        report.wall_clock_seconds = Some(clock.elapsed().as_secs_f64());
    }
    Ok(report)
}

pub fn cmd_reserve(args: &ReserveArgs, cfg: Resolved) -> Result<RunReport, CliError> {
    let clock = Instant::now();
    let mut report = RunReport::new("reserve", cfg.clone());
    let mut specs: Vec<FamilySpec> = args.specs.iter().map(|s| parse_spec(s)).collect::<Result<_, _>>()?;
    let mut n = None;
    if let Some(sample) = load_input(&args.input)? {
        report.input = Some(input_info(&sample));
        n = Some(sample.len());
        let (fits, fitted) = fit_families(&sample, &cfg, None)?;
        report.ranking = ranking(&fits);
        report.fits = fits;
        specs.extend(fitted);
    }
    if specs.is_empty() {
        return Err(CliError::Config("reserve needs --input or --spec".into()));
    }
    if let Some(s) = args.scale {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Config(format!("scale must be positive, got {s}")));
        }
    }
    let m = cfg.m.unwrap_or(powerburr::risk::DEFAULT_M);
    for (si, spec) in specs.iter().enumerate() {
        let base = RngStream::new(cfg.seed, si as u64);
        for (li, &lambda) in cfg.lambdas.iter().enumerate() {
            let portfolio = PortfolioSpec::from_lambda(lambda)?;
            for estimate in reserves_from_model(&portfolio, spec, &cfg.epsilons, m, &base.derive(li as u64))? {
                report.reserves.push(ReserveRow {
                    model: spec.to_string(),
                    scaled: args.scale.map(|s| estimate.q_star / s),
                    estimate,
                });
            }
            if let (Some(m_b), Some(n)) = (args.bootstrap, n) {
                for (ei, &epsilon) in cfg.epsilons.iter().enumerate() {
                    let statistic = Statistic::Reserve {
                        lambda,
                        epsilon,
                        m: bootstrap_m(&cfg),
                    };
                    let stream = base.derive(1_000_000 + (li * 1000 + ei) as u64);
                    let reps = bootstrap_replicates(spec, n, statistic, m_b, &stream, cfg.fit)?;
                    report.bootstrap.push(CiRow {
                        model: spec.to_string(),
                        statistic,
                        interval: reps.interval(args.level)?,
                    });
                }
            }
        }
    }
    if args.common.timing {
        report.wall_clock_seconds = Some(clock.elapsed().as_secs_f64());
    }
    Ok(report)
}

pub fn cmd_backtest(args: &BacktestArgs, cfg: Resolved) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("backtest", cfg.clone());
    if let Some(n) = args.count_n {
        if args.exceedances.len() != cfg.epsilons.len() {
            return Err(CliError::Config("give one --exceedances per --epsilon".into()));
        }
        for (&e, &k) in cfg.epsilons.iter().zip(&args.exceedances) {
            report.backtests.push(BacktestRow {
                model: None,
                report: backtest_counts(n, e, k)?,
            });
        }
        return Ok(report);
    }
    let sample = load_input(&args.input)?
        .ok_or_else(|| CliError::Config("backtest needs --input or --count-n".into()))?;
    report.input = Some(input_info(&sample));
    if !args.thresholds.is_empty() {
        if args.thresholds.len() != cfg.epsilons.len() {
            return Err(CliError::Config("give one --threshold per --epsilon".into()));
        }
        for (&e, &q) in cfg.epsilons.iter().zip(&args.thresholds) {
            report.backtests.push(BacktestRow {
                model: None,
                report: binomial_backtest(&sample, q, e)?,
            });
        }
        return Ok(report);
    }
    let (fits, specs) = fit_families(&sample, &cfg, None)?;
    report.ranking = ranking(&fits);
    report.fits = fits;
    for spec in &specs {
        let d = Distribution::new(spec)?;
        for &e in &cfg.epsilons {
            report.backtests.push(BacktestRow {
                model: Some(spec.to_string()),
                report: binomial_backtest(&sample, d.quantile(1.0 - e)?, e)?,
            });
        }
    }
    Ok(report)
}

pub fn cmd_sample(args: &SampleArgs, cfg: &Resolved) -> Result<String, CliError> {
    let spec = parse_spec(&args.spec)?;
    if args.n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    let mut rng = RngStream::new(cfg.seed, 0);
    let values = Sampler::from_spec(&spec)?.draw_n(&mut rng, args.n);
    let mut out = String::from("claim\n");
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    Ok(out)
}

/// Study output: one [`StudyResult`] per true family plus rendered tables.
#[derive(Debug, Serialize)]
pub struct StudyReport {
    pub command: &'static str,
    pub config: Resolved,
    pub results: Vec<StudyResult>,
}

pub fn table_slug(t: &Target) -> String {
    match t.lambda {
        None => format!("quantile_eps{}", t.epsilon),
        Some(l) => format!("reserve_lambda{l}_eps{}", t.epsilon),
    }
}

pub fn cmd_study(args: &StudyArgs, cfg: Resolved) -> Result<(StudyReport, Vec<(String, String, String)>), CliError> {
    let truths = if !cfg.true_families.is_empty() {
        cfg.true_families.clone()
    } else if !args.true_families.is_empty() {
        parse_families(&args.true_families)?
    } else {
        FamilyKind::CLASSICAL.to_vec()
    };
    let mut results = Vec::new();
    for &kind in &truths {
        let mut sc = StudyConfig::profile(FamilySpec::study_default(kind), cfg.study_profile());
        sc.n = cfg.n.or(args.n).unwrap_or(sc.n);
        sc.replications = cfg.replications.or(args.replications).unwrap_or(sc.replications);
        sc.truth_m = cfg.truth_m.or(args.truth_m).unwrap_or(sc.truth_m);
        sc.m = cfg.m.unwrap_or(sc.m);
        sc.lambdas = cfg.lambdas.clone();
        sc.epsilons = cfg.epsilons.clone();
        sc.families = cfg.families.clone();
        sc.master_seed = cfg.seed;
        sc.fit = cfg.fit;
        sc.progress = args.progress;
        results.push(run_study(&sc)?);
    }
    let targets = results[0].targets.clone();
    let tables = targets
        .iter()
        .map(|t| {
            let table = emit_table(&results, t);
            (table_slug(t), table.to_csv(), table.to_text(3))
        })
        .collect();
    let mut resolved = cfg;
    resolved.true_families = truths;
    Ok((
        StudyReport {
            command: "study",
            config: resolved,
            results,
        },
        tables,
    ))
}

pub fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Other(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
