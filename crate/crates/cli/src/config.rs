//! Run configuration.
//!
//! Precedence, highest first: the `--config` TOML file, command-line flags,
//! built-in defaults. `POWERBURR_THREADS` only supplies the default thread
//! count.
//!
//! ```toml
//! seed = 7
//! profile = "desk"
//! m = 10000
//! epsilons = [0.05, 0.01]
//! lambdas = [10.0, 100.0]
//! families = ["gamma", "6par"]
//!
//! [study]
//! true_families = ["gamma"]
//! n = 500
//! replications = 20
//! truth_m = 100000
//!
//! [fit]
//! max_iter = 500
//! grad_tol = 1e-6
//! ```

use std::path::Path;

use powerburr::fitting::FitOptions;
use powerburr::study::Profile;
use powerburr::{FamilyKind, FamilySpec};
use serde::{Deserialize, Serialize};

use crate::args::{Common, ProfileArg};
use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub profile: Option<ProfileArg>,
    pub m: Option<usize>,
    pub epsilons: Option<Vec<f64>>,
    pub lambdas: Option<Vec<f64>>,
    pub families: Option<Vec<String>>,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub fit: FitSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub true_families: Option<Vec<String>>,
    pub n: Option<usize>,
    pub replications: Option<usize>,
    pub truth_m: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub max_iter: Option<usize>,
    pub grad_tol: Option<f64>,
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Everything a run depends on, after precedence is applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub seed: u64,
    /// `None`: the pool's default. Not part of the numerical configuration.
    #[serde(skip)]
    pub threads: Option<usize>,
    pub profile: ProfileArg,
    pub m: Option<usize>,
    pub epsilons: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub families: Vec<FamilyKind>,
    pub fit: FitOptions,
    pub true_families: Vec<FamilyKind>,
    pub n: Option<usize>,
    pub replications: Option<usize>,
    pub truth_m: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 1;

pub fn parse_families(names: &[String]) -> Result<Vec<FamilyKind>, CliError> {
    let mut out: Vec<FamilyKind> = names
        .iter()
        .map(|s| {
            s.parse::<FamilyKind>()
                .map_err(|_| CliError::Config(format!("unknown family {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// `kind:p1,p2,…`
pub fn parse_spec(s: &str) -> Result<FamilySpec, CliError> {
    let (kind, params) = s
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("model {s:?} is not of the form kind:p1,p2,…")))?;
    let kind: FamilyKind = kind
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("unknown family {kind:?}")))?;
    let params = parse_vector(params)?;
    Ok(FamilySpec::new(kind, params)?)
}

pub fn parse_vector(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("cannot parse {p:?} as a number")))
        })
        .collect()
}

impl Resolved {
    pub fn new(common: &Common) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(p) => load(p)?,
            None => FileConfig::default(),
        };
        let families = match &file.families {
            Some(f) => parse_families(f)?,
            None if !common.families.is_empty() => parse_families(&common.families)?,
            None => FamilyKind::ALL.to_vec(),
        };
        let true_families = match &file.study.true_families {
            Some(f) => parse_families(f)?,
            None => Vec::new(),
        };
        let mut fit = FitOptions::default();
        if let Some(v) = file.fit.max_iter {
            fit.optim.max_iter = v;
        }
        if let Some(v) = file.fit.grad_tol {
            fit.optim.grad_tol = v;
        }
        let pick = |f: Option<Vec<f64>>, flags: &Vec<f64>, default: &[f64]| {
            f.unwrap_or_else(|| if flags.is_empty() { default.to_vec() } else { flags.clone() })
        };
        let r = Self {
            seed: file.seed.or(common.seed).unwrap_or(DEFAULT_SEED),
            threads: file.threads.or(common.threads),
            profile: file.profile.or(common.profile).unwrap_or(ProfileArg::Desk),
            m: file.m.or(common.m),
            epsilons: pick(file.epsilons, &common.epsilons, &[0.05, 0.01]),
            lambdas: pick(file.lambdas, &common.lambdas, &[10.0, 100.0, 1000.0]),
            families,
            fit,
            true_families,
            n: file.study.n,
            replications: file.study.replications,
            truth_m: file.study.truth_m,
        };
        if r.epsilons.is_empty() {
            return Err(CliError::Config("at least one epsilon is required".into()));
        }
        if let Some(&e) = r.epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return Err(CliError::Config(format!("epsilon {e} is outside (0, 1)")));
        }
        if let Some(&l) = r.lambdas.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(CliError::Config(format!("lambda {l} must be positive")));
        }
        if r.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        Ok(r)
    }

    pub fn study_profile(&self) -> Profile {
        match self.profile {
            ProfileArg::Desk => Profile::Desk,
            ProfileArg::Full => Profile::Full,
        }
    }
}
