//! Claim samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positive loss amounts in currency units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimSample {
    values: Vec<f64>,
    pub source: String,
    pub deductible_subtracted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl ClaimSample {
    /// Fails on an empty sample or on any value that is not finite and
    /// strictly positive.
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveClaim { index: i, value: v });
        }
        Ok(Self {
            values,
            source: source.into(),
            deductible_subtracted: false,
        })
    }

    pub fn synthetic(values: Vec<f64>) -> Result<Self> {
        Self::new(values, "synthetic")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn summary(&self) -> SampleSummary {
        let n = self.values.len();
        let mean = self.values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        SampleSummary {
            n,
            mean,
            sd: var.sqrt(),
            min: self.values.iter().copied().fold(f64::INFINITY, f64::min),
            max: self.values.iter().copied().fold(0.0, f64::max),
        }
    }
}
