use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::normal_quantile;

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Opd,
    OpdSigned,
    Kendall,
    Pearson,
}

impl Measure {
    pub fn label(self) -> &'static str {
        match self {
            Measure::Opd => "opd",
            Measure::OpdSigned => "opd-signed",
            Measure::Kendall => "kendall",
            Measure::Pearson => "pearson",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "opd" => Ok(Measure::Opd),
            "opd-signed" => Ok(Measure::OpdSigned),
            "kendall" => Ok(Measure::Kendall),
            "pearson" => Ok(Measure::Pearson),
            other => Err(Error::InvalidInput(format!("unknown method `{other}`"))),
        }
    }
}

/// Point estimate of a dependence measure with optional asymptotic inference.
///
/// `variance` is the asymptotic variance on the `sqrt(m)` scale, where `m`
/// is `sample_size` (windows or vectors actually used); the variance of the
/// estimate itself is `variance / m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceEstimate {
    pub measure: Measure,
    pub value: f64,
    pub variance: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub order: usize,
    /// Length of the input series, or number of vector pairs.
    pub n: usize,
    pub shift: usize,
    pub sample_size: usize,
    /// Set when a negative variance estimate was clamped to zero.
    pub variance_clamped: bool,
}

impl DependenceEstimate {
    pub(crate) fn point(measure: Measure, value: f64, order: usize, n: usize, shift: usize, sample_size: usize) -> Self {
        Self {
            measure,
            value,
            variance: None,
            ci_low: None,
            ci_high: None,
            order,
            n,
            shift,
            sample_size,
            variance_clamped: false,
        }
    }

    /// Attaches a variance (clamped at zero) and the matching normal interval.
    pub(crate) fn with_variance(mut self, variance: f64, confidence: f64) -> Result<Self> {
        let z = z_value(confidence)?;
        self.variance_clamped = variance < 0.0 || variance.is_nan();
        let variance = if self.variance_clamped { 0.0 } else { variance };
        let half = z * (variance / self.sample_size as f64).sqrt();
        self.variance = Some(variance);
        self.ci_low = Some(self.value - half);
        self.ci_high = Some(self.value + half);
        Ok(self)
    }

    pub fn standard_error(&self) -> Option<f64> {
        self.variance.map(|v| (v / self.sample_size as f64).sqrt())
    }
}

/// Two-sided normal critical value for the given confidence level.
pub fn z_value(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidInput(format!(
            "confidence {confidence} must lie in (0, 1)"
        )));
    }
    Ok(normal_quantile(0.5 + confidence / 2.0))
}
