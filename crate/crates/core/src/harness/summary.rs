use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Table statistics of one cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (denominator `count - 1`; zero for one value).
    pub sd: f64,
    pub median: f64,
    pub iqr: f64,
    pub count: usize,
}

/// Quantile of sorted data by linear interpolation between order statistics
/// (Hyndman-Fan type 7, the R default): position `(n - 1) p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn summarize(samples: &[f64]) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples to summarize".into()));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN sample".into()));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Summary {
        mean,
        sd,
        median: quantile_sorted(&sorted, 0.5),
        iqr: quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25),
        count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let s = summarize(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.sd, s.median, s.iqr), (1.0, 0.0, 1.0, 0.0));
        assert_eq!(summarize(&[4.0, 1.0, 3.0, 2.0]).unwrap().median, 2.5);
        let s = summarize(&[7.0]).unwrap();
        assert_eq!((s.sd, s.iqr, s.count), (0.0, 0.0, 1));
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn integer_grid_iqr() {
        let v: Vec<f64> = (0..=100).map(f64::from).collect();
        let s = summarize(&v).unwrap();
        assert_eq!(s.iqr, 50.0);
        assert_eq!(s.median, 50.0);
    }
}
