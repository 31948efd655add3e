use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::summary::Summary;
use crate::estimate::Measure;
use crate::procgen::Family;

pub const REPORT_HEADER: &str = "method,family,param,n,h,mean,sd,median,iqr,reps";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: Measure,
    pub family: Family,
    pub param: String,
    pub n: usize,
    pub h: usize,
    /// `None` when every replication of the cell failed.
    pub summary: Option<Summary>,
    /// Successful replications.
    pub reps: usize,
    pub failures: usize,
    pub first_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailedCell {
    pub method: Measure,
    pub param: String,
    pub n: usize,
    pub h: usize,
    pub failures: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMetadata {
    pub version: String,
    pub rng: String,
    pub threads: usize,
    pub base_seed: u64,
    pub seed_policy: String,
    pub window_mode: String,
    pub vector_series: String,
    pub failed_cells: Vec<FailedCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub metadata: ExperimentMetadata,
}

impl ExperimentReport {
    pub fn row(&self, method: Measure, param: &str, n: usize, h: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.param == param && r.n == n && r.h == h)
    }

    /// CSV with [`REPORT_HEADER`]; statistics of failed cells are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let stats = match &r.summary {
                Some(s) => [s.mean, s.sd, s.median, s.iqr].map(format_sig).join(","),
                None => ",,,".to_string(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.method.label(),
                r.family,
                r.param,
                r.n,
                r.h,
                stats,
                r.reps
            );
        }
        out
    }

    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&self.metadata).expect("metadata serializes")
    }
}

/// Six significant digits in the style of C's `%g`: fixed notation for
/// decimal exponents in `-4..6`, scientific otherwise, trailing zeros removed.
pub fn format_sig(v: f64) -> String {
    const SIG: usize = 6;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIG - 1, v);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..SIG as i32).contains(&exp) {
        let decimals = (SIG as i32 - 1 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
