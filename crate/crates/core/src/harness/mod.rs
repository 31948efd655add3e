//! Replicated simulation experiments over parameter grids.
//!
//! Cell `(param, n, h)` gets the key
//! `derive_key([base_seed, family tag, param bits.., n, h])`; replication `r`
//! of that cell draws from `Seed { key, stream: r }`. All methods of a cell are
//! evaluated on the same simulated paths. Vector-valued samples are turned
//! into series column by column before windows are taken.

pub mod config;
pub mod report;
pub mod summary;

use rayon::prelude::*;

pub use config::{param_label, parse_config, ExperimentConfig};
pub use report::{format_sig, ExperimentMetadata, ExperimentReport, FailedCell, ReportRow, REPORT_HEADER};
pub use summary::{quantile_sorted, summarize, Summary};

use crate::error::{Error, Result};
use crate::estimate::Measure;
use crate::kendall::{kendall_tau, kendall_tau_subsampled};
use crate::opd::{opd_from_series, signed_opd};
use crate::pearson::pearson_mv;
use crate::procgen::{Family, ProcessSpec};
use crate::rng::{derive_key, Seed, RNG_NAME};

pub const WINDOW_MODE: &str = "overlapping";
pub const VECTOR_SERIES: &str = "n x 3 vector draws are read column by column into series of length 3n";
pub const SEED_POLICY: &str =
    "cell key = derive_key(base_seed, family tag, parameter bits, n, h); replication r uses stream r of the cell key";

/// Seed of replication `rep` in cell `(params, n, h)`.
pub fn cell_seed(base_seed: u64, family: Family, params: &[f64], n: usize, h: usize, rep: u64) -> Seed {
    let mut parts = vec![base_seed, family.tag()];
    parts.extend(params.iter().map(|p| p.to_bits()));
    parts.push(n as u64);
    parts.push(h as u64);
    Seed::new(derive_key(&parts), rep)
}

/// One estimate of `method` on a simulated pair of series.
pub fn evaluate(method: Measure, x: &[f64], y: &[f64], h: usize, subsample_pairs: Option<usize>, seed: Seed) -> Result<f64> {
    match method {
        Measure::Opd => opd_from_series(x, y, h, 0).map(|e| e.value),
        Measure::OpdSigned => signed_opd(x, y, h),
        Measure::Kendall => match subsample_pairs {
            Some(p) => kendall_tau_subsampled(x, y, h, p, seed).map(|e| e.value),
            None => kendall_tau(x, y, h).map(|e| e.value),
        },
        Measure::Pearson => pearson_mv(x, y, h).map(|e| e.value),
    }
}

/// Per-replication estimates of one cell, indexed `[method][rep]`.
/// Methods beyond their replication cap yield `None`.
pub fn run_cell(config: &ExperimentConfig, params: &[f64], n: usize, h: usize) -> Vec<Vec<Option<Result<f64>>>> {
    let spec = ProcessSpec {
        family: config.family,
        params: params.to_vec(),
        n,
        seed: config.base_seed,
    };
    let per_rep: Vec<Vec<Option<Result<f64>>>> = (0..config.reps)
        .into_par_iter()
        .map(|r| {
            let seed = cell_seed(config.base_seed, config.family, params, n, h, r as u64);
            let sample = spec.generate_with(seed).map(|s| s.into_series());
            config
                .methods
                .iter()
                .map(|&m| {
                    (r < config.reps_for(m)).then(|| match &sample {
                        Ok((x, y)) => evaluate(m, x, y, h, config.subsample_pairs, seed.derive(1)),
                        Err(e) => Err(e.clone()),
                    })
                })
                .collect()
        })
        .collect();
    (0..config.methods.len())
        .map(|k| per_rep.iter().map(|rep| rep[k].clone()).collect())
        .collect()
}

fn summarize_cell(results: &[Option<Result<f64>>]) -> (Vec<f64>, usize, Option<String>) {
    let mut values = Vec::new();
    let mut failures = 0;
    let mut first_error = None;
    for r in results.iter().flatten() {
        match r {
            Ok(v) => values.push(*v),
            Err(e) => {
                failures += 1;
                first_error.get_or_insert_with(|| format!("{}: {e}", e.name()));
            }
        }
    }
    (values, failures, first_error)
}

/// Runs every cell of the grid. Estimator failures are recorded per cell;
/// only an invalid config is an error.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(|| run_grid(config)),
        None => run_grid(config),
    }
}

fn run_grid(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut cells = Vec::new();
    for params in &config.params {
        for &n in &config.n_grid {
            for &h in &config.h_grid {
                cells.push((params.clone(), n, h, run_cell(config, params, n, h)));
            }
        }
    }
    let mut rows = Vec::new();
    let mut failed_cells = Vec::new();
    for (k, &method) in config.methods.iter().enumerate() {
        for (params, n, h, results) in &cells {
            let (values, failures, first_error) = summarize_cell(&results[k]);
            let param = param_label(params);
            if let Some(error) = &first_error {
                failed_cells.push(FailedCell {
                    method,
                    param: param.clone(),
                    n: *n,
                    h: *h,
                    failures,
                    error: error.clone(),
                });
            }
            rows.push(ReportRow {
                method,
                family: config.family,
                param,
                n: *n,
                h: *h,
                summary: summarize(&values).ok(),
                reps: values.len(),
                failures,
                first_error,
            });
        }
    }
    Ok(ExperimentReport {
        rows,
        metadata: ExperimentMetadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_NAME.to_string(),
            threads: rayon::current_num_threads(),
            base_seed: config.base_seed,
            seed_policy: SEED_POLICY.to_string(),
            window_mode: WINDOW_MODE.to_string(),
            vector_series: VECTOR_SERIES.to_string(),
            failed_cells,
        },
    })
}
