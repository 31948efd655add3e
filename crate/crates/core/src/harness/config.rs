//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # independent AR(1) pairs
//! family  = iid-ar1-pair
//! params  = 0.1, 0.5, 0.9     # two-parameter families: 0.7:-0.7
//! n       = 100, 300, 500
//! h       = 1, 2, 3
//! methods = opd, kendall
//! reps    = 1000
//! seed    = 42
//! ```
//!
//! Optional keys: `kendall_reps`, `subsample_pairs`, `threads`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::Measure;
use crate::pattern::MAX_ORDER;
use crate::procgen::{Family, ProcessSpec};

pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;

const KEYS: [&str; 10] = [
    "family",
    "params",
    "n",
    "h",
    "methods",
    "reps",
    "seed",
    "kendall_reps",
    "subsample_pairs",
    "threads",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    /// One entry per grid point; each holds the family's parameters.
    pub params: Vec<Vec<f64>>,
    pub n_grid: Vec<usize>,
    pub h_grid: Vec<usize>,
    pub methods: Vec<Measure>,
    pub reps: usize,
    pub base_seed: u64,
    /// Caps the replications evaluated by the Kendall estimator.
    pub kendall_reps: Option<usize>,
    /// Estimates Kendall's tau from this many random window pairs.
    pub subsample_pairs: Option<usize>,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() {
            return Err(Error::config("params", "grid is empty"));
        }
        for p in &self.params {
            ProcessSpec::new(self.family, p.clone(), 1, 0)
                .map_err(|e| Error::config("params", e.to_string()))?;
        }
        if self.n_grid.is_empty() {
            return Err(Error::config("n", "grid is empty"));
        }
        if self.h_grid.is_empty() {
            return Err(Error::config("h", "grid is empty"));
        }
        if let Some(&h) = self.h_grid.iter().find(|&&h| h == 0 || h > MAX_ORDER) {
            return Err(Error::config("h", format!("order {h} outside 1..={MAX_ORDER}")));
        }
        let max_h = *self.h_grid.iter().max().unwrap();
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < max_h + 2) {
            return Err(Error::config("n", format!("length {n} is shorter than h + 2 = {}", max_h + 2)));
        }
        if self.methods.is_empty() {
            return Err(Error::config("methods", "no methods given"));
        }
        if self.reps == 0 {
            return Err(Error::config("reps", "must be at least 1"));
        }
        if self.kendall_reps == Some(0) {
            return Err(Error::config("kendall_reps", "must be at least 1"));
        }
        if self.subsample_pairs == Some(0) {
            return Err(Error::config("subsample_pairs", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        Ok(())
    }

    /// Replications evaluated for `method`.
    pub fn reps_for(&self, method: Measure) -> usize {
        match (method, self.kendall_reps) {
            (Measure::Kendall, Some(k)) => k.min(self.reps),
            _ => self.reps,
        }
    }

    /// Renders the config in the file format; parsing the result gives back
    /// an equal config.
    pub fn to_config_string(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "family = {}", self.family);
        let _ = writeln!(s, "params = {}", join(self.params.iter().map(|p| param_label(p)).collect()));
        let _ = writeln!(s, "n = {}", join(self.n_grid.iter().map(|v| v.to_string()).collect()));
        let _ = writeln!(s, "h = {}", join(self.h_grid.iter().map(|v| v.to_string()).collect()));
        let _ = writeln!(s, "methods = {}", join(self.methods.iter().map(|m| m.label().to_string()).collect()));
        let _ = writeln!(s, "reps = {}", self.reps);
        let _ = writeln!(s, "seed = {}", self.base_seed);
        if let Some(k) = self.kendall_reps {
            let _ = writeln!(s, "kendall_reps = {k}");
        }
        if let Some(p) = self.subsample_pairs {
            let _ = writeln!(s, "subsample_pairs = {p}");
        }
        if let Some(t) = self.threads {
            let _ = writeln!(s, "threads = {t}");
        }
        s
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_config(text)
    }
}

/// Grid-point label: parameters joined by `:`.
pub fn param_label(params: &[f64]) -> String {
    params.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(":")
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::config(key, format!("cannot parse `{s}`"))))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{}`", value.trim())))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config("<line>", format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if entries.insert(key, value.trim()).is_some() {
            return Err(Error::config(key, "given more than once"));
        }
    }
    let required = |key: &str| {
        entries
            .get(key)
            .copied()
            .ok_or_else(|| Error::config(key, "missing required key"))
    };
    let family: Family = required("family")?
        .parse()
        .map_err(|e: Error| Error::config("family", e.to_string()))?;
    let params = required("params")?
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|point| parse_list::<f64>("params", &point.replace(':', ",")))
        .collect::<Result<Vec<_>>>()?;
    let methods = parse_list::<String>("methods", required("methods")?)?
        .iter()
        .map(|m| m.parse::<Measure>().map_err(|e| Error::config("methods", e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let optional = |key: &str| entries.get(key).map(|v| parse_one::<usize>(key, v)).transpose();
    let config = ExperimentConfig {
        family,
        params,
        n_grid: parse_list("n", required("n")?)?,
        h_grid: parse_list("h", required("h")?)?,
        methods,
        reps: optional("reps")?.unwrap_or(DEFAULT_REPS),
        base_seed: entries
            .get("seed")
            .map(|v| parse_one::<u64>("seed", v))
            .transpose()?
            .unwrap_or(DEFAULT_SEED),
        kendall_reps: optional("kendall_reps")?,
        subsample_pairs: optional("subsample_pairs")?,
        threads: optional("threads")?,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# comment line\nfamily = biv-ar1\nparams = 0.7:-0.7, 0.5:0.1  # two points\nn = 100, 500\nh = 1,2\nmethods = opd, pearson\nreps = 10\nseed = 5\n";

    #[test]
    fn parses_and_round_trips() {
        let c = parse_config(SAMPLE).unwrap();
        assert_eq!(c.family, Family::BivAr1);
        assert_eq!(c.params, vec![vec![0.7, -0.7], vec![0.5, 0.1]]);
        assert_eq!(c.n_grid, vec![100, 500]);
        assert_eq!(c.methods, vec![Measure::Opd, Measure::Pearson]);
        assert_eq!(c.kendall_reps, None);
        assert_eq!(parse_config(&c.to_config_string()).unwrap(), c);
    }

    fn key_of(text: &str) -> String {
        match parse_config(text) {
            Err(Error::InvalidConfig { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(key_of(&SAMPLE.replace("reps = 10", "reps = ten")), "reps");
        assert_eq!(key_of(&SAMPLE.replace("family = biv-ar1\n", "")), "family");
        assert_eq!(key_of(&SAMPLE.replace("0.7:-0.7", "0.9:0.9")), "params");
        assert_eq!(key_of(&SAMPLE.replace("opd, pearson", "opd, spearman")), "methods");
        assert_eq!(key_of(&format!("{SAMPLE}colour = red\n")), "colour");
        assert_eq!(key_of(&SAMPLE.replace("h = 1,2", "h = 0")), "h");
        assert_eq!(key_of(&SAMPLE.replace("reps = 10", "reps = 0")), "reps");
    }
}
