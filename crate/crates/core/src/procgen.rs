//! Seeded generators for the bivariate Gaussian process families.
//!
//! All generators draw standard normals through [`crate::rng`] in a fixed
//! order, so a given seed reproduces the output bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::block_multinormal_model;
use crate::rng::{standard_normal, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    IidAr1Pair,
    BlockMultinormal,
    BivAr1,
    BivAr1Rotation,
    BivAr2,
    ShiftedAr1,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::IidAr1Pair,
        Family::BlockMultinormal,
        Family::BivAr1,
        Family::BivAr1Rotation,
        Family::BivAr2,
        Family::ShiftedAr1,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Family::IidAr1Pair => "iid-ar1-pair",
            Family::BlockMultinormal => "block-multinormal",
            Family::BivAr1 => "biv-ar1",
            Family::BivAr1Rotation => "biv-ar1-rotation",
            Family::BivAr2 => "biv-ar2",
            Family::ShiftedAr1 => "shifted-ar1",
        }
    }

    /// Parameter names in the order they are given.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::IidAr1Pair | Family::BlockMultinormal | Family::ShiftedAr1 => &["rho"],
            Family::BivAr1 | Family::BivAr1Rotation | Family::BivAr2 => &["a", "b"],
        }
    }

    /// Stable numeric tag used in seed derivation.
    pub fn tag(self) -> u64 {
        Family::ALL.iter().position(|&f| f == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Family::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown process family `{s}`")))
    }
}

/// One simulated sample: two series, or two sequences of 3-vectors for the
/// block-multinormal family.
#[derive(Clone, Debug, PartialEq)]
pub enum Sample {
    Series { x: Vec<f64>, y: Vec<f64> },
    Vectors { x: Vec<[f64; 3]>, y: Vec<[f64; 3]> },
}

impl Sample {
    pub fn len(&self) -> usize {
        match self {
            Sample::Series { x, .. } => x.len(),
            Sample::Vectors { x, .. } => x.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Series view. Vector samples are read column by column, the `n x 3`
    /// draw matrix becoming a series of length `3n`.
    pub fn into_series(self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Sample::Series { x, y } => (x, y),
            Sample::Vectors { x, y } => (flatten_columns(&x), flatten_columns(&y)),
        }
    }
}

pub fn flatten_columns(rows: &[[f64; 3]]) -> Vec<f64> {
    (0..3).flat_map(|c| rows.iter().map(move |r| r[c])).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub family: Family,
    pub params: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

impl ProcessSpec {
    pub fn new(family: Family, params: Vec<f64>, n: usize, seed: u64) -> Result<Self> {
        let spec = Self { family, params, n, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(self.family, &self.params)?;
        if self.n == 0 {
            return Err(Error::InvalidInput("length n must be positive".into()));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Sample> {
        self.generate_with(Seed::from(self.seed))
    }

    /// Generates with an explicit seed, ignoring `self.seed`.
    pub fn generate_with(&self, seed: Seed) -> Result<Sample> {
        self.validate()?;
        let p = &self.params;
        let n = self.n;
        Ok(match self.family {
            Family::IidAr1Pair => {
                let (x, y) = gen_iid_ar1_pair(p[0], n, seed)?;
                Sample::Series { x, y }
            }
            Family::BlockMultinormal => {
                let (x, y) = gen_block_multinormal(p[0], n, seed)?;
                Sample::Vectors { x, y }
            }
            Family::BivAr1 | Family::BivAr1Rotation => {
                let (x, y) = gen_biv_ar1(p[0], p[1], n, seed, self.family == Family::BivAr1Rotation)?;
                Sample::Series { x, y }
            }
            Family::BivAr2 => {
                let (x, y) = gen_biv_ar2(p[0], p[1], n, seed)?;
                Sample::Series { x, y }
            }
            Family::ShiftedAr1 => {
                let (x, y) = gen_shifted_ar1(p[0], n, seed)?;
                Sample::Series { x, y }
            }
        })
    }
}

fn validate_params(family: Family, params: &[f64]) -> Result<()> {
    let names = family.param_names();
    if params.len() != names.len() {
        return Err(Error::InvalidInput(format!(
            "family {family} takes {} parameter(s) ({}), got {}",
            names.len(),
            names.join(", "),
            params.len()
        )));
    }
    if params.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite parameter".into()));
    }
    match family {
        Family::IidAr1Pair | Family::ShiftedAr1 => check_rho(params[0]),
        Family::BlockMultinormal => block_multinormal_model(params[0]).map(|_| ()),
        _ => check_ab(params[0], params[1]),
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho.abs() < 1.0) {
        return Err(Error::NonStationary(format!("|rho| = {} must be below 1", rho.abs())));
    }
    Ok(())
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a * a + b * b >= 1.0 {
        return Err(Error::NonStationary(format!(
            "a^2 + b^2 = {} must be below 1",
            a * a + b * b
        )));
    }
    Ok(())
}

fn ar1_path<R: RngCore>(rho: f64, len: usize, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let mut v = standard_normal(rng) / (1.0 - rho * rho).sqrt();
    out.push(v);
    for _ in 1..len {
        v = rho * v + standard_normal(rng);
        out.push(v);
    }
    out
}

/// Two independent stationary AR(1) paths `X_i = rho X_{i-1} + eps_i`.
/// The whole `x` path is drawn before `y`.
pub fn gen_iid_ar1_pair(rho: f64, n: usize, seed: impl Into<Seed>) -> Result<(Vec<f64>, Vec<f64>)> {
    check_rho(rho)?;
    let mut rng = seed.into().rng();
    let x = ar1_path(rho, n, &mut rng);
    let y = ar1_path(rho, n, &mut rng);
    Ok((x, y))
}

/// `n` i.i.d. draws of `(X, Y)` with identity blocks and all cross
/// covariances equal to `rho`.
pub fn gen_block_multinormal(rho: f64, n: usize, seed: impl Into<Seed>) -> Result<(Vec<[f64; 3]>, Vec<[f64; 3]>)> {
    let sampler = block_multinormal_model(rho)?.sampler()?;
    let mut rng = seed.into().rng();
    let mut noise = [0.0; 6];
    let mut draw = [0.0; 6];
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        sampler.sample_into(&mut rng, &mut noise, &mut draw);
        x.push([draw[0], draw[1], draw[2]]);
        y.push([draw[3], draw[4], draw[5]]);
    }
    Ok((x, y))
}

fn ar_matrix(a: f64, b: f64, rotation: bool) -> [[f64; 2]; 2] {
    if rotation {
        [[a, b], [-b, a]]
    } else {
        [[a, b], [b, -a]]
    }
}

/// Stationary bivariate AR(1) `W_i = A W_{i-1} + xi_i`, started from
/// `N(0, I / (1 - a^2 - b^2))`.
pub fn gen_biv_ar1(a: f64, b: f64, n: usize, seed: impl Into<Seed>, rotation: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    check_ab(a, b)?;
    let m = ar_matrix(a, b, rotation);
    let mut rng = seed.into().rng();
    let sd = (1.0 / (1.0 - a * a - b * b)).sqrt();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    if n == 0 {
        return Ok((x, y));
    }
    let (mut u, mut v) = (sd * standard_normal(&mut rng), sd * standard_normal(&mut rng));
    x.push(u);
    y.push(v);
    for _ in 1..n {
        let e = standard_normal(&mut rng);
        let f = standard_normal(&mut rng);
        (u, v) = (m[0][0] * u + m[0][1] * v + e, m[1][0] * u + m[1][1] * v + f);
        x.push(u);
        y.push(v);
    }
    Ok((x, y))
}

/// Lag-2 recursion `W_i = A W_{i-2} + xi_i` with `A = (a b; b -a)`; the first
/// two points are independent standard normals and no burn-in is applied.
pub fn gen_biv_ar2(a: f64, b: f64, n: usize, seed: impl Into<Seed>) -> Result<(Vec<f64>, Vec<f64>)> {
    check_ab(a, b)?;
    let m = ar_matrix(a, b, false);
    let mut rng = seed.into().rng();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let e = standard_normal(&mut rng);
        let f = standard_normal(&mut rng);
        if i < 2 {
            x.push(e);
            y.push(f);
        } else {
            let (u, v) = (x[i - 2], y[i - 2]);
            x.push(m[0][0] * u + m[0][1] * v + e);
            y.push(m[1][0] * u + m[1][1] * v + f);
        }
    }
    Ok((x, y))
}

/// A stationary AR(1) path of length `n + 1`; `x` is its first `n` points
/// and `y` the last `n`, so `y[i] = x[i + 1]`.
pub fn gen_shifted_ar1(rho: f64, n: usize, seed: impl Into<Seed>) -> Result<(Vec<f64>, Vec<f64>)> {
    check_rho(rho)?;
    let mut rng = seed.into().rng();
    let path = ar1_path(rho, n + 1, &mut rng);
    Ok((path[..n].to_vec(), path[1..].to_vec()))
}
