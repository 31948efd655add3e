//! Population values for zero-mean Gaussian models: closed forms for order 1,
//! a Monte Carlo orthant-probability oracle, and the pattern-wise orthant
//! decomposition of OPD.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kendall::{grad_psi, psi};
use crate::pattern::{check_order, pattern_count, PatternCode};
use crate::rng::{standard_normal, Seed};

/// Largest dimension accepted by [`mc_orthant`].
pub const MAX_ORTHANT_DIM: usize = 16;
pub const MIN_ORTHANT_SAMPLES: usize = 1000;
pub const DEFAULT_ORTHANT_SAMPLES: usize = 1_000_000;
/// Samples per independently seeded block in [`mc_orthant`].
pub const ORTHANT_BLOCK: usize = 65_536;
/// Largest order accepted by the pattern decomposition (orthant dimension `2h`).
pub const MAX_DECOMPOSITION_ORDER: usize = 3;

const PSD_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;
const JITTER: f64 = 1e-12;

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Zero-mean Gaussian law given by its covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianModel {
    covariance: DMatrix<f64>,
}

impl GaussianModel {
    pub fn new(covariance: DMatrix<f64>) -> Result<Self> {
        let d = covariance.nrows();
        if d == 0 || covariance.ncols() != d {
            return Err(Error::InvalidCovariance(format!(
                "covariance must be square and nonempty, got {}x{}",
                d,
                covariance.ncols()
            )));
        }
        if covariance.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let scale = covariance.amax().max(f64::MIN_POSITIVE);
        let asym = (&covariance - covariance.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InvalidCovariance(format!(
                "matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        let eig = SymmetricEigen::new(covariance.clone());
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if max <= 0.0 || min < -PSD_TOL * max {
            return Err(Error::InvalidCovariance(format!(
                "matrix is not positive semidefinite (eigenvalues in [{min:e}, {max:e}])"
            )));
        }
        Ok(Self { covariance })
    }

    pub fn dimension(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Law of `D W` for `W` distributed as `self`.
    pub fn linear_image(&self, d: &DMatrix<f64>) -> Result<Self> {
        if d.ncols() != self.dimension() {
            return Err(Error::InputMismatch(format!(
                "map has {} columns, model dimension is {}",
                d.ncols(),
                self.dimension()
            )));
        }
        let cov = d * &self.covariance * d.transpose();
        Self::new((&cov + cov.transpose()) * 0.5)
    }

    /// Marginal law of the coordinates `start..start + len`.
    pub fn block(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.dimension() {
            return Err(Error::InputMismatch(format!(
                "block {start}..{} outside dimension {}",
                start + len,
                self.dimension()
            )));
        }
        Self::new(self.covariance.view((start, start), (len, len)).into_owned())
    }

    /// Lower Cholesky factor; semidefinite inputs get diagonal jitter
    /// `1e-12 * lambda_max`.
    pub fn cholesky_factor(&self) -> Result<DMatrix<f64>> {
        if let Some(c) = Cholesky::new(self.covariance.clone()) {
            return Ok(c.l());
        }
        let lmax = SymmetricEigen::new(self.covariance.clone()).eigenvalues.max();
        let d = self.dimension();
        let jittered = &self.covariance + DMatrix::identity(d, d) * (JITTER * lmax);
        Cholesky::new(jittered)
            .map(|c| c.l())
            .ok_or_else(|| Error::InvalidCovariance("Cholesky factorisation failed".into()))
    }

    pub fn sampler(&self) -> Result<GaussianSampler> {
        Ok(GaussianSampler {
            factor: self.cholesky_factor()?,
        })
    }
}

/// Draws `L e` with `e` standard normal.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    factor: DMatrix<f64>,
}

impl GaussianSampler {
    pub fn dimension(&self) -> usize {
        self.factor.nrows()
    }

    /// Fills `out` with one draw, using `noise` as scratch; consumes exactly
    /// `dimension()` normals.
    pub fn sample_into<R: rand::RngCore + ?Sized>(&self, rng: &mut R, noise: &mut [f64], out: &mut [f64]) {
        let d = self.dimension();
        for e in noise[..d].iter_mut() {
            *e = standard_normal(rng);
        }
        for (i, o) in out[..d].iter_mut().enumerate() {
            let row = self.factor.row(i);
            *o = (0..=i).map(|j| row[j] * noise[j]).sum();
        }
    }

    pub fn sample<R: rand::RngCore + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let d = self.dimension();
        let mut noise = vec![0.0; d];
        let mut out = DVector::zeros(d);
        self.sample_into(rng, &mut noise, out.as_mut_slice());
        out
    }
}

fn check_correlation(r: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidCorrelation(r));
    }
    Ok(r)
}

/// `(2/pi) asin(r)`: OPD of order 1 given the correlation of the increments.
pub fn opd1_gaussian(increment_corr: f64) -> Result<f64> {
    Ok(2.0 / PI * check_correlation(increment_corr)?.asin())
}

/// `P(U <= 0, V <= 0)` for a standard bivariate normal with correlation `rho`.
pub fn bivariate_orthant(rho: f64) -> Result<f64> {
    Ok(0.25 + check_correlation(rho)?.asin() / (2.0 * PI))
}

fn check_ar1_matrix(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a * a + b * b >= 1.0 {
        return Err(Error::NonStationary(format!(
            "a^2 + b^2 = {} must be below 1",
            a * a + b * b
        )));
    }
    Ok(())
}

/// Order-1 OPD of the bivariate AR(1) with matrix `(a b; b -a)`.
pub fn ar1_opd1(a: f64, b: f64) -> Result<f64> {
    check_ar1_matrix(a, b)?;
    opd1_gaussian((-b / (1.0 - a * a).sqrt()).clamp(-1.0, 1.0))
}

/// Order-1 OPD between an AR(1) path and the same path advanced by one step.
pub fn shifted_ar1_opd1(rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho.abs() < 1.0) {
        return Err(Error::NonStationary(format!("|rho| = {} must be below 1", rho.abs())));
    }
    opd1_gaussian((rho - 1.0) / 2.0)
}

/// Fraction of draws from `model` with every coordinate `<= 0`.
///
/// Samples are split into blocks of [`ORTHANT_BLOCK`]; block `k` draws from
/// `seed.derive(k)`, so the result does not depend on the thread count.
pub fn mc_orthant(model: &GaussianModel, n_samples: usize, seed: impl Into<Seed>) -> Result<McEstimate> {
    let d = model.dimension();
    if d > MAX_ORTHANT_DIM {
        return Err(Error::InvalidInput(format!(
            "orthant dimension {d} exceeds {MAX_ORTHANT_DIM}"
        )));
    }
    if n_samples < MIN_ORTHANT_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{n_samples} orthant samples requested, at least {MIN_ORTHANT_SAMPLES} required"
        )));
    }
    let sampler = model.sampler()?;
    let seed = seed.into();
    let blocks = n_samples.div_ceil(ORTHANT_BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let len = ORTHANT_BLOCK.min(n_samples - k * ORTHANT_BLOCK);
            let mut rng = seed.derive(k as u64).rng();
            let mut noise = vec![0.0; d];
            let mut draw = vec![0.0; d];
            let mut count = 0u64;
            for _ in 0..len {
                sampler.sample_into(&mut rng, &mut noise, &mut draw);
                if draw.iter().all(|&v| v <= 0.0) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let p = hits as f64 / n_samples as f64;
    Ok(McEstimate {
        value: p,
        std_error: (p * (1.0 - p) / n_samples as f64).sqrt(),
    })
}

fn split_halves(model: &GaussianModel) -> Result<usize> {
    let d = model.dimension();
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "model dimension {d} must be even: X block followed by Y block"
        )));
    }
    Ok(d / 2)
}

/// Multivariate Kendall's tau of the two halves of `model` through orthant
/// probabilities; `std_error` is a delta-method figure over the three
/// independent orthant estimates.
pub fn kendall_gaussian(model: &GaussianModel, n_samples: usize, seed: impl Into<Seed>) -> Result<McEstimate> {
    let k = split_halves(model)?;
    let seed = seed.into();
    let px = mc_orthant(&model.block(0, k)?, n_samples, seed.derive(0))?;
    let py = mc_orthant(&model.block(k, k)?, n_samples, seed.derive(1))?;
    let pxy = mc_orthant(model, n_samples, seed.derive(2))?;
    let value = psi(px.value, py.value, pxy.value)?;
    let g = grad_psi(px.value, py.value, pxy.value)?;
    let var = (g[0] * px.std_error).powi(2) + (g[1] * py.std_error).powi(2) + (g[2] * pxy.std_error).powi(2);
    Ok(McEstimate {
        value,
        std_error: var.sqrt(),
    })
}

/// `h x (h+1)` matrix of the pattern-ordered differences
/// `w[pi_{k+1}] - w[pi_k]`; a window has pattern `pi` iff all are `<= 0`.
pub fn pattern_difference_matrix(permutation: &[usize]) -> DMatrix<f64> {
    let h = permutation.len() - 1;
    let mut d = DMatrix::zeros(h, h + 1);
    for k in 0..h {
        d[(k, permutation[k + 1])] += 1.0;
        d[(k, permutation[k])] -= 1.0;
    }
    d
}

/// `D_pi` applied to both halves of a `2(h+1)`-dimensional window model.
pub fn joint_difference_matrix(permutation: &[usize]) -> DMatrix<f64> {
    let single = pattern_difference_matrix(permutation);
    let (h, w) = single.shape();
    let mut d = DMatrix::zeros(2 * h, 2 * w);
    d.view_mut((0, 0), (h, w)).copy_from(&single);
    d.view_mut((h, w), (h, w)).copy_from(&single);
    d
}

/// Per-pattern orthant estimates behind the decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternTerm {
    pub code: usize,
    pub joint: McEstimate,
    pub p_x: McEstimate,
    pub p_y: McEstimate,
}

fn check_window_model(model: &GaussianModel, order: usize) -> Result<()> {
    check_order(order)?;
    if order > MAX_DECOMPOSITION_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            max: MAX_DECOMPOSITION_ORDER,
        });
    }
    if model.dimension() != 2 * (order + 1) {
        return Err(Error::InputMismatch(format!(
            "model dimension {} does not match 2(h+1) = {}",
            model.dimension(),
            2 * (order + 1)
        )));
    }
    Ok(())
}

/// Joint and marginal pattern probabilities of a window model, each from its
/// own orthant estimate.
pub fn pattern_terms(model: &GaussianModel, order: usize, n_samples: usize, seed: impl Into<Seed>) -> Result<Vec<PatternTerm>> {
    check_window_model(model, order)?;
    let seed = seed.into();
    let h1 = order + 1;
    let mx = model.block(0, h1)?;
    let my = model.block(h1, h1)?;
    (0..pattern_count(order)?)
        .map(|code| {
            let perm = PatternCode::new(code as u64, order)?.permutation();
            let single = pattern_difference_matrix(&perm);
            let s = seed.derive(code as u64);
            Ok(PatternTerm {
                code,
                joint: mc_orthant(&model.linear_image(&joint_difference_matrix(&perm))?, n_samples, s.derive(0))?,
                p_x: mc_orthant(&mx.linear_image(&single)?, n_samples, s.derive(1))?,
                p_y: mc_orthant(&my.linear_image(&single)?, n_samples, s.derive(2))?,
            })
        })
        .collect()
}

/// `sum_pi (P_joint - p_X p_Y) / (1 - sum_pi p_X p_Y)` with a delta-method
/// standard error treating every orthant estimate as independent.
pub fn opd_from_terms(terms: &[PatternTerm]) -> Result<McEstimate> {
    let num: f64 = terms.iter().map(|t| t.joint.value - t.p_x.value * t.p_y.value).sum();
    let den = 1.0 - terms.iter().map(|t| t.p_x.value * t.p_y.value).sum::<f64>();
    if den.abs() < crate::opd::DENOMINATOR_EPS {
        return Err(Error::DegenerateDenominator { denominator: den });
    }
    let value = num / den;
    let var: f64 = terms
        .iter()
        .map(|t| {
            let gj = 1.0 / den;
            let gx = t.p_y.value * (num - den) / (den * den);
            let gy = t.p_x.value * (num - den) / (den * den);
            (gj * t.joint.std_error).powi(2) + (gx * t.p_x.std_error).powi(2) + (gy * t.p_y.std_error).powi(2)
        })
        .sum();
    Ok(McEstimate {
        value,
        std_error: var.sqrt(),
    })
}

/// OPD of order `h` for a `2(h+1)`-dimensional window model, summing the
/// orthant terms over all patterns.
pub fn opd_gaussian_decomposition(model: &GaussianModel, order: usize, n_samples: usize, seed: impl Into<Seed>) -> Result<McEstimate> {
    opd_from_terms(&pattern_terms(model, order, n_samples, seed)?)
}

/// The same quantity with the two monotone patterns replaced by twice the
/// Kendall term of the increment vectors.
pub fn opd_gaussian_split(model: &GaussianModel, order: usize, n_samples: usize, seed: impl Into<Seed>) -> Result<McEstimate> {
    let seed = seed.into();
    let terms = pattern_terms(model, order, n_samples, seed)?;
    let last = pattern_count(order)? - 1;
    let base = opd_from_terms(&terms)?;
    let den = 1.0 - terms.iter().map(|t| t.p_x.value * t.p_y.value).sum::<f64>();
    let rest: f64 = terms[1..last]
        .iter()
        .map(|t| t.joint.value - t.p_x.value * t.p_y.value)
        .sum();
    let identity: Vec<usize> = (0..=order).collect();
    let increments = model.linear_image(&joint_difference_matrix(&identity))?;
    let tau = kendall_gaussian(&increments, n_samples, seed.derive(u64::MAX))?;
    let px = terms[0].p_x.value;
    let py = terms[0].p_y.value;
    let scale = (px * (1.0 - px) * py * (1.0 - py)).sqrt();
    Ok(McEstimate {
        value: (2.0 * tau.value * scale + rest) / den,
        std_error: (base.std_error.powi(2) + (2.0 * scale * tau.std_error / den).powi(2)).sqrt(),
    })
}

/// Covariance model of the windows `(X_1..X_{1+h}, Y_1..Y_{1+h})` of the
/// stationary bivariate AR(1) `W_i = A W_{i-1} + xi_i` with
/// `A = (a b; b -a)`, or `(a b; -b a)` when `rotation` is set.
pub fn biv_ar1_window_model(a: f64, b: f64, rotation: bool, order: usize) -> Result<GaussianModel> {
    check_ar1_matrix(a, b)?;
    let m = if rotation {
        DMatrix::from_row_slice(2, 2, &[a, b, -b, a])
    } else {
        DMatrix::from_row_slice(2, 2, &[a, b, b, -a])
    };
    let var = 1.0 / (1.0 - a * a - b * b);
    let len = order + 1;
    let mut powers = vec![DMatrix::identity(2, 2) * var];
    for k in 1..len {
        powers.push(&m * &powers[k - 1]);
    }
    // cov(W_s, W_t) = A^(s-t) var for s >= t.
    let cov = DMatrix::from_fn(2 * len, 2 * len, |r, c| {
        let (cr, s) = (r / len, r % len);
        let (cc, t) = (c / len, c % len);
        if s >= t {
            powers[s - t][(cr, cc)]
        } else {
            powers[t - s][(cc, cr)]
        }
    });
    GaussianModel::new(cov)
}

fn ar1_autocov(rho: f64, lag: usize) -> f64 {
    rho.powi(lag as i32) / (1.0 - rho * rho)
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho.abs() < 1.0) {
        return Err(Error::NonStationary(format!("|rho| = {} must be below 1", rho.abs())));
    }
    Ok(())
}

/// Windows of two independent stationary AR(1) paths with coefficient `rho`.
pub fn ar1_pair_window_model(rho: f64, order: usize) -> Result<GaussianModel> {
    check_rho(rho)?;
    let len = order + 1;
    GaussianModel::new(DMatrix::from_fn(2 * len, 2 * len, |r, c| {
        if r / len == c / len {
            ar1_autocov(rho, (r % len).abs_diff(c % len))
        } else {
            0.0
        }
    }))
}

/// Windows of an AR(1) path `X` paired with `Y_i = X_{i+1}`.
pub fn shifted_ar1_window_model(rho: f64, order: usize) -> Result<GaussianModel> {
    check_rho(rho)?;
    let len = order + 1;
    GaussianModel::new(DMatrix::from_fn(2 * len, 2 * len, |r, c| {
        let s = (r % len + r / len) as isize;
        let t = (c % len + c / len) as isize;
        ar1_autocov(rho, s.abs_diff(t))
    }))
}

/// Covariance of `(X, Y)` for 3-vectors with identity blocks and every cross
/// entry equal to `rho`.
pub fn block_multinormal_model(rho: f64) -> Result<GaussianModel> {
    GaussianModel::new(DMatrix::from_fn(6, 6, |r, c| {
        if r == c {
            1.0
        } else if r / 3 != c / 3 {
            rho
        } else {
            0.0
        }
    }))
}
