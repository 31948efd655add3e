//! Multivariate Kendall's tau between the sliding windows of two series.
//!
//! With `X_i`, `Y_i` the windows of length `h + 1` and componentwise `<=`,
//! the dominance probabilities
//!
//! ```text
//! p_x  = P(X <= X~),   p_y = P(Y <= Y~),   p_xy = P(X <= X~, Y <= Y~)
//! ```
//!
//! are estimated by U-statistics over all ordered pairs `i != j` and
//! combined through `psi(x, y, z) = (z - x y) / sqrt(x (1 - x) y (1 - y))`.
//! Inference uses the first-order Hoeffding terms of the three kernels, a
//! Bartlett-weighted long-run covariance and the delta method.
//!
//! All pair counts are integers, so the parallel pair scan is bit-identical
//! to a sequential one regardless of how the work is split.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{DependenceEstimate, Measure};
use crate::rng::Seed;

/// Above this many windows callers may fall back to pair subsampling.
pub const SUBSAMPLE_THRESHOLD: usize = 20_000;

/// Overlapping windows `(s_i, ..., s_{i+h})` of a series.
pub fn sliding_windows(series: &[f64], order: usize) -> Vec<&[f64]> {
    series.windows(order + 1).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceProbabilities {
    pub p_x: f64,
    pub p_y: f64,
    pub p_xy: f64,
    /// Number of ordered pairs the probabilities are based on.
    pub pairs: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct PairCounts {
    x: u64,
    y: u64,
    xy: u64,
}

impl std::ops::Add for PairCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            x: self.x + o.x,
            y: self.y + o.y,
            xy: self.xy + o.xy,
        }
    }
}

impl PairCounts {
    fn probabilities(self, pairs: u64) -> DominanceProbabilities {
        let p = pairs as f64;
        DominanceProbabilities {
            p_x: self.x as f64 / p,
            p_y: self.y as f64 / p,
            p_xy: self.xy as f64 / p,
            pairs,
        }
    }
}

/// `(a <= b, a >= b)` componentwise.
#[inline]
fn dominance(a: &[f64], b: &[f64]) -> (bool, bool) {
    let mut le = true;
    let mut ge = true;
    for (u, v) in a.iter().zip(b) {
        le &= u <= v;
        ge &= u >= v;
    }
    (le, ge)
}

fn validate<V: AsRef<[f64]>>(x: &[V], y: &[V]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::InputMismatch(format!(
            "{} X windows vs {} Y windows",
            x.len(),
            y.len()
        )));
    }
    let m = x.len();
    if m < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 windows, got {m}"
        )));
    }
    let d = x[0].as_ref().len();
    if d == 0 {
        return Err(Error::InvalidInput("empty windows".into()));
    }
    for w in x.iter().chain(y) {
        let w = w.as_ref();
        if w.len() != d {
            return Err(Error::InputMismatch("windows have differing lengths".into()));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite value in window".into()));
        }
    }
    Ok(m)
}

fn row_counts<V: AsRef<[f64]>>(x: &[V], y: &[V], i: usize) -> PairCounts {
    let (xi, yi) = (x[i].as_ref(), y[i].as_ref());
    let mut c = PairCounts::default();
    for j in i + 1..x.len() {
        let (xle, xge) = dominance(xi, x[j].as_ref());
        let (yle, yge) = dominance(yi, y[j].as_ref());
        c.x += u64::from(xle) + u64::from(xge);
        c.y += u64::from(yle) + u64::from(yge);
        c.xy += u64::from(xle && yle) + u64::from(xge && yge);
    }
    c
}

/// Exact dominance U-statistics over all `m (m - 1)` ordered pairs.
pub fn dominance_counts<V: AsRef<[f64]> + Sync>(x_windows: &[V], y_windows: &[V]) -> Result<DominanceProbabilities> {
    let m = validate(x_windows, y_windows)?;
    let counts = (0..m)
        .into_par_iter()
        .map(|i| row_counts(x_windows, y_windows, i))
        .reduce(PairCounts::default, |a, b| a + b);
    Ok(counts.probabilities((m * (m - 1)) as u64))
}

/// Dominance probabilities from `pairs` ordered pairs drawn uniformly without
/// replacement.
pub fn dominance_counts_subsampled<V: AsRef<[f64]>>(
    x_windows: &[V],
    y_windows: &[V],
    pairs: usize,
    seed: impl Into<Seed>,
) -> Result<DominanceProbabilities> {
    let m = validate(x_windows, y_windows)?;
    let total = m * (m - 1);
    if pairs == 0 || pairs > total {
        return Err(Error::InvalidInput(format!(
            "pair count {pairs} must lie in 1..={total}"
        )));
    }
    let mut rng = seed.into().rng();
    let mut c = PairCounts::default();
    for idx in index::sample(&mut rng, total, pairs) {
        let i = idx / (m - 1);
        let r = idx % (m - 1);
        let j = if r < i { r } else { r + 1 };
        let (xle, _) = dominance(x_windows[i].as_ref(), x_windows[j].as_ref());
        let (yle, _) = dominance(y_windows[i].as_ref(), y_windows[j].as_ref());
        c.x += u64::from(xle);
        c.y += u64::from(yle);
        c.xy += u64::from(xle && yle);
    }
    Ok(c.probabilities(pairs as u64))
}

/// `psi(x, y, z) = (z - x y) / sqrt(x (1 - x) y (1 - y))`.
pub fn psi(x: f64, y: f64, z: f64) -> Result<f64> {
    let inside = |p: f64| p > 0.0 && p < 1.0;
    if !inside(x) || !inside(y) {
        return Err(Error::DegenerateMarginal { p_x: x, p_y: y });
    }
    Ok((z - x * y) / (x * (1.0 - x) * y * (1.0 - y)).sqrt())
}

/// Gradient of [`psi`] with respect to `(x, y, z)`.
pub fn grad_psi(x: f64, y: f64, z: f64) -> Result<[f64; 3]> {
    let value = psi(x, y, z)?;
    let d = (x * (1.0 - x) * y * (1.0 - y)).sqrt();
    Ok([
        -y / d - value * (1.0 - 2.0 * x) / (2.0 * x * (1.0 - x)),
        -x / d - value * (1.0 - 2.0 * y) / (2.0 * y * (1.0 - y)),
        1.0 / d,
    ])
}

/// [`psi`] evaluated on the underlying integer pair counts, so that swapping
/// X and Y, or comparing a series with itself, is exact.
pub fn kendall_from_probabilities(p: &DominanceProbabilities) -> Result<f64> {
    let count = |q: f64| (q * p.pairs as f64).round() as u128;
    let (cx, cy, cxy, n) = (count(p.p_x), count(p.p_y), count(p.p_xy), u128::from(p.pairs));
    if cx == 0 || cx == n || cy == 0 || cy == n {
        return Err(Error::DegenerateMarginal { p_x: p.p_x, p_y: p.p_y });
    }
    let num = (cxy * n) as i128 - (cx * cy) as i128;
    let (a, b) = (cx * (n - cx), cy * (n - cy));
    let den = if a == b { a as f64 } else { (a as f64 * b as f64).sqrt() };
    Ok(num as f64 / den)
}

fn check_series(x: &[f64], y: &[f64], order: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InputMismatch(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if order == 0 {
        return Err(Error::UnsupportedOrder {
            order,
            max: usize::MAX,
        });
    }
    if x.len() < order + 2 {
        return Err(Error::InsufficientData(format!(
            "series of length {} yields fewer than 2 windows of order {order}",
            x.len()
        )));
    }
    Ok(())
}

/// Multivariate Kendall's tau of the overlapping `(h + 1)`-windows.
pub fn kendall_tau(x: &[f64], y: &[f64], order: usize) -> Result<DependenceEstimate> {
    check_series(x, y, order)?;
    let (xw, yw) = (sliding_windows(x, order), sliding_windows(y, order));
    let value = kendall_from_probabilities(&dominance_counts(&xw, &yw)?)?;
    Ok(DependenceEstimate::point(Measure::Kendall, value, order, x.len(), 0, xw.len()))
}

/// Like [`kendall_tau`] but from `pairs` randomly drawn window pairs.
pub fn kendall_tau_subsampled(
    x: &[f64],
    y: &[f64],
    order: usize,
    pairs: usize,
    seed: impl Into<Seed>,
) -> Result<DependenceEstimate> {
    check_series(x, y, order)?;
    let (xw, yw) = (sliding_windows(x, order), sliding_windows(y, order));
    let value = kendall_from_probabilities(&dominance_counts_subsampled(&xw, &yw, pairs, seed)?)?;
    Ok(DependenceEstimate::point(Measure::Kendall, value, order, x.len(), 0, xw.len()))
}

/// Empirical first-order Hoeffding terms `f1`, `g1`, `h1`, one value per window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingTerms {
    pub f1: Vec<f64>,
    pub g1: Vec<f64>,
    pub h1: Vec<f64>,
}

impl HoeffdingTerms {
    pub fn len(&self) -> usize {
        self.f1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f1.is_empty()
    }
}

/// Per-window leave-self-out counts: how many other windows lie below / above.
#[derive(Default)]
struct WindowCounts {
    x_le: Vec<u32>,
    x_ge: Vec<u32>,
    y_le: Vec<u32>,
    y_ge: Vec<u32>,
    xy_le: Vec<u32>,
    xy_ge: Vec<u32>,
}

fn window_counts<V: AsRef<[f64]>>(x: &[V], y: &[V]) -> (PairCounts, WindowCounts) {
    let m = x.len();
    let mut w = WindowCounts {
        x_le: vec![0; m],
        x_ge: vec![0; m],
        y_le: vec![0; m],
        y_ge: vec![0; m],
        xy_le: vec![0; m],
        xy_ge: vec![0; m],
    };
    let mut total = PairCounts::default();
    for i in 0..m {
        let (xi, yi) = (x[i].as_ref(), y[i].as_ref());
        for j in i + 1..m {
            let (xle, xge) = dominance(xi, x[j].as_ref());
            let (yle, yge) = dominance(yi, y[j].as_ref());
            // X_i <= X_j: window i has one more window above it, window j one more below.
            if xle {
                w.x_ge[i] += 1;
                w.x_le[j] += 1;
            }
            if xge {
                w.x_le[i] += 1;
                w.x_ge[j] += 1;
            }
            if yle {
                w.y_ge[i] += 1;
                w.y_le[j] += 1;
            }
            if yge {
                w.y_le[i] += 1;
                w.y_ge[j] += 1;
            }
            if xle && yle {
                w.xy_ge[i] += 1;
                w.xy_le[j] += 1;
            }
            if xge && yge {
                w.xy_le[i] += 1;
                w.xy_ge[j] += 1;
            }
            total.x += u64::from(xle) + u64::from(xge);
            total.y += u64::from(yle) + u64::from(yge);
            total.xy += u64::from(xle && yle) + u64::from(xge && yge);
        }
    }
    (total, w)
}

fn terms_from_counts(total: PairCounts, w: &WindowCounts, m: usize) -> (DominanceProbabilities, HoeffdingTerms) {
    let p = total.probabilities((m * (m - 1)) as u64);
    let others = (m - 1) as f64;
    let term = |le: &[u32], ge: &[u32], centre: f64| -> Vec<f64> {
        le.iter()
            .zip(ge)
            .map(|(&a, &b)| 0.5 * (f64::from(a) + f64::from(b)) / others - centre)
            .collect()
    };
    let terms = HoeffdingTerms {
        f1: term(&w.x_le, &w.x_ge, p.p_x),
        g1: term(&w.y_le, &w.y_ge, p.p_y),
        h1: term(&w.xy_le, &w.xy_ge, p.p_xy),
    };
    (p, terms)
}

/// Empirical Hoeffding projections: for window `i`,
/// `f1_i = (F(x_i) + Fbar(x_i)) / 2 - p_x` with `F`, `Fbar` the leave-one-out
/// empirical CDF and survival function of the windows; likewise `g1` for Y
/// and `h1` for the joint event.
pub fn hoeffding_terms<V: AsRef<[f64]>>(x_windows: &[V], y_windows: &[V]) -> Result<HoeffdingTerms> {
    let m = validate(x_windows, y_windows)?;
    let (total, w) = window_counts(x_windows, y_windows);
    Ok(terms_from_counts(total, &w, m).1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongRunCovariance {
    /// Covariance of `sqrt(m) (p_x, p_y, p_xy)`.
    pub matrix: [[f64; 3]; 3],
    pub bandwidth: usize,
    pub clamped: bool,
}

/// `floor(m^(1/3))`.
pub fn default_bandwidth(len: usize) -> usize {
    let mut b = (len as f64).cbrt().floor() as usize;
    // cbrt can land just below an exact cube
    while (b + 1).pow(3) <= len {
        b += 1;
    }
    b
}

/// Bartlett-weighted long-run covariance of the Hoeffding terms, times 4.
///
/// Entry `(a, c)` is `4 [G_0 + sum_{k=1}^{b} (1 - k/(b+1)) (G_k + G_k^T)]_{ac}`
/// with `G_k[a][c] = (1/m) sum_t u_a(t + k) u_c(t)` on the centred terms.
pub fn longrun_covariance(terms: &HoeffdingTerms, bandwidth: Option<usize>) -> Result<LongRunCovariance> {
    let m = terms.len();
    if terms.g1.len() != m || terms.h1.len() != m {
        return Err(Error::InputMismatch("Hoeffding term sequences differ in length".into()));
    }
    if m < 2 {
        return Err(Error::InsufficientData(format!("{m} Hoeffding terms")));
    }
    let b = bandwidth.unwrap_or_else(|| default_bandwidth(m));
    if b >= m {
        return Err(Error::InvalidBandwidth { bandwidth: b, len: m });
    }
    let centred: [Vec<f64>; 3] = [&terms.f1, &terms.g1, &terms.h1].map(|s| {
        let mean = s.iter().sum::<f64>() / m as f64;
        s.iter().map(|v| v - mean).collect()
    });
    let autocov = |lag: usize, a: usize, c: usize| -> f64 {
        let (u, v) = (&centred[a], &centred[c]);
        (0..m - lag).map(|t| u[t + lag] * v[t]).sum::<f64>() / m as f64
    };
    let mut s = [[0.0; 3]; 3];
    for a in 0..3 {
        for c in 0..3 {
            let mut acc = autocov(0, a, c);
            for k in 1..=b {
                let weight = 1.0 - k as f64 / (b as f64 + 1.0);
                acc += weight * (autocov(k, a, c) + autocov(k, c, a));
            }
            s[a][c] = 4.0 * acc;
        }
    }
    for a in 0..3 {
        for c in a + 1..3 {
            let avg = 0.5 * (s[a][c] + s[c][a]);
            s[a][c] = avg;
            s[c][a] = avg;
        }
    }
    let mut clamped = false;
    for (a, row) in s.iter_mut().enumerate() {
        if row[a] < 0.0 {
            row[a] = 0.0;
            clamped = true;
        }
    }
    Ok(LongRunCovariance {
        matrix: s,
        bandwidth: b,
        clamped,
    })
}

/// Kendall's tau with a delta-method variance and normal confidence interval.
///
/// `bandwidth` defaults to `floor(m^(1/3))` for `m` windows.
pub fn kendall_tau_with_ci(
    x: &[f64],
    y: &[f64],
    order: usize,
    confidence: f64,
    bandwidth: Option<usize>,
) -> Result<DependenceEstimate> {
    check_series(x, y, order)?;
    let (xw, yw) = (sliding_windows(x, order), sliding_windows(y, order));
    windows_with_ci(&xw, &yw, order, x.len(), confidence, bandwidth)
}

/// Kendall's tau of i.i.d. vector pairs; the variance uses bandwidth 0
/// unless `bandwidth` is given.
pub fn kendall_vectors_with_ci<V: AsRef<[f64]>>(
    x_vectors: &[V],
    y_vectors: &[V],
    confidence: f64,
    bandwidth: Option<usize>,
) -> Result<DependenceEstimate> {
    let order = x_vectors.first().map_or(0, |v| v.as_ref().len().saturating_sub(1));
    windows_with_ci(x_vectors, y_vectors, order, x_vectors.len(), confidence, Some(bandwidth.unwrap_or(0)))
}

fn windows_with_ci<V: AsRef<[f64]>>(
    xw: &[V],
    yw: &[V],
    order: usize,
    n: usize,
    confidence: f64,
    bandwidth: Option<usize>,
) -> Result<DependenceEstimate> {
    let m = validate(xw, yw)?;
    let (total, w) = window_counts(xw, yw);
    let (p, terms) = terms_from_counts(total, &w, m);
    let value = kendall_from_probabilities(&p)?;
    let grad = grad_psi(p.p_x, p.p_y, p.p_xy)?;
    let lr = longrun_covariance(&terms, bandwidth)?;
    let mut variance = 0.0;
    for a in 0..3 {
        for c in 0..3 {
            variance += grad[a] * lr.matrix[a][c] * grad[c];
        }
    }
    let mut est = DependenceEstimate::point(Measure::Kendall, value, order, n, 0, m).with_variance(variance, confidence)?;
    est.variance_clamped |= lr.clamped;
    Ok(est)
}
