//! Ordinal pattern dependence.
//!
//! For pattern probabilities `q_x`, `q_y` and the probability `q` that both
//! windows show the same pattern,
//!
//! ```text
//! OPD = (q - sum_pi q_x[pi] q_y[pi]) / (1 - sum_pi q_x[pi] q_y[pi])
//! ```
//!
//! Plug-in estimates replace the probabilities by relative frequencies. For
//! i.i.d. vector pairs the estimate is asymptotically normal; its variance is
//! obtained by the delta method from the covariance of the indicator vector
//! `(1{match}, (1{Pi(X)=pi})_pi, (1{Pi(Y)=pi})_pi)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimate::{DependenceEstimate, Measure};
use crate::pattern::{self, pattern_count, PatternCode};

/// Denominators `1 - sum q_x q_y` below this are reported as degenerate.
pub const DENOMINATOR_EPS: f64 = 1e-12;

/// Largest order accepted by the i.i.d. inference routines (dense `k x k` table).
pub const MAX_IID_ORDER: usize = 4;

fn check_denominator(denominator: f64) -> Result<()> {
    if denominator < DENOMINATOR_EPS || denominator.is_nan() {
        Err(Error::DegenerateDenominator { denominator })
    } else {
        Ok(())
    }
}

fn check_probabilities(name: &str, q: &[f64]) -> Result<()> {
    if q.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidInput(format!("{name} has entries outside [0, 1]")));
    }
    let sum: f64 = q.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("{name} sums to {sum}, not 1")));
    }
    Ok(())
}

/// OPD from the match probability and the two pattern distributions.
pub fn opd_plugin(q_match: f64, q_x: &[f64], q_y: &[f64]) -> Result<f64> {
    if q_x.len() != q_y.len() {
        return Err(Error::InputMismatch(format!(
            "pattern distributions have lengths {} and {}",
            q_x.len(),
            q_y.len()
        )));
    }
    if !(0.0..=1.0).contains(&q_match) {
        return Err(Error::InvalidInput(format!("match probability {q_match} outside [0, 1]")));
    }
    check_probabilities("q_x", q_x)?;
    check_probabilities("q_y", q_y)?;
    let baseline: f64 = q_x.iter().zip(q_y).map(|(a, b)| a * b).sum();
    let denominator = 1.0 - baseline;
    check_denominator(denominator)?;
    Ok((q_match - baseline) / denominator)
}

/// Exact plug-in OPD from integer counts; the result does not depend on the
/// order in which patterns are enumerated.
fn opd_from_counts(matches: u64, cx: &[u64], cy: &[u64], total: u64) -> Result<f64> {
    let n = u128::from(total);
    let baseline: u128 = cx
        .iter()
        .zip(cy)
        .map(|(&a, &b)| u128::from(a) * u128::from(b))
        .sum();
    let n2 = n * n;
    let den = n2 - baseline;
    check_denominator(den as f64 / n2 as f64)?;
    let num = (u128::from(matches) * n) as f64 - baseline as f64;
    Ok(num / den as f64)
}

fn marginal_counts(codes: &[PatternCode], k: usize) -> Vec<u64> {
    let mut counts = vec![0u64; k];
    for c in codes {
        counts[c.index()] += 1;
    }
    counts
}

/// OPD between the sliding windows of two series.
///
/// The window of `x` starting at `i` is paired with the window of `y`
/// starting at `i + shift`; both pattern sequences are truncated to their
/// common length. No variance is reported for dependent windows.
pub fn opd_from_series(x: &[f64], y: &[f64], order: usize, shift: usize) -> Result<DependenceEstimate> {
    if x.len() != y.len() {
        return Err(Error::InputMismatch(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let px = pattern::pattern_sequence(x, order, 0)?;
    let py = pattern::pattern_sequence(y, order, shift)?;
    let len = px.len().min(py.len());
    if len < 2 {
        return Err(Error::InsufficientData(format!(
            "only {len} usable window pair(s)"
        )));
    }
    let (px, py) = (&px[..len], &py[..len]);
    let k = pattern_count(order)?;
    let matches = px.iter().zip(py).filter(|(a, b)| a == b).count() as u64;
    let value = opd_from_counts(matches, &marginal_counts(px, k), &marginal_counts(py, k), len as u64)?;
    Ok(DependenceEstimate::point(Measure::Opd, value, order, x.len(), shift, len))
}

/// `max(OPD(x, y), 0) - max(OPD(x, -y), 0)`.
pub fn signed_opd(x: &[f64], y: &[f64], order: usize) -> Result<f64> {
    let positive = opd_from_series(x, y, order, 0)?.value;
    let neg_y: Vec<f64> = y.iter().map(|v| -v).collect();
    let negative = opd_from_series(x, &neg_y, order, 0)?.value;
    Ok(positive.max(0.0) - negative.max(0.0))
}

/// Contingency counts of `(Pi(X_i), Pi(Y_i))`, row = X pattern, column = Y pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointPatternTable {
    order: usize,
    k: usize,
    counts: Vec<u64>,
    total: u64,
}

impl JointPatternTable {
    pub fn from_codes(x: &[PatternCode], y: &[PatternCode]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InputMismatch(format!(
                "{} X patterns vs {} Y patterns",
                x.len(),
                y.len()
            )));
        }
        let first = x
            .first()
            .ok_or_else(|| Error::InsufficientData("no pattern pairs".into()))?;
        let order = first.order();
        if order > MAX_IID_ORDER {
            return Err(Error::UnsupportedOrder {
                order,
                max: MAX_IID_ORDER,
            });
        }
        let k = pattern_count(order)?;
        let mut counts = vec![0u64; k * k];
        for (a, b) in x.iter().zip(y) {
            for c in [a, b] {
                if c.order() != order {
                    return Err(Error::OrderMismatch {
                        expected: order,
                        found: c.order(),
                    });
                }
            }
            counts[a.index() * k + b.index()] += 1;
        }
        Ok(Self {
            order,
            k,
            counts,
            total: x.len() as u64,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of patterns `(h + 1)!`.
    pub fn patterns(&self) -> usize {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, x_pattern: usize, y_pattern: usize) -> u64 {
        self.counts[x_pattern * self.k + y_pattern]
    }

    pub fn x_marginal(&self) -> Vec<u64> {
        (0..self.k)
            .map(|r| self.counts[r * self.k..(r + 1) * self.k].iter().sum())
            .collect()
    }

    pub fn y_marginal(&self) -> Vec<u64> {
        (0..self.k)
            .map(|c| (0..self.k).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn match_count(&self) -> u64 {
        (0..self.k).map(|p| self.get(p, p)).sum()
    }

    pub fn opd(&self) -> Result<f64> {
        opd_from_counts(self.match_count(), &self.x_marginal(), &self.y_marginal(), self.total)
    }
}

fn vector_patterns<V: AsRef<[f64]>>(vectors: &[V], order: usize, name: &str) -> Result<Vec<PatternCode>> {
    vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let v = v.as_ref();
            if v.len() != order + 1 {
                return Err(Error::InputMismatch(format!(
                    "{name}[{i}] has length {}, expected {}",
                    v.len(),
                    order + 1
                )));
            }
            pattern::encode_pattern(v)
        })
        .collect()
}

/// Joint pattern table of paired `(h + 1)`-vectors.
pub fn joint_pattern_table<V: AsRef<[f64]>>(x_vectors: &[V], y_vectors: &[V], order: usize) -> Result<JointPatternTable> {
    if x_vectors.len() != y_vectors.len() {
        return Err(Error::InputMismatch(format!(
            "{} X vectors vs {} Y vectors",
            x_vectors.len(),
            y_vectors.len()
        )));
    }
    if x_vectors.is_empty() {
        return Err(Error::InsufficientData("no vector pairs".into()));
    }
    pattern::check_order(order)?;
    let px = vector_patterns(x_vectors, order, "x")?;
    let py = vector_patterns(y_vectors, order, "y")?;
    JointPatternTable::from_codes(&px, &py)
}

/// Plug-in covariance of the `(2 (h+1)! + 1)`-dimensional indicator vector,
/// ordered as (match, X patterns, Y patterns).
pub fn opd_iid_covariance(table: &JointPatternTable) -> DMatrix<f64> {
    let k = table.k;
    let n = table.total as f64;
    let q = table.match_count() as f64 / n;
    let qx: Vec<f64> = table.x_marginal().iter().map(|&c| c as f64 / n).collect();
    let qy: Vec<f64> = table.y_marginal().iter().map(|&c| c as f64 / n).collect();
    let joint = |a: usize, b: usize| table.get(a, b) as f64 / n;

    let dim = 2 * k + 1;
    let mut sigma = DMatrix::zeros(dim, dim);
    sigma[(0, 0)] = q * (1.0 - q);
    for p in 0..k {
        let diag = joint(p, p);
        let s12 = diag - q * qx[p];
        let s13 = diag - q * qy[p];
        sigma[(0, 1 + p)] = s12;
        sigma[(1 + p, 0)] = s12;
        sigma[(0, 1 + k + p)] = s13;
        sigma[(1 + k + p, 0)] = s13;
    }
    for a in 0..k {
        for b in 0..k {
            let s22 = if a == b { qx[a] * (1.0 - qx[a]) } else { -qx[a] * qx[b] };
            let s33 = if a == b { qy[a] * (1.0 - qy[a]) } else { -qy[a] * qy[b] };
            let s23 = joint(a, b) - qx[a] * qy[b];
            sigma[(1 + a, 1 + b)] = s22;
            sigma[(1 + k + a, 1 + k + b)] = s33;
            sigma[(1 + a, 1 + k + b)] = s23;
            sigma[(1 + k + b, 1 + a)] = s23;
        }
    }
    sigma
}

/// Gradient of `f(u, v, w) = (u - v.w) / (1 - v.w)`, ordered as `(u, v, w)`.
pub fn grad_f(u: f64, v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if v.len() != w.len() {
        return Err(Error::InputMismatch(format!(
            "gradient arguments have lengths {} and {}",
            v.len(),
            w.len()
        )));
    }
    let s: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
    let den = 1.0 - s;
    check_denominator(den)?;
    let ds = (u - 1.0) / (den * den);
    let mut g = Vec::with_capacity(2 * v.len() + 1);
    g.push(1.0 / den);
    g.extend(w.iter().map(|wk| wk * ds));
    g.extend(v.iter().map(|vk| vk * ds));
    Ok(g)
}

/// OPD of i.i.d. vector pairs with delta-method variance and normal interval.
pub fn opd_iid_estimate<V: AsRef<[f64]>>(
    x_vectors: &[V],
    y_vectors: &[V],
    order: usize,
    confidence: f64,
) -> Result<DependenceEstimate> {
    let table = joint_pattern_table(x_vectors, y_vectors, order)?;
    let value = table.opd()?;
    let n = table.total as f64;
    let u = table.match_count() as f64 / n;
    let qx: Vec<f64> = table.x_marginal().iter().map(|&c| c as f64 / n).collect();
    let qy: Vec<f64> = table.y_marginal().iter().map(|&c| c as f64 / n).collect();
    let g = DVector::from_vec(grad_f(u, &qx, &qy)?);
    let sigma = opd_iid_covariance(&table);
    let variance = g.dot(&(&sigma * &g));
    let len = x_vectors.len();
    DependenceEstimate::point(Measure::Opd, value, order, len, 0, len).with_variance(variance, confidence)
}
