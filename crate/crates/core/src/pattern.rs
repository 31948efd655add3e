//! Ordinal patterns of windows of `h + 1` consecutive values.
//!
//! The pattern of a window `(x_0, ..., x_h)` is the permutation `(pi_0, ..., pi_h)`
//! with `x_{pi_0} >= ... >= x_{pi_h}`. Equal values are ordered so that the
//! later index comes first (`pi_{j-1} > pi_j` whenever `x_{pi_{j-1}} = x_{pi_j}`),
//! which makes the pattern unique for every finite window.
//!
//! Patterns are stored as their Lehmer code (factorial number system), so the
//! `(h + 1)!` patterns of order `h` map densely onto `0..(h + 1)!` and the
//! identity permutation `(0, 1, ..., h)` (a strictly decreasing window) has
//! code 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported order; `(MAX_ORDER + 1)! = 362880` cells.
pub const MAX_ORDER: usize = 8;

const FACTORIALS: [u64; MAX_ORDER + 2] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880];

/// Number of distinct patterns of order `h`, i.e. `(h + 1)!`.
pub fn pattern_count(order: usize) -> Result<usize> {
    check_order(order)?;
    Ok(FACTORIALS[order + 1] as usize)
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder {
            order,
            max: MAX_ORDER,
        })
    }
}

/// Lehmer code of an ordinal pattern together with its order `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternCode {
    code: u32,
    order: u8,
}

impl PatternCode {
    pub fn new(code: u64, order: usize) -> Result<Self> {
        let count = pattern_count(order)? as u64;
        if code >= count {
            return Err(Error::InvalidCode { code, order });
        }
        Ok(Self {
            code: code as u32,
            order: order as u8,
        })
    }

    pub fn code(self) -> u64 {
        u64::from(self.code)
    }

    /// The code as a dense array index.
    pub fn index(self) -> usize {
        self.code as usize
    }

    pub fn order(self) -> usize {
        usize::from(self.order)
    }

    pub fn permutation(self) -> Vec<usize> {
        decode_pattern(self)
    }
}

/// Encodes a permutation of `{0, ..., h}` given as `(pi_0, ..., pi_h)`.
pub fn encode_permutation(perm: &[usize]) -> Result<PatternCode> {
    let len = perm.len();
    if len < 2 {
        return Err(Error::UnsupportedOrder {
            order: len.saturating_sub(1),
            max: MAX_ORDER,
        });
    }
    let order = len - 1;
    check_order(order)?;
    let mut seen = [false; MAX_ORDER + 1];
    for &p in perm {
        if p > order || seen[p] {
            return Err(Error::InvalidInput(format!(
                "{perm:?} is not a permutation of 0..={order}"
            )));
        }
        seen[p] = true;
    }
    Ok(lehmer(perm, order))
}

fn lehmer(perm: &[usize], order: usize) -> PatternCode {
    let mut code = 0u64;
    for i in 0..perm.len() {
        let smaller_after = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count() as u64;
        code += smaller_after * FACTORIALS[order - i];
    }
    PatternCode {
        code: code as u32,
        order: order as u8,
    }
}

/// Inverse of [`encode_permutation`].
pub fn decode_pattern(code: PatternCode) -> Vec<usize> {
    let order = code.order();
    let mut remaining: Vec<usize> = (0..=order).collect();
    let mut rest = code.code();
    let mut perm = Vec::with_capacity(order + 1);
    for i in 0..=order {
        let weight = FACTORIALS[order - i];
        let digit = (rest / weight) as usize;
        rest %= weight;
        perm.push(remaining.remove(digit));
    }
    perm
}

/// Ordinal pattern of a window of `h + 1` finite values.
pub fn encode_pattern(window: &[f64]) -> Result<PatternCode> {
    let order = window.len().saturating_sub(1);
    check_order(order)?;
    if let Some(bad) = window.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite value {bad} in window")));
    }
    Ok(encode_unchecked(window))
}

/// Caller guarantees `1 <= len - 1 <= MAX_ORDER` and finite values.
pub(crate) fn encode_unchecked(window: &[f64]) -> PatternCode {
    let len = window.len();
    let mut idx = [0usize; MAX_ORDER + 1];
    for (i, slot) in idx.iter_mut().enumerate().take(len) {
        *slot = i;
    }
    // Insertion sort by (value desc, index desc); windows are tiny.
    let precedes = |a: usize, b: usize| window[a] > window[b] || (window[a] == window[b] && a > b);
    for i in 1..len {
        let cur = idx[i];
        let mut j = i;
        while j > 0 && precedes(cur, idx[j - 1]) {
            idx[j] = idx[j - 1];
            j -= 1;
        }
        idx[j] = cur;
    }
    lehmer(&idx[..len], len - 1)
}

/// Patterns of the sliding windows of `series`, skipping the first `shift` windows.
///
/// Windows start at (0-based) positions `shift, ..., n - h - 1`, so the result
/// holds `n - h - shift` codes.
pub fn pattern_sequence(series: &[f64], order: usize, shift: usize) -> Result<Vec<PatternCode>> {
    check_order(order)?;
    let n = series.len();
    if n < order + 1 + shift {
        return Err(Error::InsufficientData(format!(
            "series of length {n} is too short for order {order} with shift {shift}"
        )));
    }
    if let Some(pos) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite value at position {pos}"
        )));
    }
    Ok(series[shift..]
        .windows(order + 1)
        .map(encode_unchecked)
        .collect())
}

/// Pattern frequencies of one series, dense over all `(h + 1)!` codes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDistribution {
    order: usize,
    counts: Vec<u64>,
    total: u64,
}

impl PatternDistribution {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, code: PatternCode) -> u64 {
        self.counts[code.index()]
    }

    pub fn relative_frequencies(&self) -> Vec<f64> {
        let n = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

pub fn pattern_counts(codes: &[PatternCode]) -> Result<PatternDistribution> {
    let first = codes
        .first()
        .ok_or_else(|| Error::InsufficientData("no pattern codes to count".into()))?;
    let order = first.order();
    let mut counts = vec![0u64; pattern_count(order)?];
    for c in codes {
        if c.order() != order {
            return Err(Error::OrderMismatch {
                expected: order,
                found: c.order(),
            });
        }
        counts[c.index()] += 1;
    }
    Ok(PatternDistribution {
        order,
        counts,
        total: codes.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm_of(window: &[f64]) -> Vec<usize> {
        encode_pattern(window).unwrap().permutation()
    }

    /// Every permutation of 0..len in lexicographic order.
    fn all_perms(len: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left.is_empty() {
                out.push(prefix.clone());
                return;
            }
            for i in 0..left.len() {
                let v = left.remove(i);
                prefix.push(v);
                rec(prefix, left, out);
                prefix.pop();
                left.insert(i, v);
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut (0..len).collect(), &mut out);
        out
    }

    /// The unique permutation satisfying the descending condition and the tie rule.
    fn brute_force_pattern(window: &[f64]) -> Vec<usize> {
        let hits: Vec<_> = all_perms(window.len())
            .into_iter()
            .filter(|p| {
                p.windows(2).all(|w| {
                    window[w[0]] > window[w[1]] || (window[w[0]] == window[w[1]] && w[0] > w[1])
                })
            })
            .collect();
        assert_eq!(hits.len(), 1);
        hits.into_iter().next().unwrap()
    }

    #[test]
    fn monotone_windows() {
        assert_eq!(perm_of(&[3.0, 2.0, 1.0]), vec![0, 1, 2]);
        assert_eq!(perm_of(&[1.0, 2.0, 3.0]), vec![2, 1, 0]);
        assert_eq!(encode_pattern(&[3.0, 2.0, 1.0]).unwrap().code(), 0);
    }

    #[test]
    fn matches_brute_force() {
        assert_eq!(perm_of(&[2.0, 0.0, 1.0]), brute_force_pattern(&[2.0, 0.0, 1.0]));
        assert_eq!(perm_of(&[2.0, 0.0, 1.0]), vec![0, 2, 1]);
        // ties, including fully constant windows
        for w in [
            [1.0, 1.0, 0.0, 2.0],
            [5.0, 5.0, 5.0, 5.0],
            [0.0, 1.0, 0.0, 1.0],
            [-1.0, 2.0, 2.0, -1.0],
        ] {
            assert_eq!(perm_of(&w), brute_force_pattern(&w), "{w:?}");
        }
        assert_eq!(perm_of(&[7.0, 7.0, 7.0]), vec![2, 1, 0]);
    }

    #[test]
    fn decode_anchors() {
        let c = encode_permutation(&[0, 1, 2]).unwrap();
        assert_eq!(decode_pattern(c), vec![0, 1, 2]);
        assert_eq!(decode_pattern(PatternCode::new(0, 1).unwrap()), vec![0, 1]);
        assert_eq!(decode_pattern(PatternCode::new(1, 1).unwrap()), vec![1, 0]);
    }

    #[test]
    fn round_trip_exhaustive() {
        for order in 1..=4 {
            let count = pattern_count(order).unwrap();
            let mut seen = std::collections::HashSet::new();
            for code in 0..count as u64 {
                let c = PatternCode::new(code, order).unwrap();
                let p = decode_pattern(c);
                assert_eq!(encode_permutation(&p).unwrap(), c);
                assert!(seen.insert(p));
            }
            assert_eq!(seen.len(), count);
        }
        // lexicographic enumeration agrees with the code order
        for (code, p) in all_perms(4).into_iter().enumerate() {
            assert_eq!(encode_permutation(&p).unwrap().code(), code as u64);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            PatternCode::new(6, 2),
            Err(Error::InvalidCode { code: 6, order: 2 })
        ));
        assert!(matches!(
            encode_pattern(&[1.0]),
            Err(Error::UnsupportedOrder { .. })
        ));
        assert!(matches!(
            encode_pattern(&[0.0; 10]),
            Err(Error::UnsupportedOrder { order: 9, .. })
        ));
        assert!(matches!(
            encode_pattern(&[0.0, f64::NAN]),
            Err(Error::InvalidInput(_))
        ));
        assert!(encode_permutation(&[0, 0, 1]).is_err());
        assert!(encode_permutation(&[0, 3, 1]).is_err());
    }

    #[test]
    fn sequence_lengths_and_shift() {
        let up = [1.0, 2.0, 3.0, 4.0];
        let codes = pattern_sequence(&up, 1, 0).unwrap();
        let rising = encode_permutation(&[1, 0]).unwrap();
        assert_eq!(codes, vec![rising; 3]);
        assert_eq!(pattern_sequence(&up, 2, 0).unwrap().len(), 2);

        let s = [1.0, 3.0, 2.0, 4.0];
        let shifted = pattern_sequence(&s, 1, 1).unwrap();
        assert_eq!(
            shifted,
            vec![
                encode_pattern(&[3.0, 2.0]).unwrap(),
                encode_pattern(&[2.0, 4.0]).unwrap()
            ]
        );
        assert!(matches!(
            pattern_sequence(&s, 3, 1),
            Err(Error::InsufficientData(_))
        ));
        assert!(pattern_sequence(&s, 3, 0).is_ok());
    }

    #[test]
    fn counts() {
        let c = PatternCode::new(1, 1).unwrap();
        let dist = pattern_counts(&[c; 10]).unwrap();
        assert_eq!(dist.counts(), &[0, 10]);
        assert_eq!(dist.total(), 10);
        assert!(matches!(
            pattern_counts(&[]),
            Err(Error::InsufficientData(_))
        ));
        let mixed = [c, PatternCode::new(0, 2).unwrap()];
        assert!(matches!(
            pattern_counts(&mixed),
            Err(Error::OrderMismatch {
                expected: 1,
                found: 2
            })
        ));
        let s: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64).collect();
        let freq = pattern_counts(&pattern_sequence(&s, 3, 0).unwrap())
            .unwrap()
            .relative_frequencies();
        assert!((freq.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
