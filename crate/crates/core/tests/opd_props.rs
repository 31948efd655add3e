use ordpat::opd::{grad_f, joint_pattern_table, opd_from_series, opd_iid_estimate, signed_opd};
use ordpat::pattern::encode_pattern;
use ordpat::rng::{open_uniform, standard_normal, Seed};
use proptest::prelude::*;

fn series(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| {
        (
            prop::collection::vec(-100i32..100, n),
            prop::collection::vec(-100i32..100, n),
        )
    })
    .prop_map(|(x, y)| {
        (
            x.into_iter().map(f64::from).collect(),
            y.into_iter().map(f64::from).collect(),
        )
    })
}

fn opd_value(x: &[f64], y: &[f64], h: usize) -> Option<f64> {
    opd_from_series(x, y, h, 0).ok().map(|e| e.value)
}

/// `(u - sum v w) / (1 - sum v w)`, written out directly.
fn f(u: f64, v: &[f64], w: &[f64]) -> f64 {
    let s: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
    (u - s) / (1.0 - s)
}

proptest! {
    #[test]
    fn never_exceeds_one((x, y) in series(5..=60), h in 1usize..=3) {
        if let Some(v) = opd_value(&x, &y, h) {
            prop_assert!(v <= 1.0);
        }
    }

    #[test]
    fn one_exactly_when_every_pattern_matches((x, y) in series(5..=40), h in 1usize..=2) {
        if let Some(v) = opd_value(&x, &y, h) {
            let all_match = x.windows(h + 1).zip(y.windows(h + 1))
                .all(|(a, b)| encode_pattern(a).unwrap() == encode_pattern(b).unwrap());
            prop_assert_eq!(v == 1.0, all_match);
        }
    }

    #[test]
    fn monotone_transform_invariance((x, y) in series(5..=60), h in 1usize..=3) {
        let gx: Vec<f64> = x.iter().map(|v| (v / 50.0).exp()).collect();
        let gy: Vec<f64> = y.iter().map(|v| 3.0 * v - 7.0).collect();
        prop_assert_eq!(opd_value(&x, &y, h), opd_value(&gx, &gy, h));
    }

    #[test]
    fn simultaneous_permutation_invariance(seed in any::<u64>(), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let mut rng = Seed::from(seed).rng();
        let draw = |rng: &mut _| -> Vec<[f64; 3]> {
            (0..40).map(|_| [standard_normal(rng), standard_normal(rng), standard_normal(rng)]).collect()
        };
        let x = draw(&mut rng);
        let y: Vec<[f64; 3]> = draw(&mut rng).iter().zip(&x).map(|(e, v)| [v[0] + e[0], v[1] + e[1], v[2] + e[2]]).collect();
        let permute = |vs: &[[f64; 3]]| -> Vec<[f64; 3]> { vs.iter().map(|v| [v[perm[0]], v[perm[1]], v[perm[2]]]).collect() };
        let a = joint_pattern_table(&x, &y, 2).unwrap().opd();
        let b = joint_pattern_table(&permute(&x), &permute(&y), 2).unwrap().opd();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn signed_opd_is_antisymmetric((x, y) in series(8..=60), h in 1usize..=2) {
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        if let (Ok(a), Ok(b)) = (signed_opd(&x, &y, h), signed_opd(&x, &neg, h)) {
            prop_assert_eq!(a, -b);
        }
    }
}

#[test]
fn delta_variance_equals_variance_of_linearised_terms() {
    let mut rng = Seed::from(11).rng();
    for h in 1..=3 {
        let k: usize = (1..=h + 1).product();
        let n = 400;
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..=h).map(|_| standard_normal(&mut rng)).collect()).collect();
        let y: Vec<Vec<f64>> = x
            .iter()
            .map(|v| v.iter().map(|a| 0.6 * a + standard_normal(&mut rng)).collect())
            .collect();
        let est = opd_iid_estimate(&x, &y, h, 0.95).unwrap();

        let codes: Vec<(usize, usize)> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (encode_pattern(a).unwrap().index(), encode_pattern(b).unwrap().index()))
            .collect();
        let mut qx = vec![0.0; k];
        let mut qy = vec![0.0; k];
        let mut u = 0.0;
        for &(a, b) in &codes {
            qx[a] += 1.0 / n as f64;
            qy[b] += 1.0 / n as f64;
            if a == b {
                u += 1.0 / n as f64;
            }
        }
        let g = grad_f(u, &qx, &qy).unwrap();
        // xi_i = (match indicator, X pattern indicators, Y pattern indicators).
        let z: Vec<f64> = codes
            .iter()
            .map(|&(a, b)| if a == b { g[0] } else { 0.0 } + g[1 + a] + g[1 + k + b])
            .collect();
        let mean = z.iter().sum::<f64>() / n as f64;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let got = est.variance.unwrap();
        assert!((got - var).abs() <= 1e-10 * var.max(1e-12), "h={h}: {got} vs {var}");
        let se = (var / n as f64).sqrt();
        assert!((est.ci_high.unwrap() - est.value - 1.959_963_984_540_054 * se).abs() < 1e-12);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = Seed::from(5).rng();
    for trial in 0..100 {
        let k = [2usize, 6, 24][trial % 3];
        let simplex = |rng: &mut _| -> Vec<f64> {
            let raw: Vec<f64> = (0..k).map(|_| 0.05 + open_uniform(rng)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|r| r / s).collect()
        };
        let v = simplex(&mut rng);
        let w = simplex(&mut rng);
        let s: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let u = s + (1.0 - s) * open_uniform(&mut rng);
        let g = grad_f(u, &v, &w).unwrap();
        let step = 1e-6;
        let central = |plus: f64, minus: f64| (plus - minus) / (2.0 * step);
        let mut fd = vec![central(f(u + step, &v, &w), f(u - step, &v, &w))];
        for i in 0..k {
            let (mut vp, mut vm) = (v.clone(), v.clone());
            vp[i] += step;
            vm[i] -= step;
            fd.push(central(f(u, &vp, &w), f(u, &vm, &w)));
        }
        for i in 0..k {
            let (mut wp, mut wm) = (w.clone(), w.clone());
            wp[i] += step;
            wm[i] -= step;
            fd.push(central(f(u, &v, &wp), f(u, &v, &wm)));
        }
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn shifted_pairing_truncates_to_common_length() {
    let x: Vec<f64> = (0..30).map(|i| ((i * 37) % 11) as f64).collect();
    for shift in 0..4 {
        let mut y = vec![0.0; shift];
        y.extend_from_slice(&x[..30 - shift]);
        let est = opd_from_series(&x, &y, 2, shift).unwrap();
        assert_eq!(est.sample_size, 30 - 2 - shift);
        assert_eq!(est.value, 1.0);
    }
}
