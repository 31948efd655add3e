use ordpat::procgen::{
    gen_biv_ar1, gen_biv_ar2, gen_block_multinormal, gen_iid_ar1_pair, gen_shifted_ar1, Family, ProcessSpec,
};
use ordpat::rng::Seed;
use proptest::prelude::*;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn cov(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum::<f64>() / (a.len() - 1) as f64
}

fn corr(a: &[f64], b: &[f64]) -> f64 {
    cov(a, b) / (sd(a) * sd(b))
}

fn diffs(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

fn lag1(v: &[f64]) -> f64 {
    corr(&v[..v.len() - 1], &v[1..])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identical_specs_give_identical_output(seed in any::<u64>(), fam in 0usize..6, n in 3usize..200) {
        let family = Family::ALL[fam];
        let params = match family.param_names().len() {
            1 => vec![0.3],
            _ => vec![0.4, -0.5],
        };
        let spec = ProcessSpec::new(family, params, n, seed).unwrap();
        prop_assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        prop_assert_eq!(spec.generate().unwrap().len(), n);
    }

    #[test]
    fn substreams_differ(key in any::<u64>(), a in 0u64..1000, b in 0u64..1000) {
        prop_assume!(a != b);
        let (x, _) = gen_iid_ar1_pair(0.5, 8, Seed::new(key, a)).unwrap();
        let (y, _) = gen_iid_ar1_pair(0.5, 8, Seed::new(key, b)).unwrap();
        prop_assert_ne!(x, y);
    }
}

#[test]
fn independent_ar1_moments() {
    let (x, y) = gen_iid_ar1_pair(0.0, 200_000, 1).unwrap();
    assert!(lag1(&x).abs() < 0.01);
    assert!((sd(&x) - 1.0).abs() < 0.01);
    let (x, y2) = gen_iid_ar1_pair(0.5, 1_000_000, 2).unwrap();
    assert!((lag1(&x) - 0.5).abs() < 0.01);
    assert!((lag1(&y2) - 0.5).abs() < 0.01);
    assert!(corr(&x, &y2).abs() < 0.01);
    assert!(y.len() == 200_000);
}

#[test]
fn block_multinormal_cross_covariance() {
    let (x, y) = gen_block_multinormal(0.2, 100_000, 3).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let a: Vec<f64> = x.iter().map(|v| v[i]).collect();
            let b: Vec<f64> = y.iter().map(|v| v[j]).collect();
            assert!((cov(&a, &b) - 0.2).abs() < 0.01, "({i},{j})");
        }
    }
    let (x, y) = gen_block_multinormal(0.0, 100_000, 4).unwrap();
    let a: Vec<f64> = x.iter().map(|v| v[0]).collect();
    let b: Vec<f64> = y.iter().map(|v| v[2]).collect();
    assert!(cov(&a, &b).abs() < 0.01);
    assert!(gen_block_multinormal(0.34, 10, 0).is_err());
}

#[test]
fn bivariate_ar1_moments() {
    let (x, y) = gen_biv_ar1(0.7, -0.7, 1_000_000, 5, false).unwrap();
    assert!((sd(&x).powi(2) / 50.0 - 1.0).abs() < 0.1, "{}", sd(&x).powi(2));
    assert!(corr(&x, &y).abs() < 0.05);
    let r = corr(&diffs(&x), &diffs(&y));
    assert!((r - 0.7 / 0.51f64.sqrt()).abs() < 0.01, "{r}");
    let (x, y) = gen_biv_ar1(0.0, 0.0, 100_000, 6, false).unwrap();
    assert!(corr(&x, &y).abs() < 0.01);
    assert!(lag1(&x).abs() < 0.01);
}

#[test]
fn ar2_increments_uncorrelated() {
    let (x, y) = gen_biv_ar2(0.01, 0.98, 1_000_000, 7).unwrap();
    let (dx, dy) = (diffs(&x), diffs(&y));
    let k = dx.len();
    assert!(corr(&x, &y).abs() < 0.03);
    assert!(corr(&dx, &dy).abs() < 0.03);
    // Neighbouring increments: Cov(X2 - X1, Y3 - Y2) = -b Var(X).
    let lead = corr(&dx[..k - 1], &dy[1..]);
    assert!((lead + 0.49).abs() < 0.03, "{lead}");
    let (x, y) = gen_biv_ar2(0.0, 0.0, 100_000, 8).unwrap();
    assert!(corr(&x, &y).abs() < 0.01);
    assert!(lag1(&x).abs() < 0.01);
}

#[test]
fn shifted_path_alignment() {
    let (x, y) = gen_shifted_ar1(0.9, 1000, 9).unwrap();
    for i in 0..999 {
        assert_eq!(y[i], x[i + 1]);
    }
}

#[test]
fn long_paths_are_centred() {
    let n = 400_000;
    let paths: Vec<(&str, Vec<f64>)> = vec![
        ("iid-ar1", gen_iid_ar1_pair(0.5, n, 10).unwrap().0),
        ("biv-ar1", gen_biv_ar1(0.3, 0.2, n, 11, false).unwrap().0),
        ("biv-ar1-rotation", gen_biv_ar1(0.3, 0.2, n, 12, true).unwrap().1),
        ("biv-ar2", gen_biv_ar2(0.3, 0.2, n, 13).unwrap().0),
        ("shifted-ar1", gen_shifted_ar1(0.5, n, 14).unwrap().1),
    ];
    for (name, p) in paths {
        let bound = 4.0 * sd(&p) / (n as f64).sqrt();
        assert!(mean(&p).abs() < bound, "{name}: {} vs {bound}", mean(&p));
    }
}
