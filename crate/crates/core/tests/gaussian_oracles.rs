use nalgebra::DMatrix;
use ordpat::gaussian::{
    ar1_opd1, biv_ar1_window_model, bivariate_orthant, kendall_gaussian, mc_orthant, opd1_gaussian,
    opd_gaussian_decomposition, opd_gaussian_split, GaussianModel,
};
use ordpat::kendall::kendall_vectors_with_ci;
use ordpat::procgen::gen_biv_ar1;
use ordpat::rng::Seed;

fn corr2(rho: f64) -> GaussianModel {
    GaussianModel::new(DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0])).unwrap()
}

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum();
    let va: f64 = a.iter().map(|u| (u - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|v| (v - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn diffs(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

#[test]
fn sign_symmetry() {
    for i in 0..=20 {
        let r = -1.0 + 0.1 * i as f64;
        assert!((opd1_gaussian(-r).unwrap() + opd1_gaussian(r).unwrap()).abs() < 1e-15);
        assert!((bivariate_orthant(r).unwrap() + bivariate_orthant(-r).unwrap() - 0.5).abs() < 1e-15);
    }
}

#[test]
fn orthant_thread_count_does_not_matter() {
    let m = corr2(0.3);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = one.install(|| mc_orthant(&m, 200_000, 12).unwrap());
    let b = three.install(|| mc_orthant(&m, 200_000, 12).unwrap());
    assert_eq!(a, b);
}

#[test]
fn kendall_of_block_extremes() {
    let d = 3;
    let indep = GaussianModel::new(DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        if r == c {
            1.0
        } else if r / d == c / d {
            0.4
        } else {
            0.0
        }
    }))
    .unwrap();
    let e = kendall_gaussian(&indep, 400_000, 1).unwrap();
    assert!(e.value.abs() < 3.0 * e.std_error, "{e:?}");
    let same = GaussianModel::new(DMatrix::from_fn(2 * d, 2 * d, |r, c| if r % d == c % d { 1.0 } else { 0.4 })).unwrap();
    let e = kendall_gaussian(&same, 400_000, 2).unwrap();
    assert!((e.value - 1.0).abs() < 3.0 * e.std_error, "{e:?}");
}

#[test]
fn kendall_of_pair_is_arcsine_law() {
    let r = 0.45;
    let e = kendall_gaussian(&corr2(r), 1_000_000, 3).unwrap();
    let want = opd1_gaussian(r).unwrap();
    assert!((e.value - want).abs() < 3.0 * e.std_error, "{} vs {want} (se {})", e.value, e.std_error);
}

#[test]
fn decomposition_extremes() {
    for h in 1..=2 {
        let len = h + 1;
        let ar = |lag: usize| 0.6f64.powi(lag as i32);
        let indep = GaussianModel::new(DMatrix::from_fn(2 * len, 2 * len, |r, c| {
            if r / len == c / len {
                ar((r % len).abs_diff(c % len))
            } else {
                0.0
            }
        }))
        .unwrap();
        let e = opd_gaussian_decomposition(&indep, h, 200_000, 4).unwrap();
        assert!(e.value.abs() < 3.0 * e.std_error, "h={h}: {e:?}");
        let same = GaussianModel::new(DMatrix::from_fn(2 * len, 2 * len, |r, c| ar((r % len).abs_diff(c % len)))).unwrap();
        let e = opd_gaussian_decomposition(&same, h, 200_000, 5).unwrap();
        assert!((e.value - 1.0).abs() < 3.0 * e.std_error, "h={h}: {e:?}");
    }
}

#[test]
fn split_form_agrees_with_full_sum() {
    for h in 1..=2 {
        let m = biv_ar1_window_model(0.5, -0.4, false, h).unwrap();
        let full = opd_gaussian_decomposition(&m, h, 400_000, 6).unwrap();
        let split = opd_gaussian_split(&m, h, 400_000, 6).unwrap();
        let tol = 3.0 * (full.std_error.powi(2) + split.std_error.powi(2)).sqrt();
        assert!((full.value - split.value).abs() < tol, "h={h}: {full:?} vs {split:?}");
    }
}

#[test]
fn decomposition_matches_order_one_closed_form() {
    let m = biv_ar1_window_model(0.5, -0.4, false, 1).unwrap();
    let e = opd_gaussian_decomposition(&m, 1, 1_000_000, 7).unwrap();
    let want = ar1_opd1(0.5, -0.4).unwrap();
    assert!((e.value - want).abs() < 3.0 * e.std_error, "{e:?} vs {want}");
}

#[test]
fn sampled_kendall_matches_orthant_value() {
    let m = biv_ar1_window_model(0.5, -0.4, false, 1).unwrap();
    let sampler = m.sampler().unwrap();
    let mut rng = Seed::from(21).rng();
    let draws: Vec<_> = (0..3000).map(|_| sampler.sample(&mut rng)).collect();
    let x: Vec<Vec<f64>> = draws.iter().map(|d| vec![d[0], d[1]]).collect();
    let y: Vec<Vec<f64>> = draws.iter().map(|d| vec![d[2], d[3]]).collect();
    let est = kendall_vectors_with_ci(&x, &y, 0.95, None).unwrap();
    let pop = kendall_gaussian(&m, 1_000_000, 22).unwrap();
    let se = (est.standard_error().unwrap().powi(2) + pop.std_error.powi(2)).sqrt();
    assert!((est.value - pop.value).abs() < 3.0 * se, "{} vs {} (se {se})", est.value, pop.value);
}

#[test]
fn rotation_cross_increment_correlations() {
    let (a, b) = (0.5, 0.6);
    let (x, y) = gen_biv_ar1(a, b, 1_000_000, 31, true).unwrap();
    let (dx, dy) = (diffs(&x), diffs(&y));
    let n = dx.len();
    // Corr(X2 - X1, Y3 - Y2) and Corr(X3 - X2, Y2 - Y1).
    let lead = corr(&dx[..n - 1], &dy[1..]);
    let lag = corr(&dx[1..], &dy[..n - 1]);
    assert!((lead + b).abs() < 0.02, "{lead}");
    assert!((lag - b).abs() < 0.02, "{lag}");
    assert!(corr(&dx, &dy).abs() < 0.02);
}
