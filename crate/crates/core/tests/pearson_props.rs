use nalgebra::{DMatrix, SymmetricEigen};
use ordpat::pearson::{pearson_mv, principal_sqrt, window_covariances};
use ordpat::rng::{standard_normal, Seed};
use proptest::prelude::*;

fn correlated(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = Seed::from(seed).rng();
    let x: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
    let y = x.iter().map(|v| 0.5 * v + standard_normal(&mut rng)).collect();
    (x, y)
}

fn scalar_cov(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum::<f64>() / (n - 1.0)
}

proptest! {
    #[test]
    fn self_correlation_and_scale(seed in any::<u64>(), h in 1usize..=4, c in 0.01f64..100.0) {
        let (x, y) = correlated(120, seed);
        prop_assert!((pearson_mv(&x, &x, h).unwrap().value - 1.0).abs() < 1e-8);
        let base = pearson_mv(&x, &y, h).unwrap().value;
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        prop_assert!((pearson_mv(&cx, &y, h).unwrap().value - base).abs() < 1e-9);
        prop_assert!(base.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn numerator_is_sum_of_coordinate_covariances(seed in any::<u64>(), h in 1usize..=4) {
        let (x, y) = correlated(90, seed);
        let c = window_covariances(&x, &y, h).unwrap();
        let m = x.len() - h;
        let direct: f64 = (0..=h).map(|k| scalar_cov(&x[k..k + m], &y[k..k + m])).sum();
        prop_assert!((c.sigma_xy.trace() - direct).abs() < 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn principal_root_of_product(seed in any::<u64>(), h in 1usize..=4) {
        let (x, y) = correlated(90, seed);
        let c = window_covariances(&x, &y, h).unwrap();
        let rx = principal_sqrt(&c.sigma_x);
        let inner: DMatrix<f64> = &rx * &c.sigma_y * &rx;
        let inner = (&inner + inner.transpose()) * 0.5;
        let r = principal_sqrt(&inner);
        prop_assert!((&r * &r - &inner).norm() <= 1e-8 * inner.norm());
        prop_assert!(SymmetricEigen::new(r).eigenvalues.iter().all(|&l| l >= -1e-12));
    }
}
