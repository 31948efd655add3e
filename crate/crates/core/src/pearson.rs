//! Multivariate Pearson coefficient of the sliding windows:
//! `tr(S_xy) / tr((S_x S_y)^(1/2))`.
//!
//! `S_x S_y` is not symmetric, so the denominator is evaluated through the
//! similar matrix `S_x^(1/2) S_y S_x^(1/2)`, which is symmetric PSD and has the
//! same principal square-root trace.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::estimate::{DependenceEstimate, Measure};

/// Minimum eigenvalue relative to the largest one for a covariance to count as
/// positive definite.
pub const PD_EPS: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct WindowCovariances {
    pub sigma_x: DMatrix<f64>,
    pub sigma_y: DMatrix<f64>,
    /// `sigma_xy[(a, b)] = Cov(X_{1+a}, Y_{1+b})`.
    pub sigma_xy: DMatrix<f64>,
    pub windows: usize,
}

/// Sample covariances (denominator `m - 1`) over the overlapping windows.
pub fn window_covariances(x: &[f64], y: &[f64], order: usize) -> Result<WindowCovariances> {
    if x.len() != y.len() {
        return Err(Error::InputMismatch(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if order == 0 || x.len() < order + 2 {
        return Err(Error::InsufficientData(format!(
            "series of length {} yields fewer than 2 windows of order {order}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value in series".into()));
    }
    let d = order + 1;
    let m = x.len() - order;
    let matrix = |s: &[f64]| DMatrix::from_fn(m, d, |i, k| s[i + k]);
    let (wx, wy) = (matrix(x), matrix(y));
    let centre = |w: DMatrix<f64>| {
        let means = w.row_mean();
        let mut w = w;
        for mut row in w.row_iter_mut() {
            row -= &means;
        }
        w
    };
    let (cx, cy) = (centre(wx), centre(wy));
    let scale = 1.0 / (m as f64 - 1.0);
    Ok(WindowCovariances {
        sigma_x: cx.transpose() * &cx * scale,
        sigma_y: cy.transpose() * &cy * scale,
        sigma_xy: cx.transpose() * &cy * scale,
        windows: m,
    })
}

/// Principal square root of a symmetric PSD matrix; tiny negative eigenvalues
/// from rounding are treated as zero.
pub fn principal_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a.clone());
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

fn check_positive_definite(a: &DMatrix<f64>) -> Result<()> {
    let eig = SymmetricEigen::new(a.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(max > 0.0) || min <= PD_EPS * max {
        let ratio = if max > 0.0 { min / max } else { 0.0 };
        return Err(Error::SingularCovariance { ratio });
    }
    Ok(())
}

/// `tr((S_x S_y)^(1/2))` computed as `tr((S_x^(1/2) S_y S_x^(1/2))^(1/2))`.
pub fn sqrt_product_trace(sigma_x: &DMatrix<f64>, sigma_y: &DMatrix<f64>) -> f64 {
    let root_x = principal_sqrt(sigma_x);
    let inner = &root_x * sigma_y * &root_x;
    let inner = (&inner + inner.transpose()) * 0.5;
    principal_sqrt(&inner).trace()
}

pub fn pearson_from_covariances(c: &WindowCovariances) -> Result<f64> {
    check_positive_definite(&c.sigma_x)?;
    check_positive_definite(&c.sigma_y)?;
    Ok(c.sigma_xy.trace() / sqrt_product_trace(&c.sigma_x, &c.sigma_y))
}

pub fn pearson_mv(x: &[f64], y: &[f64], order: usize) -> Result<DependenceEstimate> {
    let c = window_covariances(x, y, order)?;
    let value = pearson_from_covariances(&c)?;
    Ok(DependenceEstimate::point(Measure::Pearson, value, order, x.len(), 0, c.windows))
}
