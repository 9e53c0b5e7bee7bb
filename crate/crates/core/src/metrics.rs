//! Error measures for fitted slopes.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::estimator::{predict, reconstruct_slope, FittedModel};
use crate::funcspace::{l2_inner, l2_norm, Curve, Dataset};
use crate::kernels::CovarianceSpec;
use crate::Result;

/// `sqrt(mean((p_i - y_i)^2))`.
pub fn rmse_from(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(invalid!("rmse over an empty set"));
    }
    if predictions.len() != targets.len() {
        return Err(invalid!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        ));
    }
    let mut sum = 0.0;
    for (p, y) in predictions.iter().zip(targets) {
        let d = p - y;
        sum += d * d;
    }
    Ok(libm::sqrt(sum / predictions.len() as f64))
}

/// Noiseless targets `<beta, X_i>` for each test curve.
pub fn noiseless_targets(curves: &[Curve], beta: &Curve) -> Result<Vec<f64>> {
    curves.iter().map(|x| l2_inner(beta, x)).collect()
}

/// Test-set RMSE of `model`. Targets are `<beta_true, X>` when a true slope
/// is given, otherwise the stored (noisy) responses.
pub fn rmse(model: &FittedModel, test: &Dataset, beta_true: Option<&Curve>) -> Result<f64> {
    if test.is_empty() {
        return Err(invalid!("test set is empty"));
    }
    let targets = match beta_true {
        Some(beta) => noiseless_targets(&test.curves, beta)?,
        None => test.responses.clone(),
    };
    let predictions: Vec<f64> = test
        .curves
        .iter()
        .map(|x| predict(model, x))
        .collect::<Result<_>>()?;
    rmse_from(&predictions, &targets)
}

/// `||beta_hat - beta_true||_{L2}` on `beta_true`'s grid.
pub fn l2_slope_error(model: &FittedModel, beta_true: &Curve) -> Result<f64> {
    let slope = reconstruct_slope(model, beta_true.grid())?;
    Ok(l2_norm(&slope.sub(beta_true)?))
}

/// `sqrt(∫∫ d(s) C(s,t) d(t) ds dt)`, clipped at 0 under the root.
pub fn covariance_seminorm(d: &Curve, cov: &CovarianceSpec) -> Result<f64> {
    let grid: &Arc<_> = d.grid();
    let c = cov.matrix(grid.points())?;
    let wd = d.weighted();
    let g = wd.len();
    let mut total = 0.0;
    for q in 0..g {
        let mut col = 0.0;
        for p in 0..g {
            col += c[(p, q)] * wd[p];
        }
        total += col * wd[q];
    }
    Ok(libm::sqrt(total.max(0.0)))
}

/// `||C^{1/2} (beta_true - beta_hat)||_{L2}`, the excess prediction risk scale.
pub fn prediction_seminorm_error(
    model: &FittedModel,
    beta_true: &Curve,
    cov: &CovarianceSpec,
) -> Result<f64> {
    let slope = reconstruct_slope(model, beta_true.grid())?;
    covariance_seminorm(&beta_true.sub(&slope)?, cov)
}
