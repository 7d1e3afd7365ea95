use crate::error::{Error, Result};

/// Summed element-wise Huber loss and its gradient with respect to `pred`.
///
/// Per element, with residual `r = pred - target`:
/// loss = r^2 / 2 for |r| <= delta, else delta * (|r| - delta / 2);
/// gradient = r for |r| <= delta, else delta * sign(r).
pub fn huber_loss(pred: &[f64], target: &[f64], delta: f64) -> Result<(f64, Vec<f64>)> {
    if pred.len() != target.len() {
        return Err(Error::Dimension(format!(
            "huber loss lengths differ: {} vs {}",
            pred.len(),
            target.len()
        )));
    }
    if delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "huber delta must be positive, got {delta}"
        )));
    }
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(pred.len());
    for (p, t) in pred.iter().zip(target) {
        let r = p - t;
        if r.abs() <= delta {
            loss += 0.5 * r * r;
            grad.push(r);
        } else {
            loss += delta * (r.abs() - 0.5 * delta);
            grad.push(delta * r.signum());
        }
    }
    if !loss.is_finite() {
        return Err(Error::Numeric("non-finite huber loss".into()));
    }
    Ok((loss, grad))
}

/// Summed squared error `sum r^2` and its gradient `2 r`.
pub fn squared_loss(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    if pred.len() != target.len() {
        return Err(Error::Dimension(format!(
            "squared loss lengths differ: {} vs {}",
            pred.len(),
            target.len()
        )));
    }
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(pred.len());
    for (p, t) in pred.iter().zip(target) {
        let r = p - t;
        loss += r * r;
        grad.push(2.0 * r);
    }
    if !loss.is_finite() {
        return Err(Error::Numeric("non-finite squared loss".into()));
    }
    Ok((loss, grad))
}
