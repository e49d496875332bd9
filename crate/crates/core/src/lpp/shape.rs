//! Limit shapes of the interface and the passage times.

use crate::error::{Error, Result};

/// `lim xi_[tx](t) / t`.
pub fn shape_g(x: f64) -> f64 {
    if x < -1.0 {
        -x
    } else if x <= 1.0 {
        0.25 * (1.0 - x) * (1.0 - x)
    } else {
        0.0
    }
}

/// `lim L_[tx],[ty] / t = (sqrt(x + y) + sqrt(y))^2` for `y > max(0, -x)`.
pub fn shape_gamma(x: f64, y: f64) -> Result<f64> {
    if !(y > 0.0 && y > -x) {
        return Err(Error::ShapeDomain { x, y });
    }
    let s = (x + y).sqrt() + y.sqrt();
    Ok(s * s)
}

/// `lim T_[tx],[ty] / t = (sqrt(x) + sqrt(y))^2` for `x, y >= 0`.
pub fn gamma_tilde(x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::ShapeDomain { x, y });
    }
    let s = x.sqrt() + y.sqrt();
    Ok(s * s)
}
