//! Normal and chi-square distribution helpers.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail `1 − Φ(x)`, accurate far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("probability {p} outside (0, 1)")));
    }
    Ok(-std::f64::consts::SQRT_2 * erfc_inv(2.0 * p))
}

pub fn chi_square_cdf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(dof / 2.0, x / 2.0)
    }
}

pub fn chi_square_sf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(dof / 2.0, x / 2.0)
    }
}

/// Chi-square quantile: Wilson–Hilferty start, refined by bisection on the
/// regularized incomplete gamma function.
pub fn chi_square_quantile(p: f64, dof: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("probability {p} outside (0, 1)")));
    }
    if !(dof > 0.0 && dof.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid degrees of freedom {dof}")));
    }
    let z = normal_quantile(p)?;
    let c = 2.0 / (9.0 * dof);
    let guess = (dof * (1.0 - c + z * c.sqrt()).powi(3)).max(f64::MIN_POSITIVE);

    let (mut lo, mut hi) = (guess, guess);
    while chi_square_cdf(lo, dof) > p && lo > 1e-300 {
        lo *= 0.5;
    }
    while chi_square_cdf(hi, dof) < p {
        hi = hi * 2.0 + 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
