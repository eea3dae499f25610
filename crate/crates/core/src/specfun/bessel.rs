//! Modified Bessel function I₀.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const ASYMPTOTIC_FROM: f64 = 30.0;

/// I₀(x) for x ≥ 0.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= ASYMPTOTIC_FROM {
        power_series(x)
    } else {
        asymptotic_scaled(x) * x.exp()
    })
}

/// e^{−x}·I₀(x) for x ≥ 0; finite for arbitrarily large x.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= ASYMPTOTIC_FROM {
        power_series(x) * (-x).exp()
    } else {
        asymptotic_scaled(x)
    })
}

fn check(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            function: "bessel_i0",
            detail: format!("negative argument {x}"),
        })
    }
}

fn power_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut t = 0.0;
    loop {
        t += 1.0;
        term *= q / (t * t);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

fn asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next > term || next < 1e-17 * sum {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * PI * x).sqrt()
}
