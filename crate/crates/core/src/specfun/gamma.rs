//! Log-gamma for real and complex arguments.
//!
//! The real routine combines a Taylor expansion of `ln Γ(1 + ε)` (which keeps
//! full relative accuracy around the zeros at 1 and 2) with downward
//! recurrence and the Stirling series for large arguments. The complex
//! routine shifts into the Stirling region and uses reflection for the left
//! half-plane; it feeds the Mellin–Barnes integrands, where only `exp` of the
//! result matters and the branch of the imaginary part is irrelevant.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_MIN: f64 = 15.0;

/// ζ(k) − 1 for k = 2..=16.
const ZETA_MINUS_ONE: [f64; 15] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_1,
    0.000_061_248_135_058_704_83,
    0.000_030_588_236_307_020_49,
    0.000_015_282_259_408_651_87,
];

/// B₂ⱼ / (2j(2j − 1)) for j = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn zeta_minus_one(k: usize) -> f64 {
    if k <= 16 {
        ZETA_MINUS_ONE[k - 2]
    } else {
        (2..=14).map(|n| (n as f64).powi(-(k as i32))).sum()
    }
}

/// `ln Γ(1 + ε) + ln(1 + ε)` for |ε| ≤ 1/2.
fn ln_gamma_near_two(eps: f64) -> f64 {
    let mut sum = eps * (1.0 - EULER_GAMMA);
    let mut pow = -eps;
    for k in 2..60 {
        pow *= -eps;
        let term = zeta_minus_one(k) * pow / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series * inv
}

/// Natural logarithm of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "ln_gamma",
            detail: format!("argument must be positive and finite, got {x}"),
        });
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x
        let eps = x;
        ln_gamma_near_two(eps) - (1.0 + eps).ln() - x.ln()
    } else if x < 1.5 {
        let eps = x - 1.0;
        ln_gamma_near_two(eps) - eps.ln_1p()
    } else if x < 2.5 {
        ln_gamma_near_two(x - 2.0)
    } else if x < STIRLING_MIN {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        ln_gamma_near_two(y - 2.0) + prod.ln()
    } else {
        stirling(x)
    }
}

/// `sin(πx)` with exact argument reduction.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    if r == 0.0 {
        return 0.0;
    }
    let s = (PI * r).sin();
    if n % 2.0 == 0.0 {
        s
    } else {
        -s
    }
}

/// `(ln |Γ(x)|, sign Γ(x))` for any real x that is not a pole.
///
/// Returns `None` at the poles x = 0, −1, −2, …
pub fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        return Some((ln_gamma_pos(x), 1.0));
    }
    if x == x.floor() {
        return None;
    }
    let s = sin_pi(x);
    let ln = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
    Some((ln, s.signum()))
}

/// Γ(x) for real x; infinite at the poles.
pub fn gamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        Some((l, s)) => s * l.exp(),
        None => f64::INFINITY,
    }
}

fn stirling_complex(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series * inv
}

/// `ln sin(πz)` for complex z, safe for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if (PI * y).abs() < 600.0 {
        let r = x - 2.0 * (x / 2.0).round();
        let s = Complex64::new(
            (PI * r).sin() * (PI * y).cosh(),
            (PI * r).cos() * (PI * y).sinh(),
        );
        s.ln()
    } else if y > 0.0 {
        Complex64::new(PI * y - std::f64::consts::LN_2, PI / 2.0 - PI * x)
    } else {
        Complex64::new(-PI * y - std::f64::consts::LN_2, PI * x - PI / 2.0)
    }
}

/// Logarithm of Γ(z) for complex z away from the poles.
///
/// The imaginary part is correct modulo 2π only.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1 − z) = π / sin(πz)
        let one_minus = Complex64::new(1.0 - z.re, -z.im);
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_complex(one_minus);
    }
    if z.re >= STIRLING_MIN || z.im.abs() >= STIRLING_MIN {
        return stirling_complex(z);
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.re < STIRLING_MIN {
        prod *= w;
        w += 1.0;
    }
    stirling_complex(w) - prod.ln()
}

/// Logarithm of the binomial coefficient C(n, k).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma_pos(n as f64 + 1.0) - ln_gamma_pos(k as f64 + 1.0) - ln_gamma_pos((n - k) as f64 + 1.0)
}

/// C(n, k) as a float, computed exactly for moderate n.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 60 {
        let mut acc: u128 = 1;
        for j in 0..k {
            acc = acc * (n - j) as u128 / (j + 1) as u128;
        }
        acc as f64
    } else {
        ln_binomial(n, k).exp().round()
    }
}
