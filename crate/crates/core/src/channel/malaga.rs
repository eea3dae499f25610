use crate::error::{Error, Result};
use crate::specfun::{ln_binomial, ln_gamma_pos};

/// Below this off-axis scatter power the Gamma–Gamma reduction is used.
pub const GG_THRESHOLD: f64 = 1e-12;

/// Málaga (𝓜) turbulence model inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalagaParams {
    pub alpha: f64,
    pub beta: u32,
    pub b0: f64,
    pub omega: f64,
    pub rho_m: f64,
    pub phi_ab: f64,
}

/// Constants of the 𝓜 density. `a` and `a_k` may over- or underflow for
/// extreme parameters; the log forms are what the evaluators use.
#[derive(Debug, Clone, PartialEq)]
pub struct MalagaDerived {
    pub g: f64,
    pub omega_prime: f64,
    pub a: f64,
    pub a_k: Vec<f64>,
    pub gg_mode: bool,
    /// `ln(A·a_k·B^{−(α+k)/2})` for k = 1..=β, with `B = αβ/(gβ+Ω′)`. In
    /// GG mode only k = β is finite.
    pub ln_weights: Vec<f64>,
}

impl MalagaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if self.beta == 0 {
            return Err(Error::invalid("beta", "must be a positive integer"));
        }
        if !(self.b0 > 0.0 && self.b0.is_finite()) {
            return Err(Error::invalid("b0", format!("must be positive, got {}", self.b0)));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid("Omega", format!("must be ≥ 0, got {}", self.omega)));
        }
        if !(0.0..=1.0).contains(&self.rho_m) {
            return Err(Error::invalid("rho_M", format!("must lie in [0, 1], got {}", self.rho_m)));
        }
        if !self.phi_ab.is_finite() {
            return Err(Error::invalid("phi_AB", "must be finite"));
        }
        Ok(())
    }
}

impl MalagaDerived {
    /// `B = αβ/(gβ + Ω′)`.
    pub fn b(&self, p: &MalagaParams) -> f64 {
        p.alpha * f64::from(p.beta) / (self.g * f64::from(p.beta) + self.omega_prime)
    }

    /// Indices k (1-based) with a non-vanishing weight, paired with the
    /// weight itself.
    pub fn weights(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.ln_weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_finite())
            .map(|(k, w)| (k as u32 + 1, w.exp()))
    }

    /// Smallest k with a non-vanishing weight: 1, or β in GG mode.
    pub fn k_min(&self) -> u32 {
        self.weights().next().map_or(1, |(k, _)| k)
    }
}

pub fn derive_malaga_constants(p: &MalagaParams) -> Result<MalagaDerived> {
    p.validate()?;
    let alpha = p.alpha;
    let beta = f64::from(p.beta);
    let g = 2.0 * p.b0 * (1.0 - p.rho_m);
    let omega_prime = p.omega
        + 2.0 * p.b0 * p.rho_m
        + 2.0 * (2.0 * p.b0 * p.rho_m * p.omega).sqrt() * p.phi_ab.cos();
    if !(omega_prime > 0.0) {
        return Err(Error::invalid(
            "Omega'",
            format!("coherent power must be positive, got {omega_prime}"),
        ));
    }
    let gb = g * beta + omega_prime;
    let ln_b = (alpha * beta / gb).ln();
    let gg_mode = g < GG_THRESHOLD;
    if gg_mode {
        let ln_ab = std::f64::consts::LN_2 + 0.5 * (alpha + beta) * (alpha * beta / omega_prime).ln()
            - ln_gamma_pos(alpha)
            - ln_gamma_pos(beta);
        let mut a_k = vec![0.0; p.beta as usize];
        let mut ln_weights = vec![f64::NEG_INFINITY; p.beta as usize];
        a_k[p.beta as usize - 1] = ln_ab.exp();
        ln_weights[p.beta as usize - 1] = ln_ab - 0.5 * (alpha + beta) * ln_b;
        return Ok(MalagaDerived {
            g,
            omega_prime,
            // A alone is singular here; report the retained product A·a_β
            // through a_k and keep A = 1.
            a: 1.0,
            a_k,
            gg_mode,
            ln_weights,
        });
    }
    let ln_a = std::f64::consts::LN_2 + 0.5 * alpha * alpha.ln()
        - (1.0 + 0.5 * alpha) * g.ln()
        - ln_gamma_pos(alpha)
        + (beta + 0.5 * alpha) * (g * beta / gb).ln();
    let mut a_k = Vec::with_capacity(p.beta as usize);
    let mut ln_weights = Vec::with_capacity(p.beta as usize);
    for k in 1..=p.beta {
        let kf = f64::from(k);
        let ln_ak = ln_binomial(u64::from(p.beta - 1), u64::from(k - 1))
            + (1.0 - 0.5 * kf) * gb.ln()
            - ln_gamma_pos(kf)
            + (kf - 1.0) * (omega_prime / g).ln()
            + 0.5 * kf * (alpha / beta).ln();
        a_k.push(ln_ak.exp());
        ln_weights.push(ln_a + ln_ak - 0.5 * (alpha + kf) * ln_b);
    }
    Ok(MalagaDerived {
        g,
        omega_prime,
        a: ln_a.exp(),
        a_k,
        gg_mode,
        ln_weights,
    })
}
