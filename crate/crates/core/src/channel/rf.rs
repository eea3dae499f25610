use crate::error::{Error, Result};
use crate::specfun::{bessel_i0_scaled, binomial};

/// First hop: `relays` Rayleigh links, the `rank`-th worst (by outdated CSI)
/// is selected. `rho` correlates the estimated and actual SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfHopParams {
    pub mu1: f64,
    pub rho: f64,
    pub relays: u32,
    pub rank: u32,
}

impl RfHopParams {
    pub fn new(mu1: f64, rho: f64, relays: u32, rank: u32) -> Result<Self> {
        let p = RfHopParams {
            mu1,
            rho,
            relays,
            rank,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu1 > 0.0 && self.mu1.is_finite()) {
            return Err(Error::invalid("mu1", format!("must be positive, got {}", self.mu1)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid("rho", format!("must lie in [0, 1], got {}", self.rho)));
        }
        if self.relays == 0 {
            return Err(Error::invalid("M", "at least one relay is required"));
        }
        if self.rank == 0 || self.rank > self.relays {
            return Err(Error::invalid(
                "l",
                format!("rank {} outside 1..={}", self.rank, self.relays),
            ));
        }
        Ok(())
    }

    /// `ψ_i = (M − l + i)(1 − ρ) + 1`.
    pub fn psi(&self, i: u32) -> f64 {
        f64::from(self.relays - self.rank + i) * (1.0 - self.rho) + 1.0
    }

    /// `l·C(M, l)`, the order-statistic normalization.
    pub fn selection_factor(&self) -> f64 {
        f64::from(self.rank) * binomial(u64::from(self.relays), u64::from(self.rank))
    }

    /// Signed weights `C(l−1, i)(−1)^i` for `i = 0..l`.
    pub fn alternating_weights(&self) -> Vec<f64> {
        let n = u64::from(self.rank - 1);
        (0..=n)
            .map(|i| {
                let c = binomial(n, i);
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect()
    }
}

/// Joint density of the actual SNR `x` and the estimated SNR `y` of the
/// selected relay.
///
/// The alternating sum over `i` is folded into `(1 − e^{−y/μ₁})^{l−1}` and the
/// Bessel factor is carried in scaled form, so large arguments never overflow.
pub fn rf_joint_pdf(x: f64, y: f64, rf: &RfHopParams) -> Result<f64> {
    rf.validate()?;
    if rf.rho >= 1.0 {
        return Err(Error::invalid("rho", "ρ = 1 has no joint density"));
    }
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::Domain {
            function: "rf_joint_pdf",
            detail: format!("negative SNR ({x}, {y})"),
        });
    }
    let mu = rf.mu1;
    let s = (1.0 - rf.rho) * mu;
    let z = 2.0 * (rf.rho * x * y).sqrt() / s;
    let m_minus_l = f64::from(rf.relays - rf.rank);
    let exponent = z - (x + y) / s - m_minus_l * y / mu;
    let order = (-(-y / mu).exp_m1()).powi(rf.rank as i32 - 1);
    Ok(rf.selection_factor() / (s * mu) * exponent.exp() * bessel_i0_scaled(z)? * order)
}
