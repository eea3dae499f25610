use crate::error::{Error, Result};

use super::{GeometryDerived, MalagaDerived, PointingDerived};

/// Physical power budget for both hops. Everything is linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub ps: f64,
    pub pt: f64,
    pub eta: f64,
    pub sigma_sr2: f64,
    pub sigma_rd2: f64,
    pub m_index: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("Ps", self.ps),
            ("Pt", self.pt),
            ("eta", self.eta),
            ("sigma_sr2", self.sigma_sr2),
            ("sigma_rd2", self.sigma_rd2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.m_index != 1.0 {
            return Err(Error::invalid("m_index", "only m = 1 is modelled"));
        }
        Ok(())
    }

    /// Average SNR of the RF hop, `P_s/σ²_SR`.
    pub fn mu1(&self) -> f64 {
        self.ps / self.sigma_sr2
    }

    /// Electrical SNR of the FSO hop, `η²P_t²A₀²I_l²κ²(g+Ω′)²/σ²_RD`.
    pub fn mu2(
        &self,
        malaga: &MalagaDerived,
        pointing: &PointingDerived,
        geometry: &GeometryDerived,
    ) -> f64 {
        let mean = pointing.a0_gain * geometry.path_loss * pointing.kappa * (malaga.g + malaga.omega_prime);
        (self.eta * self.pt * mean).powi(2) / self.sigma_rd2
    }
}
