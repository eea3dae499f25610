use crate::channel::RfHopParams;
use crate::error::Result;

use super::{Method, OutageEstimate, Scenario};

/// Probability that the selected relay's actual SNR exceeds `gamma_th`:
/// `l·C(M,l) Σ_i C(l−1,i)(−1)^i e^{−γ_th(M−l+i+1)/(ψ_i μ₁)}/(M−l+i+1)`.
pub fn im1_closed_form(rf: &RfHopParams, gamma_th: f64) -> Result<f64> {
    rf.validate()?;
    let mut sum = 0.0;
    for (i, a) in rf.alternating_weights().into_iter().enumerate() {
        let i = i as u32;
        let n = f64::from(rf.relays - rf.rank + i + 1);
        sum += a / n * (-gamma_th * n / (rf.psi(i) * rf.mu1)).exp();
    }
    Ok(rf.selection_factor() * sum)
}

/// Outage floor as μ₂ → ∞: `1 − ℑ₁`. Depends on the RF hop only.
pub fn outage_floor_mu2(s: &Scenario) -> Result<OutageEstimate> {
    s.validate()?;
    let im1 = im1_closed_form(&s.rf, s.gamma_th)?;
    Ok(OutageEstimate::new(
        1.0 - im1,
        f64::EPSILON * f64::from(s.rf.rank),
        Method::FloorMu2,
        u64::from(s.rf.rank),
    ))
}
