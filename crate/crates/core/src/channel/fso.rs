use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{golden_min, integrate_vertical_line, ln_gamma_complex};

use super::{
    derive_geometry, derive_malaga_constants, derive_pointing, FsoGeometry, GeometryDerived,
    MalagaDerived, MalagaParams, PointingDerived, PointingParams,
};

/// Raw inputs of the FSO hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoHopParams {
    pub malaga: MalagaParams,
    pub pointing: PointingParams,
    pub geometry: FsoGeometry,
    pub mu2: f64,
}

impl FsoHopParams {
    pub fn derive(&self) -> Result<FsoHop> {
        let pointing = derive_pointing(&self.pointing, &self.geometry)?;
        let mut hop = FsoHop::from_xi(self.malaga, pointing.xi, self.mu2)?;
        hop.pointing = Some(pointing);
        hop.geometry = Some(derive_geometry(&self.geometry)?);
        Ok(hop)
    }
}

/// FSO hop with all constants resolved. The SNR law depends on the pointing
/// geometry only through ξ, so a hop can also be built from ξ directly.
#[derive(Debug, Clone, PartialEq)]
pub struct FsoHop {
    pub malaga: MalagaParams,
    pub constants: MalagaDerived,
    pub xi: f64,
    pub mu2: f64,
    pub pointing: Option<PointingDerived>,
    pub geometry: Option<GeometryDerived>,
}

impl FsoHop {
    pub fn from_xi(malaga: MalagaParams, xi: f64, mu2: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::invalid("xi", format!("must be positive, got {xi}")));
        }
        if !(mu2 > 0.0 && mu2.is_finite()) {
            return Err(Error::invalid("mu2", format!("must be positive, got {mu2}")));
        }
        Ok(FsoHop {
            constants: derive_malaga_constants(&malaga)?,
            malaga,
            xi,
            mu2,
            pointing: None,
            geometry: None,
        })
    }

    pub fn with_mu2(&self, mu2: f64) -> Result<Self> {
        if !(mu2 > 0.0 && mu2.is_finite()) {
            return Err(Error::invalid("mu2", format!("must be positive, got {mu2}")));
        }
        Ok(FsoHop { mu2, ..self.clone() })
    }

    pub fn xi2(&self) -> f64 {
        self.xi * self.xi
    }

    pub fn kappa(&self) -> f64 {
        let x2 = self.xi2();
        x2 / (x2 + 1.0)
    }

    /// `c` with `x = c·√(γ/μ₂)` the argument of the SNR law's G-functions.
    pub fn scale(&self) -> f64 {
        let c = &self.constants;
        c.b(&self.malaga) * self.kappa() * (c.g + c.omega_prime)
    }

    /// Smallest right pole of the Mellin transform of the irradiance:
    /// `min(ξ², α, k_min)`.
    pub fn right_pole(&self) -> f64 {
        self.xi2()
            .min(self.malaga.alpha)
            .min(f64::from(self.constants.k_min()))
    }

    /// `ln[Γ(α−s)·Σ_k w_k Γ(k−s)]`, the Mellin kernel shared by the density,
    /// the CDF and the outage integrals.
    pub(crate) fn ln_kernel(&self, s: Complex64) -> Complex64 {
        let mut weights = self.constants.weights();
        let (k0, w0) = weights.next().expect("at least one Málaga weight");
        let mut prod = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(w0, 0.0);
        let mut k_prev = k0;
        for (k, w) in weights {
            for j in k_prev..k {
                prod *= f64::from(j) - s;
            }
            k_prev = k;
            sum += w * prod;
        }
        ln_gamma_complex(self.malaga.alpha - s)
            + ln_gamma_complex(f64::from(k0) - s)
            + sum.ln()
    }
}

const UNDERFLOW: f64 = -800.0;

fn margin(gap: f64) -> f64 {
    0.1 * gap.min(1.0)
}

fn line<F>(ln_f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    let m = margin(hi - lo);
    let c = golden_min(|c| ln_f(Complex64::new(c, 0.0)).re, lo + m, hi - m);
    // the line integral is bounded by its saddle magnitude; far below the
    // f64 range there is nothing left to resolve
    if ln_f(Complex64::new(c, 0.0)).re < UNDERFLOW {
        return Ok(0.0);
    }
    Ok(integrate_vertical_line(&ln_f, c)?.value)
}

fn check_gamma(gamma: f64, function: &'static str) -> Result<()> {
    if gamma >= 0.0 && !gamma.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            detail: format!("SNR must be non-negative, got {gamma}"),
        })
    }
}

/// Density of the FSO hop's instantaneous SNR.
///
/// At γ = 0 the density behaves like `γ^{b/2−1}` with `b = min(ξ², α, k_min)`,
/// so the limit is 0 for `b > 2` and `+∞` for `b < 2`.
pub fn gamma2_pdf(gamma: f64, fso: &FsoHop) -> Result<f64> {
    check_gamma(gamma, "gamma2_pdf")?;
    if gamma.is_infinite() {
        return Ok(0.0);
    }
    let hi = fso.right_pole();
    if gamma == 0.0 {
        return if hi > 2.0 {
            Ok(0.0)
        } else if hi < 2.0 {
            Ok(f64::INFINITY)
        } else {
            gamma2_pdf(fso.mu2 * 1e-200, fso)
        };
    }
    let x = fso.scale() * (gamma / fso.mu2).sqrt();
    let (ln_x, xi2) = (x.ln(), fso.xi2());
    let ln_f = |s: Complex64| fso.ln_kernel(s) + s * ln_x - (xi2 - s).ln();
    let value = line(ln_f, hi - 60.0 - 2.0 * x.sqrt(), hi)?;
    Ok((xi2 / (4.0 * gamma) * value).max(0.0))
}

/// CDF of the FSO hop's instantaneous SNR. Above the median it is formed
/// as `1 − F̄` so that it stays monotone as it saturates.
pub fn gamma2_cdf(gamma: f64, fso: &FsoHop) -> Result<f64> {
    check_gamma(gamma, "gamma2_cdf")?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    let f = cdf_line(gamma, fso)?;
    if f <= 0.5 {
        return Ok(f);
    }
    Ok((1.0 - ccdf_line(gamma, fso)?).clamp(0.0, 1.0))
}

/// Complementary CDF. In the upper tail it is evaluated on a contour left of
/// the origin, which keeps relative accuracy for tiny probabilities.
pub fn gamma2_ccdf(gamma: f64, fso: &FsoHop) -> Result<f64> {
    check_gamma(gamma, "gamma2_ccdf")?;
    if gamma == 0.0 {
        return Ok(1.0);
    }
    if gamma.is_infinite() {
        return Ok(0.0);
    }
    let c = ccdf_line(gamma, fso)?;
    if c <= 0.5 {
        return Ok(c);
    }
    Ok((1.0 - cdf_line(gamma, fso)?).clamp(0.0, 1.0))
}

fn cdf_line(gamma: f64, fso: &FsoHop) -> Result<f64> {
    let x = fso.scale() * (gamma / fso.mu2).sqrt();
    let (ln_x, xi2) = (x.ln(), fso.xi2());
    let ln_f = |s: Complex64| fso.ln_kernel(s) + s * ln_x - (s * (xi2 - s)).ln();
    let value = line(ln_f, 0.0, fso.right_pole())?;
    Ok((0.5 * xi2 * value).clamp(0.0, 1.0))
}

fn ccdf_line(gamma: f64, fso: &FsoHop) -> Result<f64> {
    let x = fso.scale() * (gamma / fso.mu2).sqrt();
    let (ln_x, xi2) = (x.ln(), fso.xi2());
    // moving the contour across s = 0 picks up the unit residue and flips
    // the sign of the 1/s factor
    let ln_f = |s: Complex64| fso.ln_kernel(s) + s * ln_x - (-s * (xi2 - s)).ln();
    let value = line(ln_f, -60.0 - 2.0 * x.sqrt(), 0.0)?;
    Ok((0.5 * xi2 * value).clamp(0.0, 1.0))
}
