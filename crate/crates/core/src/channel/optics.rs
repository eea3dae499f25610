use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::erf;

/// Optical path: wavelength, link length, turbulence strength, attenuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoGeometry {
    pub wavelength: f64,
    pub distance: f64,
    pub cn2: f64,
    pub chi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryDerived {
    /// Wave number 2π/λ.
    pub iota: f64,
    /// Rytov variance.
    pub sigma_r2: f64,
    /// Deterministic path loss `exp(−χd)`.
    pub path_loss: f64,
}

/// Beam and receiver geometry plus jitter. Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingParams {
    pub a: f64,
    pub a0: f64,
    pub f0: f64,
    pub sigma_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingDerived {
    pub theta0: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub a_d: f64,
    pub v: f64,
    pub a0_gain: f64,
    pub a_deq: f64,
    pub xi: f64,
    pub kappa: f64,
}

impl FsoGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("distance", self.distance),
            ("cn2", self.cn2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.chi >= 0.0 && self.chi.is_finite()) {
            return Err(Error::invalid("chi", format!("must be ≥ 0, got {}", self.chi)));
        }
        Ok(())
    }
}

impl PointingParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("a0", self.a0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.f0.is_finite() && self.f0 != 0.0) {
            return Err(Error::invalid("F0", "must be finite and non-zero"));
        }
        if !(self.sigma_s > 0.0 && self.sigma_s.is_finite()) {
            return Err(Error::invalid(
                "sigma_s",
                "must be positive (zero jitter is not supported)",
            ));
        }
        Ok(())
    }
}

pub fn derive_geometry(g: &FsoGeometry) -> Result<GeometryDerived> {
    g.validate()?;
    let iota = 2.0 * PI / g.wavelength;
    Ok(GeometryDerived {
        iota,
        sigma_r2: 1.23 * g.cn2 * iota.powf(7.0 / 6.0) * g.distance.powf(11.0 / 6.0),
        path_loss: (-g.chi * g.distance).exp(),
    })
}

pub fn derive_pointing(p: &PointingParams, g: &FsoGeometry) -> Result<PointingDerived> {
    p.validate()?;
    let geo = derive_geometry(g)?;
    let theta0 = 1.0 - g.distance / p.f0;
    let lambda0 = 2.0 * g.distance / (geo.iota * p.a0 * p.a0);
    let lambda1 = lambda0 / (theta0 * theta0 + lambda0 * lambda0);
    let a_d = p.a0
        * ((theta0 + lambda0) * (1.0 + 1.63 * geo.sigma_r2.powf(1.2) * lambda1)).sqrt();
    if !(a_d > 0.0) {
        return Err(Error::invalid(
            "F0",
            format!("beam radius at the receiver is not positive (Θ₀ = {theta0})"),
        ));
    }
    let v = PI.sqrt() * p.a / (2f64.sqrt() * a_d);
    let ev = erf(v);
    let a_deq = a_d * (PI.sqrt() * ev / (2.0 * v * (-v * v).exp())).sqrt();
    let xi = a_deq / (2.0 * p.sigma_s);
    Ok(PointingDerived {
        theta0,
        lambda0,
        lambda1,
        a_d,
        v,
        a0_gain: ev * ev,
        a_deq,
        xi,
        kappa: xi * xi / (xi * xi + 1.0),
    })
}
