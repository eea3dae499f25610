//! Outage probability of the PRS RF/FSO relay link: the exact series, its
//! special cases, the high-SNR floors and a direct quadrature oracle.

mod closed;
mod family;
mod oracle;
mod series;

use std::fmt;

use crate::channel::{FsoHop, RfHopParams};
use crate::error::{Error, Result};

pub use closed::{im1_closed_form, outage_floor_mu2};
pub use oracle::{outage_quadrature_oracle, ORACLE_TOL};
pub use series::{
    outage_exact, outage_floor_mu1, outage_floor_mu1_first_term, outage_gg, outage_single_relay,
};

/// Largest negative series residue that is silently clamped to zero.
pub const RESIDUE_TOL: f64 = 1e-9;

/// Above this correlation the single-term μ₁ floor is flagged as unreliable.
pub const FIRST_TERM_RHO_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Gg,
    Single,
    FloorMu2,
    FloorMu1,
    FloorMu1App,
    Quadrature,
    Mc,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Gg => "gg",
            Method::Single => "single",
            Method::FloorMu2 => "floor_mu2",
            Method::FloorMu1 => "floor_mu1",
            Method::FloorMu1App => "floor_mu1_app",
            Method::Quadrature => "quadrature",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Truncation of the infinite t-sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub t_max: usize,
    pub rel_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            t_max: 600,
            rel_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rf: RfHopParams,
    pub fso: FsoHop,
    pub gamma_th: f64,
    pub series: SeriesControl,
}

impl Scenario {
    pub fn new(rf: RfHopParams, fso: FsoHop, gamma_th: f64) -> Result<Self> {
        let s = Scenario {
            rf,
            fso,
            gamma_th,
            series: SeriesControl::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.rf.validate()?;
        if !(self.gamma_th > 0.0 && self.gamma_th.is_finite()) {
            return Err(Error::invalid(
                "gamma_th",
                format!("must be positive, got {}", self.gamma_th),
            ));
        }
        if self.series.t_max < 1 {
            return Err(Error::invalid("t_max", "must be at least 1"));
        }
        if !(self.series.rel_tol > 0.0 && self.series.rel_tol < 1.0) {
            return Err(Error::invalid("rel_tol", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn with_mu1(&self, mu1: f64) -> Result<Self> {
        let s = Scenario {
            rf: RfHopParams { mu1, ..self.rf },
            ..self.clone()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_mu2(&self, mu2: f64) -> Result<Self> {
        Ok(Scenario {
            fso: self.fso.with_mu2(mu2)?,
            ..self.clone()
        })
    }

    pub(crate) fn require_imperfect_csi(&self) -> Result<()> {
        if self.rf.rho >= 1.0 {
            return Err(Error::invalid(
                "rho",
                "ρ = 1 is outside the analytic model; clamp to < 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub p_out: f64,
    /// Truncation/quadrature bound (analytic) or standard error (MC).
    pub uncertainty: f64,
    pub method: Method,
    /// Series terms, integrand evaluations or samples, depending on method.
    pub work: u64,
    /// Value before clamping into [0, 1].
    pub pre_clamp: f64,
    pub warnings: Vec<String>,
}

impl OutageEstimate {
    pub(crate) fn new(raw: f64, uncertainty: f64, method: Method, work: u64) -> Self {
        let mut warnings = Vec::new();
        if raw < -RESIDUE_TOL || raw > 1.0 + RESIDUE_TOL {
            warnings.push(format!("residue {raw:e} outside [0, 1] beyond clamp tolerance"));
        }
        OutageEstimate {
            p_out: raw.clamp(0.0, 1.0),
            uncertainty,
            method,
            work,
            pre_clamp: raw,
            warnings,
        }
    }
}
