//! One-dimensional parameter sweeps, `sweep.<variable> = start:stop:step`.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVar {
    Mu1Db,
    Mu2Db,
    /// Both SNRs set to the same value.
    Mu1EqMu2Db,
    /// Jitter standard deviation in metres.
    SigmaS,
    Relays,
    Rho,
    RhoM,
}

impl SweepVar {
    pub const ALL: [SweepVar; 7] = [
        SweepVar::Mu1Db,
        SweepVar::Mu2Db,
        SweepVar::Mu1EqMu2Db,
        SweepVar::SigmaS,
        SweepVar::Relays,
        SweepVar::Rho,
        SweepVar::RhoM,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVar::Mu1Db => "mu1_db",
            SweepVar::Mu2Db => "mu2_db",
            SweepVar::Mu1EqMu2Db => "mu1_eq_mu2_db",
            SweepVar::SigmaS => "sigma_s",
            SweepVar::Relays => "M",
            SweepVar::Rho => "rho",
            SweepVar::RhoM => "rho_M",
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, SweepVar::Relays)
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepVar::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepVar::ALL.iter().map(|v| v.as_str()).collect();
                format!("unknown sweep variable `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    /// Parses the `start:stop:step` value of a sweep line.
    pub fn parse(var: SweepVar, text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got `{text}`"));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| format!("`{s}` is not a number"))
        };
        let spec = SweepSpec {
            var,
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err("start, stop and step must be finite".into());
        }
        if self.start > self.stop {
            return Err(format!("start {} exceeds stop {}", self.start, self.stop));
        }
        if !(self.step > 0.0) {
            return Err(format!("step must be positive, got {}", self.step));
        }
        if self.var.is_integer()
            && [self.start, self.step].iter().any(|v| v.fract() != 0.0)
        {
            return Err(format!("{} takes integer start and step", self.var));
        }
        if self.len() > 100_000 {
            return Err(format!("{} points is too many", self.len()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        // the tolerance keeps 0:60:0.1 from losing its last point to rounding
        ((self.stop - self.start) / self.step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Values `start + i·step`, computed without accumulation.
    pub fn values(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }

    /// `start:stop:step` with round-trip number formatting.
    pub fn value_text(&self) -> String {
        format!("{:?}:{:?}:{:?}", self.start, self.stop, self.step)
    }
}
