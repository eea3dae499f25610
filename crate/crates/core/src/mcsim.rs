//! Monte Carlo simulation of the relay link from its physical model.
//!
//! Every worker draws from its own ChaCha8 stream `(seed, worker)`, counts
//! outage events and the counts are summed as integers, so a run is fully
//! determined by `(seed, workers, n_samples)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::analytic::{Method, OutageEstimate, Scenario};
use crate::channel::{MalagaDerived, MalagaParams, PointingDerived, RfHopParams};
use crate::error::{Error, Result};

/// Below this many outage events the estimate is flagged.
pub const MIN_EVENTS: u64 = 10;

/// Counter-based random stream: `(seed, stream_id)` plus the draw index fix
/// every variate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Number of independent substreams; also the number of parallel tasks.
    pub workers: usize,
    /// Samples between progress reports.
    pub batch: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: 10_000_000,
            seed: 1,
            workers: 8,
            batch: 1_000_000,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        if self.batch == 0 {
            return Err(Error::invalid("batch", "must be at least 1"));
        }
        Ok(())
    }

    /// Samples assigned to each worker.
    fn shares(&self) -> Vec<u64> {
        let w = self.workers as u64;
        (0..w)
            .map(|i| self.n_samples / w + u64::from(i < self.n_samples % w))
            .collect()
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R, power: f64) -> Complex64 {
    let sd = (0.5 * power).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// Irradiance `X·|U|²` with `X ~ Gamma(α, 1/α)`, and
/// `U = √ζ·(√Ω e^{jφ_A} + √(2b₀ρ_M) e^{jφ_B}) + U_S^G`, `ζ ~ Gamma(β, 1/β)`,
/// `U_S^G` circular Gaussian of power g. The mean is `g + Ω′`.
///
/// `U_S^G` is circularly symmetric, so only `|√Ω e^{jφ_A} + √(2b₀ρ_M) e^{jφ_B}|`
/// enters and the coherent part is kept real.
#[derive(Debug, Clone)]
pub struct MalagaSampler {
    large: Gamma<f64>,
    shadow: Gamma<f64>,
    coherent: f64,
    g: f64,
}

impl MalagaSampler {
    pub fn new(p: &MalagaParams, d: &MalagaDerived) -> Result<Self> {
        p.validate()?;
        let beta = f64::from(p.beta);
        let large = Gamma::new(p.alpha, 1.0 / p.alpha)
            .map_err(|e| Error::invalid("alpha", e.to_string()))?;
        let shadow =
            Gamma::new(beta, 1.0 / beta).map_err(|e| Error::invalid("beta", e.to_string()))?;
        // only φ_A − φ_B matters; take φ_B = 0
        let coherent = (Complex64::from_polar(p.omega.sqrt(), p.phi_ab)
            + (2.0 * p.b0 * p.rho_m).sqrt())
        .norm();
        Ok(MalagaSampler {
            large,
            shadow,
            coherent,
            g: d.g,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.large.sample(rng);
        let zeta = self.shadow.sample(rng);
        let c = self.coherent * zeta.sqrt();
        if self.g > 0.0 {
            x * (complex_normal(rng, self.g) + c).norm_sqr()
        } else {
            x * c * c
        }
    }
}

pub fn sample_malaga_irradiance<R: Rng + ?Sized>(
    p: &MalagaParams,
    d: &MalagaDerived,
    rng: &mut R,
) -> Result<f64> {
    Ok(MalagaSampler::new(p, d)?.sample(rng))
}

/// `exp(−2r²/a_deq²)` for a Rayleigh(σ_s) radial displacement `r`. With
/// a_deq = 2ξσ_s the exponent is `r²/(2σ_s²ξ²)`, and `r²/(2σ_s²)` is Exp(1).
#[derive(Debug, Clone, Copy)]
pub struct PointingSampler {
    inv_xi2: f64,
}

impl PointingSampler {
    pub fn new(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::invalid("xi", format!("must be positive, got {xi}")));
        }
        Ok(PointingSampler {
            inv_xi2: 1.0 / (xi * xi),
        })
    }

    /// Loss relative to the on-axis gain A₀, in (0, 1].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = rng.sample(Exp1);
        (-e * self.inv_xi2).exp()
    }
}

/// Pointing loss `h_p ∈ (0, A₀]`.
pub fn sample_pointing_loss<R: Rng + ?Sized>(p: &PointingDerived, rng: &mut R) -> Result<f64> {
    Ok(p.a0_gain * PointingSampler::new(p.xi)?.sample(rng))
}

/// Partial relay selection on outdated CSI: M unit-power estimates are
/// ranked, the `l`-th smallest is selected and the actual channel is
/// `h = √ρ·h̃ + √(1−ρ)·w`.
///
/// Only the powers `|h̃_k|² ~ Exp(1)` take part in the ranking and `w` is
/// circularly symmetric, so the selected estimate is drawn with zero phase.
#[derive(Debug, Clone)]
pub struct PrsSampler {
    rf: RfHopParams,
    powers: Vec<f64>,
    a: f64,
    b: f64,
}

impl PrsSampler {
    pub fn new(rf: &RfHopParams) -> Result<Self> {
        rf.validate()?;
        Ok(PrsSampler {
            rf: *rf,
            powers: vec![0.0; rf.relays as usize],
            a: rf.rho.sqrt(),
            b: (1.0 - rf.rho).sqrt(),
        })
    }

    /// `(γ₁, γ̃₁)`: actual and estimated SNR of the selected relay.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (f64, f64) {
        for p in self.powers.iter_mut() {
            *p = rng.sample(Exp1);
        }
        let idx = self.rf.rank as usize - 1;
        let (_, &mut power, _) = self.powers.select_nth_unstable_by(idx, f64::total_cmp);
        if self.b == 0.0 {
            return (power * self.rf.mu1, power * self.rf.mu1);
        }
        let h = complex_normal(rng, 1.0) * self.b + power.sqrt() * self.a;
        (h.norm_sqr() * self.rf.mu1, power * self.rf.mu1)
    }
}

pub fn sample_prs_pair<R: Rng + ?Sized>(rf: &RfHopParams, rng: &mut R) -> Result<(f64, f64)> {
    Ok(PrsSampler::new(rf)?.sample(rng))
}

/// Plain Monte Carlo estimate of the outage probability.
pub fn estimate_outage_mc(s: &Scenario, cfg: &McConfig) -> Result<OutageEstimate> {
    estimate_outage_mc_observed(s, cfg, &|_| {})
}

/// As [`estimate_outage_mc`], calling `progress` with the number of samples
/// finished after every `cfg.batch` samples of a worker.
pub fn estimate_outage_mc_observed(
    s: &Scenario,
    cfg: &McConfig,
    progress: &(dyn Fn(u64) + Sync),
) -> Result<OutageEstimate> {
    s.validate()?;
    cfg.validate()?;
    let fso = &s.fso;
    let malaga = MalagaSampler::new(&fso.malaga, &fso.constants)?;
    let pointing = PointingSampler::new(fso.xi)?;
    let prs = PrsSampler::new(&s.rf)?;
    // E[X|U|²] = g + Ω′ and E[h_p/A₀] = κ, so μ₂ is the electrical SNR of
    // the mean received irradiance
    let norm = 1.0 / (fso.kappa() * (fso.constants.g + fso.constants.omega_prime));
    let (mu2, gth) = (fso.mu2, s.gamma_th);

    let counts: Vec<u64> = cfg
        .shares()
        .into_par_iter()
        .enumerate()
        .map(|(worker, n)| {
            let mut rng = RngStream::new(cfg.seed, worker as u64).rng();
            let mut prs = prs.clone();
            let mut events = 0u64;
            let mut done = 0u64;
            while done < n {
                let chunk = cfg.batch.min(n - done);
                for _ in 0..chunk {
                    let (g1, g1_est) = prs.sample(&mut rng);
                    let h = malaga.sample(&mut rng) * pointing.sample(&mut rng) * norm;
                    let g2 = mu2 * h * h;
                    // γ₁γ₂/(γ₂ + γ̃₁) < γ_th without the division
                    if g1 * g2 < gth * (g2 + g1_est) {
                        events += 1;
                    }
                }
                done += chunk;
                progress(chunk);
            }
            events
        })
        .collect();
    let events: u64 = counts.iter().sum();
    let n = cfg.n_samples as f64;
    let p = events as f64 / n;
    let mut est = OutageEstimate::new(p, (p * (1.0 - p) / n).sqrt(), Method::Mc, cfg.n_samples);
    if events < MIN_EVENTS {
        est.warnings.push(format!(
            "insufficient samples for target probability: {events} outage events in {} samples",
            cfg.n_samples
        ));
    }
    Ok(est)
}
