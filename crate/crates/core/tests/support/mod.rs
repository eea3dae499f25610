//! Statistical helpers and random Meijer-G shapes shared by the test targets.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rfso_core::channel::{derive_malaga_constants, MalagaParams};
use rfso_core::specfun::MeijerGSpec;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// One-sample KS statistic of sorted data against a continuous CDF.
pub fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at level 0.01.
pub fn ks_critical(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

pub fn sorted_draws(n: usize, mut draw: impl FnMut() -> f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| draw()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `ln K_ν(z)` from `K_ν(z) = ∫₀^∞ e^{−z cosh t} cosh(νt) dt`, composite
/// Simpson around the peak of the integrand.
pub fn ln_bessel_k(nu: f64, z: f64) -> f64 {
    let nu = nu.abs();
    let phase = |t: f64| -z * t.cosh() + nu * t;
    let t_peak = (nu / z).asinh();
    let m = phase(t_peak);
    let mut t_end = t_peak + 1.0;
    while phase(t_end) > m - 60.0 {
        t_end += 1.0;
    }
    let n = 1000;
    let h = t_end / n as f64;
    let f = |t: f64| 0.5 * ((phase(t) - m).exp() + (-z * t.cosh() - nu * t - m).exp());
    let mut s = f(0.0) + f(t_end);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    m + (s * h / 3.0).ln()
}

/// Irradiance density `A Σ a_k I^{(α+k)/2−1} K_{α−k}(2√(αβI/(gβ+Ω′)))`
/// from the published constants.
pub fn malaga_pdf(p: &MalagaParams, i: f64) -> f64 {
    let d = derive_malaga_constants(p).unwrap();
    let beta = f64::from(p.beta);
    let z = 2.0 * (p.alpha * beta * i / (d.g * beta + d.omega_prime)).sqrt();
    d.a_k
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0.0)
        .map(|(k, &a)| {
            let k = (k + 1) as f64;
            (d.a.ln() + a.ln() + (0.5 * (p.alpha + k) - 1.0) * i.ln()
                + ln_bessel_k(p.alpha - k, z))
            .exp()
        })
        .sum()
}

/// CDF of the density on `I = v²`, tabulated by Simpson's rule in `v`.
pub struct TabulatedCdf {
    v: Vec<f64>,
    cdf: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(pdf: impl Fn(f64) -> f64, i_max: f64, n: usize) -> Self {
        let v_max = i_max.sqrt();
        let h = v_max / n as f64;
        let g = |v: f64| if v == 0.0 { 0.0 } else { 2.0 * v * pdf(v * v) };
        let mut v = vec![0.0];
        let mut cdf = vec![0.0];
        let mut acc = 0.0;
        let mut left = g(0.0);
        for j in 0..n {
            let a = j as f64 * h;
            let mid = g(a + 0.5 * h);
            let right = g(a + h);
            acc += h / 6.0 * (left + 4.0 * mid + right);
            left = right;
            v.push(a + h);
            cdf.push(acc);
        }
        TabulatedCdf { v, cdf }
    }

    pub fn total(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    /// Largest deviation from the empirical CDF at the tabulation points,
    /// taking both one-sided limits of the step function.
    pub fn ks_on_grid(&self, sorted: &[f64]) -> f64 {
        let n = sorted.len() as f64;
        self.v
            .iter()
            .zip(&self.cdf)
            .map(|(&v, &f)| {
                let x = v * v;
                let below = sorted.partition_point(|&s| s < x) as f64 / n;
                let upto = sorted.partition_point(|&s| s <= x) as f64 / n;
                (f - below).abs().max((f - upto).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Pearson χ² over cells, pooling cells with expected count below 5 into one.
pub fn chi_square(counts: &[u64], probs: &[f64], n: u64) -> (f64, usize) {
    let (mut stat, mut bins) = (0.0, 0);
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * n as f64;
        if e < 5.0 {
            pool_obs += c as f64;
            pool_exp += e;
        } else {
            stat += (c as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pool_exp > 0.0 {
        stat += (pool_obs - pool_exp).powi(2) / pool_exp.max(5.0);
        bins += 1;
    }
    (stat, bins - 1)
}

pub fn chi_square_critical(dof: usize) -> f64 {
    ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.99)
}

/// Bin index of `v` among the cell edges (last cell open).
pub fn bin(edges: &[f64], v: f64) -> usize {
    edges.partition_point(|&e| e <= v).saturating_sub(1)
}

#[derive(Clone, Copy, Debug)]
pub enum Shape {
    Pdf,
    Cdf,
    Outage,
}

pub fn random_spec(shape: Shape, rng: &mut ChaCha8Rng) -> MeijerGSpec {
    let xi2 = rng.random_range(0.3..30.0);
    let alpha = rng.random_range(1.5..30.0);
    let k = rng.random_range(1..=10) as f64;
    match shape {
        Shape::Pdf => {
            let z = 10f64.powf(rng.random_range(-4.0..0.0));
            MeijerGSpec::new(3, 0, vec![xi2 + 1.0], vec![xi2, alpha, k], z).unwrap()
        }
        Shape::Cdf => {
            let z = 10f64.powf(rng.random_range(-4.0..0.0));
            MeijerGSpec::new(3, 1, vec![1.0, xi2 + 1.0], vec![xi2, alpha, k, 0.0], z).unwrap()
        }
        Shape::Outage => {
            let t = rng.random_range(0..=20u32) as f64;
            let d = (rng.random_range(0.0..=1.0) * t).floor();
            let z = 10f64.powf(rng.random_range(-4.0..0.0));
            MeijerGSpec::new(
                6,
                2,
                vec![1.0, -t, 0.5 * (xi2 + 2.0)],
                vec![0.5 * xi2, 0.5 * alpha, 0.5 * (alpha + 1.0), 0.5 * k, 0.5 * (k + 1.0), 1.0 + d, 0.0],
                z,
            )
            .unwrap()
        }
    }
}

