//! Meijer G-function `G^{m,n}_{p,q}(z | a; b)` for real parameters and
//! positive real argument.
//!
//! Two independent strategies are provided: the Slater residue expansion
//! (a finite sum of hypergeometric series) and direct quadrature of the
//! Mellin–Barnes integral along a vertical line.

use num_complex::Complex64;

use super::gamma::{ln_gamma_complex, ln_gamma_signed};
use super::hyper::hyp_pfq;
use crate::error::{Error, Result};
use crate::quad;

/// Two b-parameters closer than this to an integer difference are treated
/// as producing coincident poles.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Spacing used to split coincident poles before extrapolating back.
pub const PERTURBATION: f64 = 3e-3;
/// Slater results whose estimated relative error exceeds this are rejected
/// by [`Strategy::Auto`].
pub const AUTO_ACCEPT: f64 = 1e-8;

const CONTOUR_REL_TOL: f64 = 1e-12;
const CONTOUR_TARGET: f64 = 1e-10;
const TRUNCATION: f64 = 1e-18;
/// Rounding noise of the integrand relative to its L1 norm; the line
/// integral cannot resolve cancellation below this.
const NOISE_FLOOR: f64 = 64.0 * f64::EPSILON;
const MAX_PANELS: usize = 4000;
const MAX_TAU: f64 = 5000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    m: usize,
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    z: f64,
}

impl MeijerGSpec {
    /// `a_params` holds a₁..a_p (the first `n` are the "upper-left" ones),
    /// `b_params` holds b₁..b_q (the first `m` enter the numerator).
    pub fn new(
        m: usize,
        n: usize,
        a_params: Vec<f64>,
        b_params: Vec<f64>,
        argument: f64,
    ) -> Result<Self> {
        if m > b_params.len() {
            return Err(Error::invalid("m", format!("m = {m} exceeds q = {}", b_params.len())));
        }
        if n > a_params.len() {
            return Err(Error::invalid("n", format!("n = {n} exceeds p = {}", a_params.len())));
        }
        if let Some(v) = a_params.iter().chain(&b_params).find(|v| !v.is_finite()) {
            return Err(Error::invalid("parameters", format!("non-finite parameter {v}")));
        }
        if !(argument > 0.0 && argument.is_finite()) {
            return Err(Error::Domain {
                function: "meijer_g",
                detail: format!("argument must be positive and finite, got {argument}"),
            });
        }
        Ok(Self {
            m,
            n,
            a: a_params,
            b: b_params,
            z: argument,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> usize {
        self.a.len()
    }
    pub fn q(&self) -> usize {
        self.b.len()
    }
    pub fn a_params(&self) -> &[f64] {
        &self.a
    }
    pub fn b_params(&self) -> &[f64] {
        &self.b
    }
    pub fn argument(&self) -> f64 {
        self.z
    }

    /// Same parameters at a different argument.
    pub fn with_argument(&self, argument: f64) -> Result<Self> {
        Self::new(self.m, self.n, self.a.clone(), self.b.clone(), argument)
    }

    /// `G^{n,m}_{q,p}(1/z | 1 − b; 1 − a)`, which equals the original.
    fn inverted(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
            a: self.b.iter().map(|b| 1.0 - b).collect(),
            b: self.a.iter().map(|a| 1.0 - a).collect(),
            z: 1.0 / self.z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Slater when it is well conditioned and needs no perturbation,
    /// contour quadrature otherwise.
    #[default]
    Auto,
    Slater,
    Contour,
}

/// A G-function value with the information needed to judge it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerEval {
    pub value: f64,
    /// Strategy that produced `value` (never `Auto`).
    pub strategy: Strategy,
    /// Heuristic relative error estimate.
    pub rel_error: f64,
    /// Whether coincident poles had to be split.
    pub perturbed: bool,
    /// Hypergeometric terms or integrand evaluations spent.
    pub work: usize,
}

/// Evaluates the G-function with the requested strategy.
pub fn meijer_g(spec: &MeijerGSpec, strategy: Strategy) -> Result<f64> {
    meijer_g_eval(spec, strategy).map(|e| e.value)
}

/// Mellin–Barnes contour quadrature; independent of the Slater path.
pub fn meijer_g_contour(spec: &MeijerGSpec) -> Result<f64> {
    contour(spec).map(|e| e.value)
}

pub fn meijer_g_eval(spec: &MeijerGSpec, strategy: Strategy) -> Result<MeijerEval> {
    match strategy {
        Strategy::Slater => slater(spec),
        Strategy::Contour => contour(spec),
        Strategy::Auto => match slater(spec) {
            Ok(e) if !e.perturbed && e.rel_error <= AUTO_ACCEPT => Ok(e),
            Ok(e) => match contour(spec) {
                Ok(c) => Ok(c),
                Err(_) if e.rel_error <= AUTO_ACCEPT => Ok(e),
                Err(err) => Err(err),
            },
            Err(_) => contour(spec),
        },
    }
}

// ---------------------------------------------------------------------------
// Slater expansion

fn slater(spec: &MeijerGSpec) -> Result<MeijerEval> {
    let (p, q) = (spec.p(), spec.q());
    if p < q || (p == q && spec.z < 1.0) {
        slater_perturbed(spec)
    } else if p > q || spec.z > 1.0 {
        slater_perturbed(&spec.inverted())
    } else {
        Err(Error::UnsupportedShape(format!(
            "Slater expansion of G^{{{},{}}}_{{{p},{q}}} diverges at unit argument",
            spec.m, spec.n
        )))
    }
}

/// Groups of indices among b₁..b_m whose pairwise differences are integers.
fn pole_clusters(b: &[f64]) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &bi) in b.iter().enumerate() {
        let hit = clusters.iter_mut().find(|c| {
            let d = b[c[0]] - bi;
            (d - d.round()).abs() < DEGENERACY_TOL
        });
        match hit {
            Some(c) => c.push(i),
            None => clusters.push(vec![i]),
        }
    }
    clusters.retain(|c| c.len() > 1);
    clusters
}

fn slater_perturbed(spec: &MeijerGSpec) -> Result<MeijerEval> {
    if spec.m == 0 {
        return Err(Error::UnsupportedShape(
            "m = 0 has no residue expansion".to_string(),
        ));
    }
    let clusters = pole_clusters(&spec.b[..spec.m]);
    if clusters.is_empty() {
        let (value, cond, work) = slater_sum(spec, &spec.b)?;
        return Ok(MeijerEval {
            value,
            strategy: Strategy::Slater,
            rel_error: cond * f64::EPSILON,
            perturbed: false,
            work,
        });
    }
    let mut shift = vec![0.0; spec.q()];
    for c in &clusters {
        for (j, &idx) in c.iter().enumerate() {
            shift[idx] = j as f64 * PERTURBATION;
        }
    }
    // the symmetric average at scale h is even in h; combining h, 2h, 3h
    // cancels the h² and h⁴ terms
    let mut work = 0;
    let mut cond = 1.0f64;
    let mut average = |h: f64| -> Result<f64> {
        let plus: Vec<f64> = spec.b.iter().zip(&shift).map(|(b, s)| b + h * s).collect();
        let minus: Vec<f64> = spec.b.iter().zip(&shift).map(|(b, s)| b - h * s).collect();
        let (vp, cp, wp) = slater_sum(spec, &plus)?;
        let (vm, cm, wm) = slater_sum(spec, &minus)?;
        work += wp + wm;
        cond = cond.max(cp).max(cm);
        Ok(0.5 * (vp + vm))
    };
    let a1 = average(1.0)?;
    let a2 = average(2.0)?;
    let a3 = average(3.0)?;
    let value = 1.5 * a1 - 0.6 * a2 + 0.1 * a3;
    let lower_order = (4.0 * a1 - a2) / 3.0;
    let bias = if value != 0.0 {
        ((value - lower_order) / value).abs()
    } else {
        1.0
    };
    Ok(MeijerEval {
        value,
        strategy: Strategy::Slater,
        rel_error: cond * f64::EPSILON + bias,
        perturbed: true,
        work,
    })
}

/// Residue sum over the poles of Γ(b_h − s), h < m. Returns the value, the
/// ratio of the largest intermediate magnitude to the result, and the term
/// count.
fn slater_sum(spec: &MeijerGSpec, b: &[f64]) -> Result<(f64, f64, usize)> {
    let (m, n, p) = (spec.m, spec.n, spec.p());
    let a = &spec.a;
    let sign_z = if (p + m + n) % 2 == 0 { 1.0 } else { -1.0 };
    let arg = sign_z * spec.z;
    let ln_z = spec.z.ln();

    let mut total = 0.0;
    let mut scale = 0.0f64;
    let mut work = 0;
    'poles: for h in 0..m {
        let bh = b[h];
        let mut ln_c = bh * ln_z;
        let mut sign = 1.0;
        for (j, &bj) in b.iter().enumerate().take(m) {
            if j == h {
                continue;
            }
            let (l, s) = ln_gamma_signed(bj - bh).ok_or_else(|| {
                Error::UnsupportedShape(format!("coincident poles at b = {bh} and {bj}"))
            })?;
            ln_c += l;
            sign *= s;
        }
        for &aj in &a[..n] {
            let (l, s) = ln_gamma_signed(1.0 + bh - aj).ok_or_else(|| {
                Error::UnsupportedShape(format!(
                    "a-pole at {} meets b-pole at {bh}",
                    aj - 1.0
                ))
            })?;
            ln_c += l;
            sign *= s;
        }
        for &bj in &b[m..] {
            match ln_gamma_signed(1.0 + bh - bj) {
                Some((l, s)) => {
                    ln_c -= l;
                    sign *= s;
                }
                None => {
                    return Err(Error::UnsupportedShape(format!(
                        "lower parameter 1 + {bh} − {bj} of the residue series is a non-positive integer"
                    )))
                }
            }
        }
        for &aj in &a[n..] {
            match ln_gamma_signed(aj - bh) {
                Some((l, s)) => {
                    ln_c -= l;
                    sign *= s;
                }
                // 1/Γ vanishes: this pole contributes nothing
                None => continue 'poles,
            }
        }
        let upper: Vec<f64> = a.iter().map(|aj| 1.0 + bh - aj).collect();
        let lower: Vec<f64> = b
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != h)
            .map(|(_, bj)| 1.0 + bh - bj)
            .collect();
        let series = hyp_pfq(&upper, &lower, arg)?;
        work += series.terms;
        let coef = sign * ln_c.exp();
        total += coef * series.value;
        // exp() turns the absolute error of ln_c into a relative one
        scale = scale.max((coef * series.max_term).abs() * (1.0 + ln_c.abs()));
    }
    let cond = if total != 0.0 {
        (scale / total.abs()).max(1.0)
    } else {
        f64::INFINITY
    };
    Ok((total, cond, work))
}

// ---------------------------------------------------------------------------
// Mellin–Barnes contour

/// Result of integrating `(1/2πi)∫ f(s) ds` along `Re s = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LineIntegral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Integrates `exp(ln_f(c + iτ))` over the vertical line through `c`,
/// assuming `f(conj s) = conj f(s)` so that only τ ≥ 0 is needed.
pub(crate) fn integrate_vertical_line<F>(ln_f: F, c: f64) -> Result<LineIntegral>
where
    F: Fn(Complex64) -> Complex64,
{
    let at = |tau: f64| ln_f(Complex64::new(c, tau));
    let step = 0.5;
    let mut peak = at(0.0).re;
    let mut samples = vec![peak];
    let mut tau = 0.0;
    let mut quiet = 0;
    while quiet < 3 {
        tau += step;
        if tau > MAX_TAU {
            return Err(Error::QuadratureBudget {
                context: "Mellin–Barnes truncation",
                achieved: f64::NAN,
                target: CONTOUR_TARGET,
            });
        }
        let l = at(tau).re;
        samples.push(l);
        peak = peak.max(l);
        if l < peak + TRUNCATION.ln() {
            quiet += 1;
        } else {
            quiet = 0;
        }
    }
    if !peak.is_finite() {
        return Err(Error::ContourPlacement(format!(
            "integrand not finite on Re s = {c}"
        )));
    }
    let l1_guess: f64 = samples.iter().map(|l| (l - peak).exp()).sum::<f64>() * step;
    let mut tail = samples.len() - 1;
    while tail > 1 && samples[tail - 1] < peak + TRUNCATION.ln() {
        tail -= 1;
    }
    let t_max = tail as f64 * step;
    let panels = (t_max.ceil() as usize).max(1);
    let r = quad::integrate(
        |tau| (at(tau) - peak).exp().re,
        &quad::linspace(0.0, t_max, panels),
        NOISE_FLOOR * l1_guess,
        CONTOUR_REL_TOL,
        MAX_PANELS,
    );
    let scale = peak.exp() / std::f64::consts::PI;
    if !r.converged && r.error > CONTOUR_TARGET * r.value.abs() {
        return Err(Error::QuadratureBudget {
            context: "Mellin–Barnes quadrature",
            achieved: r.error / r.value.abs(),
            target: CONTOUR_TARGET,
        });
    }
    Ok(LineIntegral {
        value: r.value * scale,
        abs_error: r.error * scale,
        evaluations: r.evaluations + samples.len(),
    })
}

/// Golden-section minimum of `f` on `[lo, hi]`.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < 1e-10 * (1.0 + lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn real_ln_abs_gamma(x: f64) -> f64 {
    ln_gamma_signed(x).map_or(f64::INFINITY, |(l, _)| l)
}

fn contour(spec: &MeijerGSpec) -> Result<MeijerEval> {
    let (m, n, p, q) = (spec.m, spec.n, spec.p(), spec.q());
    if m == 0 {
        return Err(Error::UnsupportedShape(
            "m = 0: no b-poles to close the contour on".to_string(),
        ));
    }
    let delta = (m + n) as f64 - 0.5 * (p + q) as f64;
    if delta <= 0.0 {
        return Err(Error::UnsupportedShape(format!(
            "G^{{{m},{n}}}_{{{p},{q}}}: Mellin–Barnes integrand does not decay along vertical lines"
        )));
    }
    let hi = spec.b[..m].iter().copied().fold(f64::INFINITY, f64::min);
    let lo = if n > 0 {
        spec.a[..n].iter().map(|a| a - 1.0).fold(f64::NEG_INFINITY, f64::max)
    } else {
        hi - 60.0
    };
    if lo >= hi {
        return Err(Error::ContourPlacement(format!(
            "a-poles reach {lo} but b-poles start at {hi}"
        )));
    }
    let (a, b, ln_z) = (&spec.a, &spec.b, spec.z.ln());

    let ln_real = |c: f64| -> f64 {
        let mut v = c * ln_z;
        v += b[..m].iter().map(|bj| real_ln_abs_gamma(bj - c)).sum::<f64>();
        v += a[..n].iter().map(|aj| real_ln_abs_gamma(1.0 - aj + c)).sum::<f64>();
        v -= b[m..].iter().map(|bj| real_ln_abs_gamma(1.0 - bj + c).min(700.0)).sum::<f64>();
        v -= a[n..].iter().map(|aj| real_ln_abs_gamma(aj - c).min(700.0)).sum::<f64>();
        v
    };
    let margin = 0.1 * (hi - lo).min(1.0);
    let c = golden_min(ln_real, lo + margin, hi - margin);

    let ln_f = |s: Complex64| -> Complex64 {
        let mut v = s * ln_z;
        for bj in &b[..m] {
            v += ln_gamma_complex(bj - s);
        }
        for aj in &a[..n] {
            v += ln_gamma_complex(1.0 - aj + s);
        }
        for bj in &b[m..] {
            v -= ln_gamma_complex(1.0 - bj + s);
        }
        for aj in &a[n..] {
            v -= ln_gamma_complex(aj - s);
        }
        v
    };
    let line = integrate_vertical_line(ln_f, c)?;
    let rel_error = if line.value != 0.0 {
        line.abs_error / line.value.abs()
    } else {
        f64::INFINITY
    };
    Ok(MeijerEval {
        value: line.value,
        strategy: Strategy::Contour,
        rel_error,
        perturbed: false,
        work: line.evaluations,
    })
}
