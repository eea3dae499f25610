//! Shared-node evaluation of the double series
//!
//! ```text
//! S = Σ_t r^t Σ_{d≤t} w^{t−d}/(t−d)! · (1/2πi) ∫ 16^s z^s K(2s) Γ(1+t+s) Γ(1+d−s)
//!                                               ─────────────────────────────── ds
//!                                               s (ξ²/2 − s) t! d!
//! ```
//!
//! with `K(u) = Γ(α−u) Σ_k w_k Γ(k−u)`. Every (t, d) term is a G^{6,2}_{3,7}
//! after the duplication formula; they share the contour, so the kernel is
//! evaluated once per node and the t, d dependence is carried by the ratios
//! `Γ(1+t+s)/(t!Γ(1+s))` and `Γ(1+d−s)/(d!Γ(1−s))`, both built by upward
//! recurrence.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{gauss_weights, kronrod_rule};
use crate::specfun::{golden_min, ln_gamma_complex};

/// Truncation of the τ axis, relative to the envelope peak (e^−45 ≈ 3e-20).
const LN_TRUNCATION: f64 = -45.0;
const MAX_TAU: f64 = 2000.0;
const MAX_REFINEMENTS: usize = 7;
/// Rounding noise of a node sum relative to its absolute sum.
const NOISE: f64 = 64.0 * f64::EPSILON;
/// Terms of the inner Poisson-like weights `w^j/j!` below this fraction of
/// their total are dropped.
const WEIGHT_CUT: f64 = 1e-18;
const BLOCK: usize = 64;
/// Relative target of the contour quadrature, independent of the series
/// truncation tolerance.
const QUAD_REL: f64 = 1e-9;

pub(crate) struct Branch<'a> {
    /// `ln K(u)`.
    pub kernel: &'a dyn Fn(Complex64) -> Complex64,
    pub xi2: f64,
    /// Smallest right pole of `K(u)` together with ξ².
    pub right_pole: f64,
    pub z: f64,
    pub ratio: f64,
    pub w: f64,
    pub t_max: usize,
    pub rel_tol: f64,
    /// Sum exactly `t = 0..=n` instead of testing convergence.
    pub fixed_terms: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BranchSum {
    pub value: f64,
    /// Truncation bound plus quadrature error estimate.
    pub uncertainty: f64,
    pub terms: usize,
    pub evaluations: usize,
    pub converged: bool,
}

struct Node {
    /// Gauss–Kronrod and embedded Gauss weights (zero off the Gauss nodes).
    wk: f64,
    wg: f64,
    s: Complex64,
    base: Complex64,
    r: Complex64,
    /// Most recent values of the d-ratio in a power-of-two ring.
    q: Vec<Complex64>,
    /// Integrand summed over t so far.
    acc: f64,
}

impl Branch<'_> {
    fn ln_base(&self, s: Complex64) -> Complex64 {
        s * (16.0 * self.z).ln() + (self.kernel)(2.0 * s) - (s * (0.5 * self.xi2 - s)).ln()
            + ln_gamma_complex(1.0 + s)
            + ln_gamma_complex(1.0 - s)
    }

    /// Bound on how the recurrences can grow the integrand: the t → ∞ limit
    /// of the ratio product is 1/(Γ(1+s)Γ(1−s)).
    fn ln_envelope(&self, s: Complex64) -> f64 {
        let b = self.ln_base(s).re;
        let g = (ln_gamma_complex(1.0 + s) + ln_gamma_complex(1.0 - s)).re;
        b.max(b - g)
    }

    fn contour(&self) -> Result<(f64, f64)> {
        let hi = (0.5 * self.right_pole).min(1.0);
        if !(hi > 0.0) {
            return Err(Error::ContourPlacement(format!(
                "no gap between s = 0 and the right poles (min pole {hi})"
            )));
        }
        let m = 0.1 * hi.min(1.0);
        let c = golden_min(|c| self.ln_base(Complex64::new(c, 0.0)).re, m, hi - m);
        let peak = self.ln_envelope(Complex64::new(c, 0.0));
        let mut tau = 0.0;
        let mut quiet = 0;
        let mut top = peak;
        while quiet < 3 {
            tau += 0.25;
            if tau > MAX_TAU {
                return Err(Error::QuadratureBudget {
                    context: "outage series contour truncation",
                    achieved: f64::NAN,
                    target: self.rel_tol,
                });
            }
            let e = self.ln_envelope(Complex64::new(c, tau));
            top = top.max(e);
            quiet = if e < top + LN_TRUNCATION { quiet + 1 } else { 0 };
        }
        Ok((c, tau))
    }

    fn nodes(&self, c: f64, t_end: f64, panels: usize) -> Vec<Node> {
        let (xgk, wgk) = kronrod_rule();
        let wg = gauss_weights();
        let h = t_end / panels as f64;
        let mut nodes = Vec::with_capacity(panels * 21);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            let half = 0.5 * h;
            let mut push = |x: f64, wk: f64, wgt: f64| {
                let s = Complex64::new(c, x);
                nodes.push(Node {
                    wk: wk * half,
                    wg: wgt * half,
                    s,
                    base: Complex64::new(0.0, 0.0),
                    r: Complex64::new(1.0, 0.0),
                    q: Vec::new(),
                    acc: 0.0,
                });
            };
            push(mid, wgk[10], 0.0);
            for j in 0..10 {
                let g = if j % 2 == 1 { wg[j / 2] } else { 0.0 };
                push(mid - half * xgk[j], wgk[j], g);
                push(mid + half * xgk[j], wgk[j], g);
            }
        }
        nodes
    }
}

fn poisson_weights(w: f64, n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    if w == 0.0 {
        return out;
    }
    // relative to the full sum e^w
    let total = w;
    let mut term = 1.0f64;
    for j in 1..=n {
        term *= w / j as f64;
        out.push(term);
        if j as f64 > total && term < WEIGHT_CUT * total.exp().max(1.0) {
            break;
        }
    }
    out
}

/// Evaluates the branch sum with the shared contour, refining the panel width
/// until the Kronrod and embedded Gauss estimates agree.
pub(crate) fn sum_branch(b: &Branch) -> Result<BranchSum> {
    let (c, t_end) = b.contour()?;
    let oscillation = (16.0 * b.z).ln().abs() + (1.0 + b.t_max as f64).ln() + 1.0;
    let mut panels = ((t_end * oscillation / 1.5).ceil() as usize).max(4);
    let mut evaluations = 0;
    for _ in 0..MAX_REFINEMENTS {
        let attempt = sum_on_nodes(b, c, t_end, panels)?;
        evaluations += attempt.evaluations;
        if attempt.quad_ok {
            return Ok(BranchSum {
                evaluations,
                ..attempt.sum
            });
        }
        panels *= 2;
    }
    Err(Error::QuadratureBudget {
        context: "outage series contour quadrature",
        achieved: f64::NAN,
        target: b.rel_tol,
    })
}

struct Attempt {
    sum: BranchSum,
    quad_ok: bool,
    evaluations: usize,
}

fn sum_on_nodes(b: &Branch, c: f64, t_end: f64, panels: usize) -> Result<Attempt> {
    let mut nodes = b.nodes(c, t_end, panels);
    let mut peak = f64::NEG_INFINITY;
    let ln_bases: Vec<Complex64> = nodes.iter().map(|n| b.ln_base(n.s)).collect();
    for l in &ln_bases {
        peak = peak.max(l.re);
    }
    if !peak.is_finite() {
        return Err(Error::ContourPlacement(format!(
            "outage series integrand not finite on Re s = {c}"
        )));
    }
    let t_cap = match b.fixed_terms {
        Some(n) => n.min(b.t_max),
        None if b.ratio == 0.0 => 0,
        None => b.t_max,
    };
    let pw = poisson_weights(b.w, t_cap);
    let ring = pw.len().next_power_of_two();
    let mask = ring - 1;
    for (n, l) in nodes.iter_mut().zip(&ln_bases) {
        n.base = (l - peak).exp();
        n.q = vec![Complex64::new(0.0, 0.0); ring];
        n.q[0] = Complex64::new(1.0, 0.0);
    }
    let scale = peak.exp() / std::f64::consts::PI;
    let mut term_k = Vec::with_capacity(t_cap + 1);
    let mut term_l1 = Vec::with_capacity(t_cap + 1);
    let mut power = 1.0;
    let mut stop: Option<usize> = None;
    let mut small_run = 0;
    let mut running = 0.0;
    let mut t0 = 0;
    while t0 <= t_cap && stop.is_none() {
        let t1 = (t0 + BLOCK).min(t_cap + 1);
        let mut bk = vec![0.0; t1 - t0];
        let mut bl = vec![0.0; t1 - t0];
        let mut pows = Vec::with_capacity(t1 - t0);
        let mut p = power;
        for t in t0..t1 {
            if t > 0 {
                p *= b.ratio;
            }
            pows.push(p);
        }
        for n in nodes.iter_mut() {
            for t in t0..t1 {
                if t > 0 {
                    let inv = 1.0 / t as f64;
                    n.r *= 1.0 + n.s * inv;
                    n.q[t & mask] = n.q[(t - 1) & mask] * (1.0 - n.s * inv);
                }
                let mut d_sum = Complex64::new(0.0, 0.0);
                for (j, p) in pw.iter().enumerate().take(t + 1) {
                    d_sum += p * n.q[(t - j) & mask];
                }
                let v = (n.base * n.r * d_sum).re;
                bk[t - t0] += n.wk * v;
                bl[t - t0] += n.wk * v.abs();
                n.acc += pows[t - t0] * v;
            }
        }
        for t in t0..t1 {
            if t > 0 {
                power *= b.ratio;
            }
            let k = power * bk[t - t0] * scale;
            term_k.push(k);
            term_l1.push(power * bl[t - t0] * scale);
            running += k;
            if b.fixed_terms.is_none() {
                if k.abs() <= b.rel_tol * running.abs() {
                    small_run += 1;
                } else {
                    small_run = 0;
                }
                if small_run >= 3 {
                    stop = Some(t);
                    break;
                }
            }
        }
        t0 = t1;
    }
    let last = stop.unwrap_or(term_k.len() - 1);
    let converged = stop.is_some() || b.fixed_terms.is_some() || t_cap == 0;
    let value: f64 = term_k[..=last].iter().sum();
    let l1: f64 = term_l1[..=last].iter().sum();
    let quad_err = panel_error(&nodes) * scale;
    let quad_ok = quad_err <= (QUAD_REL.max(b.rel_tol) * value.abs()).max(NOISE * l1);

    let truncation = if b.fixed_terms.is_some() || t_cap == 0 {
        0.0
    } else {
        tail_bound(&term_k[..=last], b.ratio, converged)
    };
    Ok(Attempt {
        sum: BranchSum {
            value,
            uncertainty: truncation + quad_err.max(NOISE * l1),
            terms: last + 1,
            evaluations: 0,
            converged,
        },
        quad_ok,
        evaluations: nodes.len() * (last + 1),
    })
}

/// Sum over panels of the usual Kronrod error estimate
/// `L·min(1, (200|K−G|/L)^{3/2})`, with `L` the panel's absolute integral.
fn panel_error(nodes: &[Node]) -> f64 {
    nodes
        .chunks(21)
        .map(|p| {
            let (mut k, mut g, mut l) = (0.0, 0.0, 0.0);
            for n in p {
                k += n.wk * n.acc;
                g += n.wg * n.acc;
                l += n.wk * n.acc.abs();
            }
            if l == 0.0 {
                0.0
            } else {
                l * (200.0 * (k - g).abs() / l).powf(1.5).min(1.0)
            }
        })
        .sum()
}

/// Bound on the omitted terms after `terms`. When the series was cut off
/// without converging it also covers the second half of what was summed, so
/// that halving the cap never moves the value by more than the bound.
fn tail_bound(terms: &[f64], ratio: f64, converged: bool) -> f64 {
    let n = terms.len();
    let last = terms[n - 1].abs();
    let mut r = ratio;
    for w in terms[n.saturating_sub(3)..].windows(2) {
        if w[0] != 0.0 {
            r = r.max((w[1] / w[0]).abs());
        }
    }
    let geometric = if r < 1.0 {
        last * r / (1.0 - r)
    } else {
        f64::INFINITY
    };
    if converged {
        geometric
    } else {
        let half: f64 = terms[n / 2..].iter().sum::<f64>().abs();
        geometric.max(half)
    }
}
