use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{ln_gamma_complex, ln_gamma_pos};

use super::family::{sum_branch, Branch, BranchSum};
use super::{Method, OutageEstimate, Scenario, FIRST_TERM_RHO_LIMIT};

/// How the t/d structure of the series is restricted.
#[derive(Clone, Copy, PartialEq)]
enum Shape {
    /// Full double sum with `w = γ_th/((1−ρ)μ₁)`.
    Full,
    /// μ₁ → ∞: only d = t survives.
    Diagonal,
    /// μ₁ → ∞ and only t = 0.
    FirstTerm,
}

/// Argument of the G-functions without the `1/ψ_i` factor.
fn base_argument(s: &Scenario) -> f64 {
    let fso = &s.fso;
    let c = &fso.constants;
    let beta = f64::from(fso.malaga.beta);
    let k = fso.kappa();
    let ab = fso.malaga.alpha * beta * k * (c.g + c.omega_prime) / (c.g * beta + c.omega_prime);
    ab * ab * s.gamma_th / (16.0 * fso.mu2)
}

struct Assembly {
    value: f64,
    uncertainty: f64,
    work: u64,
    converged: bool,
}

/// `ℑ₂ = l·C(M,l)·(1−ρ)·e^{−w}·(ξ²/4)·Σ_i C(l−1,i)(−1)^i/ψ_i · S_i`.
fn second_integral(
    s: &Scenario,
    kernel: &dyn Fn(Complex64) -> Complex64,
    argument: f64,
    right_pole: f64,
    shape: Shape,
) -> Result<Assembly> {
    s.validate()?;
    s.require_imperfect_csi()?;
    let rf = &s.rf;
    let w = match shape {
        Shape::Full => s.gamma_th / ((1.0 - rf.rho) * rf.mu1),
        Shape::Diagonal | Shape::FirstTerm => 0.0,
    };
    let xi2 = s.fso.xi2();
    let outer = rf.selection_factor() * (1.0 - rf.rho) * (-w).exp() * 0.25 * xi2;
    let mut value = 0.0;
    let mut uncertainty = 0.0;
    let mut work = 0u64;
    let mut converged = true;
    for (i, a) in rf.alternating_weights().into_iter().enumerate() {
        let psi = rf.psi(i as u32);
        let branch = Branch {
            kernel,
            xi2,
            right_pole,
            z: argument / psi,
            ratio: rf.rho / psi,
            w,
            t_max: s.series.t_max,
            rel_tol: s.series.rel_tol,
            fixed_terms: (shape == Shape::FirstTerm).then_some(0),
        };
        let BranchSum {
            value: v,
            uncertainty: u,
            terms,
            evaluations: _,
            converged: ok,
        } = sum_branch(&branch)?;
        let coef = outer * a / psi;
        value += coef * v;
        uncertainty += (coef * u).abs();
        work += terms as u64;
        converged &= ok;
    }
    Ok(Assembly {
        value,
        uncertainty,
        work,
        converged,
    })
}

fn finish(raw: f64, a: Assembly, extra: f64, method: Method) -> Result<OutageEstimate> {
    let est = OutageEstimate::new(raw, a.uncertainty + extra, method, a.work);
    if a.converged {
        Ok(est)
    } else {
        Err(Error::SeriesNotConverged {
            partial: Box::new(est),
        })
    }
}

/// `1 − ℑ₁`, with its rounding bound.
fn one_minus_im1(s: &Scenario) -> Result<(f64, f64)> {
    let im1 = super::im1_closed_form(&s.rf, s.gamma_th)?;
    Ok((1.0 - im1, 4.0 * f64::EPSILON * f64::from(s.rf.rank)))
}

/// Full outage probability of the PRS relay system.
pub fn outage_exact(s: &Scenario) -> Result<OutageEstimate> {
    let fso = &s.fso;
    let kernel = |u: Complex64| fso.ln_kernel(u);
    let a = second_integral(s, &kernel, base_argument(s), fso.right_pole(), Shape::Full)?;
    let (head, err) = one_minus_im1(s)?;
    finish(head + a.value, a, err, Method::Exact)
}

/// Gamma–Gamma special case (ρ_M = 1): only k = β, with the closed-form
/// weight `2/(Γ(α)Γ(β))` and argument `α²β²κ²γ_th/(16ψ_iμ₂)`.
pub fn outage_gg(s: &Scenario) -> Result<OutageEstimate> {
    let fso = &s.fso;
    if !fso.constants.gg_mode {
        return Err(Error::invalid(
            "rho_M",
            format!(
                "Gamma–Gamma path needs g = 0, got g = {}",
                fso.constants.g
            ),
        ));
    }
    let alpha = fso.malaga.alpha;
    let beta = f64::from(fso.malaga.beta);
    let ln_w = std::f64::consts::LN_2 - ln_gamma_pos(alpha) - ln_gamma_pos(beta);
    let kernel =
        move |u: Complex64| ln_gamma_complex(alpha - u) + ln_gamma_complex(beta - u) + ln_w;
    let k = fso.kappa();
    let argument = (alpha * beta * k).powi(2) * s.gamma_th / (16.0 * fso.mu2);
    let pole = fso.xi2().min(alpha).min(beta);
    let a = second_integral(s, &kernel, argument, pole, Shape::Full)?;
    let (head, err) = one_minus_im1(s)?;
    finish(head + a.value, a, err, Method::Gg)
}

/// Single relay (M = l = 1): `1 − e^{−γ_th/μ₁} + (1−ρ)e^{−w}(ξ²/4)·S`.
pub fn outage_single_relay(s: &Scenario) -> Result<OutageEstimate> {
    s.validate()?;
    s.require_imperfect_csi()?;
    if s.rf.relays != 1 || s.rf.rank != 1 {
        return Err(Error::invalid(
            "M",
            format!(
                "single-relay expression needs M = l = 1, got M = {}, l = {}",
                s.rf.relays, s.rf.rank
            ),
        ));
    }
    let fso = &s.fso;
    let kernel = |u: Complex64| fso.ln_kernel(u);
    let (rho, mu1) = (s.rf.rho, s.rf.mu1);
    let w = s.gamma_th / ((1.0 - rho) * mu1);
    let branch = Branch {
        kernel: &kernel,
        xi2: fso.xi2(),
        right_pole: fso.right_pole(),
        z: base_argument(s),
        ratio: rho,
        w,
        t_max: s.series.t_max,
        rel_tol: s.series.rel_tol,
        fixed_terms: None,
    };
    let b = sum_branch(&branch)?;
    let coef = (1.0 - rho) * (-w).exp() * 0.25 * fso.xi2();
    let raw = -(-s.gamma_th / mu1).exp_m1() + coef * b.value;
    let a = Assembly {
        value: coef * b.value,
        uncertainty: (coef * b.uncertainty).abs(),
        work: b.terms as u64,
        converged: b.converged,
    };
    finish(raw, a, 2.0 * f64::EPSILON, Method::Single)
}

/// Outage floor as μ₁ → ∞.
pub fn outage_floor_mu1(s: &Scenario) -> Result<OutageEstimate> {
    let fso = &s.fso;
    let kernel = |u: Complex64| fso.ln_kernel(u);
    let a = second_integral(s, &kernel, base_argument(s), fso.right_pole(), Shape::Diagonal)?;
    let head = floor_head(s);
    finish(head + a.value, a, 4.0 * f64::EPSILON, Method::FloorMu1)
}

/// First term (t = 0) of the μ₁ floor; only meaningful for small ρ.
pub fn outage_floor_mu1_first_term(s: &Scenario) -> Result<OutageEstimate> {
    let fso = &s.fso;
    let kernel = |u: Complex64| fso.ln_kernel(u);
    let a = second_integral(s, &kernel, base_argument(s), fso.right_pole(), Shape::FirstTerm)?;
    let head = floor_head(s);
    let mut est = finish(head + a.value, a, 4.0 * f64::EPSILON, Method::FloorMu1App)?;
    if s.rf.rho > FIRST_TERM_RHO_LIMIT {
        est.warnings.push(format!(
            "first-term approximation used at rho = {} > {FIRST_TERM_RHO_LIMIT}; it is only accurate for weak correlation",
            s.rf.rho
        ));
    }
    Ok(est)
}

/// `1 − l·C(M,l) Σ_i C(l−1,i)(−1)^i/(M−l+i+1)`, which is zero up to rounding.
fn floor_head(s: &Scenario) -> f64 {
    let rf = &s.rf;
    let mut sum = 0.0;
    for (i, a) in rf.alternating_weights().into_iter().enumerate() {
        sum += a / f64::from(rf.relays - rf.rank + i as u32 + 1);
    }
    1.0 - rf.selection_factor() * sum
}
