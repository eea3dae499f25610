//! Direct quadrature of `P = 1 − ∫∫ F̄₂(γ_th·y/x) f(x+γ_th, y) dx dy`.
//!
//! Substituting `u = γ_th·y/x` and `x = γ_th·y′` turns the double integral
//! into `∫ F̄₂(u) h(u) du` with
//! `h(u) = γ_th ∫ f(γ_th(1+y′), u·y′) y′ dy′`, an integral of elementary
//! functions. The outer integral runs over `ln u`.

use crate::channel::{gamma2_ccdf, rf_joint_pdf};
use crate::error::{Error, Result};
use crate::quad::{geometric_from_zero, integrate, linspace};

use super::{Method, OutageEstimate, Scenario};

/// Target absolute error on the outage probability.
pub const ORACLE_TOL: f64 = 1e-7;
/// The joint density envelope is below e^−50 past this many μ₁.
const ENVELOPE: f64 = 60.0;
const INNER_PANELS: usize = 2000;
const OUTER_PANELS: usize = 3000;

/// Independent check on the series: nested adaptive Gauss–Kronrod on the
/// defining integral.
pub fn outage_quadrature_oracle(s: &Scenario) -> Result<OutageEstimate> {
    s.validate()?;
    s.require_imperfect_csi()?;
    let rf = s.rf;
    let gth = s.gamma_th;
    let mut evaluations = 0usize;
    let mut inner_failed = None;

    let mut h = |u: f64| -> f64 {
        let y_max = ENVELOPE * rf.mu1 / gth.max(u);
        let mut pts = geometric_from_zero(y_max, 40);
        // the density ridges along x ≈ y when ρ is close to 1
        if u > gth {
            let ridge = gth / (u - gth);
            if ridge < y_max {
                pts.push(ridge);
                pts.sort_by(f64::total_cmp);
                pts.dedup();
            }
        }
        let r = integrate(
            |yp: f64| {
                if yp == 0.0 {
                    return 0.0;
                }
                rf_joint_pdf(gth * (1.0 + yp), u * yp, &rf).unwrap_or(f64::NAN) * yp
            },
            &pts,
            1e-300,
            1e-11,
            INNER_PANELS,
        );
        evaluations += r.evaluations;
        if !r.converged || !r.value.is_finite() {
            inner_failed = Some(r.error);
        }
        gth * r.value
    };

    let u_lo = gth * 1e-13;
    let mut u_hi = gth.max(s.fso.mu2);
    while gamma2_ccdf(u_hi, &s.fso)? > 1e-12 {
        u_hi *= 10.0;
        if u_hi > 1e300 {
            return Err(Error::QuadratureBudget {
                context: "quadrature oracle upper limit",
                achieved: f64::NAN,
                target: ORACLE_TOL,
            });
        }
    }
    let (v_lo, v_hi) = (u_lo.ln(), u_hi.ln());
    let mut ccdf_error = None;
    let r = integrate(
        |v: f64| {
            let u = v.exp();
            match gamma2_ccdf(u, &s.fso) {
                Ok(c) if c > 0.0 => c * h(u) * u,
                Ok(_) => 0.0,
                Err(e) => {
                    ccdf_error = Some(e);
                    0.0
                }
            }
        },
        &linspace(v_lo, v_hi, ((v_hi - v_lo).ceil() as usize).max(8)),
        0.1 * ORACLE_TOL,
        0.0,
        OUTER_PANELS,
    );
    if let Some(e) = ccdf_error {
        return Err(e);
    }
    if let Some(achieved) = inner_failed {
        return Err(Error::QuadratureBudget {
            context: "quadrature oracle inner integral",
            achieved,
            target: 1e-11,
        });
    }
    let r = r.into_result("quadrature oracle outer integral", ORACLE_TOL)?;
    // mass below u_lo is at most h_max·u_lo; with u_lo = 1e-13·γ_th it is
    // far below the tolerance
    Ok(OutageEstimate::new(
        1.0 - r.value,
        r.error + 1e-12,
        Method::Quadrature,
        (evaluations + r.evaluations) as u64,
    ))
}
