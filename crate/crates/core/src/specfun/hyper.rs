//! Generalized hypergeometric series `pFq(a; b; z)` for real parameters.

use crate::error::{Error, Result};

/// Maximum number of series terms before giving up.
pub const MAX_TERMS: usize = 10_000;
const REL_STOP: f64 = 1e-16;

/// Value of a summed series together with the largest term magnitude, which
/// bounds the cancellation error at roughly `ε · max_term`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub max_term: f64,
    pub terms: usize,
}

/// Sums `Σₙ (a₁)ₙ…(a_p)ₙ / ((b₁)ₙ…(b_q)ₙ) · zⁿ/n!`.
///
/// Converges for all z when p ≤ q and for |z| < 1 when p = q + 1. Stops when
/// the geometric bound on the remaining tail falls below 1e-16 of the sum,
/// or when the series terminates.
pub fn hyp_pfq(a: &[f64], b: &[f64], z: f64) -> Result<SeriesSum> {
    if let Some(bad) = b.iter().find(|&&v| v <= 0.0 && v == v.floor()) {
        return Err(Error::Domain {
            function: "hyp_pfq",
            detail: format!("lower parameter {bad} is a non-positive integer"),
        });
    }
    if a.len() > b.len() + 1 || (a.len() == b.len() + 1 && z.abs() >= 1.0) {
        return Err(Error::Domain {
            function: "hyp_pfq",
            detail: format!("{}F{} diverges at z = {z}", a.len(), b.len()),
        });
    }
    let ratio = |n: f64| -> f64 {
        let num: f64 = a.iter().map(|&ai| ai + n).product();
        let den: f64 = b.iter().map(|&bj| bj + n).product();
        num / den * z / (n + 1.0)
    };
    // past this index no parameter can flip sign, so term ratios settle
    let settle = a
        .iter()
        .chain(b)
        .map(|v| (-v).max(0.0).ceil())
        .fold(0.0, f64::max);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut max_term = 1.0f64;
    for n in 0..MAX_TERMS {
        let r = ratio(n as f64);
        term *= r;
        if term == 0.0 {
            return Ok(SeriesSum {
                value: sum,
                max_term,
                terms: n + 1,
            });
        }
        sum += term;
        max_term = max_term.max(term.abs());
        let r = ratio(n as f64 + 1.0).abs();
        if n as f64 >= settle && r < 1.0 && term.abs() * r <= REL_STOP * (1.0 - r) * sum.abs() {
            return Ok(SeriesSum {
                value: sum,
                max_term,
                terms: n + 2,
            });
        }
    }
    Err(Error::SeriesDivergence {
        context: "hyp_pfq",
        terms: MAX_TERMS,
    })
}
