//! Special functions used by the channel and outage formulas.

mod bessel;
mod erf;
mod gamma;
mod hyper;
mod meijer;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use erf::{erf, erfc};
pub use gamma::{binomial, gamma, ln_binomial, ln_gamma, ln_gamma_complex, ln_gamma_signed};
pub use hyper::{hyp_pfq, SeriesSum, MAX_TERMS};
pub use meijer::{
    meijer_g, meijer_g_contour, meijer_g_eval, MeijerEval, MeijerGSpec, Strategy, AUTO_ACCEPT,
    DEGENERACY_TOL, PERTURBATION,
};

pub(crate) use gamma::ln_gamma_pos;
pub(crate) use meijer::{golden_min, integrate_vertical_line};
