use thiserror::Error;

use crate::analytic::OutageEstimate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{function}: argument outside domain: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("Meijer G shape not supported: {0}")]
    UnsupportedShape(String),

    #[error("no contour separates the pole families: {0}")]
    ContourPlacement(String),

    #[error("quadrature did not reach tolerance {target:e} (achieved {achieved:e}) in {context}")]
    QuadratureBudget {
        context: &'static str,
        achieved: f64,
        target: f64,
    },

    #[error("series did not converge after {terms} terms in {context}")]
    SeriesDivergence { context: &'static str, terms: usize },

    #[error(
        "outage series not converged within t_max (partial p_out = {}, tail bound {:e})",
        .partial.p_out,
        .partial.uncertainty
    )]
    SeriesNotConverged { partial: Box<OutageEstimate> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            detail: detail.into(),
        }
    }
}
