pub mod analytic;
pub mod channel;
pub mod error;
pub mod mcsim;
pub mod presets;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};

/// The guide's chapters, compiled so their code blocks run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/link-model.md")]
    mod link_model {}
    #[doc = include_str!("../../../book/src/outage.md")]
    mod outage {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/meijer-g.md")]
    mod meijer_g {}
}
