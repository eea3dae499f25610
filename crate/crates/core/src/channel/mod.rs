//! Channel models for both hops: the correlated Rayleigh RF hop seen through
//! partial relay selection, and the Málaga FSO hop with pointing errors.

mod budget;
mod fso;
mod malaga;
mod optics;
mod rf;

pub use budget::LinkBudget;
pub use fso::{gamma2_ccdf, gamma2_cdf, gamma2_pdf, FsoHop, FsoHopParams};
pub use malaga::{derive_malaga_constants, MalagaDerived, MalagaParams, GG_THRESHOLD};
pub use optics::{
    derive_geometry, derive_pointing, FsoGeometry, GeometryDerived, PointingDerived,
    PointingParams,
};
pub use rf::{rf_joint_pdf, RfHopParams};
