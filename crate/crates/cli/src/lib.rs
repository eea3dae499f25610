//! Scenario files, sweeps, figure presets and CSV output for `rfso`.

pub mod presets;
pub mod run;
pub mod scenario;
pub mod sweep;

pub use run::{run_files, write_csv, MethodChoice, ResultRow};
pub use scenario::{load, parse, LoadError, ScenarioFile};
pub use sweep::{SweepSpec, SweepVar};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/presets.md")]
    mod presets {}
}
