//! Time integration of the active scalar equation with exact treatment of
//! the fractional dissipation.

pub mod config;
pub mod run;
pub mod step;

pub use config::{
    DiagnosticsConfig, InitialData, Integrator, Monitor, Preset, RunConfig, SnapshotPolicy,
    TimeStep,
};
pub use run::{cfl_limit, measure, run, RunResult, RunStatus, RunSummary};
pub use step::{nonlinear_term, step, SimState, Stepper};
