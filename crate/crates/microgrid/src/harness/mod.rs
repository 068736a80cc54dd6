//! Scenarios, the simulation loop, logs and reports.

pub mod corpus;
pub mod log;
pub mod report;
pub mod run;
pub mod scenario;
pub mod tools;

pub use corpus::{builtin, load};
pub use log::{emit_csv, schema, TimeSeriesLog};
pub use report::{gains_csv, report, Report};
pub use run::{run, EventOutcome, EventStatus, RunOutput, Simulation};
pub use scenario::{Event, EventKind, Phase, Scenario};
