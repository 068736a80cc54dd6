//! Plug-and-play voltage control for islanded AC microgrids.
//!
//! A handful of DGUs (converter, RLC filter, line) feed one common load bus.
//! Quantities live in a dq frame rotating at `w0`; a [`ComplexValue`] holds
//! `d` in its real part and `q` in its imaginary part.
//!
//! - [`topology`] reduces the star of lines to pairwise unit-to-unit lines.
//! - [`plant`] integrates the filter and line dynamics under a load.
//! - [`primary`] designs and certifies the local state feedback and decides
//!   whether a unit may plug in or out.
//! - [`comms`] and [`secondary`] restore the load bus voltage and share
//!   reactive power.
//! - [`harness`] runs scenario files and checks the results.
//!
//! ```
//! use pnp_microgrid::harness::{builtin, report, run};
//!
//! let mut sc = builtin("A").unwrap();
//! sc.sim.duration_s = 0.1;
//! let out = run(&sc).unwrap();
//! let rep = report(&out, &sc);
//! assert!(rep.find("completed")[0].value == 1.0);
//! ```

pub mod comms;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod params;
pub mod plant;
pub mod primary;
pub mod secondary;
pub mod topology;

pub use error::{Error, Result};
pub use topology::ComplexValue;
