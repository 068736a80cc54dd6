//! Distributed secondary layer: PoL voltage and phase restoration from
//! network averages, and reactive power sharing.

pub mod estimate;
pub mod loops;
pub mod pi;
pub mod tuning;

pub use estimate::{average_pol, estimate_pol, PhaseMode, PolEstimate};
pub use loops::{
    compose_reference, reactive_sharing_loop, voltage_phase_loop, SecondaryGains, SecondaryLimits, SecondaryState,
};
pub use pi::{pi_aw_step, PiAwState};
pub use tuning::{tune_pi_from_model, PiTuning, TuningModel};
