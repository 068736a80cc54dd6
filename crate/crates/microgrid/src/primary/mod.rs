//! Decentralized primary control: local state feedback with integrators and
//! a virtual impedance, gain synthesis, certificates, and plug-and-play
//! admission.

pub mod admission;
pub mod analysis;
pub mod certify;
pub mod clock;
pub mod control;
pub mod model;
pub mod synthesis;

pub use admission::{AdmissionProtocol, Decision, GainAction, GainRegistry, GainUpdate};
pub use analysis::{closed_loop_singular_values, Attenuation};
pub use certify::{certify_global, certify_local, Certificate, CertifyConfig, GlobalModel};
pub use clock::{circular_mean, estimate_clock_offset, wrap_angle, ClockCorrection};
pub use control::{
    control_step, tracking_error, virtual_impedance_drop, DerivativeFilter, PrimaryControllerState,
};
pub use model::{build_local_model, AugmentedLocalModel, ControllerGain, VirtualImpedance};
pub use synthesis::{synthesize_gain, Weights};
