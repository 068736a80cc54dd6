//! Electrical network simulation in the dq frame.

pub mod integrate;
pub mod load;
pub mod metrics;
pub mod model;
pub mod park;

pub use integrate::{substeps_for, Rk4};
pub use load::{load_current, Harmonic, LoadAffine, LoadCurrent, LoadModel, Rectifier};
pub use metrics::{
    harmonic_amplitudes, imbalance_ratio, measure, power, rms, thd, AbcWindow, FrequencyEstimator, Metrics, ThdAnalyzer};
pub use model::{
    bus_derivative, no_load_equilibrium, qsl_derivative, DguParams, DguState, Network, PlantDerivative,
    PlantModel, PlantState,
};
pub use park::{inverse_park, inverse_park_sc, park};
