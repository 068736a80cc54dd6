//! Reference electrical and control values of the laboratory setup.

use std::f64::consts::PI;

pub const F0_HZ: f64 = 50.0;
pub const OMEGA0: f64 = 2.0 * PI * F0_HZ;
/// Voltage reference, peak phase value in the amplitude-invariant dq frame.
pub const V_REF: f64 = 230.0;
pub const F_SW_HZ: f64 = 10_000.0;

pub const R_T: f64 = 0.1;
pub const L_T: f64 = 1.8e-3;
pub const C_T: f64 = 25e-6;

pub const R_LINE: f64 = 0.1;
pub const L_LINE: f64 = 1.8e-3;

pub const R_V: f64 = 3.0;
pub const L_V: f64 = 0.03;
pub const VI_TAU: f64 = 1e-3;

pub const LOADS_OHM: [f64; 4] = [57.0, 115.0, 230.0, 460.0];
pub const R_NL: f64 = 460.0;

pub const K_PV: f64 = 1e-3;
pub const K_IV: f64 = 0.6;
pub const K_PPHI: f64 = 1e-3;
pub const K_IPHI: f64 = 4.0;
pub const K_PQ: f64 = 1e-4;
pub const K_IQ: f64 = 1e-2;
