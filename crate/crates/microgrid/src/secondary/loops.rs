use super::estimate::PolEstimate;
use super::pi::{pi_aw_step, PiAwState};
use crate::comms::Payload;
use crate::params;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryGains {
    pub k_pv: f64,
    pub k_iv: f64,
    pub k_pphi: f64,
    pub k_iphi: f64,
    pub k_pq: f64,
    pub k_iq: f64,
}

impl Default for SecondaryGains {
    fn default() -> Self {
        Self {
            k_pv: params::K_PV,
            k_iv: params::K_IV,
            k_pphi: params::K_PPHI,
            k_iphi: params::K_IPHI,
            k_pq: params::K_PQ,
            k_iq: params::K_IQ,
        }
    }
}

/// Symmetric output limits; voltages as fractions of `v_pol_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryLimits {
    pub dv_frac: f64,
    pub dphi_rad: f64,
    pub dvq_frac: f64,
}

impl Default for SecondaryLimits {
    fn default() -> Self {
        Self { dv_frac: 0.1, dphi_rad: 0.1, dvq_frac: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryState {
    pub voltage: PiAwState,
    pub phase: PiAwState,
    pub reactive: PiAwState,
    pub voltage_enabled: bool,
    pub reactive_enabled: bool,
    pub v_pol_star: f64,
    pub delta_v: f64,
    pub delta_phi: f64,
    pub delta_v_q: f64,
    pub estimate: PolEstimate,
}

impl SecondaryState {
    pub fn new(v_pol_star: f64, g: &SecondaryGains, lim: &SecondaryLimits) -> Self {
        let dv = lim.dv_frac * v_pol_star;
        let dvq = lim.dvq_frac * v_pol_star;
        Self {
            voltage: PiAwState::new(g.k_pv, g.k_iv, -dv, dv),
            phase: PiAwState::new(g.k_pphi, g.k_iphi, -lim.dphi_rad, lim.dphi_rad),
            reactive: PiAwState::new(g.k_pq, g.k_iq, -dvq, dvq),
            voltage_enabled: false,
            reactive_enabled: false,
            v_pol_star,
            delta_v: 0.0,
            delta_phi: 0.0,
            delta_v_q: 0.0,
            estimate: PolEstimate::default(),
        }
    }
}

/// PoL voltage and phase regulation; identical at every DGU that sees the
/// same averages.
pub fn voltage_phase_loop(avg: (f64, f64), v_pol_star: f64, state: &mut SecondaryState, dt: f64) -> (f64, f64) {
    if !state.voltage_enabled {
        return (0.0, 0.0);
    }
    state.delta_v = pi_aw_step(&mut state.voltage, v_pol_star - avg.0, dt);
    state.delta_phi = pi_aw_step(&mut state.phase, 0.0 - avg.1, dt);
    (state.delta_v, state.delta_phi)
}

/// Drives the local reactive power toward the mean of the live units.
pub fn reactive_sharing_loop(own_q: f64, snapshot: &[(usize, Payload)], state: &mut SecondaryState, dt: f64) -> f64 {
    if !state.reactive_enabled {
        return 0.0;
    }
    let mean = (own_q + snapshot.iter().map(|(_, p)| p.q).sum::<f64>()) / (snapshot.len() + 1) as f64;
    state.delta_v_q = pi_aw_step(&mut state.reactive, mean - own_q, dt);
    state.delta_v_q
}

/// `(V*, phi*) = (V_PoL* + dV + dV_Q, dphi)`.
pub fn compose_reference(v_pol_star: f64, delta_v: f64, delta_phi: f64, delta_v_q: f64) -> (f64, f64) {
    (v_pol_star + delta_v + delta_v_q, delta_phi)
}
