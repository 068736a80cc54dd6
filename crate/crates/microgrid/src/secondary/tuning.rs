//! PI tuning on the first-order-plus-delay model `mu e^{-s tau} / (1 + s T)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningModel {
    pub mu: f64,
    pub tau: f64,
    pub t_const: f64,
    pub n: usize,
}

impl TuningModel {
    /// The phase channel: the averaged PoL phase moves by `dphi / N`.
    pub fn phase_channel(n: usize, tau: f64, t_const: f64) -> Self {
        Self { mu: 1.0 / n as f64, tau, t_const, n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiTuning {
    pub k_p: f64,
    pub k_i: f64,
    /// Phase margin left by the delay, degrees.
    pub phase_margin_deg: f64,
}

impl PiTuning {
    pub fn integral_time(&self) -> f64 {
        self.k_p / self.k_i
    }
}

/// Internal-model rule: `k_i = w_b / mu`, `k_p = kappa k_i T`. With `kappa = 1`
/// the zero cancels the lag and the delay-free loop is `w_b / s`.
pub fn tune_pi_from_model(model: &TuningModel, bandwidth_hz: f64, kappa: f64, tick_s: f64) -> Result<PiTuning> {
    if !(model.t_const > 0.0 && model.tau >= 0.0 && model.n >= 1 && model.mu > 0.0) {
        return Err(Error::Tuning(format!("invalid model {model:?}")));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Tuning(format!("kappa {kappa} outside [0, 1]")));
    }
    if !(bandwidth_hz > 0.0) || bandwidth_hz * tick_s > 0.1 {
        return Err(Error::Tuning(format!(
            "bandwidth {bandwidth_hz} Hz is not well below the {:.1} Hz tick rate",
            1.0 / tick_s
        )));
    }
    if model.tau > 0.0 && bandwidth_hz >= 1.0 / model.tau {
        return Err(Error::Tuning("bandwidth above 1/tau".into()));
    }
    let margin = 90.0 - 360.0 * bandwidth_hz * model.tau;
    if margin < 45.0 {
        return Err(Error::Tuning(format!("phase margin {margin:.1} deg below 45 deg")));
    }
    let wb = 2.0 * PI * bandwidth_hz;
    let k_i = wb / model.mu;
    Ok(PiTuning { k_p: kappa * k_i * model.t_const, k_i, phase_margin_deg: margin })
}
