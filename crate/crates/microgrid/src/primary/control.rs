use nalgebra::Vector2;

use super::model::{ControllerGain, VirtualImpedance};
use crate::plant::DguState;
use crate::topology::ComplexValue;

const ZERO: ComplexValue = ComplexValue::new(0.0, 0.0);

/// First-order filtered backward difference of the line current.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivativeFilter {
    prev: Option<ComplexValue>,
    value: ComplexValue,
}

impl DerivativeFilter {
    pub fn update(&mut self, i: ComplexValue, dt: f64, tau: f64) -> ComplexValue {
        if let Some(prev) = self.prev {
            self.value = (self.value * tau + (i - prev)) / (tau + dt);
        }
        self.prev = Some(i);
        self.value
    }

    pub fn value(&self) -> ComplexValue {
        self.value
    }

    /// Re-expresses the stored signals in a frame turned by `-angle`.
    pub fn rotate(&mut self, angle: f64) {
        let r = ComplexValue::from_polar(1.0, -angle);
        self.prev = self.prev.map(|p| p * r);
        self.value *= r;
    }
}

/// `V_v = (R_v + i w0 L_v) I + L_v dI/dt` with the derivative taken from `filter`.
pub fn virtual_impedance_drop(
    i_line: ComplexValue,
    filter: &mut DerivativeFilter,
    vz: &VirtualImpedance,
    dt: f64,
    omega0: f64,
) -> ComplexValue {
    let d = filter.update(i_line, dt, vz.tau);
    ComplexValue::new(vz.r_v, omega0 * vz.l_v) * i_line + d * vz.l_v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryControllerState {
    pub xi: ComplexValue,
    pub filter: DerivativeFilter,
    /// Offset of the local clock against the network, rad.
    pub theta0: f64,
    pub v_star: f64,
    pub phi_star: f64,
    pub last_command: ComplexValue,
}

impl PrimaryControllerState {
    pub fn new(v_star: f64) -> Self {
        Self {
            xi: ZERO,
            filter: DerivativeFilter::default(),
            theta0: 0.0,
            v_star,
            phi_star: 0.0,
            last_command: ZERO,
        }
    }

    /// dq reference in the local frame.
    pub fn reference(&self) -> ComplexValue {
        ComplexValue::from_polar(self.v_star, self.phi_star)
    }

    /// Picks `xi` so that `gain` reproduces `command` at the given measurement.
    /// Used both for start-up at an equilibrium and for bumpless gain switches.
    pub fn align_integrator(&mut self, gain: &ControllerGain, v: ComplexValue, i_t: ComplexValue, command: ComplexValue) {
        let base = gain.apply(v, i_t, ZERO);
        let rhs = Vector2::new(command.re - base.re, command.im - base.im);
        if let Some(inv) = gain.k_xi().try_inverse() {
            let xi = inv * rhs;
            self.xi = ComplexValue::new(xi[0], xi[1]);
        } else {
            self.xi = ZERO;
        }
        self.last_command = command;
    }
}

/// One control update in the controller's own frame. Returns `V_t` in that frame.
pub fn control_step(
    meas: &DguState,
    i_line: ComplexValue,
    state: &mut PrimaryControllerState,
    gain: &ControllerGain,
    vz: &VirtualImpedance,
    dt: f64,
    omega0: f64,
) -> ComplexValue {
    let drop = virtual_impedance_drop(i_line, &mut state.filter, vz, dt, omega0);
    let e = state.reference() - drop - meas.v;
    state.xi += e * dt;
    let u = gain.apply(meas.v, meas.i_t, state.xi);
    state.last_command = u;
    u
}

/// Tracking error `V_ref - V_v - V` for the last filter value.
pub fn tracking_error(meas: &DguState, i_line: ComplexValue, state: &PrimaryControllerState, vz: &VirtualImpedance, omega0: f64) -> ComplexValue {
    let drop = ComplexValue::new(vz.r_v, omega0 * vz.l_v) * i_line + state.filter.value() * vz.l_v;
    state.reference() - drop - meas.v
}
