use crate::comms::Payload;
use crate::primary::circular_mean;
use crate::topology::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolEstimate {
    pub v_pol: f64,
    pub phi_pol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMode {
    #[default]
    Atan2,
    /// `V_q / V_d`, the small-angle form.
    Ratio,
}

/// PoL voltage seen from one DGU through its line inductance:
/// `V_PoL = V - i w0 L I`. The line resistance is ignored.
///
/// The flag is set when the d component is too small for a phase; the phase
/// is then `prev_phi`.
pub fn estimate_pol(
    v: ComplexValue,
    i_line: ComplexValue,
    l_line: f64,
    omega0: f64,
    mode: PhaseMode,
    prev_phi: f64,
) -> (PolEstimate, bool) {
    let vp = ComplexValue::new(v.re + omega0 * l_line * i_line.im, v.im - omega0 * l_line * i_line.re);
    let mag = vp.norm();
    if vp.re.abs() <= 1e-9 * mag.max(1.0) {
        return (PolEstimate { v_pol: mag, phi_pol: prev_phi }, true);
    }
    let phi = match mode {
        PhaseMode::Atan2 => vp.im.atan2(vp.re),
        PhaseMode::Ratio => vp.im / vp.re,
    };
    (PolEstimate { v_pol: mag, phi_pol: phi }, false)
}

/// Mean magnitude and circular mean phase over self and the snapshot.
pub fn average_pol(snapshot: &[(usize, Payload)], own: &PolEstimate) -> (f64, f64) {
    let n = snapshot.len() + 1;
    let v = (own.v_pol + snapshot.iter().map(|(_, p)| p.v_pol).sum::<f64>()) / n as f64;
    let mut phases = Vec::with_capacity(n);
    phases.push(own.phi_pol);
    phases.extend(snapshot.iter().map(|(_, p)| p.phi_pol));
    let phi = circular_mean(&phases).unwrap_or(own.phi_pol);
    (v, phi)
}
