//! Frequency response of the closed-loop network.

use nalgebra::{Complex, DMatrix};

use super::certify::GlobalModel;
use super::model::{ControllerGain, VirtualImpedance};
use crate::error::{Error, Result};
use crate::plant::DguParams;
use crate::topology::LoadConnectedTopology;

/// Attenuation `-20 log10 sigma_max` at one frequency, dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attenuation {
    pub freq_hz: f64,
    /// Reference to PCC voltage.
    pub voltage_db: f64,
    /// Reference to filter current (A/V).
    pub current_db: f64,
}

fn sigma_max(model: &GlobalModel, c: &DMatrix<f64>, w: f64) -> Result<f64> {
    let n = model.a.nrows();
    let to_c = |m: &DMatrix<f64>| m.map(|x| Complex::new(x, 0.0));
    let mut s = to_c(&model.a) * Complex::new(-1.0, 0.0);
    for i in 0..n {
        s[(i, i)] += Complex::new(0.0, w);
    }
    let x = s.lu().solve(&to_c(&model.b)).ok_or(Error::Singular("frequency response"))?;
    let g = to_c(c) * x;
    Ok(g.singular_values().iter().copied().fold(0.0, f64::max))
}

/// The grid is in Hz of the dq frame, where an abc harmonic of order h shows
/// up at `(h -+ 1) f0`.
pub fn closed_loop_singular_values(
    gains: &[ControllerGain],
    topo: &LoadConnectedTopology,
    params: &[DguParams],
    omega0: f64,
    vz: Option<&VirtualImpedance>,
    freqs: &[f64],
) -> Result<Vec<Attenuation>> {
    let model = GlobalModel::new(gains, topo, params, omega0, vz);
    if model.abscissa() >= 0.0 {
        return Err(Error::Synthesis("closed loop is not stable".into()));
    }
    freqs
        .iter()
        .map(|&f| {
            let w = 2.0 * std::f64::consts::PI * f;
            Ok(Attenuation {
                freq_hz: f,
                voltage_db: -20.0 * sigma_max(&model, &model.c_v, w)?.log10(),
                current_db: -20.0 * sigma_max(&model, &model.c_it, w)?.log10(),
            })
        })
        .collect()
}
