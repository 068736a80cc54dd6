use nalgebra::{DMatrix, SMatrix};

use super::certify::{certify_local, CertifyConfig};
use super::model::{AugmentedLocalModel, ControllerGain};
use crate::error::{Error, Result};
use crate::linalg::care;

/// Diagonal LQR weights on `[V, I_t, xi]` (d and q share a value) and the
/// input weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub voltage: f64,
    pub current: f64,
    pub integrator: f64,
    pub input: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self { voltage: 1.0, current: 1.0, integrator: 800.0, input: 1.0 }
    }
}

impl Weights {
    fn q(&self) -> DMatrix<f64> {
        let d = [self.voltage, self.voltage, self.current, self.current, self.integrator, self.integrator];
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d))
    }
}

/// LQR gain on the local model, accepted only if [`certify_local`] passes.
pub fn synthesize_gain(
    model: &AugmentedLocalModel,
    weights: &Weights,
    cfg: &CertifyConfig,
) -> Result<ControllerGain> {
    let r = DMatrix::identity(2, 2) * weights.input;
    let p = care(&model.a, &model.b, &weights.q(), &r).map_err(|e| Error::Synthesis(e.to_string()))?;
    let k = -(r.try_inverse().ok_or(Error::Singular("input weight"))? * model.b.transpose() * p);
    let gain = ControllerGain { k: SMatrix::<f64, 2, 6>::from_iterator(k.iter().copied()) };
    let cert = certify_local(&gain, model, cfg);
    if !cert.passed {
        return Err(Error::Synthesis(format!(
            "abscissa {:.3} s^-1 does not clear -{:.3} s^-1",
            cert.abscissa, cert.alpha
        )));
    }
    Ok(gain)
}
