//! Loads at the point of load.
//!
//! Every model is affine in the PoL voltage at a given instant, `I = M V + c(t)`,
//! which is what lets the QSL network solve for `V_PoL` in closed form.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::park::{inverse_park, park};
use crate::error::{Error, Result};
use crate::params::V_REF;
use crate::topology::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub order: u32,
    pub magnitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectifier {
    pub r_base: f64,
    #[serde(default = "Rectifier::six_pulse")]
    pub spectrum: Vec<Harmonic>,
    /// Voltage that sets the amplitude of the injected harmonics.
    #[serde(default = "Rectifier::default_v_nominal")]
    pub v_nominal: f64,
}

impl Rectifier {
    pub fn new(r_base: f64) -> Self {
        Self { r_base, spectrum: Self::six_pulse(), v_nominal: V_REF }
    }

    /// Orders 5, 7, 11 at 1/h of the fundamental.
    pub fn six_pulse() -> Vec<Harmonic> {
        [5u32, 7, 11]
            .iter()
            .map(|&h| Harmonic { order: h, magnitude: 1.0 / h as f64, phase: 0.0 })
            .collect()
    }

    fn default_v_nominal() -> f64 {
        V_REF
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoadModel {
    #[default]
    None,
    BalancedResistive {
        #[serde(rename = "r_ohm")]
        r: f64,
    },
    UnbalancedResistive {
        #[serde(rename = "r_ohm")]
        r: [f64; 3],
    },
    HarmonicRectifier(Rectifier),
    Parallel { loads: Vec<LoadModel> },
}

/// Load current in dq and per phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadCurrent {
    pub dq: ComplexValue,
    pub abc: [f64; 3],
}

impl LoadModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        match self {
            LoadModel::None => Ok(()),
            LoadModel::BalancedResistive { r } => {
                if *r > 0.0 && r.is_finite() {
                    Ok(())
                } else {
                    bad(format!("load resistance {r}"))
                }
            }
            LoadModel::UnbalancedResistive { r } => {
                if r.iter().all(|x| *x > 0.0 && x.is_finite()) {
                    Ok(())
                } else {
                    bad(format!("load resistances {r:?}"))
                }
            }
            LoadModel::HarmonicRectifier(rect) => {
                if !(rect.r_base > 0.0) {
                    return bad(format!("rectifier base resistance {}", rect.r_base));
                }
                for h in &rect.spectrum {
                    if h.order < 2 || !(0.0..=1.0).contains(&h.magnitude) {
                        return bad(format!("harmonic {h:?}"));
                    }
                }
                Ok(())
            }
            LoadModel::Parallel { loads } => loads.iter().try_for_each(|l| l.validate()),
        }
    }

    /// Replaces the resistance of one phase. Balanced loads become unbalanced;
    /// inside a parallel group the first resistive member is changed.
    pub fn with_phase_resistance(&self, phase: usize, r: f64) -> Result<LoadModel> {
        match self {
            LoadModel::BalancedResistive { r: r0 } => {
                let mut rs = [*r0; 3];
                rs[phase] = r;
                Ok(LoadModel::UnbalancedResistive { r: rs })
            }
            LoadModel::UnbalancedResistive { r: r0 } => {
                let mut rs = *r0;
                rs[phase] = r;
                Ok(LoadModel::UnbalancedResistive { r: rs })
            }
            LoadModel::Parallel { loads } => {
                let mut loads = loads.clone();
                let k = loads
                    .iter()
                    .position(|l| {
                        matches!(
                            l,
                            LoadModel::BalancedResistive { .. } | LoadModel::UnbalancedResistive { .. }
                        )
                    })
                    .ok_or_else(|| Error::Scenario("no resistive load to modify".into()))?;
                loads[k] = loads[k].with_phase_resistance(phase, r)?;
                Ok(LoadModel::Parallel { loads })
            }
            _ => Err(Error::Scenario("per-phase change needs a resistive load".into())),
        }
    }

    /// True when the current depends on time at fixed dq voltage.
    pub fn is_time_varying(&self) -> bool {
        match self {
            LoadModel::None | LoadModel::BalancedResistive { .. } => false,
            LoadModel::UnbalancedResistive { r } => !(r[0] == r[1] && r[1] == r[2]),
            LoadModel::HarmonicRectifier(_) => true,
            LoadModel::Parallel { loads } => loads.iter().any(|l| l.is_time_varying()),
        }
    }
}

pub fn load_current(load: &LoadModel, v_pol: ComplexValue, t: f64, omega0: f64) -> LoadCurrent {
    let theta = omega0 * t;
    match load {
        LoadModel::None => LoadCurrent { dq: ComplexValue::new(0.0, 0.0), abc: [0.0; 3] },
        LoadModel::BalancedResistive { r } => {
            let dq = v_pol / *r;
            LoadCurrent { dq, abc: inverse_park(dq, theta) }
        }
        LoadModel::UnbalancedResistive { r } => {
            let v = inverse_park(v_pol, theta);
            let abc = [v[0] / r[0], v[1] / r[1], v[2] / r[2]];
            LoadCurrent { dq: park(abc, theta), abc }
        }
        LoadModel::HarmonicRectifier(rect) => {
            let fundamental = v_pol / rect.r_base;
            let mut abc = inverse_park(fundamental, theta);
            let i1 = rect.v_nominal / rect.r_base;
            for h in &rect.spectrum {
                let n = h.order as f64;
                for (k, shift) in [0.0, -2.0, 2.0].iter().enumerate() {
                    let arg = n * (theta + shift * std::f64::consts::PI / 3.0) + h.phase;
                    abc[k] += h.magnitude * i1 * arg.sin();
                }
            }
            LoadCurrent { dq: park(abc, theta), abc }
        }
        LoadModel::Parallel { loads } => {
            let mut out = LoadCurrent { dq: ComplexValue::new(0.0, 0.0), abc: [0.0; 3] };
            for l in loads {
                let c = load_current(l, v_pol, t, omega0);
                out.dq += c.dq;
                for k in 0..3 {
                    out.abc[k] += c.abc[k];
                }
            }
            out
        }
    }
}

/// `I = m v + c` with v, I as real 2-vectors (d, q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadAffine {
    pub m: Matrix2<f64>,
    pub c: ComplexValue,
}

impl LoadAffine {
    pub fn zero() -> Self {
        Self { m: Matrix2::zeros(), c: ComplexValue::new(0.0, 0.0) }
    }

    pub fn at(load: &LoadModel, t: f64, omega0: f64) -> Self {
        match load {
            LoadModel::None => Self::zero(),
            LoadModel::BalancedResistive { r } => {
                Self { m: Matrix2::identity() / *r, c: ComplexValue::new(0.0, 0.0) }
            }
            _ => {
                let f = |v: ComplexValue| load_current(load, v, t, omega0).dq;
                let c = f(ComplexValue::new(0.0, 0.0));
                let e1 = f(ComplexValue::new(1.0, 0.0)) - c;
                let e2 = f(ComplexValue::new(0.0, 1.0)) - c;
                Self { m: Matrix2::new(e1.re, e2.re, e1.im, e2.im), c }
            }
        }
    }

    pub fn apply(&self, v: ComplexValue) -> ComplexValue {
        ComplexValue::new(
            self.m[(0, 0)] * v.re + self.m[(0, 1)] * v.im + self.c.re,
            self.m[(1, 0)] * v.re + self.m[(1, 1)] * v.im + self.c.im,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::OMEGA0;

    #[test]
    fn none_draws_nothing() {
        let c = load_current(&LoadModel::None, ComplexValue::new(230.0, 0.0), 0.3, OMEGA0);
        assert_eq!(c.dq, ComplexValue::new(0.0, 0.0));
    }

    #[test]
    fn balanced_92_ohm_power() {
        let v = ComplexValue::new(230.0, 0.0);
        let i = load_current(&LoadModel::BalancedResistive { r: 92.0 }, v, 0.0, OMEGA0).dq;
        let p = 1.5 * (v.re * i.re + v.im * i.im);
        assert!((p - 3.0 * 230.0 * 230.0 / (2.0 * 92.0)).abs() < 1e-9);
        assert!((p - 862.5).abs() < 1e-9);
    }

    #[test]
    fn unbalanced_phase_currents_differ() {
        let load = LoadModel::UnbalancedResistive { r: [115.0, 57.0, 230.0] };
        let c = load_current(&load, ComplexValue::new(230.0, 0.0), 0.0123, OMEGA0);
        // balanced voltage, so peak phase currents are 230 / R_k
        let peaks = [230.0 / 115.0, 230.0 / 57.0, 230.0 / 230.0];
        let mean = peaks.iter().sum::<f64>() / 3.0;
        let dev = peaks.iter().map(|p| (p - mean).abs()).fold(0.0, f64::max);
        assert!(dev / mean > 0.0);
        let v = inverse_park(ComplexValue::new(230.0, 0.0), OMEGA0 * 0.0123);
        for k in 0..3 {
            assert!((c.abc[k] - v[k] / [115.0, 57.0, 230.0][k]).abs() < 1e-12);
        }
    }

    #[test]
    fn fifth_harmonic_rotates_backwards_in_dq() {
        let rect = Rectifier {
            r_base: 460.0,
            spectrum: vec![Harmonic { order: 5, magnitude: 0.2, phase: 0.0 }],
            v_nominal: 230.0,
        };
        let load = LoadModel::HarmonicRectifier(rect);
        let v = ComplexValue::new(0.0, 0.0);
        // negative sequence 5th: dq phasor turns at -6 omega0
        let amp = 0.2 * 230.0 / 460.0;
        for &t in &[0.0, 1e-3, 2.7e-3] {
            let c = load_current(&load, v, t, OMEGA0).dq;
            assert!((c.norm() - amp).abs() < 1e-12);
            let expected = ComplexValue::from_polar(amp, -6.0 * OMEGA0 * t);
            let c0 = load_current(&load, v, 0.0, OMEGA0).dq;
            assert!((c - c0 * expected / amp).norm() < 1e-12);
        }
    }

    #[test]
    fn affine_matches_direct_evaluation() {
        let load = LoadModel::Parallel {
            loads: vec![
                LoadModel::UnbalancedResistive { r: [115.0, 57.0, 230.0] },
                LoadModel::HarmonicRectifier(Rectifier::new(460.0)),
            ],
        };
        let v = ComplexValue::new(221.0, -13.0);
        for &t in &[0.0, 0.00371, 0.0117] {
            let a = LoadAffine::at(&load, t, OMEGA0).apply(v);
            let b = load_current(&load, v, t, OMEGA0).dq;
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn phase_change_turns_balanced_into_unbalanced() {
        let l = LoadModel::BalancedResistive { r: 115.0 }.with_phase_resistance(1, 57.0).unwrap();
        assert_eq!(l, LoadModel::UnbalancedResistive { r: [115.0, 57.0, 115.0] });
        assert!(LoadModel::None.with_phase_resistance(0, 1.0).is_err());
        assert!(LoadModel::BalancedResistive { r: -1.0 }.validate().is_err());
    }
}
