//! DGU filter dynamics coupled through the network, in dq.
//!
//! Two network models share the converter equations
//!
//! ```text
//! dV/dt   = -i w0 V + (I_t - I_line) / C_t
//! dI_t/dt = -(R_t/L_t + i w0) I_t + (V_t - V) / L_t
//! ```
//!
//! `Qsl` treats the lines as static impedances and `FullBus` keeps the line
//! currents as states with an algebraic PoL node.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use super::load::{LoadAffine, LoadModel};
use crate::error::{Error, Result};
use crate::params;
use crate::topology::{line_impedance, BusTopology, ComplexValue, LineParams, LoadConnectedTopology};

const I: ComplexValue = ComplexValue::new(0.0, 1.0);
const ZERO: ComplexValue = ComplexValue::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DguParams {
    pub r_t: f64,
    pub l_t: f64,
    pub c_t: f64,
    pub line: LineParams,
}

impl DguParams {
    pub fn nominal() -> Self {
        Self {
            r_t: params::R_T,
            l_t: params::L_T,
            c_t: params::C_T,
            line: LineParams { resistance: params::R_LINE, inductance: params::L_LINE },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_t >= 0.0 && self.l_t > 0.0 && self.c_t > 0.0) {
            return Err(Error::InvalidParams(format!("filter {self:?}")));
        }
        LineParams::new(self.line.resistance, self.line.inductance).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DguState {
    pub v: ComplexValue,
    pub i_t: ComplexValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PlantModel {
    #[default]
    Qsl,
    #[serde(alias = "full_bus")]
    FullBus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub dgus: Vec<DguState>,
    /// Line currents; states of the full bus model only.
    pub i_line: Vec<ComplexValue>,
    pub connected: Vec<bool>,
    pub t: f64,
}

/// Derivative of [`PlantState`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlantDerivative {
    pub dgus: Vec<DguState>,
    pub i_line: Vec<ComplexValue>,
}

fn converter(p: &DguParams, s: &DguState, v_t: ComplexValue, i_out: ComplexValue, w0: f64) -> DguState {
    DguState {
        v: -I * w0 * s.v + (s.i_t - i_out) / p.c_t,
        i_t: -(p.r_t / p.l_t + I * w0) * s.i_t + (v_t - s.v) / p.l_t,
    }
}

/// Load-connected form: injected currents `I_Li` at each PCC plus the
/// `(V_j - V_i)/Z_ij` exchange over the reduced graph.
pub fn qsl_derivative(
    state: &[DguState],
    commands: &[ComplexValue],
    injected: &[ComplexValue],
    topo: &LoadConnectedTopology,
    params: &[DguParams],
    omega0: f64,
) -> Result<Vec<DguState>> {
    let n = state.len();
    if commands.len() != n || injected.len() != n || params.len() != n || topo.n_dgus() != n {
        return Err(Error::Dimension(format!(
            "state {n}, commands {}, injected {}, params {}, topology {}",
            commands.len(),
            injected.len(),
            params.len(),
            topo.n_dgus()
        )));
    }
    Ok((0..n)
        .map(|i| {
            let exchange: ComplexValue =
                topo.neighbours(i).map(|(j, z)| (state[j].v - state[i].v) / z).sum();
            let i_out = injected[i] - exchange;
            converter(&params[i], &state[i], commands[i], i_out, omega0)
        })
        .collect())
}

/// Bus-connected model with line dynamics. Returns the derivative and the
/// PoL voltage solved from KCL.
pub fn bus_derivative(
    state: &PlantState,
    commands: &[ComplexValue],
    load: &LoadModel,
    bus: &BusTopology,
    params: &[DguParams],
) -> Result<(PlantDerivative, ComplexValue)> {
    let net = Network::new(params.to_vec(), bus.omega0, PlantModel::FullBus)?;
    if !state.connected.iter().any(|c| *c) && *load != LoadModel::None {
        return Err(Error::Singular("PoL equation with no connected DGU"));
    }
    let x = net.pack(state);
    let mut dx = vec![0.0; x.len()];
    let aff = LoadAffine::at(load, state.t, bus.omega0);
    let v_pol = net.derivative(&x, commands, &state.connected, &aff, &mut dx);
    let d = net.unpack(&dx, state.t, &state.connected);
    Ok((PlantDerivative { dgus: d.dgus, i_line: d.i_line }, v_pol))
}

/// Flat-vector network used by the simulator.
///
/// Layout per DGU: `[Vd, Vq, Itd, Itq]`, then for the full bus model the line
/// currents `[Id, Iq]` of every DGU.
#[derive(Debug, Clone)]
pub struct Network {
    pub params: Vec<DguParams>,
    pub omega0: f64,
    pub model: PlantModel,
    z: Vec<ComplexValue>,
    y: Vec<ComplexValue>,
}

fn solve2(a: Matrix2<f64>, b: ComplexValue) -> Option<ComplexValue> {
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let scale = a.abs().max();
    if det.abs() <= 1e-14 * scale * scale {
        return None;
    }
    Some(ComplexValue::new(
        (a[(1, 1)] * b.re - a[(0, 1)] * b.im) / det,
        (a[(0, 0)] * b.im - a[(1, 0)] * b.re) / det,
    ))
}

fn cmat(z: ComplexValue) -> Matrix2<f64> {
    Matrix2::new(z.re, -z.im, z.im, z.re)
}

impl Network {
    pub fn new(params: Vec<DguParams>, omega0: f64, model: PlantModel) -> Result<Self> {
        for p in &params {
            p.validate()?;
            if model == PlantModel::FullBus && p.line.inductance <= 0.0 {
                return Err(Error::InvalidParams("full bus model needs line inductance".into()));
            }
        }
        let z: Vec<_> = params.iter().map(|p| line_impedance(p.line, omega0)).collect();
        let y = z.iter().map(|z| z.inv()).collect();
        Ok(Self { params, omega0, model, z, y })
    }

    pub fn n_dgus(&self) -> usize {
        self.params.len()
    }

    pub fn dim(&self) -> usize {
        match self.model {
            PlantModel::Qsl => 4 * self.n_dgus(),
            PlantModel::FullBus => 6 * self.n_dgus(),
        }
    }

    pub fn line_impedance(&self, k: usize) -> ComplexValue {
        self.z[k]
    }

    pub fn pack(&self, s: &PlantState) -> Vec<f64> {
        let n = self.n_dgus();
        let mut x = vec![0.0; self.dim()];
        for k in 0..n {
            x[4 * k] = s.dgus[k].v.re;
            x[4 * k + 1] = s.dgus[k].v.im;
            x[4 * k + 2] = s.dgus[k].i_t.re;
            x[4 * k + 3] = s.dgus[k].i_t.im;
            if self.model == PlantModel::FullBus {
                x[4 * n + 2 * k] = s.i_line[k].re;
                x[4 * n + 2 * k + 1] = s.i_line[k].im;
            }
        }
        x
    }

    pub fn unpack(&self, x: &[f64], t: f64, connected: &[bool]) -> PlantState {
        let n = self.n_dgus();
        let dgus = (0..n)
            .map(|k| DguState {
                v: ComplexValue::new(x[4 * k], x[4 * k + 1]),
                i_t: ComplexValue::new(x[4 * k + 2], x[4 * k + 3]),
            })
            .collect();
        let i_line = match self.model {
            PlantModel::Qsl => vec![ZERO; n],
            PlantModel::FullBus => {
                (0..n).map(|k| ComplexValue::new(x[4 * n + 2 * k], x[4 * n + 2 * k + 1])).collect()
            }
        };
        PlantState { dgus, i_line, connected: connected.to_vec(), t }
    }

    #[inline]
    fn v(x: &[f64], k: usize) -> ComplexValue {
        ComplexValue::new(x[4 * k], x[4 * k + 1])
    }

    #[inline]
    fn line_state(&self, x: &[f64], k: usize) -> ComplexValue {
        let n = self.n_dgus();
        ComplexValue::new(x[4 * n + 2 * k], x[4 * n + 2 * k + 1])
    }

    /// PoL voltage implied by the state.
    pub fn v_pol(&self, x: &[f64], connected: &[bool], load: &LoadAffine) -> ComplexValue {
        let n = self.n_dgus();
        if !connected.iter().any(|c| *c) {
            return ZERO;
        }
        match self.model {
            PlantModel::Qsl => {
                let mut a = load.m;
                let mut b = -load.c;
                for k in (0..n).filter(|&k| connected[k]) {
                    a += cmat(self.y[k]);
                    b += self.y[k] * Self::v(x, k);
                }
                solve2(a, b).unwrap_or(ZERO)
            }
            PlantModel::FullBus => {
                let mut sum_i = ZERO;
                for k in (0..n).filter(|&k| connected[k]) {
                    sum_i += self.line_state(x, k);
                }
                if let Some(v) = solve2(load.m, sum_i - load.c) {
                    return v;
                }
                // No resistive path: the PoL follows from sum_k dI_k/dt = 0.
                let mut num = ZERO;
                let mut den = 0.0;
                for k in (0..n).filter(|&k| connected[k]) {
                    let l = self.params[k].line.inductance;
                    num += (Self::v(x, k) - self.z[k] * self.line_state(x, k)) / l;
                    den += 1.0 / l;
                }
                num / den
            }
        }
    }

    /// Line currents leaving each PCC (zero for disconnected units).
    pub fn line_currents(&self, x: &[f64], connected: &[bool], v_pol: ComplexValue) -> Vec<ComplexValue> {
        (0..self.n_dgus())
            .map(|k| {
                if !connected[k] {
                    ZERO
                } else {
                    match self.model {
                        PlantModel::Qsl => (Self::v(x, k) - v_pol) * self.y[k],
                        PlantModel::FullBus => self.line_state(x, k),
                    }
                }
            })
            .collect()
    }

    /// Writes `dx/dt` into `out` and returns `V_PoL`.
    pub fn derivative(
        &self,
        x: &[f64],
        commands: &[ComplexValue],
        connected: &[bool],
        load: &LoadAffine,
        out: &mut [f64],
    ) -> ComplexValue {
        let n = self.n_dgus();
        let w0 = self.omega0;
        let v_pol = self.v_pol(x, connected, load);
        for k in 0..n {
            let p = &self.params[k];
            let s = DguState { v: Self::v(x, k), i_t: ComplexValue::new(x[4 * k + 2], x[4 * k + 3]) };
            let i_out = if !connected[k] {
                ZERO
            } else {
                match self.model {
                    PlantModel::Qsl => (s.v - v_pol) * self.y[k],
                    PlantModel::FullBus => self.line_state(x, k),
                }
            };
            let d = converter(p, &s, commands[k], i_out, w0);
            out[4 * k] = d.v.re;
            out[4 * k + 1] = d.v.im;
            out[4 * k + 2] = d.i_t.re;
            out[4 * k + 3] = d.i_t.im;
            if self.model == PlantModel::FullBus {
                let di = if connected[k] {
                    (s.v - v_pol - self.z[k] * i_out) / p.line.inductance
                } else {
                    ZERO
                };
                out[4 * n + 2 * k] = di.re;
                out[4 * n + 2 * k + 1] = di.im;
            }
        }
        v_pol
    }

    /// Jacobian of the (affine) state map for fixed connectivity and load.
    pub fn jacobian(&self, connected: &[bool], load: &LoadAffine) -> DMatrix<f64> {
        let m = self.dim();
        let zero_u = vec![ZERO; self.n_dgus()];
        let lin = LoadAffine { m: load.m, c: ZERO };
        let mut f0 = vec![0.0; m];
        let x0 = vec![0.0; m];
        self.derivative(&x0, &zero_u, connected, &lin, &mut f0);
        let mut jac = DMatrix::zeros(m, m);
        let mut x = vec![0.0; m];
        let mut f = vec![0.0; m];
        for k in 0..m {
            x[k] = 1.0;
            self.derivative(&x, &zero_u, connected, &lin, &mut f);
            for r in 0..m {
                jac[(r, k)] = f[r] - f0[r];
            }
            x[k] = 0.0;
        }
        jac
    }

    /// Largest eigenvalue magnitude of [`Network::jacobian`].
    pub fn spectral_radius(&self, connected: &[bool], load: &LoadAffine) -> f64 {
        self.jacobian(connected, load)
            .complex_eigenvalues()
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    /// Opens the breaker of unit `k` in the full bus model. Without a load
    /// path the remaining line currents are projected back onto `sum I = 0`.
    pub fn disconnect_line(&self, x: &mut [f64], connected: &[bool], k: usize, load: &LoadAffine) {
        if self.model != PlantModel::FullBus {
            return;
        }
        let n = self.n_dgus();
        x[4 * n + 2 * k] = 0.0;
        x[4 * n + 2 * k + 1] = 0.0;
        if solve2(load.m, ZERO).is_some() {
            return;
        }
        let live: Vec<usize> = (0..n).filter(|&j| connected[j] && j != k).collect();
        if live.is_empty() {
            return;
        }
        let total: ComplexValue = live.iter().map(|&j| self.line_state(x, j)).sum();
        let wsum: f64 = live.iter().map(|&j| 1.0 / self.params[j].line.inductance).sum();
        for &j in &live {
            let w = (1.0 / self.params[j].line.inductance) / wsum;
            x[4 * n + 2 * j] -= w * total.re;
            x[4 * n + 2 * j + 1] -= w * total.im;
        }
    }
}

/// Steady operating point of an unloaded filter holding `v`.
pub fn no_load_equilibrium(p: &DguParams, v: ComplexValue, omega0: f64) -> (DguState, ComplexValue) {
    let i_t = I * omega0 * p.c_t * v;
    let v_t = v + (p.r_t + I * omega0 * p.l_t) * i_t;
    (DguState { v, i_t }, v_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::OMEGA0;
    use crate::plant::load::load_current;
    use crate::topology::{reduce_bus_to_load, split_load_current};

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    #[test]
    fn equilibrium_has_zero_derivative() {
        let p = DguParams::nominal();
        let bus = BusTopology::new(vec![p.line; 3], OMEGA0).unwrap();
        let topo = reduce_bus_to_load(&bus).unwrap();
        let (s, u) = no_load_equilibrium(&p, c(230.0, 5.0), OMEGA0);
        let d = qsl_derivative(&[s; 3], &[u; 3], &[ZERO; 3], &topo, &[p; 3], OMEGA0).unwrap();
        for x in d {
            assert!(x.v.norm() < 1e-6 && x.i_t.norm() < 1e-9, "{x:?}");
        }
    }

    #[test]
    fn zero_state_and_capacitor_charging() {
        let p = DguParams::nominal();
        let topo = LoadConnectedTopology::empty(1);
        let d = qsl_derivative(&[DguState::default()], &[ZERO], &[ZERO], &topo, &[p], OMEGA0).unwrap();
        assert_eq!(d[0], DguState::default());
        let unit = DguParams { c_t: 1.0, ..p };
        let s = DguState { v: ZERO, i_t: c(1.0, 0.0) };
        let d = qsl_derivative(&[s], &[ZERO], &[ZERO], &topo, &[unit], 0.0).unwrap();
        assert_eq!(d[0].v, c(1.0, 0.0));
        assert!(qsl_derivative(&[s], &[], &[ZERO], &topo, &[unit], 0.0).is_err());
    }

    /// The network solver must reproduce the reduced load-connected equations.
    #[test]
    fn network_qsl_matches_reduced_form() {
        let mut ps = vec![DguParams::nominal(); 3];
        ps[1].line = LineParams { resistance: 0.2, inductance: 3.0e-3 };
        ps[2].line = LineParams { resistance: 0.05, inductance: 1.0e-3 };
        let net = Network::new(ps.clone(), OMEGA0, PlantModel::Qsl).unwrap();
        let load = LoadModel::UnbalancedResistive { r: [115.0, 57.0, 230.0] };
        let t = 0.00731;
        let aff = LoadAffine::at(&load, t, OMEGA0);
        let st = PlantState {
            dgus: vec![
                DguState { v: c(229.0, 3.0), i_t: c(1.0, 2.0) },
                DguState { v: c(231.0, -1.0), i_t: c(-0.5, 2.5) },
                DguState { v: c(228.5, 0.7), i_t: c(2.0, 1.5) },
            ],
            i_line: vec![ZERO; 3],
            connected: vec![true; 3],
            t,
        };
        let u = [c(230.0, 20.0), c(232.0, 18.0), c(229.0, 21.0)];
        let x = net.pack(&st);
        let mut dx = vec![0.0; x.len()];
        let v_pol = net.derivative(&x, &u, &st.connected, &aff, &mut dx);

        let bus = BusTopology::new(ps.iter().map(|p| p.line).collect(), OMEGA0).unwrap();
        let topo = reduce_bus_to_load(&bus).unwrap();
        let il = load_current(&load, v_pol, t, OMEGA0).dq;
        let inj = split_load_current(&bus, il).unwrap();
        let d = qsl_derivative(&st.dgus, &u, &inj, &topo, &ps, OMEGA0).unwrap();
        for k in 0..3 {
            let dv = c(dx[4 * k], dx[4 * k + 1]);
            assert!((dv - d[k].v).norm() < 1e-6 * dv.norm().max(1.0), "{dv} vs {}", d[k].v);
        }
    }

    #[test]
    fn full_bus_pol_without_load_is_line_weighted_average() {
        let mut ps = vec![DguParams::nominal(); 2];
        ps[1].line.inductance = 3.6e-3;
        let bus = BusTopology::new(ps.iter().map(|p| p.line).collect(), OMEGA0).unwrap();
        let st = PlantState {
            dgus: vec![
                DguState { v: c(230.0, 0.0), i_t: ZERO },
                DguState { v: c(224.0, 6.0), i_t: ZERO },
            ],
            i_line: vec![ZERO; 2],
            connected: vec![true; 2],
            t: 0.0,
        };
        let (_, v_pol) = bus_derivative(&st, &[ZERO; 2], &LoadModel::None, &bus, &ps).unwrap();
        let w1 = 1.0 / 1.8e-3;
        let w2 = 1.0 / 3.6e-3;
        let expected = (c(230.0, 0.0) * w1 + c(224.0, 6.0) * w2) / (w1 + w2);
        assert!((v_pol - expected).norm() < 1e-9);
    }

    #[test]
    fn full_bus_resistive_pol_from_kcl() {
        let ps = vec![DguParams::nominal(); 2];
        let bus = BusTopology::new(vec![ps[0].line; 2], OMEGA0).unwrap();
        let st = PlantState {
            dgus: vec![DguState::default(); 2],
            i_line: vec![c(1.0, 0.5), c(1.5, -0.25)],
            connected: vec![true; 2],
            t: 0.0,
        };
        let (_, v_pol) =
            bus_derivative(&st, &[ZERO; 2], &LoadModel::BalancedResistive { r: 92.0 }, &bus, &ps).unwrap();
        assert!((v_pol - c(2.5, 0.25) * 92.0).norm() < 1e-9);
        let lonely = PlantState { connected: vec![false; 2], ..st };
        assert!(bus_derivative(&lonely, &[ZERO; 2], &LoadModel::BalancedResistive { r: 92.0 }, &bus, &ps).is_err());
    }
}
