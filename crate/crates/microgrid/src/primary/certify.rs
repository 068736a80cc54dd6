use nalgebra::DMatrix;

use super::model::{AugmentedLocalModel, ControllerGain, VirtualImpedance};
use crate::linalg::{add_block, cmat, set_block, spectral_abscissa};
use crate::plant::DguParams;
use crate::topology::{ComplexValue, LoadConnectedTopology};
use nalgebra::Matrix2;

/// Required abscissa depth `alpha = margin * coupling_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    pub margin: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { margin: 2e-4 }
    }
}

impl CertifyConfig {
    pub fn alpha(&self, coupling_bound: f64) -> f64 {
        self.margin * coupling_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub passed: bool,
    pub abscissa: f64,
    pub coupling_bound: f64,
    pub alpha: f64,
}

/// Passes iff the local closed loop has spectral abscissa strictly below
/// `-alpha`. With no neighbours this is plain Hurwitz stability.
pub fn certify_local(gain: &ControllerGain, model: &AugmentedLocalModel, cfg: &CertifyConfig) -> Certificate {
    let alpha = cfg.alpha(model.coupling_bound);
    if !gain.is_finite() {
        return Certificate { passed: false, abscissa: f64::NAN, coupling_bound: model.coupling_bound, alpha };
    }
    let abscissa = spectral_abscissa(&model.closed_loop(gain));
    Certificate { passed: abscissa < -alpha, abscissa, coupling_bound: model.coupling_bound, alpha }
}

/// Closed loop of all DGUs over the QSL network with no load.
///
/// Per unit the states are `[V, I_t, xi]` and, when a virtual impedance is
/// given, the derivative-filter state `z` of the line current. Inputs are the
/// dq references.
#[derive(Debug, Clone)]
pub struct GlobalModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c_v: DMatrix<f64>,
    pub c_it: DMatrix<f64>,
}

impl GlobalModel {
    pub fn new(
        gains: &[ControllerGain],
        topo: &LoadConnectedTopology,
        params: &[DguParams],
        omega0: f64,
        vz: Option<&VirtualImpedance>,
    ) -> Self {
        let n = gains.len();
        let with_filter = vz.is_some_and(|v| v.l_v > 0.0 && v.tau > 0.0);
        let w = if with_filter { 8 } else { 6 };
        let dim = w * n;
        let iw = ComplexValue::new(0.0, omega0);
        let mut a = DMatrix::zeros(dim, dim);
        let mut b = DMatrix::zeros(dim, 2 * n);
        let mut c_v = DMatrix::zeros(2 * n, dim);
        let mut c_it = DMatrix::zeros(2 * n, dim);
        let id = Matrix2::identity();

        for i in 0..n {
            let p = &params[i];
            let (c, l) = (p.c_t, p.l_t);
            let o = w * i;
            // V_i
            set_block(&mut a, o, o, &cmat(-iw));
            set_block(&mut a, o, o + 2, &(id / c));
            // I_t,i with the feedback law folded in
            set_block(&mut a, o + 2, o, &(-id / l));
            set_block(&mut a, o + 2, o + 2, &cmat(-(p.r_t / l) - iw));
            let k = &gains[i].k;
            for r in 0..2 {
                for col in 0..6 {
                    a[(o + 2 + r, o + col)] += k[(r, col)] / l;
                }
            }
            // xi_i
            add_block(&mut a, o + 4, o, &(-id));
            b[(o + 4, 2 * i)] = 1.0;
            b[(o + 5, 2 * i + 1)] = 1.0;
            c_v[(2 * i, o)] = 1.0;
            c_v[(2 * i + 1, o + 1)] = 1.0;
            c_it[(2 * i, o + 2)] = 1.0;
            c_it[(2 * i + 1, o + 3)] = 1.0;
        }

        // line currents I_i = sum_j (V_i - V_j) / Z_ij
        for i in 0..n {
            let oi = w * i;
            for (j, z) in topo.neighbours(i) {
                let oj = w * j;
                let y = z.inv();
                let c = params[i].c_t;
                add_block(&mut a, oi, oi, &cmat(-y / c));
                add_block(&mut a, oi, oj, &cmat(y / c));
                if let Some(v) = vz {
                    // xi gets -V_v with V_v = (R_v + i w0 L_v) I + L_v (I - z)/tau
                    let mut zs = ComplexValue::new(v.r_v, omega0 * v.l_v);
                    if with_filter {
                        zs += v.l_v / v.tau;
                    }
                    add_block(&mut a, oi + 4, oi, &cmat(-zs * y));
                    add_block(&mut a, oi + 4, oj, &cmat(zs * y));
                    if with_filter {
                        add_block(&mut a, oi + 6, oi, &cmat(y / v.tau));
                        add_block(&mut a, oi + 6, oj, &cmat(-y / v.tau));
                    }
                }
            }
            if with_filter {
                let v = vz.unwrap();
                set_block(&mut a, oi + 6, oi + 6, &(-id / v.tau));
                add_block(&mut a, oi + 4, oi + 6, &(id * (v.l_v / v.tau)));
            }
        }
        Self { a, b, c_v, c_it }
    }

    pub fn abscissa(&self) -> f64 {
        spectral_abscissa(&self.a)
    }
}

/// All closed-loop eigenvalues in the open left half plane.
pub fn certify_global(
    gains: &[ControllerGain],
    topo: &LoadConnectedTopology,
    params: &[DguParams],
    omega0: f64,
    vz: Option<&VirtualImpedance>,
) -> bool {
    if gains.iter().any(|g| !g.is_finite()) {
        return false;
    }
    GlobalModel::new(gains, topo, params, omega0, vz).abscissa() < 0.0
}
