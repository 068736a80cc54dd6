use nalgebra::{DMatrix, Matrix2, SMatrix};

use crate::error::{Error, Result};
use crate::linalg::{cmat, set_block};
use crate::plant::DguParams;
use crate::topology::{ComplexValue, LoadConnectedTopology};

/// State feedback `[Vt_d, Vt_q] = K [Vd, Vq, Itd, Itq, xi_d, xi_q]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGain {
    pub k: SMatrix<f64, 2, 6>,
}

impl ControllerGain {
    pub fn zero() -> Self {
        Self { k: SMatrix::zeros() }
    }

    pub fn is_finite(&self) -> bool {
        self.k.iter().all(|x| x.is_finite())
    }

    /// Columns acting on the integrator.
    pub fn k_xi(&self) -> Matrix2<f64> {
        self.k.fixed_view::<2, 2>(0, 4).into_owned()
    }

    pub fn apply(&self, v: ComplexValue, i_t: ComplexValue, xi: ComplexValue) -> ComplexValue {
        let x = nalgebra::Vector6::new(v.re, v.im, i_t.re, i_t.im, xi.re, xi.im);
        let u = self.k * x;
        ComplexValue::new(u[0], u[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualImpedance {
    pub r_v: f64,
    pub l_v: f64,
    /// Time constant of the filtered current derivative.
    pub tau: f64,
}

impl VirtualImpedance {
    pub fn nominal() -> Self {
        Self { r_v: crate::params::R_V, l_v: crate::params::L_V, tau: crate::params::VI_TAU }
    }

    pub fn none() -> Self {
        Self { r_v: 0.0, l_v: 0.0, tau: crate::params::VI_TAU }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_v >= 0.0 && self.l_v >= 0.0 && self.tau >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("virtual impedance {self:?}")))
        }
    }
}

/// Real 6-state model of one DGU with tracking integrators.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedLocalModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// `|sum_j 1/(C_t Z_ij)|`, 1/s.
    pub coupling_bound: f64,
}

impl AugmentedLocalModel {
    pub fn closed_loop(&self, gain: &ControllerGain) -> DMatrix<f64> {
        let k = DMatrix::from_iterator(2, 6, gain.k.iter().copied());
        &self.a + &self.b * k
    }
}

/// The neighbour voltages are left out; what remains of the exchange term is
/// the self part `-V_i sum_j 1/(C Z_ij)`.
pub fn build_local_model(
    params: &DguParams,
    topo: &LoadConnectedTopology,
    i: usize,
    omega0: f64,
) -> Result<AugmentedLocalModel> {
    params.validate()?;
    if i >= topo.n_dgus() {
        return Err(Error::Dimension(format!("row {i} of a {}-unit topology", topo.n_dgus())));
    }
    let y = topo.admittance_sum(i);
    let c = params.c_t;
    let l = params.l_t;
    let iw = ComplexValue::new(0.0, omega0);

    let mut a = DMatrix::zeros(6, 6);
    set_block(&mut a, 0, 0, &cmat(-iw - y / c));
    set_block(&mut a, 0, 2, &(Matrix2::identity() / c));
    set_block(&mut a, 2, 0, &(-Matrix2::identity() / l));
    set_block(&mut a, 2, 2, &cmat(-(params.r_t / l) - iw));
    set_block(&mut a, 4, 0, &(-Matrix2::identity()));
    let mut b = DMatrix::zeros(6, 2);
    b[(2, 0)] = 1.0 / l;
    b[(3, 1)] = 1.0 / l;
    Ok(AugmentedLocalModel { a, b, coupling_bound: (y / c).norm() })
}
