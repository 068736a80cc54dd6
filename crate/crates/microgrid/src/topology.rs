//! Bus-connected (star) networks and their load-connected equivalents.
//!
//! Every DGU reaches the point of load (PoL) through its own line. Eliminating
//! the PoL node gives a complete graph between the DGUs with edge impedances
//!
//! ```text
//! Z_ij = Z_i Z_j sum_k 1/Z_k
//! ```
//!
//! and the load current splits as `I_Li = I_L / (Z_i sum_k 1/Z_k)`.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// dq phasor or impedance. d maps to `re`, q to `im`.
pub type ComplexValue = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub resistance: f64,
    pub inductance: f64,
}

impl LineParams {
    pub fn new(resistance: f64, inductance: f64) -> Result<Self> {
        let ok = resistance.is_finite()
            && inductance.is_finite()
            && resistance >= 0.0
            && inductance >= 0.0
            && (resistance > 0.0 || inductance > 0.0);
        if !ok {
            return Err(Error::InvalidParams(format!(
                "line R = {resistance}, L = {inductance}"
            )));
        }
        Ok(Self { resistance, inductance })
    }
}

/// `R + i omega0 L`.
pub fn line_impedance(line: LineParams, omega0: f64) -> ComplexValue {
    ComplexValue::new(line.resistance, omega0 * line.inductance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusTopology {
    pub lines: Vec<LineParams>,
    pub omega0: f64,
}

impl BusTopology {
    pub fn new(lines: Vec<LineParams>, omega0: f64) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::InvalidParams("bus needs at least one DGU".into()));
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParams(format!("omega0 = {omega0}")));
        }
        Ok(Self { lines, omega0 })
    }

    pub fn n_dgus(&self) -> usize {
        self.lines.len()
    }

    pub fn impedances(&self) -> Vec<ComplexValue> {
        self.lines.iter().map(|l| line_impedance(*l, self.omega0)).collect()
    }

    /// Star made of the listed lines only, in the given order.
    pub fn subset(&self, members: &[usize]) -> Result<Self> {
        let lines = members.iter().map(|&k| self.lines[k]).collect();
        Self::new(lines, self.omega0)
    }

    fn checked_impedances(&self) -> Result<Vec<ComplexValue>> {
        let z = self.impedances();
        for (index, zi) in z.iter().enumerate() {
            if zi.norm() == 0.0 {
                return Err(Error::DegenerateLine { index });
            }
        }
        Ok(z)
    }
}

/// Complete (or partial) graph of edge impedances between DGUs.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadConnectedTopology {
    n: usize,
    edges: Vec<Option<ComplexValue>>,
}

impl LoadConnectedTopology {
    pub fn empty(n: usize) -> Self {
        Self { n, edges: vec![None; n * n] }
    }

    pub fn n_dgus(&self) -> usize {
        self.n
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_edge(&mut self, i: usize, j: usize, z: ComplexValue) {
        assert!(i != j, "self-edges are not allowed");
        self.edges[i * self.n + j] = Some(z);
        self.edges[j * self.n + i] = Some(z);
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<ComplexValue> {
        self.edges[i * self.n + j]
    }

    pub fn present_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_some()).count() / 2
    }

    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = (usize, ComplexValue)> + '_ {
        (0..self.n).filter_map(move |j| self.edge(i, j).map(|z| (j, z)))
    }

    /// `sum_j 1/Z_ij` over the neighbours of `i`.
    pub fn admittance_sum(&self, i: usize) -> ComplexValue {
        self.neighbours(i).map(|(_, z)| z.inv()).sum()
    }
}

pub fn reduce_bus_to_load(bus: &BusTopology) -> Result<LoadConnectedTopology> {
    let z = bus.checked_impedances()?;
    let n = z.len();
    let mut topo = LoadConnectedTopology::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let zij = if n == 2 {
                z[i] + z[j]
            } else {
                // Z_i * sum_k Z_j/Z_k: with equal impedances the sum is exactly N
                z[i] * z.iter().map(|zk| z[j] / zk).sum::<ComplexValue>()
            };
            topo.set_edge(i, j, zij);
        }
    }
    Ok(topo)
}

pub fn split_load_current(bus: &BusTopology, i_load: ComplexValue) -> Result<Vec<ComplexValue>> {
    let z = bus.checked_impedances()?;
    Ok(z
        .iter()
        .map(|zi| {
            let d: ComplexValue = z.iter().map(|zk| zi / zk).sum();
            if d.im == 0.0 {
                i_load.unscale(d.re)
            } else {
                i_load / d
            }
        })
        .collect())
}

/// Schur-complement elimination of the PoL from the star's nodal admittance
/// matrix. Used to check [`reduce_bus_to_load`].
pub fn kron_reduce_star(bus: &BusTopology) -> Result<LoadConnectedTopology> {
    let z = bus.checked_impedances()?;
    let n = z.len();
    let mut y = DMatrix::<ComplexValue>::zeros(n + 1, n + 1);
    for (k, zk) in z.iter().enumerate() {
        let yk = zk.inv();
        y[(k, k)] += yk;
        y[(n, n)] += yk;
        y[(k, n)] -= yk;
        y[(n, k)] -= yk;
    }
    let yaa = y.view((0, 0), (n, n)).into_owned();
    let yab = y.view((0, n), (n, 1)).into_owned();
    let yba = y.view((n, 0), (1, n)).into_owned();
    let ybb = y.view((n, n), (1, 1)).into_owned();
    let ybb_inv = ybb.try_inverse().ok_or(Error::Singular("kron_reduce_star"))?;
    let yred = yaa - yab * ybb_inv * yba;

    let mut topo = LoadConnectedTopology::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            // off-diagonal entries of a nodal matrix are minus the edge admittance
            let yij = -yred[(i, j)];
            if yij.norm() == 0.0 {
                return Err(Error::Singular("kron_reduce_star edge"));
            }
            topo.set_edge(i, j, yij.inv());
        }
    }
    Ok(topo)
}
