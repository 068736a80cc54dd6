//! One-shot operations behind the CLI subcommands.

use std::fmt::Write as _;

use super::log::format_value;
use super::report::GainEntry;
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::primary::{closed_loop_singular_values, AdmissionProtocol, Attenuation, ControllerGain, Decision};
use crate::topology::{reduce_bus_to_load, BusTopology};

/// `i,j,r_ohm,x_ohm` for every pair of the reduced network of all DGUs.
pub fn reduce_csv(sc: &Scenario) -> Result<String> {
    let bus = BusTopology::new(sc.params().iter().map(|p| p.line).collect(), sc.omega0())?;
    let topo = reduce_bus_to_load(&bus)?;
    let mut s = String::from("i,j,r_ohm,x_ohm\n");
    for i in 0..topo.n_dgus() {
        for j in i + 1..topo.n_dgus() {
            let z = topo.edge(i, j).expect("reduced network is complete");
            writeln!(s, "{},{},{},{}", i + 1, j + 1, format_value(z.re), format_value(z.im)).unwrap();
        }
    }
    Ok(s)
}

pub fn protocol(sc: &Scenario) -> AdmissionProtocol {
    let mut p = AdmissionProtocol::new(sc.params(), sc.omega0());
    p.weights = sc.weights();
    p.certify = sc.certify_config();
    p
}

/// Gains and certificates of the initially connected units, in
/// `initial_connected` order.
pub fn design(sc: &Scenario) -> Result<Vec<GainEntry>> {
    let members = sc.initial_members();
    match protocol(sc).design(&members)? {
        Decision::Accept { updates } => Ok(updates
            .into_iter()
            .map(|u| GainEntry { dgu: u.dgu + 1, gain: u.gain, certificate: Some(u.certificate) })
            .collect()),
        Decision::Deny { reason, .. } => Err(Error::Synthesis(reason)),
    }
}

/// Attenuation of the initial configuration at the given dq-frame frequencies.
pub fn analyze(sc: &Scenario, freqs: &[f64]) -> Result<Vec<Attenuation>> {
    let members = sc.initial_members();
    let gains: Vec<ControllerGain> = design(sc)?.iter().map(|e| e.gain).collect();
    let p = protocol(sc);
    let topo = p.topology(&members)?;
    let params: Vec<_> = members.iter().map(|&k| p.params[k]).collect();
    let vz = sc.virtual_impedance();
    closed_loop_singular_values(&gains, &topo, &params, sc.omega0(), Some(&vz), freqs)
}

pub fn attenuation_csv(rows: &[Attenuation]) -> String {
    let mut s = String::from("freq_hz,voltage_db,current_db\n");
    for a in rows {
        writeln!(s, "{},{},{}", a.freq_hz, format_value(a.voltage_db), format_value(a.current_db)).unwrap();
    }
    s
}
