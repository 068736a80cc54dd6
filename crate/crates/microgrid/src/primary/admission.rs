//! Plug-and-play admission.
//!
//! A plug-in or plug-out recomputes the reduced topology of the units that
//! will be connected. Each unit then checks its current gain against its new
//! local model, keeps it when it still certifies, and otherwise re-synthesizes.
//! The event is accepted only if every unit ends up certified.

use super::certify::{certify_local, Certificate, CertifyConfig};
use super::model::{build_local_model, ControllerGain};
use super::synthesis::{synthesize_gain, Weights};
use crate::error::Result;
use crate::plant::DguParams;
use crate::topology::{reduce_bus_to_load, BusTopology, LoadConnectedTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainAction {
    Retained,
    Resynthesized,
    New,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainUpdate {
    pub dgu: usize,
    pub gain: ControllerGain,
    pub action: GainAction,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Accept { updates: Vec<GainUpdate> },
    Deny { reason: String, failing: Vec<usize> },
}

impl Decision {
    pub fn is_accept(&self) -> bool {
        matches!(self, Decision::Accept { .. })
    }
}

/// Gains by DGU index; `None` for units that never had one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GainRegistry {
    gains: Vec<Option<ControllerGain>>,
}

impl GainRegistry {
    pub fn new(n: usize) -> Self {
        Self { gains: vec![None; n] }
    }

    pub fn get(&self, k: usize) -> Option<&ControllerGain> {
        self.gains.get(k).and_then(|g| g.as_ref())
    }

    pub fn set(&mut self, k: usize, gain: ControllerGain) {
        self.gains[k] = Some(gain);
    }

    pub fn apply(&mut self, decision: &Decision) {
        if let Decision::Accept { updates } = decision {
            for u in updates {
                self.set(u.dgu, u.gain);
            }
        }
    }
}

/// Everything the admission test needs to know about the plant.
#[derive(Debug, Clone)]
pub struct AdmissionProtocol {
    pub params: Vec<DguParams>,
    pub omega0: f64,
    pub weights: Weights,
    pub certify: CertifyConfig,
}

impl AdmissionProtocol {
    pub fn new(params: Vec<DguParams>, omega0: f64) -> Self {
        Self { params, omega0, weights: Weights::default(), certify: CertifyConfig::default() }
    }

    pub fn bus(&self, members: &[usize]) -> Result<BusTopology> {
        BusTopology::new(members.iter().map(|&k| self.params[k].line).collect(), self.omega0)
    }

    /// Reduced topology of `members`, in that order.
    pub fn topology(&self, members: &[usize]) -> Result<LoadConnectedTopology> {
        if members.len() == 1 {
            return Ok(LoadConnectedTopology::empty(1));
        }
        reduce_bus_to_load(&self.bus(members)?)
    }

    /// Synthesizes fresh gains for every member.
    pub fn design(&self, members: &[usize]) -> Result<Decision> {
        self.evaluate(members, &[], &GainRegistry::new(self.params.len()))
    }

    /// Gain for a unit running on its own.
    pub fn standalone(&self, k: usize) -> Result<Decision> {
        self.evaluate(&[k], &[], &GainRegistry::new(self.params.len()))
    }

    pub fn plug_in(&self, new: usize, connected: &[usize], registry: &GainRegistry) -> Result<Decision> {
        let mut members = connected.to_vec();
        if !members.contains(&new) {
            members.push(new);
        }
        self.evaluate(&members, connected, registry)
    }

    pub fn plug_out(&self, leaving: usize, connected: &[usize], registry: &GainRegistry) -> Result<Decision> {
        let members: Vec<usize> = connected.iter().copied().filter(|&k| k != leaving).collect();
        if members.is_empty() {
            return Ok(Decision::Accept { updates: vec![] });
        }
        self.evaluate(&members, &members, registry)
    }

    /// `keep` lists the members whose existing gain may be retained.
    fn evaluate(&self, members: &[usize], keep: &[usize], registry: &GainRegistry) -> Result<Decision> {
        let topo = self.topology(members)?;
        let mut updates = Vec::with_capacity(members.len());
        let mut failing = Vec::new();
        let mut reasons = Vec::new();
        for (row, &k) in members.iter().enumerate() {
            let model = build_local_model(&self.params[k], &topo, row, self.omega0)?;
            if keep.contains(&k) {
                if let Some(old) = registry.get(k) {
                    let cert = certify_local(old, &model, &self.certify);
                    if cert.passed {
                        updates.push(GainUpdate { dgu: k, gain: *old, action: GainAction::Retained, certificate: cert });
                        continue;
                    }
                }
            }
            let action = if keep.contains(&k) { GainAction::Resynthesized } else { GainAction::New };
            match synthesize_gain(&model, &self.weights, &self.certify) {
                Ok(gain) => {
                    let cert = certify_local(&gain, &model, &self.certify);
                    updates.push(GainUpdate { dgu: k, gain, action, certificate: cert });
                }
                Err(e) => {
                    failing.push(k);
                    reasons.push(format!("DGU {}: {e}", k + 1));
                }
            }
        }
        if failing.is_empty() {
            Ok(Decision::Accept { updates })
        } else {
            Ok(Decision::Deny { reason: reasons.join("; "), failing })
        }
    }
}
