//! Scenario files.
//!
//! DGU ids are 1-based in files and reports and 0-based in code.

use serde::{Deserialize, Serialize};

use crate::comms::NetConfig;
use crate::error::{Error, Result};
use crate::plant::{DguParams, LoadModel, PlantModel};
use crate::primary::{CertifyConfig, VirtualImpedance, Weights};
use crate::secondary::{PhaseMode, SecondaryGains, SecondaryLimits};
use crate::topology::LineParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    pub r_ohm: f64,
    pub l_henry: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DguSpec {
    pub r_t_ohm: f64,
    pub l_t_henry: f64,
    pub c_t_farad: f64,
    pub line: LineSpec,
    /// Initial offset of the unit's clock, rad.
    #[serde(default)]
    pub clock_offset_rad: f64,
}

impl DguSpec {
    pub fn params(&self) -> DguParams {
        DguParams {
            r_t: self.r_t_ohm,
            l_t: self.l_t_henry,
            c_t: self.c_t_farad,
            line: LineParams { resistance: self.line.r_ohm, inductance: self.line.l_henry },
        }
    }

    pub fn nominal() -> Self {
        let p = DguParams::nominal();
        Self {
            r_t_ohm: p.r_t,
            l_t_henry: p.l_t,
            c_t_farad: p.c_t,
            line: LineSpec { r_ohm: p.line.resistance, l_henry: p.line.inductance },
            clock_offset_rad: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub dt_s: f64,
    pub duration_s: f64,
    pub model: PlantModel,
    pub integrator: Integrator,
    /// Log every n-th step.
    pub log_every: usize,
    /// Settling run before t = 0 with the initial configuration, not logged.
    pub warmup_s: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt_s: 1e-4,
            duration_s: 10.0,
            model: PlantModel::Qsl,
            integrator: Integrator::Rk4,
            log_every: 10,
            warmup_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetSpec {
    pub secondary_period_s: f64,
    pub latency_s: f64,
}

impl Default for NetSpec {
    fn default() -> Self {
        let c = NetConfig::default();
        Self { secondary_period_s: c.period, latency_s: c.latency }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VirtualImpedanceSpec {
    pub r_ohm: f64,
    pub l_henry: f64,
    pub tau_s: f64,
}

impl Default for VirtualImpedanceSpec {
    fn default() -> Self {
        let v = VirtualImpedance::nominal();
        Self { r_ohm: v.r_v, l_henry: v.l_v, tau_s: v.tau }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrimarySpec {
    pub q_voltage: f64,
    pub q_current: f64,
    pub q_integrator: f64,
    pub r_input: f64,
    pub certify_margin: f64,
    pub freq_filter_tau_s: f64,
}

impl Default for PrimarySpec {
    fn default() -> Self {
        let w = Weights::default();
        Self {
            q_voltage: w.voltage,
            q_current: w.current,
            q_integrator: w.integrator,
            r_input: w.input,
            certify_margin: CertifyConfig::default().margin,
            freq_filter_tau_s: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PhaseModeSpec {
    #[default]
    Atan2,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SecondarySpec {
    pub k_pv: f64,
    pub k_iv: f64,
    pub k_pphi: f64,
    pub k_iphi: f64,
    pub k_pq: f64,
    pub k_iq: f64,
    pub dv_limit_frac: f64,
    pub dphi_limit_rad: f64,
    pub dvq_limit_frac: f64,
    pub phase_mode: PhaseModeSpec,
}

impl Default for SecondarySpec {
    fn default() -> Self {
        let g = SecondaryGains::default();
        let l = SecondaryLimits::default();
        Self {
            k_pv: g.k_pv,
            k_iv: g.k_iv,
            k_pphi: g.k_pphi,
            k_iphi: g.k_iphi,
            k_pq: g.k_pq,
            k_iq: g.k_iq,
            dv_limit_frac: l.dv_frac,
            dphi_limit_rad: l.dphi_rad,
            dvq_limit_frac: l.dvq_frac,
            phase_mode: PhaseModeSpec::Atan2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    A,
    B,
    C,
}

impl Phase {
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    SetLoad { load: LoadModel },
    SetLoadPhase {
        phase: Phase,
        #[serde(rename = "r_ohm")]
        r: f64,
    },
    PlugIn { dgu: usize },
    PlugOut { dgu: usize },
    EnableSecondaryVoltage,
    EnableSecondaryQ,
}

impl EventKind {
    pub fn label(&self) -> String {
        match self {
            EventKind::SetLoad { .. } => "set_load".into(),
            EventKind::SetLoadPhase { phase, r } => format!("set_load_phase {phase:?}={r}"),
            EventKind::PlugIn { dgu } => format!("plug_in {dgu}"),
            EventKind::PlugOut { dgu } => format!("plug_out {dgu}"),
            EventKind::EnableSecondaryVoltage => "enable_secondary_voltage".into(),
            EventKind::EnableSecondaryQ => "enable_secondary_q".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t_s: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default = "default_f0")]
    pub f0_hz: f64,
    #[serde(default = "default_v_star")]
    pub v_pol_star: f64,
    #[serde(rename = "dgu")]
    pub dgus: Vec<DguSpec>,
    pub initial_connected: Vec<usize>,
    #[serde(default)]
    pub initial_load: LoadModel,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub net: NetSpec,
    #[serde(default)]
    pub virtual_impedance: VirtualImpedanceSpec,
    #[serde(default)]
    pub primary: PrimarySpec,
    #[serde(default)]
    pub secondary: SecondarySpec,
    #[serde(default, rename = "event")]
    pub events: Vec<Event>,
}

fn default_f0() -> f64 {
    crate::params::F0_HZ
}

fn default_v_star() -> f64 {
    crate::params::V_REF
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn omega0(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f0_hz
    }

    pub fn params(&self) -> Vec<DguParams> {
        self.dgus.iter().map(|d| d.params()).collect()
    }

    pub fn virtual_impedance(&self) -> VirtualImpedance {
        let v = &self.virtual_impedance;
        VirtualImpedance { r_v: v.r_ohm, l_v: v.l_henry, tau: v.tau_s }
    }

    pub fn weights(&self) -> Weights {
        let p = &self.primary;
        Weights { voltage: p.q_voltage, current: p.q_current, integrator: p.q_integrator, input: p.r_input }
    }

    pub fn certify_config(&self) -> CertifyConfig {
        CertifyConfig { margin: self.primary.certify_margin }
    }

    pub fn net_config(&self) -> NetConfig {
        NetConfig { period: self.net.secondary_period_s, latency: self.net.latency_s }
    }

    pub fn secondary_gains(&self) -> SecondaryGains {
        let s = &self.secondary;
        SecondaryGains { k_pv: s.k_pv, k_iv: s.k_iv, k_pphi: s.k_pphi, k_iphi: s.k_iphi, k_pq: s.k_pq, k_iq: s.k_iq }
    }

    pub fn secondary_limits(&self) -> SecondaryLimits {
        let s = &self.secondary;
        SecondaryLimits { dv_frac: s.dv_limit_frac, dphi_rad: s.dphi_limit_rad, dvq_frac: s.dvq_limit_frac }
    }

    pub fn phase_mode(&self) -> PhaseMode {
        match self.secondary.phase_mode {
            PhaseModeSpec::Atan2 => PhaseMode::Atan2,
            PhaseModeSpec::Ratio => PhaseMode::Ratio,
        }
    }

    /// 0-based indices of the initially connected units.
    pub fn initial_members(&self) -> Vec<usize> {
        self.initial_connected.iter().map(|k| k - 1).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(m));
        if self.dgus.is_empty() {
            return bad("no DGUs".into());
        }
        if !(self.f0_hz > 0.0) || !(self.v_pol_star > 0.0) {
            return bad("f0_hz and v_pol_star must be positive".into());
        }
        for p in self.params() {
            p.validate()?;
        }
        let sim = &self.sim;
        if !(sim.dt_s > 0.0 && sim.dt_s <= 1e-3) {
            return bad(format!("dt {} outside (0, 1e-3]", sim.dt_s));
        }
        if !(sim.duration_s > 0.0) || sim.log_every == 0 || sim.warmup_s < 0.0 {
            return bad("duration, log_every and warmup must be positive".into());
        }
        if !(self.net.secondary_period_s > 0.0 && self.net.latency_s >= 0.0) {
            return bad("secondary period must be positive and latency non-negative".into());
        }
        self.virtual_impedance().validate()?;
        self.initial_load.validate()?;
        let n = self.dgus.len();
        let mut connected = vec![false; n];
        for &k in &self.initial_connected {
            if k == 0 || k > n {
                return bad(format!("initial DGU id {k} out of range"));
            }
            if connected[k - 1] {
                return bad(format!("DGU {k} listed twice"));
            }
            connected[k - 1] = true;
        }
        let mut last = f64::NEG_INFINITY;
        let mut live = connected;
        for e in &self.events {
            if !(e.t_s > last) {
                return bad(format!("event times must increase strictly (at {})", e.t_s));
            }
            if e.t_s < 0.0 {
                return bad(format!("event at negative time {}", e.t_s));
            }
            last = e.t_s;
            match &e.kind {
                EventKind::PlugIn { dgu } | EventKind::PlugOut { dgu } => {
                    if *dgu == 0 || *dgu > n {
                        return bad(format!("DGU id {dgu} out of range"));
                    }
                    let plug_in = matches!(e.kind, EventKind::PlugIn { .. });
                    if live[dgu - 1] == plug_in {
                        return bad(format!("{} at t = {} does not change the connected set", e.kind.label(), e.t_s));
                    }
                    live[dgu - 1] = plug_in;
                }
                EventKind::SetLoad { load } => load.validate()?,
                EventKind::SetLoadPhase { r, .. } => {
                    if !(*r > 0.0) {
                        return bad(format!("phase resistance {r}"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}
