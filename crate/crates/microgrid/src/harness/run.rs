//! Orchestration of plant, primary, comms and secondary.
//!
//! One control period of length `dt`:
//! event dispatch, logging, primary control for every DGU, plant integration
//! with the commands held, metric updates, and a secondary tick whenever the
//! secondary period has elapsed.

use super::log::{schema, TimeSeriesLog};
use super::report::GainEntry;
use super::scenario::{Event, EventKind, Scenario};
use crate::comms::{Broadcast, BroadcastNet, Payload};
use crate::error::{Error, Result};
use crate::plant::{
    imbalance_ratio, inverse_park_sc, no_load_equilibrium, power, rms, substeps_for, AbcWindow,
    FrequencyEstimator, LoadAffine, LoadModel, Network, Rk4, ThdAnalyzer,
};
use crate::primary::{
    build_local_model, certify_global, certify_local, control_step, estimate_clock_offset, tracking_error,
    AdmissionProtocol, ControllerGain, Decision, GainAction, GainRegistry, PrimaryControllerState,
    VirtualImpedance,
};
use crate::secondary::{
    average_pol, compose_reference, estimate_pol, reactive_sharing_loop, voltage_phase_loop, PhaseMode,
    SecondaryState,
};
use crate::topology::ComplexValue;

/// Fundamental periods per THD / imbalance window.
const WINDOW_PERIODS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum EventStatus {
    Applied,
    Accepted,
    Denied(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventOutcome {
    pub t_s: f64,
    pub kind: EventKind,
    pub status: EventStatus,
    /// Gain actions by 1-based DGU id.
    pub actions: Vec<(usize, GainAction)>,
    /// Global closed-loop check of the configuration after the event.
    pub global_certified: Option<bool>,
    pub clock_correction: Option<f64>,
    pub note: Option<String>,
}

impl EventOutcome {
    pub fn is_plug(&self) -> bool {
        matches!(self.kind, EventKind::PlugIn { .. } | EventKind::PlugOut { .. })
    }
}

pub struct Simulation {
    sc: Scenario,
    omega0: f64,
    dt: f64,
    net: Network,
    x: Vec<f64>,
    x_prev: Vec<f64>,
    connected: Vec<bool>,
    load: LoadModel,
    load_affine: LoadAffine,
    protocol: AdmissionProtocol,
    registry: GainRegistry,
    ctrl: Vec<PrimaryControllerState>,
    vz: VirtualImpedance,
    comms: BroadcastNet,
    sec: Vec<SecondaryState>,
    secondary_voltage: bool,
    secondary_q: bool,
    phase_mode: PhaseMode,
    rk: Rk4,
    substeps: usize,
    step: i64,
    end_step: i64,
    tick_every: i64,
    period_steps: i64,
    freq: Vec<FrequencyEstimator>,
    windows: Vec<AbcWindow>,
    thd: ThdAnalyzer,
    thd_pct: Vec<f64>,
    imbalance_pct: Vec<f64>,
    v_rms: Vec<f64>,
    commands: Vec<ComplexValue>,
    events: Vec<(i64, Event)>,
    next_event: usize,
    outcomes: Vec<EventOutcome>,
    log: TimeSeriesLog,
    avg: (f64, f64),
    /// Local-frame sums of V, I_line and Q since the last secondary tick.
    acc: Vec<(ComplexValue, ComplexValue, f64)>,
    acc_n: usize,
    initial_certified: bool,
    flags: Vec<String>,
}

fn rot(angle: f64) -> ComplexValue {
    ComplexValue::from_polar(1.0, angle)
}

impl Simulation {
    pub fn new(sc: &Scenario) -> Result<Self> {
        sc.validate()?;
        let sc = sc.clone();
        let params = sc.params();
        let n = params.len();
        let omega0 = sc.omega0();
        let dt = sc.sim.dt_s;
        let net = Network::new(params.clone(), omega0, sc.sim.model)?;
        let mut protocol = AdmissionProtocol::new(params.clone(), omega0);
        protocol.weights = sc.weights();
        protocol.certify = sc.certify_config();
        let vz = sc.virtual_impedance();

        let members = sc.initial_members();
        let mut registry = GainRegistry::new(n);
        if !members.is_empty() {
            match protocol.design(&members)? {
                Decision::Accept { updates } => {
                    for u in updates {
                        registry.set(u.dgu, u.gain);
                    }
                }
                Decision::Deny { reason, .. } => {
                    return Err(Error::Synthesis(format!("initial configuration: {reason}")))
                }
            }
        }
        for k in (0..n).filter(|k| !members.contains(k)) {
            match protocol.standalone(k)? {
                Decision::Accept { updates } => registry.set(k, updates[0].gain),
                Decision::Deny { reason, .. } => return Err(Error::Synthesis(reason)),
            }
        }

        let mut connected = vec![false; n];
        for &k in &members {
            connected[k] = true;
        }
        let mut comms = BroadcastNet::new(n, sc.net_config());
        for &k in &members {
            comms.connect(k);
        }

        let mut state = net.unpack(&vec![0.0; net.dim()], 0.0, &connected);
        let mut ctrl = Vec::with_capacity(n);
        let mut commands = Vec::with_capacity(n);
        for k in 0..n {
            let theta0 = sc.dgus[k].clock_offset_rad;
            let mut c = PrimaryControllerState::new(sc.v_pol_star);
            c.theta0 = theta0;
            let v = ComplexValue::new(sc.v_pol_star, 0.0) * rot(theta0);
            let (s, u) = no_load_equilibrium(&params[k], v, omega0);
            state.dgus[k] = s;
            let r = rot(-theta0);
            c.align_integrator(registry.get(k).unwrap(), s.v * r, s.i_t * r, u * r);
            ctrl.push(c);
            commands.push(u);
        }
        let x = net.pack(&state);

        let gains = sc.secondary_gains();
        let limits = sc.secondary_limits();
        let sec = (0..n).map(|_| SecondaryState::new(sc.v_pol_star, &gains, &limits)).collect();

        let period_steps = (1.0 / (sc.f0_hz * dt)).round().max(1.0) as i64;
        let window = WINDOW_PERIODS * period_steps as usize;
        let warm = (sc.sim.warmup_s / dt).round() as i64;
        let events = sc.events.iter().map(|e| ((e.t_s / dt).round() as i64, e.clone())).collect();

        let load = sc.initial_load.clone();
        let load_affine = LoadAffine::at(&load, -warm as f64 * dt, omega0);
        let dim = net.dim();
        let mut sim = Self {
            omega0,
            dt,
            x_prev: x.clone(),
            x,
            connected,
            load,
            load_affine,
            registry,
            ctrl,
            vz,
            comms,
            sec,
            secondary_voltage: false,
            secondary_q: false,
            phase_mode: sc.phase_mode(),
            rk: Rk4::new(dim),
            substeps: 1,
            step: -warm,
            end_step: (sc.sim.duration_s / dt).round() as i64,
            tick_every: ((sc.net.secondary_period_s / dt).round() as i64).max(1),
            period_steps,
            freq: (0..n).map(|_| FrequencyEstimator::new(sc.f0_hz, sc.primary.freq_filter_tau_s)).collect(),
            windows: (0..n).map(|_| AbcWindow::new(window)).collect(),
            thd: ThdAnalyzer::new(window, WINDOW_PERIODS),
            thd_pct: vec![f64::NAN; n],
            imbalance_pct: vec![f64::NAN; n],
            v_rms: vec![f64::NAN; n],
            commands,
            events,
            next_event: 0,
            outcomes: Vec::new(),
            log: TimeSeriesLog::new(schema(n)),
            avg: (f64::NAN, f64::NAN),
            acc: vec![(ComplexValue::new(0.0, 0.0), ComplexValue::new(0.0, 0.0), 0.0); n],
            acc_n: 0,
            initial_certified: true,
            flags: Vec::new(),
            net,
            protocol,
            sc,
        };
        sim.initial_certified = sim.global_check();
        sim.refresh_substeps();
        Ok(sim)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.sc
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn log(&self) -> &TimeSeriesLog {
        &self.log
    }

    pub fn outcomes(&self) -> &[EventOutcome] {
        &self.outcomes
    }

    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    pub fn initial_certified(&self) -> bool {
        self.initial_certified
    }

    pub fn connected(&self) -> &[bool] {
        &self.connected
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn gains(&self) -> Vec<ControllerGain> {
        (0..self.connected.len()).map(|k| *self.registry.get(k).unwrap()).collect()
    }

    /// Every unit's gain with its certificate in the current configuration
    /// (connected units against the reduced network, the others standalone).
    pub fn gain_table(&self) -> Vec<GainEntry> {
        let members = self.members();
        let topo = self.protocol.topology(&members).ok();
        let alone = crate::topology::LoadConnectedTopology::empty(1);
        (0..self.connected.len())
            .map(|k| {
                let gain = *self.registry.get(k).unwrap();
                let model = match (members.iter().position(|&m| m == k), &topo) {
                    (Some(row), Some(t)) => build_local_model(&self.protocol.params[k], t, row, self.omega0),
                    _ => build_local_model(&self.protocol.params[k], &alone, 0, self.omega0),
                };
                let certificate = model.ok().map(|m| certify_local(&gain, &m, &self.protocol.certify));
                GainEntry { dgu: k + 1, gain, certificate }
            })
            .collect()
    }

    pub fn controller(&self, k: usize) -> &PrimaryControllerState {
        &self.ctrl[k]
    }

    pub fn secondary(&self, k: usize) -> &SecondaryState {
        &self.sec[k]
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.freq[k].value()
    }

    /// Changes `V_PoL*` for every unit; takes effect at the next control step.
    pub fn set_reference(&mut self, v_pol_star: f64) {
        for (c, s) in self.ctrl.iter_mut().zip(&mut self.sec) {
            c.v_star += v_pol_star - s.v_pol_star;
            s.v_pol_star = v_pol_star;
        }
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.connected.len()).filter(|&k| self.connected[k]).collect()
    }

    pub fn state(&self) -> crate::plant::PlantState {
        self.net.unpack(&self.x, self.time(), &self.connected)
    }

    pub fn v_pol(&self) -> ComplexValue {
        let aff = self.affine_at(self.time());
        self.net.v_pol(&self.x, &self.connected, &aff)
    }

    pub fn line_currents(&self) -> Vec<ComplexValue> {
        let v_pol = self.v_pol();
        self.net.line_currents(&self.x, &self.connected, v_pol)
    }

    /// `|V_ref - V_v - V|` per DGU in its own frame.
    pub fn tracking_errors(&self) -> Vec<f64> {
        let st = self.state();
        let il = self.line_currents();
        (0..st.dgus.len())
            .map(|k| {
                let r = rot(-self.ctrl[k].theta0);
                let meas = crate::plant::DguState { v: st.dgus[k].v * r, i_t: st.dgus[k].i_t * r };
                tracking_error(&meas, il[k] * r, &self.ctrl[k], &self.vz, self.omega0).norm()
            })
            .collect()
    }

    fn affine_at(&self, t: f64) -> LoadAffine {
        if self.load.is_time_varying() {
            LoadAffine::at(&self.load, t, self.omega0)
        } else {
            self.load_affine
        }
    }

    fn refresh_substeps(&mut self) {
        self.load_affine = LoadAffine::at(&self.load, self.time(), self.omega0);
        let rho = self.net.spectral_radius(&self.connected, &self.load_affine);
        self.substeps = substeps_for(rho, self.dt);
    }

    fn global_check(&self) -> bool {
        let members = self.members();
        if members.is_empty() {
            return true;
        }
        let Ok(topo) = self.protocol.topology(&members) else { return false };
        let gains: Vec<_> = members.iter().map(|&k| *self.registry.get(k).unwrap()).collect();
        let params: Vec<_> = members.iter().map(|&k| self.protocol.params[k]).collect();
        certify_global(&gains, &topo, &params, self.omega0, Some(&self.vz))
    }

    /// Local measurement of unit `k` in its own frame.
    fn local(&self, k: usize, il: &[ComplexValue]) -> (ComplexValue, ComplexValue, ComplexValue) {
        let r = rot(-self.ctrl[k].theta0);
        let v = ComplexValue::new(self.x[4 * k], self.x[4 * k + 1]) * r;
        let it = ComplexValue::new(self.x[4 * k + 2], self.x[4 * k + 3]) * r;
        (v, it, il[k] * r)
    }

    fn switch_gain(&mut self, k: usize, gain: ControllerGain, il: &[ComplexValue]) {
        let (v, it, _) = self.local(k, il);
        let u = self.ctrl[k].last_command;
        self.ctrl[k].align_integrator(&gain, v, it, u);
        self.registry.set(k, gain);
    }

    fn apply_decision(&mut self, decision: &Decision, il: &[ComplexValue]) -> Vec<(usize, GainAction)> {
        let mut actions = Vec::new();
        if let Decision::Accept { updates } = decision {
            for u in updates {
                if u.action != GainAction::Retained {
                    self.switch_gain(u.dgu, u.gain, il);
                }
                actions.push((u.dgu + 1, u.action));
            }
        }
        actions
    }

    fn dispatch(&mut self, ev: &Event) -> Result<EventOutcome> {
        let t = self.time();
        let mut out = EventOutcome {
            t_s: ev.t_s,
            kind: ev.kind.clone(),
            status: EventStatus::Applied,
            actions: vec![],
            global_certified: None,
            clock_correction: None,
            note: None,
        };
        let il = self.line_currents();
        match &ev.kind {
            EventKind::SetLoad { load } => {
                self.load = load.clone();
                self.refresh_substeps();
            }
            EventKind::SetLoadPhase { phase, r } => {
                self.load = self.load.with_phase_resistance(phase.index(), *r)?;
                self.refresh_substeps();
            }
            EventKind::PlugIn { dgu } => {
                let k = dgu - 1;
                if self.connected[k] {
                    out.status = EventStatus::Denied("already connected".into());
                    return Ok(out);
                }
                let members = self.members();
                let decision = self.protocol.plug_in(k, &members, &self.registry)?;
                match &decision {
                    Decision::Deny { reason, .. } => out.status = EventStatus::Denied(reason.clone()),
                    Decision::Accept { .. } => {
                        let peers: Vec<f64> = self.comms.snapshot(k, t).iter().map(|(_, p)| p.theta).collect();
                        let own = self.ctrl[k].theta0;
                        let c = estimate_clock_offset(own, &peers);
                        if !c.no_peers && c.correction != 0.0 {
                            let c_ = &mut self.ctrl[k];
                            c_.theta0 += c.correction;
                            c_.filter.rotate(c.correction);
                            c_.xi *= rot(-c.correction);
                            c_.last_command *= rot(-c.correction);
                        }
                        out.clock_correction = Some(c.correction);
                        out.actions = self.apply_decision(&decision, &il);
                        self.connected[k] = true;
                        self.comms.connect(k);
                        let s = &mut self.sec[k];
                        s.voltage.reset();
                        s.phase.reset();
                        s.reactive.reset();
                        s.voltage_enabled = self.secondary_voltage;
                        s.reactive_enabled = self.secondary_q;
                        out.status = EventStatus::Accepted;
                        out.global_certified = Some(self.global_check());
                        self.refresh_substeps();
                    }
                }
            }
            EventKind::PlugOut { dgu } => {
                let k = dgu - 1;
                if !self.connected[k] {
                    out.status = EventStatus::Denied("not connected".into());
                    return Ok(out);
                }
                let members = self.members();
                let decision = self.protocol.plug_out(k, &members, &self.registry)?;
                match &decision {
                    Decision::Deny { reason, .. } => out.status = EventStatus::Denied(reason.clone()),
                    Decision::Accept { .. } => {
                        out.actions = self.apply_decision(&decision, &il);
                        // the leaving unit keeps running on its own
                        let alone = crate::topology::LoadConnectedTopology::empty(1);
                        let model = build_local_model(&self.protocol.params[k], &alone, 0, self.omega0)?;
                        let gain = *self.registry.get(k).unwrap();
                        if !certify_local(&gain, &model, &self.protocol.certify).passed {
                            if let Decision::Accept { updates } = self.protocol.standalone(k)? {
                                self.switch_gain(k, updates[0].gain, &il);
                            }
                        }
                        self.connected[k] = false;
                        let aff = self.affine_at(t);
                        self.net.disconnect_line(&mut self.x, &self.connected, k, &aff);
                        self.comms.disconnect(k, t);
                        self.sec[k].voltage_enabled = false;
                        self.sec[k].reactive_enabled = false;
                        if self.members().is_empty() && self.load != LoadModel::None {
                            let note = "last DGU removed with a load attached".to_string();
                            self.flags.push(format!("t = {t}: {note}"));
                            out.note = Some(note);
                        }
                        out.status = EventStatus::Accepted;
                        out.global_certified = Some(self.global_check());
                        self.refresh_substeps();
                    }
                }
            }
            EventKind::EnableSecondaryVoltage => {
                self.secondary_voltage = true;
                for k in self.members() {
                    self.sec[k].voltage_enabled = true;
                }
            }
            EventKind::EnableSecondaryQ => {
                self.secondary_q = true;
                for k in self.members() {
                    self.sec[k].reactive_enabled = true;
                }
            }
        }
        Ok(out)
    }

    fn log_row(&mut self) {
        let t = self.time();
        let aff = self.affine_at(t);
        let v_pol = self.net.v_pol(&self.x, &self.connected, &aff);
        let il = self.net.line_currents(&self.x, &self.connected, v_pol);
        let errs = self.tracking_errors();
        let n = self.connected.len();
        let mut row = Vec::with_capacity(self.log.columns.len());
        row.push(t);
        for k in 0..n {
            let v = ComplexValue::new(self.x[4 * k], self.x[4 * k + 1]);
            let it = ComplexValue::new(self.x[4 * k + 2], self.x[4 * k + 3]);
            let (p, q) = power(v, il[k]);
            let v_rms = if self.v_rms[k].is_nan() { v.norm() / 2f64.sqrt() } else { self.v_rms[k] };
            let s = &self.sec[k];
            row.extend_from_slice(&[
                v.re,
                v.im,
                it.re,
                it.im,
                il[k].re,
                il[k].im,
                v_rms,
                self.freq[k].value(),
                p,
                q,
                self.thd_pct[k],
                self.imbalance_pct[k],
                if self.connected[k] { 1.0 } else { 0.0 },
                s.estimate.v_pol,
                s.estimate.phi_pol,
                s.delta_v_q,
                errs[k],
            ]);
        }
        let lead = self.members().first().copied();
        let (dv, dphi) = lead.map_or((0.0, 0.0), |k| (self.sec[k].delta_v, self.sec[k].delta_phi));
        row.extend_from_slice(&[v_pol.norm(), v_pol.re, v_pol.im, self.avg.0, self.avg.1, dv, dphi]);
        self.log.push(row);
    }

    /// Measurements are averaged over the secondary period, which removes the
    /// dq ripple of harmonic and unbalanced loads before it is sampled.
    fn secondary_tick(&mut self) {
        let t = self.time();
        let members = self.members();
        let n_avg = self.acc_n.max(1) as f64;
        let mut q = vec![0.0; self.connected.len()];
        for &k in &members {
            let (sv, si, sq) = self.acc[k];
            let (v, i) = (sv / n_avg, si / n_avg);
            let l = self.protocol.params[k].line.inductance;
            let prev = self.sec[k].estimate.phi_pol;
            let (est, flagged) = estimate_pol(v, i, l, self.omega0, self.phase_mode, prev);
            if flagged {
                self.flags.push(format!("t = {t}: DGU {} PoL phase held", k + 1));
            }
            self.sec[k].estimate = est;
            q[k] = sq / n_avg;
            self.comms.publish(Broadcast {
                sender: k,
                timestamp: t,
                payload: Payload { v_pol: est.v_pol, phi_pol: est.phi_pol, q: q[k], theta: self.ctrl[k].theta0 },
            });
        }
        for a in &mut self.acc {
            *a = (ComplexValue::new(0.0, 0.0), ComplexValue::new(0.0, 0.0), 0.0);
        }
        self.acc_n = 0;
        self.comms.deliver(t);
        let period = self.comms.config().period;
        for (n, &k) in members.iter().enumerate() {
            let snap = self.comms.snapshot(k, t);
            let own = self.sec[k].estimate;
            let avg = average_pol(&snap, &own);
            if n == 0 {
                self.avg = avg;
            }
            let s = &mut self.sec[k];
            let v_star = s.v_pol_star;
            let (dv, dphi) = voltage_phase_loop(avg, v_star, s, period);
            let dvq = reactive_sharing_loop(q[k], &snap, s, period);
            let (vs, ps) = compose_reference(v_star, dv, dphi, dvq);
            self.ctrl[k].v_star = vs;
            self.ctrl[k].phi_star = ps;
        }
    }

    fn update_metrics(&mut self) {
        let t = self.time();
        let (s, c) = (self.omega0 * t).sin_cos();
        for k in 0..self.connected.len() {
            let v = ComplexValue::new(self.x[4 * k], self.x[4 * k + 1]);
            self.freq[k].update(v, self.dt);
            self.windows[k].push(inverse_park_sc(v, s, c));
        }
        if self.step.rem_euclid(self.period_steps) == 0 {
            for k in 0..self.connected.len() {
                let w = &self.windows[k];
                if !w.is_full() {
                    continue;
                }
                let ph = [w.phase(0), w.phase(1), w.phase(2)];
                let r = [rms(&ph[0]), rms(&ph[1]), rms(&ph[2])];
                self.v_rms[k] = (r[0] + r[1] + r[2]) / 3.0;
                self.imbalance_pct[k] = imbalance_ratio(r);
                self.thd_pct[k] = ph.iter().filter_map(|x| self.thd.thd(x)).fold(f64::NAN, f64::max);
            }
        }
    }

    /// Advances one control period.
    pub fn advance(&mut self) -> Result<()> {
        if self.step >= 0 {
            while self.next_event < self.events.len() && self.events[self.next_event].0 <= self.step {
                let ev = self.events[self.next_event].1.clone();
                self.next_event += 1;
                let out = self.dispatch(&ev)?;
                self.outcomes.push(out);
            }
            if self.step % self.sc.sim.log_every as i64 == 0 {
                self.log_row();
            }
        }
        let t = self.time();
        let aff = self.affine_at(t);
        let v_pol = self.net.v_pol(&self.x, &self.connected, &aff);
        let il = self.net.line_currents(&self.x, &self.connected, v_pol);
        for k in 0..self.connected.len() {
            let (v, it, i) = self.local(k, &il);
            let gain = *self.registry.get(k).unwrap();
            let meas = crate::plant::DguState { v, i_t: it };
            let u = control_step(&meas, i, &mut self.ctrl[k], &gain, &self.vz, self.dt, self.omega0);
            self.commands[k] = u * rot(self.ctrl[k].theta0);
            let a = &mut self.acc[k];
            a.0 += v;
            a.1 += i;
            a.2 += power(v, i).1;
        }
        self.acc_n += 1;

        self.x_prev.copy_from_slice(&self.x);
        let h = self.dt / self.substeps as f64;
        let varying = self.load.is_time_varying();
        let fixed = self.load_affine;
        let (net, load, omega0, commands, connected) =
            (&self.net, &self.load, self.omega0, &self.commands, &self.connected);
        for j in 0..self.substeps {
            let tj = t + j as f64 * h;
            self.rk.step(
                |tau, x, dx| {
                    let aff = if varying { LoadAffine::at(load, tau, omega0) } else { fixed };
                    net.derivative(x, commands, connected, &aff, dx);
                },
                tj,
                &mut self.x,
                h,
            );
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            self.x.copy_from_slice(&self.x_prev);
            return Err(Error::NonFinite { t });
        }
        self.step += 1;
        self.update_metrics();
        if self.step.rem_euclid(self.tick_every) == 0 {
            self.secondary_tick();
        }
        Ok(())
    }

    /// Runs up to (and logs) the end of the horizon.
    pub fn run_to_end(&mut self) -> Result<()> {
        while self.step < self.end_step {
            self.advance()?;
        }
        if self.step % self.sc.sim.log_every as i64 == 0 && self.log.rows.last().map(|r| r[0]) != Some(self.time()) {
            self.log_row();
        }
        Ok(())
    }

    /// Runs until `t` (seconds, rounded to the step grid).
    pub fn run_until(&mut self, t: f64) -> Result<()> {
        let target = (t / self.dt).round() as i64;
        while self.step < target {
            self.advance()?;
        }
        Ok(())
    }

    pub fn into_log(self) -> TimeSeriesLog {
        self.log
    }
}

/// Log, event outcomes and abort reason of a finished run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub log: TimeSeriesLog,
    pub outcomes: Vec<EventOutcome>,
    pub flags: Vec<String>,
    pub initial_certified: bool,
    /// Set when the run stopped early; the log holds everything before.
    pub aborted: Option<String>,
}

pub fn run(sc: &Scenario) -> Result<RunOutput> {
    let mut sim = Simulation::new(sc)?;
    let aborted = sim.run_to_end().err().map(|e| e.to_string());
    Ok(RunOutput {
        outcomes: sim.outcomes.clone(),
        flags: sim.flags.clone(),
        initial_certified: sim.initial_certified,
        aborted,
        log: sim.log,
    })
}
