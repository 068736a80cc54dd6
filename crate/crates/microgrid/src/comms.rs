//! Simulated all-to-all broadcast between DGU controllers.
//!
//! A payload emitted at `t` becomes visible at `t + latency`. Receivers read
//! the newest visible payload of every live peer.

use std::collections::VecDeque;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Payload {
    pub v_pol: f64,
    pub phi_pol: f64,
    pub q: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Broadcast {
    pub sender: usize,
    pub timestamp: f64,
    pub payload: Payload,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetConfig {
    pub period: f64,
    pub latency: f64,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self { period: 0.01, latency: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct BroadcastNet {
    cfg: NetConfig,
    pending: Vec<VecDeque<Broadcast>>,
    latest: Vec<Option<Broadcast>>,
    connected: Vec<bool>,
    disconnected_at: Vec<Option<f64>>,
}

impl BroadcastNet {
    pub fn new(n: usize, cfg: NetConfig) -> Self {
        Self {
            cfg,
            pending: vec![VecDeque::new(); n],
            latest: vec![None; n],
            connected: vec![false; n],
            disconnected_at: vec![None; n],
        }
    }

    pub fn config(&self) -> NetConfig {
        self.cfg
    }

    pub fn connect(&mut self, id: usize) {
        self.connected[id] = true;
        self.disconnected_at[id] = None;
        self.pending[id].clear();
        self.latest[id] = None;
    }

    pub fn disconnect(&mut self, id: usize, t: f64) {
        self.connected[id] = false;
        self.disconnected_at[id] = Some(t);
    }

    pub fn is_connected(&self, id: usize) -> bool {
        self.connected[id]
    }

    /// Returns false, and drops the message, for a disconnected sender.
    pub fn publish(&mut self, b: Broadcast) -> bool {
        if !self.connected[b.sender] {
            return false;
        }
        self.pending[b.sender].push_back(b);
        true
    }

    /// Moves everything due by `t` into the visible set.
    pub fn deliver(&mut self, t: f64) {
        for (q, latest) in self.pending.iter_mut().zip(self.latest.iter_mut()) {
            while let Some(b) = q.front() {
                if b.timestamp + self.cfg.latency <= t + EPS {
                    *latest = q.pop_front();
                } else {
                    break;
                }
            }
        }
    }

    fn alive(&self, id: usize, t: f64) -> bool {
        match self.disconnected_at[id] {
            None => self.connected[id],
            Some(td) => t <= td + self.cfg.latency + EPS,
        }
    }

    /// Newest delivered payload of every live peer, in sender order.
    pub fn snapshot(&self, receiver: usize, t: f64) -> Vec<(usize, Payload)> {
        (0..self.latest.len())
            .filter(|&k| k != receiver && self.alive(k, t))
            .filter_map(|k| self.latest[k].map(|b| (k, b.payload)))
            .collect()
    }
}
