//! Clock-offset estimation from peer phases.

use std::f64::consts::PI;

/// Circular mean, `None` for an empty set or a vanishing resultant.
pub fn circular_mean(phases: &[f64]) -> Option<f64> {
    if phases.is_empty() {
        return None;
    }
    let (s, c) = phases.iter().fold((0.0, 0.0), |(s, c), p| (s + p.sin(), c + p.cos()));
    if s.hypot(c) <= 1e-12 * phases.len() as f64 {
        return None;
    }
    Some(wrap_angle(s.atan2(c)))
}

/// Wraps to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockCorrection {
    pub correction: f64,
    /// Set when there was nothing to synchronize against.
    pub no_peers: bool,
}

/// Correction to add to the own phase so it lands on the peers' circular mean.
pub fn estimate_clock_offset(own: f64, others: &[f64]) -> ClockCorrection {
    match circular_mean(others) {
        Some(m) => ClockCorrection { correction: wrap_angle(m - own), no_peers: false },
        None => ClockCorrection { correction: 0.0, no_peers: true },
    }
}
