/// PI controller with output limits and conditional integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiAwState {
    pub k_p: f64,
    pub k_i: f64,
    pub lower: f64,
    pub upper: f64,
    pub integrator: f64,
}

impl PiAwState {
    pub fn new(k_p: f64, k_i: f64, lower: f64, upper: f64) -> Self {
        assert!(lower <= upper, "limits out of order");
        Self { k_p, k_i, lower, upper, integrator: 0.0 }
    }

    /// Output for the current integrator without advancing it.
    pub fn output(&self, error: f64) -> f64 {
        (self.k_p * error + self.k_i * self.integrator).clamp(self.lower, self.upper)
    }

    /// `T_I = k_p / k_i`.
    pub fn time_constant(&self) -> f64 {
        self.k_p / self.k_i
    }

    pub fn reset(&mut self) {
        self.integrator = 0.0;
    }
}

/// Advances the integrator unless that pushes the output further into a
/// limit; in that case it stops where the output meets the limit.
pub fn pi_aw_step(s: &mut PiAwState, error: f64, dt: f64) -> f64 {
    if s.k_i != 0.0 {
        let cand = s.integrator + error * dt;
        let u = s.k_p * error + s.k_i * cand;
        let edge = if u > s.upper && error * s.k_i > 0.0 {
            Some((s.upper - s.k_p * error) / s.k_i)
        } else if u < s.lower && error * s.k_i < 0.0 {
            Some((s.lower - s.k_p * error) / s.k_i)
        } else {
            None
        };
        s.integrator = match edge {
            Some(e) => e.clamp(s.integrator.min(cand), s.integrator.max(cand)),
            None => cand,
        };
    }
    s.output(error)
}
