//! Classical fixed-step Runge-Kutta.

/// RK4 integrator with preallocated stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.k1.len()
    }

    /// Advances `x` from `t` to `t + h`. `f(t, x, dx)` writes the derivative.
    pub fn step<F>(&mut self, mut f: F, t: f64, x: &mut [f64], h: f64)
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = x.len();
        debug_assert_eq!(n, self.dim());
        f(t, x, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        f(t + h, &self.tmp, &mut self.k4);
        for i in 0..n {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Substeps per control period so that `rho * h` stays inside the RK4
/// stability region with some room.
pub fn substeps_for(spectral_radius: f64, dt: f64) -> usize {
    ((spectral_radius * dt / 2.0).ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_single_step() {
        let mut rk = Rk4::new(1);
        let mut x = [1.0];
        rk.step(|_, x, d| d[0] = -x[0], 0.0, &mut x, 0.1);
        assert!((x[0] - 0.9048375).abs() < 1e-7);
        assert!((x[0] - (-0.1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn zero_field_is_identity() {
        let mut rk = Rk4::new(3);
        let mut x = [1.0, -2.0, 3.5];
        rk.step(|_, _, d| d.fill(0.0), 0.0, &mut x, 0.37);
        assert_eq!(x, [1.0, -2.0, 3.5]);
    }

    #[test]
    fn fourth_order_convergence() {
        // damped oscillator, error at t = 1 for h and h/2
        let run = |h: f64| {
            let mut rk = Rk4::new(2);
            let mut x = [1.0, 0.0];
            let steps = (1.0 / h).round() as usize;
            for k in 0..steps {
                rk.step(|_, x, d| {
                    d[0] = x[1];
                    d[1] = -25.0 * x[0] - 0.4 * x[1];
                }, k as f64 * h, &mut x, h);
            }
            x[0]
        };
        let wd = (25.0f64 - 0.04).sqrt();
        let exact = (-0.2f64).exp() * ((wd).cos() + 0.2 / wd * wd.sin());
        let e1 = (run(0.02) - exact).abs();
        let e2 = (run(0.01) - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "order {order}");
    }

    #[test]
    fn substep_rule() {
        assert_eq!(substeps_for(0.0, 1e-4), 1);
        assert_eq!(substeps_for(7.0e4, 1e-4), 4);
    }
}
