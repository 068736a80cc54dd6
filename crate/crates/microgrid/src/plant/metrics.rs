//! Electrical measurements: power, frequency, THD and phase imbalance.

use std::f64::consts::PI;

use crate::topology::ComplexValue;

/// Highest harmonic order included in THD.
pub const THD_MAX_ORDER: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub rms: [f64; 3],
    pub frequency_hz: f64,
    pub p: f64,
    pub q: f64,
    /// `None` when the window is too short.
    pub thd_pct: Option<f64>,
    pub imbalance_pct: f64,
}

/// `P = 3/2 (Vd Id + Vq Iq)`, `Q = 3/2 (Vq Id - Vd Iq)`.
pub fn power(v: ComplexValue, i: ComplexValue) -> (f64, f64) {
    (1.5 * (v.re * i.re + v.im * i.im), 1.5 * (v.im * i.re - v.re * i.im))
}

/// Phase-derivative frequency estimate with a first-order filter.
#[derive(Debug, Clone)]
pub struct FrequencyEstimator {
    f0: f64,
    tau: f64,
    prev: Option<f64>,
    value: f64,
}

impl FrequencyEstimator {
    pub fn new(f0: f64, tau: f64) -> Self {
        Self { f0, tau, prev: None, value: f0 }
    }

    pub fn update(&mut self, v: ComplexValue, dt: f64) -> f64 {
        let ang = v.im.atan2(v.re);
        if let Some(prev) = self.prev {
            let mut d = ang - prev;
            // unwrap
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            let raw = self.f0 + d / dt / (2.0 * PI);
            let a = dt / (self.tau + dt);
            self.value += a * (raw - self.value);
        }
        self.prev = Some(ang);
        self.value
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Forgets the last angle, e.g. after a frame rotation.
    pub fn rebase(&mut self) {
        self.prev = None;
    }
}

/// Harmonic amplitudes `A_1..=A_h` of a window spanning `periods` whole
/// fundamental periods.
pub fn harmonic_amplitudes(x: &[f64], periods: usize, max_order: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(max_order);
    for h in 1..=max_order {
        let w = 2.0 * PI * (h * periods) as f64 / n as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (k, xk) in x.iter().enumerate() {
            let (s, c) = (w * k as f64).sin_cos();
            re += xk * c;
            im -= xk * s;
        }
        out.push(2.0 / n as f64 * (re * re + im * im).sqrt());
    }
    out
}

/// `sqrt(sum_{h>=2} A_h^2) / A_1` in percent, or `None` for windows shorter
/// than two periods or without a fundamental.
pub fn thd(x: &[f64], periods: usize) -> Option<f64> {
    if periods < 2 || x.len() < 8 * periods {
        return None;
    }
    let nyquist = x.len() / (2 * periods);
    let top = THD_MAX_ORDER.min(nyquist.saturating_sub(1));
    let a = harmonic_amplitudes(x, periods, top);
    if a[0] <= 0.0 {
        return None;
    }
    let h2: f64 = a[1..].iter().map(|v| v * v).sum();
    Some(100.0 * h2.sqrt() / a[0])
}

/// THD with precomputed twiddles for a fixed window of `periods` periods.
#[derive(Debug, Clone)]
pub struct ThdAnalyzer {
    n: usize,
    periods: usize,
    orders: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl ThdAnalyzer {
    pub fn new(n: usize, periods: usize) -> Self {
        let nyquist = n / (2 * periods.max(1));
        let orders = THD_MAX_ORDER.min(nyquist.saturating_sub(1)).max(1);
        let mut cos = Vec::with_capacity(orders * n);
        let mut sin = Vec::with_capacity(orders * n);
        for h in 1..=orders {
            let w = 2.0 * PI * (h * periods) as f64 / n as f64;
            for k in 0..n {
                let (s, c) = (w * k as f64).sin_cos();
                cos.push(c);
                sin.push(s);
            }
        }
        Self { n, periods, orders, cos, sin }
    }

    pub fn window_len(&self) -> usize {
        self.n
    }

    /// Same result as [`thd`] on a window of the configured length.
    pub fn thd(&self, x: &[f64]) -> Option<f64> {
        if x.len() != self.n || self.periods < 2 || self.n < 8 * self.periods {
            return None;
        }
        let mut a1 = 0.0;
        let mut h2 = 0.0;
        for h in 0..self.orders {
            let (c, s) = (&self.cos[h * self.n..(h + 1) * self.n], &self.sin[h * self.n..(h + 1) * self.n]);
            let (mut re, mut im) = (0.0, 0.0);
            for k in 0..self.n {
                re += x[k] * c[k];
                im += x[k] * s[k];
            }
            let a2 = re * re + im * im;
            if h == 0 {
                a1 = a2;
            } else {
                h2 += a2;
            }
        }
        if a1 <= 0.0 {
            return None;
        }
        Some(100.0 * (h2 / a1).sqrt())
    }
}

pub fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Largest phase RMS deviation from the three-phase mean, over the mean, in percent.
pub fn imbalance_ratio(rms: [f64; 3]) -> f64 {
    let mean = (rms[0] + rms[1] + rms[2]) / 3.0;
    if mean <= 0.0 {
        return 0.0;
    }
    let dev = rms.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
    100.0 * dev / mean
}

/// Sliding three-phase sample window.
#[derive(Debug, Clone)]
pub struct AbcWindow {
    len: usize,
    data: [Vec<f64>; 3],
    head: usize,
    filled: usize,
}

impl AbcWindow {
    pub fn new(len: usize) -> Self {
        Self { len, data: [vec![0.0; len], vec![0.0; len], vec![0.0; len]], head: 0, filled: 0 }
    }

    pub fn push(&mut self, abc: [f64; 3]) {
        for k in 0..3 {
            self.data[k][self.head] = abc[k];
        }
        self.head = (self.head + 1) % self.len;
        self.filled = (self.filled + 1).min(self.len);
    }

    pub fn is_full(&self) -> bool {
        self.filled == self.len
    }

    /// Samples of one phase in time order.
    pub fn phase(&self, k: usize) -> Vec<f64> {
        let d = &self.data[k];
        if !self.is_full() {
            return d[..self.filled].to_vec();
        }
        d[self.head..].iter().chain(d[..self.head].iter()).copied().collect()
    }

    pub fn clear(&mut self) {
        self.head = 0;
        self.filled = 0;
    }
}

/// Metrics at one PCC from its dq phasors, the frequency estimate and a
/// window of abc voltage samples covering `periods` whole periods.
pub fn measure(
    v: ComplexValue,
    i: ComplexValue,
    frequency_hz: f64,
    window: &AbcWindow,
    periods: usize,
) -> Metrics {
    let (p, q) = power(v, i);
    let phases = [window.phase(0), window.phase(1), window.phase(2)];
    let rms3 = [rms(&phases[0]), rms(&phases[1]), rms(&phases[2])];
    let thd_pct = if window.is_full() {
        phases.iter().filter_map(|x| thd(x, periods)).fold(None, |m: Option<f64>, v| {
            Some(m.map_or(v, |m| m.max(v)))
        })
    } else {
        None
    };
    Metrics { rms: rms3, frequency_hz, p, q, thd_pct, imbalance_pct: imbalance_ratio(rms3) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::park::inverse_park;

    fn sampled(f: impl Fn(f64) -> f64, n: usize, fs: f64) -> Vec<f64> {
        (0..n).map(|k| f(k as f64 / fs)).collect()
    }

    #[test]
    fn pure_sinusoid() {
        let x = sampled(|t| 230.0 * (2.0 * PI * 50.0 * t).sin(), 400, 10_000.0);
        assert!(thd(&x, 2).unwrap() < 1e-9);
        let mut w = AbcWindow::new(400);
        let mut fe = FrequencyEstimator::new(50.0, 0.01);
        for k in 0..400 {
            let th = 2.0 * PI * 50.0 * k as f64 / 10_000.0;
            w.push(inverse_park(ComplexValue::new(230.0, 0.0), th));
            fe.update(ComplexValue::new(230.0, 0.0), 1e-4);
        }
        let m = measure(ComplexValue::new(230.0, 0.0), ComplexValue::new(2.0, 0.0), fe.value(), &w, 2);
        assert!(m.imbalance_pct < 1e-9);
        assert!(m.thd_pct.unwrap() < 1e-9);
        assert_eq!(m.frequency_hz, 50.0);
        assert_eq!((m.p, m.q), (690.0, 0.0));
    }

    #[test]
    fn three_percent_fifth() {
        let x = sampled(
            |t| (2.0 * PI * 50.0 * t).sin() + 0.03 * (2.0 * PI * 250.0 * t + 0.4).sin(),
            600,
            10_000.0,
        );
        let v = thd(&x, 3).unwrap();
        assert!((v - 3.0).abs() < 0.1, "{v}");
    }

    #[test]
    fn analyzer_matches_direct() {
        let x = sampled(
            |t| (2.0 * PI * 50.0 * t).sin() + 0.02 * (2.0 * PI * 350.0 * t).sin() + 0.01 * (2.0 * PI * 550.0 * t).cos(),
            400,
            10_000.0,
        );
        let a = ThdAnalyzer::new(400, 2).thd(&x).unwrap();
        let b = thd(&x, 2).unwrap();
        assert!((a - b).abs() < 1e-9);
        assert!((a - 100.0 * (0.02f64.powi(2) + 0.01f64.powi(2)).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn short_window_flagged() {
        assert!(thd(&[1.0; 200], 1).is_none());
        let w = AbcWindow::new(10);
        assert!(measure(ComplexValue::new(1.0, 0.0), ComplexValue::new(0.0, 0.0), 50.0, &w, 2)
            .thd_pct
            .is_none());
    }

    #[test]
    fn frequency_from_rotating_phasor() {
        let mut fe = FrequencyEstimator::new(50.0, 0.01);
        let dt = 1e-4;
        // dq phasor turning at +1 Hz relative to the frame, through the wrap at pi
        for k in 0..20_000 {
            let ang = 2.0 * PI * 1.0 * k as f64 * dt + 3.0;
            fe.update(ComplexValue::from_polar(230.0, ang), dt);
        }
        assert!((fe.value() - 51.0).abs() < 1e-9);
    }

    #[test]
    fn imbalance_definition() {
        assert_eq!(imbalance_ratio([1.0, 1.0, 1.0]), 0.0);
        assert!((imbalance_ratio([1.0, 1.0, 1.3]) - 100.0 * 0.2 / 1.1).abs() < 1e-12);
    }
}
