//! Windowed metrics and acceptance checks over a finished run.

use std::fmt::Write as _;

use super::log::{format_value, TimeSeriesLog};
use super::run::{EventStatus, RunOutput};
use super::scenario::{EventKind, Scenario};
use crate::primary::{Certificate, ControllerGain};

/// Length of the steady-state window at the end of each regime.
pub const STEADY_WINDOW_S: f64 = 2.0;
/// Window after a plug-in over which the frequency excursion is taken.
pub const FREQ_WINDOW_S: f64 = 2.0;
/// Regimes shorter than this get no steady-state metrics.
pub const MIN_REGIME_S: f64 = 1.0;
/// Time the secondary voltage loop is given to bring V_PoL into band.
pub const SECONDARY_SETTLE_S: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    Info,
    Below(f64),
    Above(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
    NotAvailable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
            Status::NotAvailable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub metric: String,
    pub scope: String,
    pub value: f64,
    pub check: Check,
    pub status: Status,
}

impl MetricRow {
    pub fn new(metric: &str, scope: impl Into<String>, value: f64, check: Check) -> Self {
        let status = match check {
            _ if !value.is_finite() => Status::NotAvailable,
            Check::Info => Status::Info,
            Check::Below(x) if value < x => Status::Pass,
            Check::Above(x) if value > x => Status::Pass,
            _ => Status::Fail,
        };
        Self { metric: metric.into(), scope: scope.into(), value, check, status }
    }

    fn threshold(&self) -> String {
        match self.check {
            Check::Info => String::new(),
            Check::Below(x) => format!("<{x}"),
            Check::Above(x) => format!(">{x}"),
        }
    }
}

/// Interval between two consecutive events (or run boundaries).
#[derive(Debug, Clone, PartialEq)]
pub struct Regime {
    pub t0: f64,
    pub t1: f64,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<MetricRow>,
}

impl Report {
    pub fn push(&mut self, row: MetricRow) {
        self.rows.push(row);
    }

    pub fn failures(&self) -> Vec<&MetricRow> {
        self.rows.iter().filter(|r| r.status == Status::Fail).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn find(&self, metric: &str) -> Vec<&MetricRow> {
        self.rows.iter().filter(|r| r.metric == metric).collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("metric,scope,value,threshold,status\n");
        for r in &self.rows {
            writeln!(s, "{},{},{},{},{}", r.metric, r.scope, format_value(r.value), r.threshold(), r.status.as_str())
                .unwrap();
        }
        s
    }
}

/// Time after `t0` at which `xs` enters and stays in a band of
/// `band` (relative) around its value at `t1`. `None` if it never settles.
pub fn settling_time(ts: &[f64], xs: &[f64], t0: f64, t1: f64, band: f64) -> Option<f64> {
    let idx: Vec<usize> = (0..ts.len()).filter(|&k| ts[k] >= t0 && ts[k] <= t1).collect();
    let last = *idx.last()?;
    let target = xs[last];
    let tol = band * target.abs().max(f64::MIN_POSITIVE);
    let mut settled = ts[last];
    for &k in idx.iter().rev() {
        if (xs[k] - target).abs() > tol || !xs[k].is_finite() {
            break;
        }
        settled = ts[k];
    }
    Some(settled - t0)
}

/// Regimes split by every event time.
pub fn regimes(sc: &Scenario, t_end: f64) -> Vec<Regime> {
    let mut out = Vec::new();
    let mut t0 = 0.0;
    let mut label = "initial".to_string();
    for ev in &sc.events {
        if ev.t_s > t0 {
            out.push(Regime { t0, t1: ev.t_s, label: label.clone() });
        }
        t0 = ev.t_s;
        label = format!("after {}@{}", ev.kind.label(), ev.t_s);
    }
    if t_end > t0 {
        out.push(Regime { t0, t1: t_end, label });
    }
    out
}

/// Column view over a log.
pub struct LogView<'a> {
    log: &'a TimeSeriesLog,
    pub n_dgus: usize,
    t: Vec<f64>,
}

impl<'a> LogView<'a> {
    pub fn new(log: &'a TimeSeriesLog) -> Self {
        let n_dgus = log.columns.iter().filter(|c| c.ends_with("_connected")).count();
        let t = log.column("t").unwrap_or_default();
        Self { log, n_dgus, t }
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn col(&self, name: &str) -> Vec<f64> {
        self.log.column(name).unwrap_or_default()
    }

    pub fn dgu(&self, k: usize, name: &str) -> Vec<f64> {
        self.col(&format!("dgu{}_{name}", k + 1))
    }

    /// Row indices with `t0 <= t < t1`.
    pub fn rows(&self, t0: f64, t1: f64) -> std::ops::Range<usize> {
        let a = self.t.partition_point(|&t| t < t0);
        let b = self.t.partition_point(|&t| t < t1);
        a..b
    }

    /// DGUs connected throughout `[t0, t1)`.
    pub fn connected(&self, t0: f64, t1: f64) -> Vec<usize> {
        let r = self.rows(t0, t1);
        (0..self.n_dgus)
            .filter(|&k| {
                let c = self.dgu(k, "connected");
                !r.is_empty() && c[r.clone()].iter().all(|&x| x == 1.0)
            })
            .collect()
    }

    pub fn mean(&self, xs: &[f64], t0: f64, t1: f64) -> f64 {
        let r = self.rows(t0, t1);
        let v: Vec<f64> = xs[r].iter().copied().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    }

    pub fn max(&self, xs: &[f64], t0: f64, t1: f64) -> f64 {
        let r = self.rows(t0, t1);
        xs[r].iter().copied().filter(|x| x.is_finite()).fold(f64::NAN, f64::max)
    }
}

/// Steady window at the end of a regime.
pub fn steady(reg: &Regime) -> (f64, f64) {
    let len = (reg.t1 - reg.t0).min(2.0 * STEADY_WINDOW_S) / 2.0;
    (reg.t1 - len, reg.t1)
}

/// Trailing moving average over `n` samples.
pub fn moving_average(xs: &[f64], n: usize) -> Vec<f64> {
    let n = n.max(1);
    let mut out = Vec::with_capacity(xs.len());
    let mut sum = 0.0;
    for k in 0..xs.len() {
        sum += xs[k];
        if k >= n {
            sum -= xs[k - n];
        }
        out.push(sum / (k + 1).min(n) as f64);
    }
    out
}

/// Largest relative deviation from the mean.
pub fn spread(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let scale = xs.iter().map(|x| x.abs()).sum::<f64>() / xs.len() as f64;
    if scale <= 0.0 {
        return f64::NAN;
    }
    xs.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max) / scale
}

/// Largest |f - f0| over units connected during the window after `t`.
pub fn frequency_excursion(view: &LogView, t: f64, f0: f64) -> f64 {
    let (a, b) = (t, t + FREQ_WINDOW_S);
    view.connected(a, b)
        .iter()
        .map(|&k| {
            let f = view.dgu(k, "f_hz");
            let r = view.rows(a, b);
            f[r].iter().map(|x| (x - f0).abs()).fold(0.0, f64::max)
        })
        .fold(f64::NAN, f64::max)
}

/// Total active power over a steady window.
pub fn total_power(view: &LogView, t0: f64, t1: f64) -> f64 {
    view.connected(t0, t1).iter().map(|&k| view.mean(&view.dgu(k, "p_w"), t0, t1)).sum()
}

pub fn report(out: &RunOutput, sc: &Scenario) -> Report {
    let view = LogView::new(&out.log);
    let mut rep = Report::default();
    let t_end = view.t().last().copied().unwrap_or(0.0);
    rep.push(MetricRow::new(
        "completed",
        "run",
        if out.aborted.is_none() { 1.0 } else { 0.0 },
        Check::Above(0.5),
    ));
    rep.push(MetricRow::new("initial_certified", "run", out.initial_certified as u8 as f64, Check::Above(0.5)));

    let v_pol = view.col("v_pol");
    // one fundamental period of log rows
    let period_rows = match view.t() {
        [a, b, ..] if b > a => (1.0 / (sc.f0_hz * (b - a))).round() as usize,
        _ => 1,
    };
    let v_pol_dev: Vec<f64> =
        moving_average(&v_pol, period_rows).iter().map(|v| (v - sc.v_pol_star).abs() / sc.v_pol_star).collect();
    let regs = regimes(sc, t_end);
    for (n, ev) in out.outcomes.iter().enumerate() {
        let scope = format!("{}@{}", ev.kind.label(), ev.t_s);
        if ev.is_plug() {
            let ok = matches!(ev.status, EventStatus::Accepted);
            rep.push(MetricRow::new("plug_accepted", &scope, ok as u8 as f64, Check::Above(0.5)));
            if let Some(g) = ev.global_certified {
                rep.push(MetricRow::new("global_certified", &scope, g as u8 as f64, Check::Above(0.5)));
            }
        }
        let t1 = out.outcomes.get(n + 1).map_or(t_end, |e| e.t_s);
        let ts = settling_time(view.t(), &v_pol, ev.t_s, t1, 0.02).unwrap_or(f64::NAN);
        rep.push(MetricRow::new("settling_time_s", &scope, ts, Check::Info));
        if let EventKind::PlugIn { .. } = ev.kind {
            if ev.status == EventStatus::Accepted {
                let fx = frequency_excursion(&view, ev.t_s, sc.f0_hz);
                rep.push(MetricRow::new("freq_excursion_hz", &scope, fx, Check::Below(0.2)));
            }
        }
        if let EventKind::SetLoad { .. } = ev.kind {
            if let Some(prev) = regs.iter().find(|r| r.t1 == ev.t_s) {
                if let Some(next) = regs.iter().find(|r| r.t0 == ev.t_s) {
                    let (a0, a1) = steady(prev);
                    let (b0, b1) = steady(next);
                    let before = total_power(&view, a0, a1);
                    if before.abs() > 1.0 {
                        let ratio = total_power(&view, b0, b1) / before;
                        rep.push(MetricRow::new("power_ratio", &scope, ratio, Check::Info));
                    }
                }
            }
        }
    }

    let enabled_at = |f: fn(&EventKind) -> bool| sc.events.iter().find(|e| f(&e.kind)).map(|e| e.t_s);
    let sec_v = enabled_at(|k| matches!(k, EventKind::EnableSecondaryVoltage));
    let sec_q = enabled_at(|k| matches!(k, EventKind::EnableSecondaryQ));
    let all = view.n_dgus;
    for reg in regs.iter().filter(|r| r.t1 - r.t0 >= MIN_REGIME_S) {
        let (a, b) = steady(reg);
        let scope = format!("{}..{}", reg.t0, reg.t1);
        let units = view.connected(a, b);
        let p: Vec<f64> = units.iter().map(|&k| view.mean(&view.dgu(k, "p_w"), a, b)).collect();
        let q: Vec<f64> = units.iter().map(|&k| view.mean(&view.dgu(k, "q_var"), a, b)).collect();
        for (n, &k) in units.iter().enumerate() {
            rep.push(MetricRow::new("p_w", format!("{scope} dgu{}", k + 1), p[n], Check::Info));
            rep.push(MetricRow::new("q_var", format!("{scope} dgu{}", k + 1), q[n], Check::Info));
        }
        let p_total: f64 = p.iter().sum();
        if units.len() >= 2 && p_total.abs() > 1.0 {
            rep.push(MetricRow::new("p_sharing_spread", &scope, spread(&p), Check::Below(0.05)));
        }
        let imb: Vec<f64> = units.iter().map(|&k| view.mean(&view.dgu(k, "imbalance_pct"), a, b)).collect();
        if !imb.is_empty() {
            let mean = imb.iter().sum::<f64>() / imb.len() as f64;
            let check = if units.len() == all { Check::Below(3.0) } else { Check::Info };
            rep.push(MetricRow::new("imbalance_pct", &scope, mean, check));
        }
        let err = units.iter().map(|&k| view.max(&view.dgu(k, "track_err"), a, b)).fold(f64::NAN, f64::max);
        rep.push(MetricRow::new("tracking_error_v", &scope, err, Check::Info));
        if sec_v.is_some_and(|t| reg.t0 >= t) {
            rep.push(MetricRow::new("v_pol_deviation", &scope, view.max(&v_pol_dev, a, b), Check::Below(0.005)));
        }
        if sec_q.is_some_and(|t| reg.t0 >= t) && units.len() >= 2 {
            rep.push(MetricRow::new("q_sharing_spread", &scope, spread(&q), Check::Below(0.02)));
        }
    }
    if let Some(t) = sec_v {
        let (a, b) = (t + SECONDARY_SETTLE_S - 1.0, (t + SECONDARY_SETTLE_S).min(t_end));
        rep.push(MetricRow::new("v_pol_deviation_settling", format!("{a}..{b}"), view.max(&v_pol_dev, a, b), Check::Below(0.005)));
    }

    let mut thd = f64::NAN;
    for k in 0..all {
        let c = view.dgu(k, "connected");
        let x = view.dgu(k, "thd_pct");
        for (n, v) in x.iter().enumerate() {
            if c[n] == 1.0 && v.is_finite() {
                thd = thd.max(*v);
            }
        }
    }
    rep.push(MetricRow::new("max_thd_pct", "run", thd, Check::Below(5.0)));
    for f in &out.flags {
        rep.push(MetricRow::new("flag", f.replace(',', ";"), 1.0, Check::Info));
    }
    rep
}

/// One gain with the certificate it holds in the configuration it runs in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEntry {
    /// 1-based DGU id.
    pub dgu: usize,
    pub gain: ControllerGain,
    pub certificate: Option<Certificate>,
}

/// `dgu,row,k_vd,k_vq,k_itd,k_itq,k_xid,k_xiq,abscissa,coupling_bound,alpha,certified`,
/// one line per gain row.
pub fn gains_csv(entries: &[GainEntry]) -> String {
    let mut s = String::from("dgu,row,k_vd,k_vq,k_itd,k_itq,k_xid,k_xiq,abscissa,coupling_bound,alpha,certified\n");
    for e in entries {
        for r in 0..2 {
            write!(s, "{},{}", e.dgu, r).unwrap();
            for c in 0..6 {
                write!(s, ",{}", format_value(e.gain.k[(r, c)])).unwrap();
            }
            match e.certificate {
                Some(c) => write!(
                    s,
                    ",{},{},{},{}",
                    format_value(c.abscissa),
                    format_value(c.coupling_bound),
                    format_value(c.alpha),
                    c.passed as u8
                )
                .unwrap(),
                None => s.push_str(",NaN,NaN,NaN,NaN"),
            }
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settling_of_first_order_response() {
        // x = 1 - exp(-t/tau) enters the 2% band at tau * ln 50; tau chosen so that is 1 s
        let tau = 1.0 / 50f64.ln();
        let ts: Vec<f64> = (0..=10_000).map(|k| k as f64 * 1e-3).collect();
        let xs: Vec<f64> = ts.iter().map(|t| 1.0 - (-t / tau).exp()).collect();
        let s = settling_time(&ts, &xs, 0.0, 10.0, 0.02).unwrap();
        assert!((s - 1.0).abs() < 0.05, "{s}");
    }

    #[test]
    fn constant_signal_settles_immediately() {
        let ts = [0.0, 0.5, 1.0];
        assert_eq!(settling_time(&ts, &[2.0; 3], 0.0, 1.0, 0.02), Some(0.0));
        assert_eq!(settling_time(&ts, &[2.0; 3], 5.0, 6.0, 0.02), None);
    }

    #[test]
    fn moving_average_of_sine_over_period() {
        let xs: Vec<f64> = (0..200).map(|k| 5.0 + (2.0 * std::f64::consts::PI * k as f64 / 20.0).sin()).collect();
        let m = moving_average(&xs, 20);
        assert!(m[20..].iter().all(|v| (v - 5.0).abs() < 1e-12));
    }

    #[test]
    fn spread_of_equal_values_is_zero() {
        assert_eq!(spread(&[3.0, 3.0, 3.0]), 0.0);
        assert!((spread(&[100.0, 200.0]) - 50.0 / 150.0).abs() < 1e-15);
        assert!(spread(&[1.0]).is_nan());
    }

    #[test]
    fn status_from_check() {
        assert_eq!(MetricRow::new("m", "s", 0.1, Check::Below(0.2)).status, Status::Pass);
        assert_eq!(MetricRow::new("m", "s", 0.3, Check::Below(0.2)).status, Status::Fail);
        assert_eq!(MetricRow::new("m", "s", f64::NAN, Check::Below(0.2)).status, Status::NotAvailable);
        assert_eq!(MetricRow::new("m", "s", 9.0, Check::Info).status, Status::Info);
    }
}
