use pnp_microgrid::comms::{Broadcast, BroadcastNet, NetConfig, Payload};
use pnp_microgrid::params::{K_IV, K_PV, L_LINE, OMEGA0};
use pnp_microgrid::secondary::{
    average_pol, compose_reference, estimate_pol, pi_aw_step, reactive_sharing_loop, tune_pi_from_model,
    voltage_phase_loop, PhaseMode, PiAwState, PolEstimate, SecondaryGains, SecondaryLimits, SecondaryState,
    TuningModel,
};
use pnp_microgrid::ComplexValue;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

fn payload(v: f64, phi: f64, q: f64) -> Payload {
    Payload { v_pol: v, phi_pol: phi, q, theta: 0.0 }
}

fn enabled_state() -> SecondaryState {
    let mut s = SecondaryState::new(230.0, &SecondaryGains::default(), &SecondaryLimits::default());
    s.voltage_enabled = true;
    s.reactive_enabled = true;
    s
}

#[test]
fn estimate_without_current_is_local_voltage() {
    let v = c(229.0, 4.0);
    let (e, flagged) = estimate_pol(v, c(0.0, 0.0), L_LINE, OMEGA0, PhaseMode::Atan2, 0.0);
    assert!(!flagged);
    assert!((e.v_pol - v.norm()).abs() < 1e-12);
    assert!((e.phi_pol - v.arg()).abs() < 1e-12);
}

#[test]
fn estimate_line_drop() {
    let (e, _) = estimate_pol(c(230.0, 0.0), c(0.0, -1.0), L_LINE, OMEGA0, PhaseMode::Atan2, 0.0);
    assert!((e.v_pol - (230.0 - OMEGA0 * L_LINE)).abs() < 1e-12);
    assert!((e.v_pol - 229.435).abs() < 1e-3);
    assert_eq!(e.phi_pol, 0.0);
}

#[test]
fn estimate_holds_phase_without_d_component() {
    let (e, flagged) = estimate_pol(c(0.0, 5.0), c(0.0, 0.0), L_LINE, OMEGA0, PhaseMode::Atan2, 0.3);
    assert!(flagged);
    assert_eq!(e.phi_pol, 0.3);
    assert_eq!(e.v_pol, 5.0);
}

#[test]
fn ratio_mode_matches_atan_for_small_angles() {
    let v = c(230.0, 0.23);
    let (a, _) = estimate_pol(v, c(0.0, 0.0), L_LINE, OMEGA0, PhaseMode::Atan2, 0.0);
    let (r, _) = estimate_pol(v, c(0.0, 0.0), L_LINE, OMEGA0, PhaseMode::Ratio, 0.0);
    assert!((a.phi_pol - r.phi_pol).abs() < 1e-9);
}

#[test]
fn averages() {
    let own = PolEstimate { v_pol: 228.0, phi_pol: 0.01 };
    let snap = vec![(1, payload(230.0, 0.01, 0.0)), (2, payload(232.0, 0.01, 0.0))];
    let (v, phi) = average_pol(&snap, &own);
    assert!((v - 230.0).abs() < 1e-12);
    assert!((phi - 0.01).abs() < 1e-12);
    let (v, phi) = average_pol(&[], &own);
    assert!(v == 228.0 && (phi - 0.01).abs() < 1e-15);
    // across the +-pi seam
    let snap = vec![(1, payload(230.0, -3.1, 0.0))];
    let (_, phi) = average_pol(&snap, &PolEstimate { v_pol: 230.0, phi_pol: 3.1 });
    assert!((phi.abs() - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn voltage_loop_at_reference_is_silent() {
    let mut s = enabled_state();
    assert_eq!(voltage_phase_loop((230.0, 0.0), 230.0, &mut s, 0.01), (0.0, 0.0));
}

#[test]
fn voltage_loop_ramps_on_persistent_deficit() {
    let mut s = enabled_state();
    let mut dv = 0.0;
    for _ in 0..100 {
        dv = voltage_phase_loop((228.0, 0.0), 230.0, &mut s, 0.01).0;
    }
    assert!((dv - (K_PV * 2.0 + K_IV * 2.0 * 1.0)).abs() < 1e-9, "{dv}");
}

#[test]
fn disabled_loops_output_zero_and_freeze() {
    let mut s = SecondaryState::new(230.0, &SecondaryGains::default(), &SecondaryLimits::default());
    assert_eq!(voltage_phase_loop((200.0, 0.5), 230.0, &mut s, 0.01), (0.0, 0.0));
    assert_eq!(reactive_sharing_loop(10.0, &[(1, payload(0.0, 0.0, 50.0))], &mut s, 0.01), 0.0);
    assert_eq!(s.voltage.integrator, 0.0);
    assert_eq!(s.reactive.integrator, 0.0);
    assert_eq!(compose_reference(230.0, 0.0, 0.0, 0.0), (230.0, 0.0));
}

#[test]
fn compose_sums() {
    let (v, phi) = compose_reference(230.0, 1.5, 0.01, -0.2);
    assert!((v - 231.3).abs() < 1e-12 && phi == 0.01);
}

#[test]
fn reactive_errors_are_antisymmetric() {
    let (mut a, mut b) = (enabled_state(), enabled_state());
    let ua = reactive_sharing_loop(100.0, &[(1, payload(0.0, 0.0, 200.0))], &mut a, 0.01);
    let ub = reactive_sharing_loop(200.0, &[(0, payload(0.0, 0.0, 100.0))], &mut b, 0.01);
    assert!(ua > 0.0);
    assert_eq!(ua, -ub);
    let mut e = enabled_state();
    e.reactive.integrator = 0.7;
    let before = e.reactive.output(0.0);
    assert_eq!(reactive_sharing_loop(50.0, &[(1, payload(0.0, 0.0, 50.0))], &mut e, 0.01), before);
}

proptest! {
    #[test]
    fn reactive_errors_sum_to_zero(q in prop::collection::vec(-500.0f64..500.0, 1..6)) {
        let n = q.len();
        let mut total = 0.0;
        for i in 0..n {
            let snap: Vec<_> = (0..n).filter(|&j| j != i).map(|j| (j, payload(0.0, 0.0, q[j]))).collect();
            let mut s = enabled_state();
            s.reactive = PiAwState::new(1.0, 0.0, -1e9, 1e9);
            total += reactive_sharing_loop(q[i], &snap, &mut s, 0.01);
        }
        prop_assert!(total.abs() < 1e-9 * q.iter().map(|x| x.abs()).sum::<f64>().max(1.0));
    }

    #[test]
    fn outputs_stay_within_limits(
        errors in prop::collection::vec(-1e4f64..1e4, 1..200),
        kp in 0.0f64..10.0,
        ki in 0.0f64..100.0,
        lim in 0.01f64..50.0,
    ) {
        let mut pi = PiAwState::new(kp, ki, -lim, lim);
        for e in errors {
            let u = pi_aw_step(&mut pi, e, 0.01);
            prop_assert!(u.abs() <= lim);
            prop_assert!(pi.integrator.is_finite());
        }
    }

    #[test]
    fn secondary_outputs_within_configured_limits(
        v in prop::collection::vec(150.0f64..300.0, 1..300),
        phi in -1.0f64..1.0,
        q in -1e4f64..1e4,
    ) {
        let lim = SecondaryLimits::default();
        let mut s = enabled_state();
        for x in v {
            let (dv, dphi) = voltage_phase_loop((x, phi), 230.0, &mut s, 0.01);
            let dvq = reactive_sharing_loop(q, &[(1, payload(0.0, 0.0, -q))], &mut s, 0.01);
            prop_assert!(dv.abs() <= lim.dv_frac * 230.0);
            prop_assert!(dphi.abs() <= lim.dphi_rad);
            prop_assert!(dvq.abs() <= lim.dvq_frac * 230.0);
        }
    }
}

#[test]
fn anti_windup_bound_and_recovery() {
    let (upper, err_max, dt) = (1.0, 100.0, 1e-3);
    let mut pi = PiAwState::new(K_PV, K_IV, -upper, upper);
    // 10 s pinned at the limit
    for _ in 0..10_000 {
        let u = pi_aw_step(&mut pi, err_max, dt);
        assert!(u <= upper);
        assert!(pi.integrator.abs() <= upper / K_IV + (K_PV * err_max).abs() / K_IV + 1e-12);
    }
    // error reverses: the output leaves the limit and re-enters the band
    let t_i = pi.time_constant();
    let mut t = 0.0;
    let dt_fine = t_i / 50.0;
    loop {
        let u = pi_aw_step(&mut pi, -1.0, dt_fine);
        t += dt_fine;
        if u < upper - 1e-9 {
            break;
        }
        assert!(t < 3.0 * t_i, "still saturated after {t}");
    }
    assert!(t < 3.0 * t_i);

    // a plain integrator winds up to 1000 and takes orders of magnitude longer
    let mut naive = 0.0;
    for _ in 0..10_000 {
        naive += err_max * dt;
    }
    assert!((K_IV * naive - upper) / K_IV > 100.0 * t_i);
}

#[test]
fn replicated_controllers_agree() {
    let mut net = BroadcastNet::new(3, NetConfig::default());
    for k in 0..3 {
        net.connect(k);
    }
    let mut states: Vec<_> = (0..3).map(|_| enabled_state()).collect();
    let ests = [(228.0, 0.02), (229.5, 0.01), (231.0, -0.005)];
    for tick in 0..200 {
        let t = tick as f64 * 0.01;
        for (k, e) in ests.iter().enumerate() {
            let drift = 0.001 * tick as f64;
            net.publish(Broadcast { sender: k, timestamp: t, payload: payload(e.0 + drift, e.1, 0.0) });
        }
        net.deliver(t);
        let outs: Vec<_> = (0..3)
            .map(|k| {
                let e = ests[k];
                let own = PolEstimate { v_pol: e.0 + 0.001 * tick as f64, phi_pol: e.1 };
                let avg = average_pol(&net.snapshot(k, t), &own);
                voltage_phase_loop(avg, 230.0, &mut states[k], 0.01)
            })
            .collect();
        // same contributions in a different order: equal to rounding
        for o in &outs[1..] {
            assert!((o.0 - outs[0].0).abs() < 1e-12 && (o.1 - outs[0].1).abs() < 1e-12);
        }
    }
}

#[test]
fn snapshot_drops_unplugged_peer_after_latency() {
    let mut net = BroadcastNet::new(3, NetConfig { period: 0.01, latency: 0.005 });
    for k in 0..3 {
        net.connect(k);
    }
    for k in 0..3 {
        net.publish(Broadcast { sender: k, timestamp: 0.0, payload: payload(230.0, 0.0, 0.0) });
    }
    net.deliver(0.01);
    assert_eq!(net.snapshot(0, 0.01).len(), 2);
    net.disconnect(2, 0.02);
    assert_eq!(net.snapshot(0, 0.024).len(), 2);
    assert_eq!(net.snapshot(0, 0.03).len(), 1);
    assert!(!net.publish(Broadcast { sender: 2, timestamp: 0.03, payload: payload(1.0, 0.0, 0.0) }));
    let own = PolEstimate { v_pol: 228.0, phi_pol: 0.0 };
    assert_eq!(average_pol(&net.snapshot(0, 0.03), &own).0, 229.0);
}

#[test]
fn identical_publish_sequences_identical_snapshots() {
    let run = || {
        let mut net = BroadcastNet::new(4, NetConfig { period: 0.01, latency: 0.015 });
        for k in 0..4 {
            net.connect(k);
        }
        let mut seen = vec![];
        for tick in 0..50 {
            let t = tick as f64 * 0.01;
            for k in 0..4 {
                let v = (tick * 7 + k * 13) as f64 % 11.0;
                net.publish(Broadcast { sender: k, timestamp: t, payload: payload(v, 0.0, v) });
            }
            net.deliver(t);
            seen.push(net.snapshot(tick % 4, t));
        }
        seen
    };
    assert_eq!(run(), run());
}

#[test]
fn tuning_examples() {
    let m = TuningModel { mu: 1.0, tau: 0.0, t_const: 0.05, n: 1 };
    let g = tune_pi_from_model(&m, 2.0, 0.0, 0.01).unwrap();
    assert_eq!(g.k_p, 0.0);
    // kappa = 0 is pure integral action, k_i = w_b / mu
    let wb = 2.0 * std::f64::consts::PI * 2.0;
    assert!((g.k_i - wb).abs() < 1e-12);
    let g2 = tune_pi_from_model(&TuningModel::phase_channel(2, 0.0, 0.05), 1.0, 1.0, 0.01).unwrap();
    let g4 = tune_pi_from_model(&TuningModel::phase_channel(4, 0.0, 0.05), 1.0, 1.0, 0.01).unwrap();
    assert!((g4.k_i / g2.k_i - 2.0).abs() < 1e-12);
    assert!((g4.integral_time() - 0.05).abs() < 1e-15);
    let delayed = TuningModel { mu: 1.0, tau: 0.1, t_const: 0.5, n: 1 };
    assert!(tune_pi_from_model(&delayed, 1.0, 1.0, 0.01).unwrap().phase_margin_deg >= 45.0);
    assert!(tune_pi_from_model(&delayed, 2.0, 1.0, 0.01).is_err());
    assert!(tune_pi_from_model(&TuningModel { t_const: 0.0, ..m }, 1.0, 1.0, 0.01).is_err());
}
