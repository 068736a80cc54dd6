use std::f64::consts::PI;

use pnp_microgrid::topology::{
    kron_reduce_star, line_impedance, reduce_bus_to_load, split_load_current, BusTopology, LineParams,
};
use pnp_microgrid::ComplexValue;
use proptest::prelude::*;

const W0: f64 = 2.0 * PI * 50.0;

fn bus(lines: &[(f64, f64)]) -> BusTopology {
    BusTopology::new(lines.iter().map(|&(r, l)| LineParams::new(r, l).unwrap()).collect(), W0).unwrap()
}

fn rel(a: ComplexValue, b: ComplexValue) -> f64 {
    (a - b).norm() / b.norm()
}

fn lines(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.01f64..1.0, 1e-4f64..1e-2), n)
}

#[test]
fn line_impedance_examples() {
    let z = line_impedance(LineParams::new(0.1, 1.8e-3).unwrap(), W0);
    assert_eq!(z.re, 0.1);
    assert!((z.im - 0.565487).abs() < 1e-6);
    assert_eq!(line_impedance(LineParams::new(1.0, 0.0).unwrap(), 123.0), ComplexValue::new(1.0, 0.0));
    let z = line_impedance(LineParams::new(0.0, 1.0 / W0).unwrap(), W0);
    assert_eq!(z.re, 0.0);
    assert!((z.im - 1.0).abs() < 1e-15);
}

#[test]
fn two_lines_reduce_to_series_sum_exactly() {
    for &(a, b) in &[((0.1, 1.8e-3), (0.3, 7e-4)), ((1.0, 0.0), (0.0, 2e-3)), ((0.123, 4.56e-3), (0.789, 1e-4))] {
        let bus = bus(&[a, b]);
        let z = bus.impedances();
        let topo = reduce_bus_to_load(&bus).unwrap();
        assert_eq!(topo.edge(0, 1).unwrap(), z[0] + z[1]);
    }
}

#[test]
fn equal_lines_reduce_to_n_times_z_exactly() {
    for n in 2..=8 {
        let bus = bus(&vec![(0.1, 1.8e-3); n]);
        let z = bus.impedances()[0];
        let topo = reduce_bus_to_load(&bus).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(topo.edge(i, j).unwrap(), z * n as f64, "n = {n}");
            }
        }
        let il = ComplexValue::new(3.7, -1.3);
        for part in split_load_current(&bus, il).unwrap() {
            assert_eq!(part, il / n as f64);
        }
    }
}

#[test]
fn current_divider_oracle() {
    // Z_1 = 2 Z_2: solve the star directly, V_PoL common, I_k = (V_k - V_PoL)/Z_k with equal V_k
    let z2 = ComplexValue::new(0.1, 0.3);
    let z1 = z2 * 2.0;
    let l = |z: ComplexValue| (z.re, z.im / W0);
    let parts = split_load_current(&bus(&[l(z1), l(z2)]), ComplexValue::new(3.0, 0.0)).unwrap();
    assert!((parts[0] - ComplexValue::new(1.0, 0.0)).norm() < 1e-12);
    assert!((parts[1] - ComplexValue::new(2.0, 0.0)).norm() < 1e-12);
    let zero = split_load_current(&bus(&[(0.1, 1e-3), (0.2, 2e-3)]), ComplexValue::new(0.0, 0.0)).unwrap();
    assert!(zero.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn nominal_three_units() {
    let topo = reduce_bus_to_load(&bus(&[(0.1, 1.8e-3); 3])).unwrap();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let z = topo.edge(i, j).unwrap();
        assert!((z.re - 0.3).abs() < 1e-12);
        assert!((z.im - 3.0 * 0.565487).abs() < 1e-5);
    }
}

#[test]
fn kron_oracle_five_random_lines() {
    let b = bus(&[(0.5, 3e-3), (0.02, 9e-3), (0.9, 1.2e-4), (0.33, 5e-3), (0.07, 2.2e-3)]);
    let (a, o) = (reduce_bus_to_load(&b).unwrap(), kron_reduce_star(&b).unwrap());
    for i in 0..5 {
        for j in i + 1..5 {
            assert!(rel(a.edge(i, j).unwrap(), o.edge(i, j).unwrap()) < 1e-9);
        }
    }
}

#[test]
fn zero_line_rejected_with_index() {
    assert!(LineParams::new(0.0, 0.0).is_err());
    let lines = vec![LineParams { resistance: 0.1, inductance: 1e-3 }, LineParams { resistance: 0.0, inductance: 0.0 }];
    let b = BusTopology::new(lines, W0).unwrap();
    match reduce_bus_to_load(&b) {
        Err(pnp_microgrid::Error::DegenerateLine { index }) => assert_eq!(index, 1),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduction_matches_kron(l in lines(2..=8)) {
        let b = bus(&l);
        let (a, o) = (reduce_bus_to_load(&b).unwrap(), kron_reduce_star(&b).unwrap());
        for i in 0..l.len() {
            for j in 0..l.len() {
                if i != j {
                    prop_assert!(rel(a.edge(i, j).unwrap(), o.edge(i, j).unwrap()) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn reduction_is_symmetric_and_complete(l in lines(2..=8)) {
        let n = l.len();
        let topo = reduce_bus_to_load(&bus(&l)).unwrap();
        prop_assert_eq!(topo.present_edges(), n * (n - 1) / 2);
        for i in 0..n {
            prop_assert!(topo.edge(i, i).is_none());
            for j in 0..n {
                prop_assert_eq!(topo.edge(i, j), topo.edge(j, i));
            }
        }
    }

    #[test]
    fn split_conserves_current(l in lines(1..=8), re in -100.0f64..100.0, im in -100.0f64..100.0) {
        let il = ComplexValue::new(re, im);
        let parts = split_load_current(&bus(&l), il).unwrap();
        let sum: ComplexValue = parts.iter().sum();
        prop_assert!((sum - il).norm() <= 1e-12 * il.norm().max(1.0));
    }

    #[test]
    fn scaling_covariance(l in lines(2..=6), s in 0.1f64..10.0) {
        // real positive scaling keeps lines physical; c = s (1 + 0i)
        let scaled: Vec<_> = l.iter().map(|&(r, x)| (r * s, x * s)).collect();
        let (a, b) = (reduce_bus_to_load(&bus(&l)).unwrap(), reduce_bus_to_load(&bus(&scaled)).unwrap());
        for i in 0..l.len() {
            for j in i + 1..l.len() {
                prop_assert!(rel(b.edge(i, j).unwrap(), a.edge(i, j).unwrap() * s) < 1e-12);
            }
        }
        let il = ComplexValue::new(2.0, -1.0);
        let (p, q) = (split_load_current(&bus(&l), il).unwrap(), split_load_current(&bus(&scaled), il).unwrap());
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn complex_scaling_covariance() {
    // a complex factor can make a resistance negative, so use the reduction
    // on raw impedances through a rotation that stays in the first quadrant
    let l = [(0.2, 1e-3), (0.4, 3e-3), (0.1, 5e-3)];
    let c = ComplexValue::from_polar(1.5, -0.1);
    let z: Vec<ComplexValue> = bus(&l).impedances().iter().map(|z| z * c).collect();
    assert!(z.iter().all(|z| z.re > 0.0 && z.im > 0.0));
    let scaled = bus(&z.iter().map(|z| (z.re, z.im / W0)).collect::<Vec<_>>());
    let (a, b) = (reduce_bus_to_load(&bus(&l)).unwrap(), reduce_bus_to_load(&scaled).unwrap());
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert!(rel(b.edge(i, j).unwrap(), a.edge(i, j).unwrap() * c) < 1e-12);
    }
    let il = ComplexValue::new(1.0, 1.0);
    let (p, q) = (split_load_current(&bus(&l), il).unwrap(), split_load_current(&scaled, il).unwrap());
    for (x, y) in p.iter().zip(&q) {
        assert!((x - y).norm() < 1e-12);
    }
}
