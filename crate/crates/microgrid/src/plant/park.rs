//! Amplitude-invariant Park transform, sine aligned.
//!
//! A balanced set `A sin(theta - k 2pi/3)` maps to `d = A, q = 0`.

use std::f64::consts::PI;

use crate::topology::ComplexValue;

const SHIFT: [f64; 3] = [0.0, -2.0 * PI / 3.0, 2.0 * PI / 3.0];

pub fn park(abc: [f64; 3], theta: f64) -> ComplexValue {
    let mut d = 0.0;
    let mut q = 0.0;
    for k in 0..3 {
        let (s, c) = (theta + SHIFT[k]).sin_cos();
        d += abc[k] * s;
        q += abc[k] * c;
    }
    ComplexValue::new(2.0 / 3.0 * d, 2.0 / 3.0 * q)
}

/// Inverse of [`park`] for zero-sequence-free signals.
pub fn inverse_park(dq: ComplexValue, theta: f64) -> [f64; 3] {
    let mut abc = [0.0; 3];
    for k in 0..3 {
        let (s, c) = (theta + SHIFT[k]).sin_cos();
        abc[k] = dq.re * s + dq.im * c;
    }
    abc
}

/// [`inverse_park`] with `sin theta`, `cos theta` supplied by the caller.
#[inline]
pub fn inverse_park_sc(dq: ComplexValue, sin: f64, cos: f64) -> [f64; 3] {
    const S: f64 = 0.866_025_403_784_438_6; // sin(2pi/3)
    // sin(t -+ 2pi/3) = -sin/2 -+ S cos, cos(t -+ 2pi/3) = -cos/2 +- S sin
    let sb = -0.5 * sin - S * cos;
    let cb = -0.5 * cos + S * sin;
    let sc = -0.5 * sin + S * cos;
    let cc = -0.5 * cos - S * sin;
    [
        dq.re * sin + dq.im * cos,
        dq.re * sb + dq.im * cb,
        dq.re * sc + dq.im * cc,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn balanced_set_aligns_with_d() {
        let th: f64 = 0.7;
        let a = 230.0;
        let abc = [a * th.sin(), a * (th - 2.0 * PI / 3.0).sin(), a * (th + 2.0 * PI / 3.0).sin()];
        let dq = park(abc, th);
        assert!((dq.re - a).abs() < 1e-12);
        assert!(dq.im.abs() < 1e-12);
        assert_eq!(park([0.0; 3], 1.3), ComplexValue::new(0.0, 0.0));
    }

    #[test]
    fn fast_inverse_matches() {
        for k in 0..50 {
            let th = 0.37 * k as f64 - 4.0;
            let v = ComplexValue::new(3.0 - 0.1 * k as f64, 0.5 * k as f64);
            let a = inverse_park(v, th);
            let b = inverse_park_sc(v, th.sin(), th.cos());
            for j in 0..3 {
                assert!((a[j] - b[j]).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(d in -1e3..1e3f64, q in -1e3..1e3f64, th in -10.0..10.0f64) {
            let v = ComplexValue::new(d, q);
            let back = park(inverse_park(v, th), th);
            prop_assert!((back - v).norm() <= 1e-12 * (1.0 + v.norm()));
        }

        #[test]
        fn zero_sequence_free_round_trip(a in -1e3..1e3f64, b in -1e3..1e3f64, th in -10.0..10.0f64) {
            let x = [a, b, -a - b];
            let y = inverse_park(park(x, th), th);
            for k in 0..3 {
                prop_assert!((x[k] - y[k]).abs() <= 1e-12 * (1.0 + a.abs() + b.abs()));
            }
        }
    }
}
