//! The characteristic equation of the planar limit problem with `rho = 1`.
//!
//! Nonzero eigenvalues are `mu = w^2` with
//! `cot(w L) = (w^2 P1 P2 - 4) / (2 w (P1 + P2))`.

use std::f64::consts::PI;

use crate::{Error, Result};

fn g(w: f64, length: f64, p1: f64, p2: f64) -> f64 {
    1.0 / (w * length).tan() - (w * w * p1 * p2 - 4.0) / (2.0 * w * (p1 + p2))
}

/// The first `k_max` positive roots, one in each `((m-1) pi / L, m pi / L)`.
///
/// On every such interval `g = cot(wL) - rhs(w)` decreases strictly from
/// `+inf` to `-inf`, so bisection on the sign of `g` converges to the unique
/// root; it stops once the bracket is at most `1e-12` wide.
pub fn transcendental_roots(length: f64, p1: f64, p2: f64, k_max: usize) -> Result<Vec<f64>> {
    if !(length > 0.0 && p1 > 0.0 && p2 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need L, P1, P2 > 0, got {length}, {p1}, {p2}"
        )));
    }
    (1..=k_max)
        .map(|m| {
            let (a, b) = ((m - 1) as f64 * PI / length, m as f64 * PI / length);
            let inset = 1e-9 * (b - a);
            if !(g(a + inset, length, p1, p2) > 0.0 && g(b - inset, length, p1, p2) < 0.0) {
                return Err(Error::NoBracket { lo: a, hi: b });
            }
            let (mut lo, mut hi) = (a, b);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid, length, p1, p2) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        })
        .collect()
}

/// `f(w) = cot(wL) - (w^2 pi - 1) / (2 sqrt(pi) w)`: the characteristic
/// function for two unit-area disks (`P1 = P2 = 2 sqrt(pi)`).
pub fn f_eval(w: f64, length: f64) -> Result<f64> {
    if !(w > 0.0) || !(length > 0.0) {
        return Err(Error::InvalidArgument(format!("need w, L > 0, got {w}, {length}")));
    }
    let t = w * length;
    if (t - (t / PI).round() * PI).abs() <= 1e-12 {
        return Err(Error::PoleAt { w });
    }
    Ok(1.0 / t.tan() - (w * w * PI - 1.0) / (2.0 * PI.sqrt() * w))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: f64 = 3.5449077018110318; // 2 sqrt(pi)

    #[test]
    fn first_root_bracket() {
        assert!((P - 2.0 * PI.sqrt()).abs() < 1e-15);
        assert!(g(0.202, 12.0, P, P) > 0.0 && g(0.205, 12.0, P, P) < 0.0);
        let w = transcendental_roots(12.0, P, P, 5).unwrap();
        assert!(w[0] > 0.202 && w[0] < 0.205);
        assert!((w[0] - 0.20397914882261306).abs() < 1e-11);
        assert!((w[4] - 1.1246906482710162).abs() < 1e-11);
    }

    #[test]
    fn roots_are_interlaced_with_poles() {
        for (l, p1, p2) in [(1.0, 0.3, 7.0), (12.0, P, P), (0.5, 10.0, 10.0), (30.0, 1.0, 2.0)] {
            let w = transcendental_roots(l, p1, p2, 8).unwrap();
            for (m, wm) in w.iter().enumerate() {
                assert!(*wm > m as f64 * PI / l && *wm < (m + 1) as f64 * PI / l);
                assert!(g(*wm, l, p1, p2).abs() < 1e-6 * (1.0 + 1.0 / (wm * l).sin().powi(2)));
            }
        }
    }

    #[test]
    fn f_signs_and_identity() {
        assert!(f_eval(0.1, 12.0).unwrap() > 0.0);
        assert!(f_eval(0.21, 12.0).unwrap() < 0.0);
        for w in [0.05, 0.1, 0.3, 0.77] {
            assert!((f_eval(w, 12.0).unwrap() - g(w, 12.0, P, P)).abs() < 1e-14 * (1.0 + g(w, 12.0, P, P).abs()));
        }
        assert!(matches!(f_eval(PI / 12.0, 12.0), Err(Error::PoleAt { .. })));
    }
}
