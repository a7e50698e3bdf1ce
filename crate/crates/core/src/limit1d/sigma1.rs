//! First nonzero limit eigenvalue for `n >= 3`.
//!
//! The limit problem is `(rho^{n-1} V')' = 0` with
//! `rho^{n-1} V'(-L/2) = -(sigma / omega_{n-1}) P1 V(-L/2)` and
//! `rho^{n-1} V'(L/2) = (sigma / omega_{n-1}) P2 V(L/2)`.

use super::Limit1DProblem;
use crate::{unit_ball_volume, Error, Result};

/// Panels of the composite Simpson rule for `int rho^{1-n}`.
const SIMPSON_PANELS: usize = 1 << 14;

fn check(p: &Limit1DProblem) -> Result<()> {
    p.validate()?;
    if p.dim < 3 {
        return Err(Error::InvalidArgument(format!("needs n >= 3, got n = {}", p.dim)));
    }
    Ok(())
}

fn inverse_flux_weight(p: &Limit1DProblem, x: f64) -> Result<f64> {
    Ok(p.profile.eval(x, p.length)?.powi(1 - p.dim as i32))
}

/// `sigma_1 = omega_{n-1} (P1 + P2) / (P1 P2 I)` with `I = int rho^{1-n}`:
/// the flux `rho^{n-1} V'` is constant, and the two boundary conditions
/// fix the jump `V(L/2) - V(-L/2)` it has to produce.
pub fn sigma1_closed_form(p: &Limit1DProblem) -> Result<f64> {
    check(p)?;
    let n = SIMPSON_PANELS;
    let h = p.length / n as f64;
    let x0 = -0.5 * p.length;
    let mut sum = inverse_flux_weight(p, x0)? + inverse_flux_weight(p, 0.5 * p.length)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * inverse_flux_weight(p, x0 + i as f64 * h)?;
    }
    let integral = sum * h / 3.0;
    Ok(unit_ball_volume(p.dim - 1) * (p.p1 + p.p2) / (p.p1 * p.p2 * integral))
}

/// Independent check: shoots the fundamental solutions of the first-order
/// system `V' = q / rho^{n-1}`, `q' = 0` across the tube with `steps` RK4
/// steps, and bisects on `sigma` for the sign change of the 2x2 determinant
/// of the boundary conditions.
pub fn sigma1_determinant_oracle(p: &Limit1DProblem, steps: usize) -> Result<f64> {
    check(p)?;
    if steps == 0 {
        return Err(Error::InvalidGrid("need at least one RK4 step".into()));
    }
    // fundamental solutions from (V, q) = (1, 0) and (0, 1) at the left end
    let h = p.length / steps as f64;
    let rhs = |x: f64, y: [f64; 2]| -> Result<[f64; 2]> { Ok([y[1] * inverse_flux_weight(p, x)?, 0.0]) };
    let mut ends = [[1.0, 0.0], [0.0, 1.0]];
    for y in &mut ends {
        for i in 0..steps {
            let x = -0.5 * p.length + i as f64 * h;
            let xe = if i + 1 == steps { 0.5 * p.length } else { x + h };
            let xm = 0.5 * (x + xe);
            let k1 = rhs(x, *y)?;
            let k2 = rhs(xm, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]])?;
            let k3 = rhs(xm, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]])?;
            let k4 = rhs(xe, [y[0] + h * k3[0], y[1] + h * k3[1]])?;
            for c in 0..2 {
                y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
        }
    }
    let omega = unit_ball_volume(p.dim - 1);
    // V = a Y1 + b Y2; left BC: q + s P1 V = 0, right BC: q - s P2 V = 0
    let det = |sigma: f64| {
        let s = sigma / omega;
        let [y1, y2] = ends;
        let left = [s * p.p1, 1.0];
        let right = [y1[1] - s * p.p2 * y1[0], y2[1] - s * p.p2 * y2[0]];
        left[0] * right[1] - left[1] * right[0]
    };
    let (mut lo, mut hi) = (1e-8, 1e4);
    let (dlo, dhi) = (det(lo), det(hi));
    if dlo == 0.0 {
        return Ok(lo);
    }
    if dlo.signum() == dhi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if det(mid).signum() == dlo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
