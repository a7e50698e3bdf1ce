//! Spectral toolkit for thin-tube dumbbell domains.
//!
//! The crate computes Steklov and Neumann eigenvalues of planar dumbbells
//! (two disks joined by a tube of half-width `eps * rho(x1)`) with P1 finite
//! elements, solves the one-dimensional eigenvalue problems that govern the
//! thin-tube limit, and checks the resulting scaling laws numerically.
//!
//! Module map:
//!
//! * [`geometry`]: parametric dumbbell family and its polygonal realization.
//! * [`mesh`]: conforming triangle meshes (structured tube, radial disks).
//! * [`linalg`]: sparse/dense symmetric kernels and eigensolvers.
//! * [`fem`]: P1 assembly, discrete Dirichlet-to-Neumann map, Steklov and
//!   Neumann spectra.
//! * [`limit1d`]: one-dimensional limit problems and their closed forms.
//! * [`asymptotics`]: width sweeps, rate fits, eigenfunction comparison.
//! * [`counterexample`]: the `mu_1 |Omega| < sigma_1 P(Omega)` dumbbell.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read closer to the formulas in the numerical kernels.
#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod counterexample;
mod error;
pub mod fem;
pub mod geometry;
pub mod limit1d;
pub mod linalg;
pub mod mesh;
pub mod output;
mod par;
mod settings;

pub use error::{Error, Result};
pub use settings::{Execution, NumericSettings};

/// Lebesgue measure of the unit ball in `R^n` (`omega_0 = 1`, `omega_1 = 2`).
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}
