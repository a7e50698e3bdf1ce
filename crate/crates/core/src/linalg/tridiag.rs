//! Symmetric tridiagonal pencils `(K, M)` with `M` positive definite.
//!
//! Eigenvalues are located by bisection on the inertia of `K - lambda M`
//! (Sylvester's law of inertia: the number of negative pivots of its LDL^T
//! factorization equals the number of eigenvalues below `lambda`), and
//! eigenvectors by inverse iteration. Cost is O(n) per inertia count, so grids
//! with thousands of nodes are cheap.

use super::dot;
use crate::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples `i` and `i + 1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Adds a 2x2 element block on rows `i`, `i + 1`.
    pub fn add_element(&mut self, i: usize, block: [[f64; 2]; 2]) {
        self.diag[i] += block[0][0];
        self.diag[i + 1] += block[1][1];
        self.off[i] += block[0][1];
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, x)| d * x).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }
}

/// Lowest eigenpairs of a tridiagonal pencil.
#[derive(Debug, Clone)]
pub struct PencilEigen {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors.
    pub vectors: Vec<Vec<f64>>,
}

/// Computes the `count` lowest eigenpairs of `K v = lambda M v`.
pub fn lowest_eigenpairs(k: &Tridiag, m: &Tridiag, count: usize) -> Result<PencilEigen> {
    let n = k.dim();
    if m.dim() != n || n == 0 {
        return Err(Error::InvalidArgument("tridiagonal pencil dimensions differ".into()));
    }
    if count > n {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenpairs of a {n}-dimensional pencil"
        )));
    }
    if m.diag.iter().any(|&d| d <= 0.0) {
        return Err(Error::NotPositiveDefinite {
            row: m.diag.iter().position(|&d| d <= 0.0).unwrap_or(0),
            pivot: 0.0,
        });
    }

    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while count_below(k, m, lo) > 0 {
        lo *= 2.0;
        if !lo.is_finite() {
            return Err(Error::NoConvergence { method: "pencil bracketing", iterations: 0 });
        }
    }
    while count_below(k, m, hi) < count {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConvergence { method: "pencil bracketing", iterations: 0 });
        }
    }

    let mut values = Vec::with_capacity(count);
    for j in 0..count {
        // smallest lambda with more than j eigenvalues below it
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if count_below(k, m, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        values.push(0.5 * (a + b));
    }

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for (j, &lambda) in values.iter().enumerate() {
        let mut v = inverse_iteration(k, m, lambda, j)?;
        // clean up against earlier vectors (only matters for clustered values)
        for u in &vectors {
            let c = m.bilinear(u, &v);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
        let norm = m.bilinear(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        orient(&mut v);
        vectors.push(v);
    }
    Ok(PencilEigen { values, vectors })
}

/// Number of eigenvalues of the pencil strictly below `lambda`.
pub fn count_below(k: &Tridiag, m: &Tridiag, lambda: f64) -> usize {
    let n = k.dim();
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut negatives = 0;
    let mut d = k.diag[0] - lambda * m.diag[0];
    for i in 0..n {
        if i > 0 {
            let e = k.off[i - 1] - lambda * m.off[i - 1];
            d = (k.diag[i] - lambda * m.diag[i]) - e * e / d;
        }
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            negatives += 1;
        }
    }
    negatives
}

fn inverse_iteration(k: &Tridiag, m: &Tridiag, lambda: f64, seed: usize) -> Result<Vec<f64>> {
    let n = k.dim();
    let a = Tridiag {
        diag: k.diag.iter().zip(&m.diag).map(|(k, m)| k - lambda * m).collect(),
        off: k.off.iter().zip(&m.off).map(|(k, m)| k - lambda * m).collect(),
    };
    let lu = TridiagLu::factor(&a);
    // deterministic, generic start vector
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i * 7 + seed * 13) % 11) as f64 / 11.0)
        .collect();
    for _ in 0..4 {
        let rhs = m.mul_vec(&v);
        v = lu.solve(&rhs);
        let norm = v.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NoConvergence { method: "inverse iteration", iterations: 4 });
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Ok(v)
}

/// Fixes the sign so the entry of largest magnitude (first one on ties within
/// rounding) is positive.
fn orient(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-9)) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// LU with partial pivoting for a (possibly indefinite) tridiagonal matrix.
struct TridiagLu {
    // U has up to two superdiagonals after pivoting
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(a: &Tridiag) -> Self {
        let n = a.dim();
        let mut d = a.diag.clone();
        let mut du = a.off.clone();
        let mut dl = a.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                let f = if d[i] != 0.0 { dl[i] / d[i] } else { 0.0 };
                l[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                l[i] = f;
                swapped[i] = true;
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                du[i] = tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
            }
            dl[i] = 0.0;
        }
        let eps = f64::EPSILON * a.diag.iter().fold(1e-300f64, |s, x| s.max(x.abs()));
        for x in d.iter_mut() {
            if x.abs() < eps {
                *x = if *x < 0.0 { -eps } else { eps };
            }
        }
        Self { u0: d, u1: du, u2: du2, l, swapped }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.u0.len();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
                x[i + 1] -= self.l[i] * x[i];
            } else {
                x[i + 1] -= self.l[i] * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
        x
    }
}
