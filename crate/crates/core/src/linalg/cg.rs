use super::{dot, norm2, SparseSym};
use crate::{Error, Result};

/// Jacobi-preconditioned conjugate gradients for an SPD sparse system.
///
/// Stops when `||A x - b|| / ||b|| <= tol`; gives up after
/// `max_iter_factor * dim` iterations.
pub fn cg_solve(a: &SparseSym, b: &[f64], tol: f64, max_iter_factor: usize) -> Result<Vec<f64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {}, matrix has dimension {n}",
            b.len()
        )));
    }
    let mut x = vec![0.0; n];
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(x);
    }
    let inv_diag: Vec<f64> = a
        .diag()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let max_iter = max_iter_factor * n.max(1);

    for _ in 0..max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NotPositiveDefinite { row: 0, pivot: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm2(&r) <= tol * b_norm {
            // confirm with the true residual; the recurrence drifts slowly
            let true_r: Vec<f64> = a.mul_vec(&x).iter().zip(b).map(|(ax, b)| b - ax).collect();
            if norm2(&true_r) <= tol * b_norm {
                return Ok(x);
            }
            r = true_r;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        method: "conjugate gradients",
        iterations: max_iter,
    })
}
