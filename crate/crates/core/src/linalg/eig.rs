use serde::{Deserialize, Serialize};

use super::{Cholesky, DenseSym};
use crate::{Error, NumericSettings, Result};

/// Inner product the eigenvectors of a [`Spectrum`] are orthonormal against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gram {
    Identity,
    /// Second matrix of a generalized pencil `(A, B)`.
    Pencil,
    /// Boundary mass matrix (Steklov).
    BoundaryMass,
    /// Domain mass matrix (Neumann).
    DomainMass,
}

/// Ascending eigenvalues with their eigenvectors (`vectors[k]` belongs to
/// `values[k]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub gram: Gram,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps the lowest `count` pairs.
    pub fn truncate(&mut self, count: usize) {
        self.values.truncate(count);
        self.vectors.truncate(count);
    }

    /// Largest deviation of `V^T G V` from the identity.
    pub fn orthonormality_defect(&self, gram: &DenseSym) -> f64 {
        let gv: Vec<Vec<f64>> = self.vectors.iter().map(|v| gram.mul_vec(v)).collect();
        let mut worst = 0.0f64;
        for (i, vi) in self.vectors.iter().enumerate() {
            for (j, gvj) in gv.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((super::dot(vi, gvj) - target).abs());
            }
        }
        worst
    }
}

/// Cyclic Jacobi eigensolver for a dense symmetric matrix.
pub fn sym_eig(a: &DenseSym, settings: &NumericSettings) -> Result<Spectrum> {
    let (values, vectors) = jacobi(a, settings.jacobi_tol, settings.jacobi_max_sweeps)?;
    Ok(Spectrum {
        values,
        vectors,
        gram: Gram::Identity,
    })
}

/// Generalized problem `A v = lambda B v` with `B` SPD, reduced through
/// `B = L L^T` to `L^{-1} A L^{-T}`. Eigenvectors come back B-orthonormal.
///
/// The reduced matrix can have a few thousand rows (Neumann problems on the
/// full mesh), so it is solved by Householder tridiagonalization and
/// implicit QL rather than Jacobi.
pub fn gen_sym_eig(a: &DenseSym, b: &DenseSym, settings: &NumericSettings) -> Result<Spectrum> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "pencil dimensions differ: {n} vs {}",
            b.dim()
        )));
    }
    let chol = Cholesky::factor(b, settings.pivot_tol)?;
    // X = L^{-1} A, row k of X^T is L^{-1} applied to column k of A (= row k)
    let mut xt = vec![0.0; n * n];
    for k in 0..n {
        let col = chol.solve_lower(a.row(k));
        xt[k * n..(k + 1) * n].copy_from_slice(&col);
    }
    // C = X L^{-T} = (L^{-1} X^T)^T; row i of C^T is L^{-1} applied to row i of X.
    let mut c = vec![0.0; n * n];
    let mut row = vec![0.0; n];
    for i in 0..n {
        for k in 0..n {
            row[k] = xt[k * n + i];
        }
        let ci = chol.solve_lower(&row);
        c[i * n..(i + 1) * n].copy_from_slice(&ci);
    }
    let reduced = DenseSym::from_row_major(n, &c);
    let (values, ys) = householder_ql(reduced, settings.ql_max_iter)?;
    let vectors = ys.iter().map(|y| chol.solve_upper(y)).collect();
    Ok(Spectrum {
        values,
        vectors,
        gram: Gram::Pencil,
    })
}

/// Returns ascending eigenvalues and unit eigenvectors.
fn jacobi(a: &DenseSym, tol: f64, max_sweeps: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.dim();
    let scale = a.max_abs();
    let threshold = tol * scale;
    let mut m = a.clone().into_raw();
    // rows of vt are the eigenvectors
    let mut vt = DenseSym::identity(n).into_raw();

    let off_max = |m: &[f64]| {
        let mut w = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                w = w.max(m[i * n + j].abs());
            }
        }
        w
    };

    let mut converged = scale == 0.0 || off_max(&m) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence {
                method: "Jacobi eigensolver",
                iterations: max_sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() <= threshold * 1e-3 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, n, p, q, c, s);
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                let (vp, vq) = two_rows(&mut vt, n, p, q);
                for k in 0..n {
                    let (x, y) = (vp[k], vq[k]);
                    vp[k] = c * x - s * y;
                    vq[k] = s * x + c * y;
                }
            }
        }
        converged = off_max(&m) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order.iter().map(|&i| vt[i * n..(i + 1) * n].to_vec()).collect();
    Ok((values, vectors))
}

/// Householder reduction to tridiagonal form followed by the implicit QL
/// algorithm (the classic `tred2` / `tql2` pair). Works on the transpose of
/// the accumulated transform so that every inner loop is a contiguous row.
fn householder_ql(a: DenseSym, max_iter: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.dim();
    // w[j * n + k] holds V[k][j]; A is symmetric so the initial V = A works.
    let mut w = a.into_raw();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return Ok((d, Vec::new()));
    }
    macro_rules! v {
        ($r:expr, $c:expr) => {
            w[($c) * n + ($r)]
        };
    }

    for j in 0..n {
        d[j] = v!(n - 1, j);
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v!(i - 1, j);
                v!(i, j) = 0.0;
                v!(j, i) = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);
            for j in 0..i {
                f = d[j];
                v!(j, i) = f;
                g = e[j] + v!(j, j) * f;
                let col = &w[j * n..j * n + i];
                for k in j + 1..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let (f, g) = (d[j], e[j]);
                let col = &mut w[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = v!(i - 1, j);
                v!(i, j) = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v!(n - 1, i) = v!(i, i);
        v!(i, i) = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v!(k, i + 1) / h;
            }
            let (lo, hi) = w.split_at_mut((i + 1) * n);
            let src = &hi[..=i];
            for j in 0..=i {
                let dst = &mut lo[j * n..j * n + i + 1];
                let g: f64 = src.iter().zip(dst.iter()).map(|(x, y)| x * y).sum();
                for k in 0..=i {
                    dst[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v!(k, i + 1) = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v!(n - 1, j);
        v!(n - 1, j) = 0.0;
    }
    v!(n - 1, n - 1) = 1.0;
    e[0] = 0.0;

    // implicit QL on (d, e)
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > f64::EPSILON * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence {
                        method: "tridiagonal QL",
                        iterations: max_iter,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = w.split_at_mut((i + 1) * n);
                    let (vi, vi1) = (&mut lo[i * n..], &mut hi[..n]);
                    for k in 0..n {
                        let t = vi1[k];
                        vi1[k] = s * vi[k] + c * t;
                        vi[k] = c * vi[k] - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= f64::EPSILON * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order.iter().map(|&i| w[i * n..(i + 1) * n].to_vec()).collect();
    Ok((values, vectors))
}

/// Applies the rotation to rows/columns `p`, `q` of the full symmetric array,
/// leaving the 2x2 pivot block for the caller.
fn rotate(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        let np = c * akp - s * akq;
        let nq = s * akp + c * akq;
        m[k * n + p] = np;
        m[k * n + q] = nq;
    }
    let (rp, rq) = two_rows(m, n, p, q);
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let (x, y) = (rp[k], rq[k]);
        rp[k] = c * x - s * y;
        rq[k] = s * x + c * y;
    }
}

fn two_rows(m: &mut [f64], n: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (head, tail) = m.split_at_mut(q * n);
    (&mut head[p * n..(p + 1) * n], &mut tail[..n])
}
