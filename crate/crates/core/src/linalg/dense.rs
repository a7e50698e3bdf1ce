use crate::{Error, Result};

/// Dense symmetric matrix, stored as a full row-major square. Every write is
/// mirrored so `a[i][j] == a[j][i]` holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym {
    n: usize,
    a: Vec<f64>,
}

impl DenseSym {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from a full row-major array, averaging `a[i][j]` and `a[j][i]`.
    pub fn from_row_major(n: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), n * n);
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, 0.5 * (data[i * n + j] + data[j * n + i]));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| super::dot(self.row(i), x)).collect()
    }

    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        super::dot(x, &self.mul_vec(y))
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &DenseSym, s: f64) -> DenseSym {
        assert_eq!(self.n, other.n);
        DenseSym {
            n: self.n,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + s * y).collect(),
        }
    }

    pub(crate) fn into_raw(self) -> Vec<f64> {
        self.a
    }
}

/// Lower-triangular Cholesky factor `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    /// row-major, upper part zero
    l: Vec<f64>,
}

impl Cholesky {
    /// Fails with `NotPositiveDefinite` when a pivot drops to
    /// `pivot_tol * max|A|` or below.
    pub fn factor(a: &DenseSym, pivot_tol: f64) -> Result<Self> {
        let n = a.dim();
        let scale = a.max_abs();
        let floor = pivot_tol * scale;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= floor || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { row: j, pivot: d });
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                s -= super::dot(ri, rj);
                l[i * n + j] = s / d;
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// `L^{-1} b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let s = super::dot(&self.l[i * n..i * n + i], &x[..i]);
            x[i] = (x[i] - s) / self.l[i * n + i];
        }
        x
    }

    /// `L^{-T} b`.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            x[i] /= self.l[i * n + i];
            let xi = x[i];
            for k in 0..i {
                x[k] -= self.l[i * n + k] * xi;
            }
        }
        x
    }

    /// `A^{-1} b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// `L L^T` reassembled, for verification.
    pub fn reconstruct(&self) -> DenseSym {
        let n = self.n;
        let mut m = DenseSym::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let s = super::dot(&self.l[i * n..i * n + j + 1], &self.l[j * n..j * n + j + 1]);
                m.set(i, j, s);
            }
        }
        m
    }
}
