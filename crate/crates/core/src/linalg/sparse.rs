use std::collections::BTreeMap;

use super::DenseSym;

/// Symmetric sparse matrix; only the lower triangle (`col <= row`) is stored,
/// in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// Accumulates `(i, j, v)` contributions in any order and either triangle.
#[derive(Debug, Clone)]
pub struct SparseSymBuilder {
    dim: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl SparseSymBuilder {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "sparse matrix dimension must be at least 1");
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.dim && j < self.dim, "index out of range");
        let key = if j <= i { (i, j) } else { (j, i) };
        *self.entries.entry(key).or_insert(0.0) += v;
    }

    /// Sums duplicates and drops exact zeros.
    pub fn finalize(self) -> SparseSym {
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals = Vec::with_capacity(self.entries.len());
        for (&(i, j), &v) in &self.entries {
            if v != 0.0 {
                row_ptr[i + 1] += 1;
                cols.push(j);
                vals.push(v);
            }
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

impl SparseSym {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (lower-triangle) entries.
    pub fn nnz_lower(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries `(row, col, value)` with `col <= row`.
    pub fn lower_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.cols[p], self.vals[p]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if j <= i { (i, j) } else { (j, i) };
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(p) => self.vals[range.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.dim {
            let xi = x[i];
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[p];
                let v = self.vals[p];
                acc += v * x[j];
                if j != i {
                    y[j] += v * xi;
                }
            }
            y[i] += acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        super::dot(x, &self.mul_vec(y))
    }

    /// Sum of all entries, `1^T A 1`.
    pub fn total(&self) -> f64 {
        self.lower_entries()
            .map(|(i, j, v)| if i == j { v } else { 2.0 * v })
            .sum()
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> SparseSym {
        let mut local = vec![usize::MAX; self.dim];
        for (k, &g) in idx.iter().enumerate() {
            local[g] = k;
        }
        let mut b = SparseSymBuilder::new(idx.len().max(1));
        for (i, j, v) in self.lower_entries() {
            let (li, lj) = (local[i], local[j]);
            if li != usize::MAX && lj != usize::MAX {
                b.add(li, lj, v);
            }
        }
        b.finalize()
    }

    /// Dense principal submatrix on `idx`.
    pub fn principal_dense(&self, idx: &[usize]) -> DenseSym {
        let mut local = vec![usize::MAX; self.dim];
        for (k, &g) in idx.iter().enumerate() {
            local[g] = k;
        }
        let mut d = DenseSym::zeros(idx.len());
        for (i, j, v) in self.lower_entries() {
            let (li, lj) = (local[i], local[j]);
            if li != usize::MAX && lj != usize::MAX {
                d.set(li, lj, v);
            }
        }
        d
    }

    /// Off-diagonal coupling block `A[rows, cols]` as one sparse list per row:
    /// `(local column index, value)`. The two index sets must be disjoint.
    pub fn coupling(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<(usize, f64)>> {
        let mut row_local = vec![usize::MAX; self.dim];
        let mut col_local = vec![usize::MAX; self.dim];
        for (k, &g) in rows.iter().enumerate() {
            row_local[g] = k;
        }
        for (k, &g) in cols.iter().enumerate() {
            col_local[g] = k;
        }
        let mut out = vec![Vec::new(); rows.len()];
        for (i, j, v) in self.lower_entries() {
            if row_local[i] != usize::MAX && col_local[j] != usize::MAX {
                out[row_local[i]].push((col_local[j], v));
            }
            if i != j && row_local[j] != usize::MAX && col_local[i] != usize::MAX {
                out[row_local[j]].push((col_local[i], v));
            }
        }
        for row in &mut out {
            row.sort_by_key(|&(c, _)| c);
        }
        out
    }

    pub fn to_dense(&self) -> DenseSym {
        let mut d = DenseSym::zeros(self.dim);
        for (i, j, v) in self.lower_entries() {
            d.set(i, j, v);
        }
        d
    }
}
