use serde::{Deserialize, Serialize};

/// How data-parallel loops (Schur columns, sweep points) are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise falls
    /// back to sequential execution.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Every tolerance used by the solvers, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericSettings {
    /// Relative residual target for conjugate gradients.
    pub cg_tol: f64,
    /// CG gives up after `cg_max_iter_factor * dim` iterations.
    pub cg_max_iter_factor: usize,
    /// Cholesky rejects pivots below `pivot_tol * max|A|`.
    pub pivot_tol: f64,
    /// Jacobi stops once max off-diagonal <= `jacobi_tol * max|A|`.
    pub jacobi_tol: f64,
    pub jacobi_max_sweeps: usize,
    /// Implicit-QL iterations allowed per eigenvalue (generalized solver).
    pub ql_max_iter: usize,
    pub execution: Execution,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self {
            cg_tol: 1e-10,
            cg_max_iter_factor: 10,
            pivot_tol: 1e-14,
            jacobi_tol: 1e-12,
            jacobi_max_sweeps: 100,
            ql_max_iter: 60,
            execution: Execution::default(),
        }
    }
}

impl NumericSettings {
    pub fn sequential() -> Self {
        Self {
            execution: Execution::Sequential,
            ..Self::default()
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}
