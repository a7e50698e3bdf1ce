//! One-dimensional limit problems of thin-tube dumbbells.
//!
//! All of them share the Sturm-Liouville operator `-(a V')' = lambda b V` on
//! `[-L/2, L/2]`, discretized with P1 elements on a uniform grid: `a` is
//! sampled at element midpoints, `b` at nodes (linearly interpolated inside
//! the consistent mass matrix). Dynamic boundary conditions add point masses
//! `w_b P_i` at the two ends, which is their weak form.
//!
//! Coefficients:
//!
//! * `n = 2`: `a = rho`, `b = 1`.
//! * `n >= 3`: `a = omega_{n-1} rho^{n-1}`, `b = kappa rho^{n-2}` with
//!   `kappa = omega_{n-2}` ([`AngularConvention::Paper`]) or
//!   `(n-1) omega_{n-1}` ([`AngularConvention::Sphere`]).

mod roots;
mod sigma1;

pub use roots::{f_eval, transcendental_roots};
pub use sigma1::{sigma1_closed_form, sigma1_determinant_oracle};

use serde::{Deserialize, Serialize};

use crate::geometry::TubeProfile;
use crate::linalg::tridiag::{lowest_eigenpairs, Tridiag};
use crate::output::{spectrum_csv, CsvTable};
use crate::{unit_ball_volume, Error, Result};

/// Constant in front of the weighted mass term for `n >= 3`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularConvention {
    /// `omega_{n-2}`, as written in the limit problems.
    #[default]
    Paper,
    /// `(n-1) omega_{n-1}`, the surface measure of the unit sphere bounding
    /// a tube cross-section.
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limit1DProblem {
    pub profile: TubeProfile,
    #[serde(alias = "L")]
    pub length: f64,
    pub dim: usize,
    #[serde(alias = "P1")]
    pub p1: f64,
    #[serde(alias = "P2")]
    pub p2: f64,
    /// Endpoint mass is `boundary_weight_scale * P_i`.
    pub boundary_weight_scale: f64,
    #[serde(default)]
    pub convention: AngularConvention,
}

impl Limit1DProblem {
    /// Planar problem with `rho = 1` and endpoint masses `P_i / 2`.
    pub fn planar(length: f64, p1: f64, p2: f64) -> Self {
        Self {
            profile: TubeProfile::Constant(1.0),
            length,
            dim: 2,
            p1,
            p2,
            boundary_weight_scale: 0.5,
            convention: AngularConvention::Paper,
        }
    }

    /// Planar problem for two unit-area disks (`P_1 = P_2 = 2 sqrt(pi)`).
    pub fn unit_area_disks(length: f64) -> Self {
        let p = 2.0 * std::f64::consts::PI.sqrt();
        Self::planar(length, p, p)
    }

    /// Problem in dimension `dim >= 3` for tube width `eps`: endpoint masses
    /// `P_i / eps^{dim-2}`.
    pub fn thin_tube(dim: usize, profile: TubeProfile, length: f64, p1: f64, p2: f64, eps: f64) -> Self {
        Self {
            profile,
            length,
            dim,
            p1,
            p2,
            boundary_weight_scale: eps.powi(2 - dim as i32),
            convention: AngularConvention::Paper,
        }
    }

    pub fn with_profile(mut self, profile: TubeProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_convention(mut self, convention: AngularConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidSpec(format!("L must be positive, got {}", self.length)));
        }
        if !(self.p1 > 0.0 && self.p2 > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "perimeters must be positive, got P1 = {}, P2 = {}",
                self.p1, self.p2
            )));
        }
        if self.dim < 2 {
            return Err(Error::InvalidSpec(format!("dimension must be >= 2, got {}", self.dim)));
        }
        if !(self.boundary_weight_scale > 0.0) || !self.boundary_weight_scale.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "boundary weight must be positive, got {}",
                self.boundary_weight_scale
            )));
        }
        self.profile.validate(self.length)
    }

    /// `kappa` of the weighted mass term (1 for `n = 2`).
    pub fn angular_constant(&self) -> f64 {
        match (self.dim, self.convention) {
            (2, _) => 1.0,
            (n, AngularConvention::Paper) => unit_ball_volume(n - 2),
            (n, AngularConvention::Sphere) => (n - 1) as f64 * unit_ball_volume(n - 1),
        }
    }

    fn stiffness_coefficient(&self, rho: f64) -> f64 {
        match self.dim {
            2 => rho,
            n => unit_ball_volume(n - 1) * rho.powi(n as i32 - 1),
        }
    }

    fn mass_coefficient(&self, rho: f64) -> f64 {
        match self.dim {
            2 => 1.0,
            n => self.angular_constant() * rho.powi(n as i32 - 2),
        }
    }

    pub fn grid(&self, n: usize) -> Vec<f64> {
        let half = 0.5 * self.length;
        (0..=n)
            .map(|i| match i {
                0 => -half,
                i if i == n => half,
                i => -half + self.length * i as f64 / n as f64,
            })
            .collect()
    }

    /// Stiffness and mass on the full grid, without endpoint masses.
    fn assemble(&self, n: usize) -> Result<(Vec<f64>, Tridiag, Tridiag)> {
        let x = self.grid(n);
        let h = self.length / n as f64;
        let b: Vec<f64> = x
            .iter()
            .map(|&xi| self.profile.eval(xi, self.length).map(|r| self.mass_coefficient(r)))
            .collect::<Result<_>>()?;
        let mut k = Tridiag::zeros(n + 1);
        let mut m = Tridiag::zeros(n + 1);
        for e in 0..n {
            let mid = 0.5 * (x[e] + x[e + 1]);
            let a = self.stiffness_coefficient(self.profile.eval(mid, self.length)?) / h;
            k.add_element(e, [[a, -a], [-a, a]]);
            let (bl, br) = (b[e], b[e + 1]);
            m.add_element(
                e,
                [
                    [h * (3.0 * bl + br) / 12.0, h * (bl + br) / 12.0],
                    [h * (bl + br) / 12.0, h * (bl + 3.0 * br) / 12.0],
                ],
            );
        }
        Ok((x, k, m))
    }
}

fn check_grid(n: usize, k_max: usize) -> Result<()> {
    if n < 64 {
        return Err(Error::InvalidGrid(format!("need at least 64 intervals, got {n}")));
    }
    if k_max > n / 4 {
        return Err(Error::InvalidGrid(format!("k_max = {k_max} exceeds N / 4 = {}", n / 4)));
    }
    Ok(())
}

/// Eigenpairs of a 1D problem sampled on the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum1D {
    pub values: Vec<f64>,
    /// Nodal samples, orthonormal in the Gram inner product.
    pub vectors: Vec<Vec<f64>>,
    pub grid: Vec<f64>,
    /// Discrete energy form `int a u' v'` on the full grid.
    #[serde(skip)]
    pub stiffness: Tridiag,
    /// Discrete `int b u v` plus endpoint masses (if any) on the full grid.
    #[serde(skip)]
    pub gram: Tridiag,
}

impl Spectrum1D {
    pub fn inner(&self, i: usize, j: usize) -> f64 {
        self.gram.bilinear(&self.vectors[i], &self.vectors[j])
    }

    pub fn energy(&self, i: usize, j: usize) -> f64 {
        self.stiffness.bilinear(&self.vectors[i], &self.vectors[j])
    }

    /// Largest deviation of the Gram matrix of the vectors from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.vectors.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.inner(i, j) - target).abs());
            }
        }
        worst
    }

    pub fn to_csv(&self) -> String {
        spectrum_csv(&self.values)
    }

    /// `x, phi_0, phi_1, ...` table of the eigenfunction samples.
    pub fn eigenfunctions_csv(&self) -> String {
        let mut header = vec!["x".to_string()];
        header.extend((0..self.vectors.len()).map(|k| format!("phi_{k}")));
        let mut t = CsvTable::new(header);
        for (i, &x) in self.grid.iter().enumerate() {
            let mut row = vec![x];
            row.extend(self.vectors.iter().map(|v| v[i]));
            t.push(&row);
        }
        t.to_string()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Problem with eigenvalue-dependent (dynamic) boundary conditions: the
/// pairs `0 = mu_0 < mu_1 <= ... <= mu_{k_max}` of
/// `int a V' phi' = mu [int b V phi + w_b P_1 V phi(-L/2) + w_b P_2 V phi(L/2)]`.
pub fn solve_dynamic_bc(p: &Limit1DProblem, n: usize, k_max: usize) -> Result<Spectrum1D> {
    p.validate()?;
    check_grid(n, k_max)?;
    let (grid, k, mut m) = p.assemble(n)?;
    m.diag[0] += p.boundary_weight_scale * p.p1;
    m.diag[n] += p.boundary_weight_scale * p.p2;
    let eig = lowest_eigenpairs(&k, &m, k_max + 1)?;
    let mut values = eig.values;
    // the constant is an exact null vector; bisection leaves ~1e-16 noise
    values[0] = values[0].max(0.0);
    Ok(Spectrum1D {
        values,
        vectors: eig.vectors,
        grid,
        stiffness: k,
        gram: m,
    })
}

/// Dirichlet problem at both ends: `values[j]` is `alpha_{j+1}`, the lowest
/// being `alpha_1`; eigenfunction samples include the zero end values.
pub fn solve_dirichlet_weighted(p: &Limit1DProblem, n: usize, k_max: usize) -> Result<Spectrum1D> {
    p.validate()?;
    check_grid(n, k_max)?;
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let (grid, k, m) = p.assemble(n)?;
    let inner = |t: &Tridiag| Tridiag {
        diag: t.diag[1..n].to_vec(),
        off: t.off[1..n - 1].to_vec(),
    };
    let eig = lowest_eigenpairs(&inner(&k), &inner(&m), k_max)?;
    let vectors = eig
        .vectors
        .into_iter()
        .map(|v| {
            let mut full = Vec::with_capacity(n + 1);
            full.push(0.0);
            full.extend(v);
            full.push(0.0);
            full
        })
        .collect();
    Ok(Spectrum1D {
        values: eig.values,
        vectors,
        grid,
        stiffness: k,
        gram: m,
    })
}
