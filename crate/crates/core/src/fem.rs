//! P1 finite elements: assembly, the discrete Dirichlet-to-Neumann map and
//! the Steklov / Neumann spectra.
//!
//! Matrices are kept in mesh-node numbering; [`AssembledSystem::dof_order`]
//! lists interior nodes first and boundary nodes last, which is the block
//! order used by the Schur complement.

use serde::{Deserialize, Serialize};

use crate::geometry::dist;
use crate::linalg::{cg_solve, gen_sym_eig, DenseSym, Gram, SparseSym, SparseSymBuilder, Spectrum};
use crate::mesh::{PointLocator, TriMesh};
use crate::output::spectrum_csv;
use crate::par::try_map_indexed;
use crate::{Error, NumericSettings, Result};

/// Stiffness `K`, boundary mass `B` and domain mass `M` of one mesh.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: SparseSym,
    pub boundary_mass: SparseSym,
    pub mass: SparseSym,
    /// Interior nodes followed by boundary nodes (both ascending).
    pub dof_order: Vec<usize>,
    pub n_interior: usize,
    /// Upper bound on the largest eigenvalue of `(K, M)`:
    /// `max_e trace(K_e) / lambda_min(M_e)` with `lambda_min(M_e) = area / 12`.
    pub spectral_bound: f64,
}

impl AssembledSystem {
    pub fn interior(&self) -> &[usize] {
        &self.dof_order[..self.n_interior]
    }

    pub fn boundary(&self) -> &[usize] {
        &self.dof_order[self.n_interior..]
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_order.len()
    }
}

/// `grad phi_i . grad phi_j * area` for the triangle `p`.
pub fn element_stiffness(p: [[f64; 2]; 3]) -> [[f64; 3]; 3] {
    let area2 = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
    // gradient of phi_i is (b_i, c_i) / area2
    let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
    let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2);
        }
    }
    k
}

/// Exact mass matrix of a boundary edge of length `len`.
pub fn edge_mass(len: f64) -> [[f64; 2]; 2] {
    [[len / 3.0, len / 6.0], [len / 6.0, len / 3.0]]
}

/// Exact mass matrix of a triangle of area `area`.
pub fn triangle_mass(area: f64) -> [[f64; 3]; 3] {
    let (d, o) = (area / 6.0, area / 12.0);
    [[d, o, o], [o, d, o], [o, o, d]]
}

pub fn assemble(mesh: &TriMesh) -> Result<AssembledSystem> {
    let n = mesh.n_nodes();
    let (lo, hi) = mesh.bounding_box();
    let scale = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    let mut k = SparseSymBuilder::new(n);
    let mut m = SparseSymBuilder::new(n);
    let mut b = SparseSymBuilder::new(n);
    let mut spectral_bound = 0.0f64;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        if !(area >= 1e-14 * scale * scale) {
            return Err(Error::DegenerateTriangle { index: t, area });
        }
        let ke = element_stiffness(tri.map(|v| mesh.nodes[v]));
        let me = triangle_mass(area);
        spectral_bound = spectral_bound.max(12.0 * (ke[0][0] + ke[1][1] + ke[2][2]) / area);
        for i in 0..3 {
            for j in 0..=i {
                k.add(tri[i], tri[j], ke[i][j]);
                m.add(tri[i], tri[j], me[i][j]);
            }
        }
    }
    for e in &mesh.boundary_edges {
        let be = edge_mass(dist(mesh.nodes[e.i], mesh.nodes[e.j]));
        b.add(e.i, e.i, be[0][0]);
        b.add(e.j, e.j, be[1][1]);
        b.add(e.i, e.j, be[0][1]);
    }
    let mut dof_order = mesh.interior_nodes.clone();
    dof_order.extend_from_slice(&mesh.boundary_nodes);
    Ok(AssembledSystem {
        stiffness: k.finalize(),
        boundary_mass: b.finalize(),
        mass: m.finalize(),
        dof_order,
        n_interior: mesh.interior_nodes.len(),
        spectral_bound,
    })
}

/// `S = K_GG - K_GI K_II^{-1} K_IG` on the boundary nodes, one CG solve per
/// boundary column (columns run concurrently under parallel execution).
pub fn dtn_schur(sys: &AssembledSystem, settings: &NumericSettings) -> Result<DenseSym> {
    let (interior, boundary) = (sys.interior(), sys.boundary());
    let k_gg = sys.stiffness.principal_dense(boundary);
    if interior.is_empty() {
        return Ok(k_gg);
    }
    let k_ii = sys.stiffness.principal(interior);
    // row g lists the interior couplings of boundary node g (= column g of K_IG)
    let k_gi = sys.stiffness.coupling(boundary, interior);
    let ng = boundary.len();
    let columns = try_map_indexed(settings.execution, ng, |g| -> Result<Vec<f64>> {
        let mut rhs = vec![0.0; interior.len()];
        for &(i, v) in &k_gi[g] {
            rhs[i] = v;
        }
        let x = if k_gi[g].is_empty() {
            rhs
        } else {
            cg_solve(&k_ii, &rhs, settings.cg_tol, settings.cg_max_iter_factor)?
        };
        Ok((0..ng)
            .map(|a| k_gg.get(a, g) - k_gi[a].iter().map(|&(i, v)| v * x[i]).sum::<f64>())
            .collect())
    })?;
    let mut data = vec![0.0; ng * ng];
    for (g, col) in columns.iter().enumerate() {
        for (a, v) in col.iter().enumerate() {
            data[a * ng + g] = *v;
        }
    }
    let mut s = DenseSym::from_row_major(ng, &data);
    // The exact complement maps constants to zero (their harmonic extension
    // is constant); remove the CG residual from the row sums so sigma_0 = 0
    // holds to rounding instead of to the solver tolerance.
    for a in 0..ng {
        let row_sum: f64 = s.row(a).iter().sum();
        s.set(a, a, s.get(a, a) - row_sum);
    }
    Ok(s)
}

/// Steklov pairs `0 = sigma_0 <= sigma_1 <= ...`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteklovResult {
    /// Pencil `(S, B_GG)` on the boundary nodes; vectors are B-orthonormal,
    /// i.e. normalized in `L^2` of the boundary.
    pub spectrum: Spectrum,
    /// Mesh nodes the spectrum vectors live on.
    pub boundary_nodes: Vec<usize>,
    /// Full nodal eigenfunctions: boundary values plus harmonic extension.
    pub extended: Vec<Vec<f64>>,
}

impl SteklovResult {
    pub fn values(&self) -> &[f64] {
        &self.spectrum.values
    }
}

pub fn solve_steklov(mesh: &TriMesh, k_max: usize, settings: &NumericSettings) -> Result<SteklovResult> {
    solve_steklov_with(&assemble(mesh)?, k_max, settings)
}

/// Returns the pairs `0..=k_max`.
pub fn solve_steklov_with(sys: &AssembledSystem, k_max: usize, settings: &NumericSettings) -> Result<SteklovResult> {
    let boundary = sys.boundary();
    if k_max >= boundary.len() {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} needs more than {} boundary nodes",
            boundary.len()
        )));
    }
    let s = dtn_schur(sys, settings)?;
    let b = sys.boundary_mass.principal_dense(boundary);
    let mut spectrum = gen_sym_eig(&s, &b, settings)?;
    spectrum.truncate(k_max + 1);
    spectrum.gram = Gram::BoundaryMass;
    for v in &mut spectrum.vectors {
        orient(v);
    }
    let extended = harmonic_extension(sys, &spectrum.vectors, settings)?;
    Ok(SteklovResult {
        spectrum,
        boundary_nodes: boundary.to_vec(),
        extended,
    })
}

/// Extends boundary values harmonically: `u_I = -K_II^{-1} K_IG u_G`.
fn harmonic_extension(sys: &AssembledSystem, traces: &[Vec<f64>], settings: &NumericSettings) -> Result<Vec<Vec<f64>>> {
    let (interior, boundary) = (sys.interior(), sys.boundary());
    let k_ii = (!interior.is_empty()).then(|| sys.stiffness.principal(interior));
    let k_ig = sys.stiffness.coupling(interior, boundary);
    try_map_indexed(settings.execution, traces.len(), |k| -> Result<Vec<f64>> {
        let ug = &traces[k];
        let mut full = vec![0.0; sys.n_dofs()];
        for (&node, &v) in boundary.iter().zip(ug) {
            full[node] = v;
        }
        if let Some(k_ii) = &k_ii {
            let rhs: Vec<f64> = k_ig.iter().map(|row| -row.iter().map(|&(g, v)| v * ug[g]).sum::<f64>()).collect();
            let ui = cg_solve(k_ii, &rhs, settings.cg_tol, settings.cg_max_iter_factor)?;
            for (&node, v) in interior.iter().zip(ui) {
                full[node] = v;
            }
        }
        Ok(full)
    })
}

pub fn solve_neumann(mesh: &TriMesh, k_max: usize, settings: &NumericSettings) -> Result<Spectrum> {
    solve_neumann_with(&assemble(mesh)?, k_max, settings)
}

/// Lowest `k_max` nonzero Neumann eigenvalues `mu_1 <= ... <= mu_{k_max}`
/// with M-orthonormal eigenvectors in mesh-node numbering.
///
/// The constant mode is deflated by the rank-one shift
/// `K + s (M1)(M1)^T / (1^T M 1)`, which moves it to eigenvalue `s` and leaves
/// the M-orthogonal complement untouched; `s` is twice
/// [`AssembledSystem::spectral_bound`], so the constant becomes the top mode
/// and is dropped.
pub fn solve_neumann_with(sys: &AssembledSystem, k_max: usize, settings: &NumericSettings) -> Result<Spectrum> {
    let n = sys.n_dofs();
    if k_max == 0 || k_max >= n {
        return Err(Error::InvalidArgument(format!("need 1 <= k_max < {n}, got {k_max}")));
    }
    let m1 = sys.mass.mul_vec(&vec![1.0; n]);
    let total: f64 = m1.iter().sum();
    let shift = 2.0 * sys.spectral_bound;
    let mut k = sys.stiffness.to_dense();
    for i in 0..n {
        for j in 0..=i {
            k.set(i, j, k.get(i, j) + shift * m1[i] * m1[j] / total);
        }
    }
    let mut spectrum = gen_sym_eig(&k, &sys.mass.to_dense(), settings)?;
    spectrum.truncate(k_max);
    spectrum.gram = Gram::DomainMass;
    for v in &mut spectrum.vectors {
        orient(v);
    }
    Ok(spectrum)
}

/// Sign convention: the entry of largest magnitude is positive.
fn orient(v: &mut [f64]) {
    let pivot = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Samples of nodal functions along a polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub polyline: Vec<[f64; 2]>,
    /// Arc length along the polyline.
    pub s: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    /// `values[k][i]`: function `k` at `points[i]` (`None` outside the mesh).
    pub values: Vec<Vec<Option<f64>>>,
}

/// Samples `functions` at `per_segment` evenly spaced points on each segment
/// of `polyline` (plus the final vertex).
pub fn trace_polyline(mesh: &TriMesh, functions: &[Vec<f64>], polyline: &[[f64; 2]], per_segment: usize) -> Trace {
    let locator = PointLocator::new(mesh);
    let per_segment = per_segment.max(1);
    let mut points = Vec::new();
    let mut s = Vec::new();
    let mut run = 0.0;
    for w in polyline.windows(2) {
        let len = dist(w[0], w[1]);
        for q in 0..per_segment {
            let t = q as f64 / per_segment as f64;
            points.push([w[0][0] + t * (w[1][0] - w[0][0]), w[0][1] + t * (w[1][1] - w[0][1])]);
            s.push(run + t * len);
        }
        run += len;
    }
    if let Some(&last) = polyline.last() {
        points.push(last);
        s.push(run);
    }
    let values = functions
        .iter()
        .map(|f| points.iter().map(|&p| locator.interpolate(f, p)).collect())
        .collect();
    Trace {
        polyline: polyline.to_vec(),
        s,
        points,
        values,
    }
}

/// JSON document for an exported spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumExport {
    pub problem: String,
    pub values: Vec<f64>,
    pub traces: Vec<Trace>,
}

pub fn spectrum_to_csv(values: &[f64]) -> String {
    spectrum_csv(values)
}

pub fn spectrum_to_json(problem: &str, values: &[f64], traces: Vec<Trace>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SpectrumExport {
        problem: problem.to_string(),
        values: values.to_vec(),
        traces,
    })?)
}
