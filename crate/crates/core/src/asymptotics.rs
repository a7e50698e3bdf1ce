//! Width sweeps of the FEM solvers, power-law fits and comparison of tube
//! eigenfunctions with the one-dimensional limit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fem::{assemble, solve_neumann_with, solve_steklov_with, SteklovResult};
use crate::geometry::{make_dumbbell, DumbbellSpec};
use crate::limit1d::{solve_dynamic_bc, Limit1DProblem, Spectrum1D};
use crate::mesh::{mesh_dumbbell, mesh_quality, MeshQuality, PointLocator, TriMesh};
use crate::output::CsvTable;
use crate::par::map_indexed;
use crate::{Error, NumericSettings, Result};

/// Grid size of the 1D reference spectrum attached to a sweep.
pub const LIMIT_GRID: usize = 2048;

/// Mesh and sampling controls of a sweep. The mesh size is the same for
/// every width so discretization error stays comparable across the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    /// Mesh size; `None` means `min(0.1, L / 60)`.
    pub h: Option<f64>,
    /// Cross-tube layers (even).
    pub n_y: usize,
    /// Midline samples per eigenfunction trace.
    pub trace_samples: usize,
    /// Also compute the first nonzero Neumann eigenvalue.
    pub neumann: bool,
    pub settings: NumericSettings,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            h: None,
            n_y: 4,
            trace_samples: 129,
            neumann: true,
            settings: NumericSettings::default(),
        }
    }
}

impl SweepOptions {
    pub fn mesh_size(&self, spec: &DumbbellSpec) -> f64 {
        self.h.unwrap_or_else(|| 0.1f64.min(spec.length / 60.0))
    }
}

/// Eigenfunction samples along the midline `x2 = 0` of the tube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeTrace {
    pub k: usize,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

/// Everything computed at one width.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub h: f64,
    pub mesh: MeshQuality,
    /// `sigma_0 ..= sigma_{k_max}`.
    pub sigma: Vec<f64>,
    pub mu1: Option<f64>,
    /// Area and perimeter of the realized polygon.
    pub area: f64,
    pub perimeter: f64,
    pub traces: Vec<TubeTrace>,
    /// Mean of eigenfunction `k` over the interior nodes of each disk.
    pub plateaus: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub eps: f64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: DumbbellSpec,
    pub k_max: usize,
    pub options: SweepOptions,
    /// Records in the (strictly decreasing) order of the requested widths.
    pub records: Vec<SweepRecord>,
    /// Set when the sweep stopped early; `records` holds the widths done
    /// before the failing one.
    pub failure: Option<SweepFailure>,
    /// The 1D problem with dynamic boundary conditions for this dumbbell.
    pub limit: Option<Spectrum1D>,
}

/// `sigma ~ c * eps^gamma` by least squares in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub gamma: f64,
    pub c: f64,
    /// Root mean square of the log deviations.
    pub residual: f64,
    pub n_points: usize,
}

pub fn fit_rate(eps: &[f64], sigma: &[f64]) -> Result<RateFit> {
    if eps.len() != sigma.len() {
        return Err(Error::InvalidArgument(format!(
            "{} widths but {} eigenvalues",
            eps.len(),
            sigma.len()
        )));
    }
    if eps.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: eps.len() });
    }
    for (index, &value) in eps.iter().chain(sigma).enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveValue { index: index % eps.len(), value });
        }
    }
    let n = eps.len() as f64;
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = sigma.iter().map(|s| s.ln()).collect();
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("widths must not all coincide".into()));
    }
    let gamma = sxy / sxx;
    let intercept = my - gamma * mx;
    let ss: f64 = x.iter().zip(&y).map(|(xi, yi)| (yi - intercept - gamma * xi).powi(2)).sum();
    Ok(RateFit {
        gamma,
        c: intercept.exp(),
        residual: (ss / n).sqrt(),
        n_points: eps.len(),
    })
}

/// Local exponents `log(s_i / s_{i+1}) / log(e_i / e_{i+1})` between
/// consecutive points.
pub fn successive_exponents(eps: &[f64], sigma: &[f64]) -> Vec<f64> {
    eps.windows(2)
        .zip(sigma.windows(2))
        .map(|(e, s)| (s[0] / s[1]).ln() / (e[0] / e[1]).ln())
        .collect()
}

/// Samples the P1 interpolant of Steklov eigenfunction `k` at `n_samples`
/// uniform points of the midline segment `[-L/2, L/2] x {0}`.
pub fn trace_tube(mesh: &TriMesh, result: &SteklovResult, length: f64, k: usize, n_samples: usize) -> Result<TubeTrace> {
    trace_with(&PointLocator::new(mesh), result, length, k, n_samples)
}

fn trace_with(locator: &PointLocator, result: &SteklovResult, length: f64, k: usize, n_samples: usize) -> Result<TubeTrace> {
    if n_samples < 64 {
        return Err(Error::InvalidArgument(format!("need at least 64 samples, got {n_samples}")));
    }
    let f = result.extended.get(k).ok_or_else(|| {
        Error::InvalidArgument(format!("k = {k} exceeds the {} computed pairs", result.extended.len()))
    })?;
    let half = 0.5 * length;
    let x: Vec<f64> = (0..n_samples)
        .map(|i| match i {
            0 => -half,
            i if i == n_samples - 1 => half,
            i => -half + length * i as f64 / (n_samples - 1) as f64,
        })
        .collect();
    let values = x
        .iter()
        .map(|&xi| locator.interpolate(f, [xi, 0.0]).ok_or(Error::OutsideTube { x: xi }))
        .collect::<Result<Vec<_>>>()?;
    Ok(TubeTrace { k, x, values })
}

/// Piecewise-linear evaluation of grid samples.
fn interp(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let i = grid.partition_point(|&g| g <= x).clamp(1, grid.len() - 1);
    let t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    values[i - 1] + t * (values[i] - values[i - 1])
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..x.len()).map(|i| 0.5 * (x[i] - x[i - 1]) * (f(i - 1) + f(i))).sum()
}

fn check_compatible(trace: &TubeTrace, limit: &Spectrum1D, k: usize) -> Result<()> {
    if k >= limit.vectors.len() {
        return Err(Error::InvalidArgument(format!("limit spectrum has no pair {k}")));
    }
    let (a, b) = (limit.grid[0], limit.grid[limit.grid.len() - 1]);
    let (lo, hi) = (trace.x[0], trace.x[trace.x.len() - 1]);
    let tol = 1e-9 * (b - a);
    if (lo - a).abs() > tol || (hi - b).abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "trace covers [{lo}, {hi}] but the limit problem lives on [{a}, {b}]"
        )));
    }
    Ok(())
}

/// Relative `L^2(-L/2, L/2)` distance between the trace and the limit
/// eigenfunction `k`, after normalizing both and matching signs.
pub fn compare_eigenfunctions(trace: &TubeTrace, limit: &Spectrum1D, k: usize) -> Result<f64> {
    check_compatible(trace, limit, k)?;
    let v: Vec<f64> = trace.x.iter().map(|&x| interp(&limit.grid, &limit.vectors[k], x)).collect();
    let t = &trace.values;
    let nt = trapezoid(&trace.x, |i| t[i] * t[i]).sqrt();
    let nv = trapezoid(&trace.x, |i| v[i] * v[i]).sqrt();
    if nt < 1e-12 || nv < 1e-12 {
        return Err(Error::ZeroFunction);
    }
    let sign = if trapezoid(&trace.x, |i| t[i] * v[i]) < 0.0 { -1.0 } else { 1.0 };
    let diff = trapezoid(&trace.x, |i| (sign * t[i] / nt - v[i] / nv).powi(2)).sqrt();
    Ok(diff)
}

/// `|c_i - V_k(-+L/2)|` for the disk plateaus of record eigenfunction `k`.
///
/// FEM eigenfunctions have unit `L^2` norm on the boundary. Its thin-tube
/// limit is `2 int V^2 + P_1 V(-L/2)^2 + P_2 V(L/2)^2`, twice the Gram norm of
/// the 1D problem (endpoint weights `P_i / 2`), so `V_k / sqrt(2)` is the
/// matching reference. The sign is fixed by the midline trace.
pub fn plateau_gaps(record: &SweepRecord, limit: &Spectrum1D, k: usize) -> Result<[f64; 2]> {
    let trace = record
        .traces
        .get(k)
        .ok_or_else(|| Error::InvalidArgument(format!("record has no trace {k}")))?;
    check_compatible(trace, limit, k)?;
    let v = &limit.vectors[k];
    let vi: Vec<f64> = trace.x.iter().map(|&x| interp(&limit.grid, v, x)).collect();
    let sign = if trapezoid(&trace.x, |i| trace.values[i] * vi[i]) < 0.0 { -1.0 } else { 1.0 };
    let ends = [v[0], v[v.len() - 1]].map(|e| e / 2f64.sqrt());
    let c = record.plateaus[k];
    Ok([(sign * c[0] - ends[0]).abs(), (sign * c[1] - ends[1]).abs()])
}

/// The 1D problem with dynamic boundary conditions whose spectrum governs
/// `sigma_k / eps` of a planar dumbbell (endpoint masses half the disk
/// perimeters).
pub fn limit_problem(spec: &DumbbellSpec) -> Limit1DProblem {
    Limit1DProblem::planar(spec.length, 2.0 * PI * spec.r1, 2.0 * PI * spec.r2).with_profile(spec.profile.clone())
}

fn disk_plateaus(mesh: &TriMesh, f: &[f64], length: f64) -> [f64; 2] {
    let half = 0.5 * length;
    let tol = 1e-9 * length;
    let mut sum = [0.0; 2];
    let mut count = [0usize; 2];
    for &n in &mesh.interior_nodes {
        let x = mesh.nodes[n][0];
        let side = if x < -half - tol {
            0
        } else if x > half + tol {
            1
        } else {
            continue;
        };
        sum[side] += f[n];
        count[side] += 1;
    }
    [0, 1].map(|s| if count[s] > 0 { sum[s] / count[s] as f64 } else { f64::NAN })
}

/// One width of the sweep: geometry, mesh, Steklov pairs `0..=k_max`,
/// optionally `mu_1`, midline traces and disk plateaus.
pub fn sweep_point(spec: &DumbbellSpec, k_max: usize, options: &SweepOptions) -> Result<SweepRecord> {
    let h = options.mesh_size(spec);
    let spec = spec.clone().resolved_for(h);
    let geom = make_dumbbell(&spec)?;
    let mesh = mesh_dumbbell(&geom, h, options.n_y)?;
    let sys = assemble(&mesh)?;
    let settings = &options.settings;
    let steklov = solve_steklov_with(&sys, k_max, settings)?;
    let mu1 = if options.neumann {
        Some(solve_neumann_with(&sys, 1, settings)?.values[0])
    } else {
        None
    };
    let locator = PointLocator::new(&mesh);
    let traces = (0..=k_max)
        .map(|k| trace_with(&locator, &steklov, spec.length, k, options.trace_samples))
        .collect::<Result<Vec<_>>>()?;
    let plateaus = steklov.extended.iter().map(|f| disk_plateaus(&mesh, f, spec.length)).collect();
    Ok(SweepRecord {
        eps: spec.eps,
        h,
        mesh: mesh_quality(&mesh),
        sigma: steklov.values().to_vec(),
        mu1,
        area: geom.area()?,
        perimeter: geom.perimeter(None),
        traces,
        plateaus,
    })
}

/// Runs [`sweep_point`] for every width. Precondition violations are
/// returned as errors; a failure at some width ends the sweep with the
/// earlier records kept and the failure recorded.
pub fn sweep(spec_base: &DumbbellSpec, eps_list: &[f64], k_max: usize, options: &SweepOptions) -> Result<SweepReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("empty width list".into()));
    }
    if let Some(w) = eps_list.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(format!(
            "widths must be strictly decreasing, got {} then {}",
            w[0], w[1]
        )));
    }
    if spec_base.dim != 2 {
        return Err(Error::InvalidSpec(format!("only planar dumbbells can be meshed, got dim = {}", spec_base.dim)));
    }
    for &eps in eps_list {
        spec_base.clone().with_eps(eps).validate()?;
    }
    let h = options.mesh_size(spec_base);
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("mesh size must be positive, got {h}")));
    }
    if options.n_y < 2 || !options.n_y.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("n_y must be even and >= 2, got {}", options.n_y)));
    }
    if options.trace_samples < 64 {
        return Err(Error::InvalidArgument(format!(
            "need at least 64 trace samples, got {}",
            options.trace_samples
        )));
    }

    let limit = match solve_dynamic_bc(&limit_problem(spec_base), LIMIT_GRID, k_max) {
        Ok(s) => Some(s),
        Err(e) if e.is_validation() => return Err(e),
        Err(_) => None,
    };

    let outcomes = map_indexed(options.settings.execution, eps_list.len(), |i| {
        sweep_point(&spec_base.clone().with_eps(eps_list[i]), k_max, options)
    });
    let mut records = Vec::with_capacity(eps_list.len());
    let mut failure = None;
    for (outcome, &eps) in outcomes.into_iter().zip(eps_list) {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => {
                failure = Some(SweepFailure { eps, message: e.to_string() });
                break;
            }
        }
    }
    Ok(SweepReport {
        spec: spec_base.clone(),
        k_max,
        options: *options,
        records,
        failure,
        limit,
    })
}

/// Derived quantities of a sweep, as written next to the raw records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepAnalysis {
    /// Limit eigenvalues `mu_0..=mu_{k_max}`.
    pub limit_values: Option<Vec<f64>>,
    /// `fits[k - 1]` for `k = 1..=k_max`; `None` when the data do not allow one.
    pub fits: Vec<Option<RateFit>>,
    pub successive_exponents: Vec<Vec<f64>>,
    /// `[record][k]` relative midline error, `k = 0..=k_max`.
    pub eigenfunction_errors: Vec<Vec<Option<f64>>>,
    /// `[record][k]` plateau gaps for both disks.
    pub plateau_gaps: Vec<Vec<Option<[f64; 2]>>>,
}

impl SweepReport {
    pub fn eps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.eps).collect()
    }

    pub fn sigma(&self, k: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.sigma[k]).collect()
    }

    pub fn fit(&self, k: usize) -> Result<RateFit> {
        if k > self.k_max {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds k_max = {}", self.k_max)));
        }
        fit_rate(&self.eps(), &self.sigma(k))
    }

    /// `compare_eigenfunctions` for every record.
    pub fn eigenfunction_errors(&self, k: usize) -> Result<Vec<f64>> {
        let limit = self.limit.as_ref().ok_or_else(|| Error::InvalidArgument("no limit spectrum".into()))?;
        self.records
            .iter()
            .map(|r| {
                let t = r.traces.get(k).ok_or_else(|| Error::InvalidArgument(format!("no trace {k}")))?;
                compare_eigenfunctions(t, limit, k)
            })
            .collect()
    }

    pub fn analysis(&self) -> SweepAnalysis {
        let limit = self.limit.as_ref();
        SweepAnalysis {
            limit_values: limit.map(|l| l.values.clone()),
            fits: (1..=self.k_max).map(|k| self.fit(k).ok()).collect(),
            successive_exponents: (1..=self.k_max)
                .map(|k| successive_exponents(&self.eps(), &self.sigma(k)))
                .collect(),
            eigenfunction_errors: self
                .records
                .iter()
                .map(|r| {
                    r.traces
                        .iter()
                        .map(|t| limit.and_then(|l| compare_eigenfunctions(t, l, t.k).ok()))
                        .collect()
                })
                .collect(),
            plateau_gaps: self
                .records
                .iter()
                .map(|r| (0..=self.k_max).map(|k| limit.and_then(|l| plateau_gaps(r, l, k).ok())).collect())
                .collect(),
        }
    }

    /// `eps, sigma_0..sigma_k, mu_1, area, perimeter`; a missing `mu_1` is
    /// written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["eps".to_string()];
        header.extend((0..=self.k_max).map(|k| format!("sigma_{k}")));
        header.extend(["mu_1".to_string(), "area".to_string(), "perimeter".to_string()]);
        let mut t = CsvTable::new(header);
        for r in &self.records {
            let mut row = vec![r.eps];
            row.extend(&r.sigma);
            row.extend([r.mu1.unwrap_or(f64::NAN), r.area, r.perimeter]);
            t.push(&row);
        }
        t.to_string()
    }

    /// `eps, sigma_k / eps` per `k`, plus the limit reference `mu_k`.
    pub fn plot_data_csv(&self) -> String {
        let mut header = vec!["eps".to_string()];
        for k in 0..=self.k_max {
            header.push(format!("sigma_{k}_over_eps"));
            header.push(format!("mu_{k}"));
        }
        let mut t = CsvTable::new(header);
        for r in &self.records {
            let mut row = vec![r.eps];
            for k in 0..=self.k_max {
                row.push(r.sigma[k] / r.eps);
                row.push(self.limit.as_ref().map_or(f64::NAN, |l| l.values[k]));
            }
            t.push(&row);
        }
        t.to_string()
    }

    /// Records, limit reference and the [`SweepAnalysis`].
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Export<'a> {
            report: &'a SweepReport,
            analysis: SweepAnalysis,
        }
        Ok(serde_json::to_string_pretty(&Export {
            report: self,
            analysis: self.analysis(),
        })?)
    }
}
