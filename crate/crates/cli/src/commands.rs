//! One function per subcommand. Each validates its record, computes, and
//! hands every file to the [`Output`] writer; nothing touches the disk until
//! the computation is done.

use dumbbell::asymptotics::{sweep, SweepOptions};
use dumbbell::counterexample::{check_limit_inequality, probe};
use dumbbell::fem::{assemble, solve_neumann_with, solve_steklov_with, spectrum_to_csv, spectrum_to_json, trace_polyline};
use dumbbell::geometry::make_dumbbell;
use dumbbell::limit1d::{
    sigma1_closed_form, sigma1_determinant_oracle, solve_dirichlet_weighted, solve_dynamic_bc, transcendental_roots,
    Limit1DProblem,
};
use dumbbell::mesh::{mesh_disk, mesh_dumbbell, mesh_quality, mesh_rectangle, TriMesh};
use dumbbell::output::CsvTable;
use dumbbell::{Error, NumericSettings};
use serde_json::json;

use crate::config::{
    CounterexampleConfig, Domain, DomainConfig, FemConfig, FemProblem, LimitConfig, LimitProblem, MeshConfig,
    SweepConfig,
};
use crate::{Failure, Output};

/// RK4 steps of the determinant oracle written next to the closed form.
const ORACLE_STEPS: usize = 4000;

pub fn limit(cfg: &LimitConfig, out: &mut Output) -> Result<(), Failure> {
    let p = match cfg.problem {
        LimitProblem::Ep1 | LimitProblem::Roots => {
            Limit1DProblem::planar(cfg.length, cfg.p1, cfg.p2).with_profile(cfg.profile.clone())
        }
        LimitProblem::Ep2 | LimitProblem::Ep3 | LimitProblem::Ep4 => {
            if cfg.dim < 3 {
                return Err(Failure::Validation(format!("{:?} needs dim >= 3, got {}", cfg.problem, cfg.dim)));
            }
            let eps = if cfg.problem == LimitProblem::Ep4 { cfg.eps } else { 1.0 };
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Failure::Validation(format!("eps must be positive, got {eps}")));
            }
            Limit1DProblem::thin_tube(cfg.dim, cfg.profile.clone(), cfg.length, cfg.p1, cfg.p2, eps)
                .with_convention(cfg.convention)
        }
    };
    p.validate()?;
    match cfg.problem {
        LimitProblem::Roots => {
            if cfg.profile != dumbbell::geometry::TubeProfile::Constant(1.0) {
                return Err(Failure::Validation("roots are defined for rho = 1 only".into()));
            }
            let w = transcendental_roots(cfg.length, cfg.p1, cfg.p2, cfg.k)?;
            let mut t = CsvTable::new(["k", "w", "w_squared"]);
            for (i, &wi) in w.iter().enumerate() {
                t.push_indexed(i + 1, &[wi, wi * wi]);
            }
            out.add("roots.csv", t.to_string());
            out.add("roots.json", pretty(&json!({ "problem": "roots", "w": w }))?);
        }
        LimitProblem::Ep1 | LimitProblem::Ep4 => {
            let s = solve_dynamic_bc(&p, cfg.n, cfg.k)?;
            out.add("spectrum.csv", s.to_csv());
            out.add("eigenfunctions.csv", s.eigenfunctions_csv());
            out.add("spectrum.json", s.to_json()?);
        }
        LimitProblem::Ep3 => {
            if cfg.k == 0 {
                return Err(Failure::Validation("k must be at least 1".into()));
            }
            let s = solve_dirichlet_weighted(&p, cfg.n, cfg.k)?;
            // indices start at 1 for this problem
            let mut t = CsvTable::new(["k", "value"]);
            for (i, &v) in s.values.iter().enumerate() {
                t.push_indexed(i + 1, &[v]);
            }
            out.add("spectrum.csv", t.to_string());
            out.add("eigenfunctions.csv", s.eigenfunctions_csv());
            out.add("spectrum.json", s.to_json()?);
        }
        LimitProblem::Ep2 => {
            let closed = sigma1_closed_form(&p)?;
            let oracle = sigma1_determinant_oracle(&p, ORACLE_STEPS)?;
            let mut t = CsvTable::new(["k", "value"]);
            t.push_indexed(1, &[closed]);
            out.add("spectrum.csv", t.to_string());
            out.add(
                "spectrum.json",
                pretty(&json!({
                    "problem": "ep2",
                    "sigma1_closed_form": closed,
                    "sigma1_determinant_oracle": oracle,
                    "relative_difference": (closed - oracle).abs() / closed,
                }))?,
            );
        }
    }
    Ok(())
}

fn build_mesh(d: &DomainConfig) -> Result<TriMesh, Failure> {
    let h = d.mesh_size();
    if !(h > 0.0) || !h.is_finite() {
        return Err(Failure::Validation(format!("mesh size must be positive, got {h}")));
    }
    Ok(match d.domain {
        Domain::Dumbbell => {
            let spec = d.dumbbell().resolved_for(h);
            spec.validate()?;
            mesh_dumbbell(&make_dumbbell(&spec)?, h, d.n_y)?
        }
        Domain::Disk => {
            if !(d.radius > 0.0) || !d.radius.is_finite() {
                return Err(Failure::Validation(format!("radius must be positive, got {}", d.radius)));
            }
            mesh_disk(d.radius, h)?
        }
        Domain::Rectangle => {
            if !(d.width > 0.0 && d.height > 0.0) || !(d.width * d.height).is_finite() {
                return Err(Failure::Validation(format!(
                    "rectangle sides must be positive, got {} x {}",
                    d.width, d.height
                )));
            }
            let nx = (d.width / h).ceil().max(1.0) as usize;
            let ny = (d.height / h).ceil().max(1.0) as usize;
            mesh_rectangle(d.width, d.height, nx, ny)?
        }
    })
}

fn default_polyline(d: &DomainConfig, mesh: &TriMesh) -> Vec<[f64; 2]> {
    match d.domain {
        Domain::Rectangle => vec![[0.0, 0.5 * d.height], [d.width, 0.5 * d.height]],
        _ => {
            let (lo, hi) = mesh.bounding_box();
            vec![[lo[0], 0.0], [hi[0], 0.0]]
        }
    }
}

pub fn fem(cfg: &FemConfig, settings: &NumericSettings, out: &mut Output) -> Result<(), Failure> {
    let o = &cfg.options;
    if o.traces && o.trace_per_segment == 0 {
        return Err(Failure::Validation("trace_per_segment must be positive".into()));
    }
    if o.k == 0 && o.problem != FemProblem::Steklov {
        return Err(Failure::Validation("Neumann needs k >= 1".into()));
    }
    let mesh = build_mesh(&cfg.domain)?;
    let sys = assemble(&mesh)?;
    let polyline = o.trace_polyline.clone().unwrap_or_else(|| default_polyline(&cfg.domain, &mesh));
    out.add("mesh.json", mesh.to_json()?);
    if matches!(o.problem, FemProblem::Steklov | FemProblem::Both) {
        let res = solve_steklov_with(&sys, o.k, settings)?;
        let traces = if o.traces {
            vec![trace_polyline(&mesh, &res.extended, &polyline, o.trace_per_segment)]
        } else {
            vec![]
        };
        out.add("steklov.csv", spectrum_to_csv(res.values()));
        out.add("steklov.json", spectrum_to_json("steklov", res.values(), traces)?);
    }
    if matches!(o.problem, FemProblem::Neumann | FemProblem::Both) {
        let spec = solve_neumann_with(&sys, o.k, settings)?;
        let traces = if o.traces {
            vec![trace_polyline(&mesh, &spec.vectors, &polyline, o.trace_per_segment)]
        } else {
            vec![]
        };
        // indices start at 1: the constant mode is not listed
        let mut t = CsvTable::new(["k", "value"]);
        for (i, &v) in spec.values.iter().enumerate() {
            t.push_indexed(i + 1, &[v]);
        }
        out.add("neumann.csv", t.to_string());
        out.add("neumann.json", spectrum_to_json("neumann", &spec.values, traces)?);
    }
    out.note("mesh", serde_json::to_value(mesh_quality(&mesh)).map_err(Error::from)?);
    Ok(())
}

pub fn sweep_cmd(cfg: &SweepConfig, settings: &NumericSettings, out: &mut Output) -> Result<(), Failure> {
    if cfg.eps.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: cfg.eps.len() }.into());
    }
    let spec = dumbbell::geometry::DumbbellSpec::new(cfg.r1, cfg.r2, cfg.length, cfg.profile.clone(), cfg.eps[0]);
    let options = SweepOptions {
        h: cfg.h,
        n_y: cfg.n_y,
        trace_samples: cfg.trace_samples,
        neumann: cfg.neumann,
        settings: *settings,
    };
    let report = sweep(&spec, &cfg.eps, cfg.k, &options)?;
    out.add("sweep.csv", report.to_csv());
    out.add("sweep.json", report.to_json()?);
    out.add("plot_data.csv", report.plot_data_csv());
    let mut fits = CsvTable::new(["k", "gamma", "c", "residual", "mu_k"]);
    for k in 1..=cfg.k {
        if let Ok(f) = report.fit(k) {
            let mu = report.limit.as_ref().map_or(f64::NAN, |l| l.values[k]);
            fits.push_indexed(k, &[f.gamma, f.c, f.residual, mu]);
        }
    }
    out.add("fits.csv", fits.to_string());
    if let Some(f) = &report.failure {
        return Err(Failure::Numerical(format!("sweep stopped at eps = {}: {}", f.eps, f.message)));
    }
    Ok(())
}

pub fn counterexample(cfg: &CounterexampleConfig, settings: &NumericSettings, out: &mut Output) -> Result<(), Failure> {
    let report = if cfg.fem {
        if cfg.eps.is_empty() {
            return Err(Failure::Validation("eps list is empty".into()));
        }
        if !(cfg.h > 0.0) || !cfg.h.is_finite() {
            return Err(Failure::Validation(format!("mesh size must be positive, got {}", cfg.h)));
        }
        probe(cfg.length, &cfg.eps, cfg.h, settings)?
    } else {
        check_limit_inequality(cfg.length)?
    };
    out.add("counterexample.json", report.to_json()?);
    out.add("summary.txt", report.summary());
    Ok(())
}

pub fn mesh(cfg: &MeshConfig, out: &mut Output) -> Result<(), Failure> {
    let mesh = build_mesh(&cfg.0)?;
    out.add("mesh.json", mesh.to_json()?);
    let q = mesh_quality(&mesh);
    out.note("mesh", serde_json::to_value(q).map_err(Error::from)?);
    out.note(
        "measures",
        json!({
            "area": mesh.area(),
            "perimeter": mesh.boundary_length(None),
            "euler_characteristic": mesh.euler_characteristic(),
        }),
    );
    Ok(())
}

fn pretty(v: &serde_json::Value) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v).map_err(Error::from)?)
}
