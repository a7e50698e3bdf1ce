use dumbbell::asymptotics::{compare_eigenfunctions, limit_problem, sweep, trace_tube, SweepOptions};
use dumbbell::fem::solve_steklov;
use dumbbell::geometry::{make_dumbbell, DumbbellSpec};
use dumbbell::limit1d::solve_dynamic_bc;
use dumbbell::mesh::mesh_dumbbell;
use dumbbell::{Error, NumericSettings};

fn small_dumbbell(eps: f64, h: f64) -> (DumbbellSpec, dumbbell::mesh::TriMesh) {
    let spec = DumbbellSpec::unit_area_disks(4.0, eps).resolved_for(h);
    let geom = make_dumbbell(&spec).unwrap();
    let mesh = mesh_dumbbell(&geom, h, 4).unwrap();
    (spec, mesh)
}

#[test]
fn constant_mode_traces_flat() {
    let (spec, mesh) = small_dumbbell(0.2, 0.125);
    let res = solve_steklov(&mesh, 1, &NumericSettings::default()).unwrap();
    let t = trace_tube(&mesh, &res, spec.length, 0, 128).unwrap();
    assert_eq!(t.values.len(), 128);
    assert!(t.values.iter().all(|v| v.is_finite()));
    let mean = t.values.iter().sum::<f64>() / 128.0;
    let spread = t.values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    assert!(spread <= 1e-6 * mean.abs(), "spread {spread}, mean {mean}");
}

#[test]
fn first_mode_is_odd_on_symmetric_dumbbell() {
    let (spec, mesh) = small_dumbbell(0.1, 0.1);
    let res = solve_steklov(&mesh, 1, &NumericSettings::default()).unwrap();
    let t = trace_tube(&mesh, &res, spec.length, 1, 129).unwrap();
    let n = t.values.len();
    let max = t.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let even = (0..n).map(|i| 0.5 * (t.values[i] + t.values[n - 1 - i]).abs()).fold(0.0, f64::max);
    assert!(even <= 0.05 * max, "even part {even} vs max {max}");
}

#[test]
fn trace_needs_enough_samples_and_valid_k() {
    let (spec, mesh) = small_dumbbell(0.2, 0.125);
    let res = solve_steklov(&mesh, 1, &NumericSettings::default()).unwrap();
    assert!(trace_tube(&mesh, &res, spec.length, 0, 63).is_err());
    assert!(trace_tube(&mesh, &res, spec.length, 2, 64).is_err());
}

#[test]
fn trace_outside_tube_is_reported() {
    let (spec, mesh) = small_dumbbell(0.2, 0.125);
    let res = solve_steklov(&mesh, 1, &NumericSettings::default()).unwrap();
    // a tube twice as long reaches past the far ends of the disks
    let err = trace_tube(&mesh, &res, 4.0 * spec.length, 1, 64).unwrap_err();
    assert!(matches!(err, Error::OutsideTube { .. }), "{err}");
}

#[test]
fn single_width_sweep_is_valid_but_unfittable() {
    let spec = DumbbellSpec::unit_area_disks(4.0, 0.2);
    let opts = SweepOptions { h: Some(0.125), ..SweepOptions::default() };
    let report = sweep(&spec, &[0.2], 2, &opts).unwrap();
    assert_eq!(report.records.len(), 1);
    assert!(report.failure.is_none());
    let r = &report.records[0];
    assert!(r.sigma[0].abs() <= 1e-9);
    assert!(r.sigma.windows(2).all(|w| w[0] <= w[1]));
    assert!(r.mu1.unwrap() > 0.0);
    assert!(matches!(report.fit(1), Err(Error::InsufficientData { .. })));
    let json = report.to_json().unwrap();
    assert!(json.contains("\"fits\""));
    assert_eq!(report.to_csv().lines().count(), 2);
}

#[test]
fn zero_k_sweep_has_only_constant_column() {
    let spec = DumbbellSpec::unit_area_disks(4.0, 0.2);
    let opts = SweepOptions { h: Some(0.125), neumann: false, ..SweepOptions::default() };
    let report = sweep(&spec, &[0.3, 0.2, 0.15], 0, &opts).unwrap();
    let csv = report.to_csv();
    assert!(csv.starts_with("eps,sigma_0,mu_1,area,perimeter\n"));
    for r in &report.records {
        assert_eq!(r.sigma.len(), 1);
        assert!(r.sigma[0].abs() <= 1e-9);
    }
}

#[test]
fn coarse_sweep_scales_linearly() {
    let spec = DumbbellSpec::unit_area_disks(4.0, 0.2);
    let opts = SweepOptions { h: Some(0.1), neumann: false, ..SweepOptions::default() };
    let report = sweep(&spec, &[0.2, 0.1, 0.05], 2, &opts).unwrap();
    for k in 1..=2 {
        let s = report.sigma(k);
        assert!(s.windows(2).all(|w| w[0] > w[1]), "k={k}: {s:?}");
        let fit = report.fit(k).unwrap();
        assert!((0.85..=1.15).contains(&fit.gamma), "k={k}: {fit:?}");
    }
    let limit = solve_dynamic_bc(&limit_problem(&spec), 1024, 2).unwrap();
    let r = report.records.last().unwrap();
    let e = compare_eigenfunctions(&r.traces[1], &limit, 1).unwrap();
    assert!(e < 0.2, "{e}");
}
