//! A dumbbell with `mu_1 |Omega| < sigma_1 P(Omega)`: two unit-area disks
//! joined by a long straight tube.
//!
//! At the level of the limit problem the argument reads: for
//! `L > (3/4)(sqrt 2 + 1) pi^{3/2}` the characteristic function `f` is
//! positive on `(0, 3 pi / (4L))`, so its first root gives
//! `alpha_1 = w_1^2 >= 9 pi^2 / (16 L^2) > 4 / ((2 sqrt pi + L) L)`, the last
//! expression bounding `mu_1 / eps` from above via a test function. The FEM
//! records check the resulting inequality on actual domains.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize, Serializer};

use crate::fem::{assemble, solve_neumann_with, solve_steklov_with};
use crate::geometry::{make_dumbbell, DumbbellSpec};
use crate::limit1d::{f_eval, transcendental_roots};
use crate::mesh::mesh_dumbbell;
use crate::par::try_map_indexed;
use crate::{Error, NumericSettings, Result};

/// Widths probed when no list is given.
pub const PROBE_EPS: [f64; 3] = [0.1, 0.05, 0.025];

/// Number of interior samples of `f` on `(0, 3 pi / (4L))`.
pub const F_SAMPLES: usize = 1000;

/// Cross-tube layers used by the FEM probe.
const N_Y: usize = 4;

/// `(3/4)(sqrt 2 + 1) pi^{3/2}`, the tube length above which the limit
/// argument applies.
pub fn threshold() -> f64 {
    0.75 * (2f64.sqrt() + 1.0) * PI.powf(1.5)
}

/// `4 / ((2 sqrt pi + L) L)`.
pub fn bound_mu(length: f64) -> f64 {
    4.0 / ((2.0 * PI.sqrt() + length) * length)
}

/// `9 pi^2 / (16 L^2)`.
pub fn alpha_lower_bound(length: f64) -> f64 {
    9.0 * PI * PI / (16.0 * length * length)
}

/// Steps of the limit-level argument, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitStep {
    /// `L` exceeds the threshold.
    Threshold,
    /// All samples of `f` on `(0, 3 pi / (4L))` are positive.
    SampledPositivity,
    /// `alpha_1 >= 9 pi^2 / (16 L^2)`.
    AlphaLowerBound,
    /// `9 pi^2 / (16 L^2) > 4 / ((2 sqrt pi + L) L)`.
    BoundComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub w1: f64,
    pub alpha1: f64,
    pub alpha_lower_bound: f64,
    pub f_samples: usize,
    /// Smallest sampled value of `f`.
    pub f_min: f64,
    pub above_threshold: bool,
    pub f_positive: bool,
    pub alpha_bound_holds: bool,
    pub bound_comparison_holds: bool,
}

impl LimitCheck {
    /// First step of the argument that does not hold, if any. Says nothing
    /// about the inequality itself when a step fails.
    pub fn failed_step(&self) -> Option<LimitStep> {
        [
            (LimitStep::Threshold, self.above_threshold),
            (LimitStep::SampledPositivity, self.f_positive),
            (LimitStep::AlphaLowerBound, self.alpha_bound_holds),
            (LimitStep::BoundComparison, self.bound_comparison_holds),
        ]
        .into_iter()
        .find(|&(_, ok)| !ok)
        .map(|(step, _)| step)
    }

    pub fn chain_holds(&self) -> bool {
        self.failed_step().is_none()
    }
}

/// One FEM evaluation of both sides of the inequality on a single mesh.
/// `area` and `perimeter` are `1^T M 1` and `1^T B 1` of that mesh.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FemRecord {
    pub eps: f64,
    pub h: f64,
    pub n_nodes: usize,
    pub mu1: f64,
    pub sigma1: f64,
    pub area: f64,
    pub perimeter: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl FemRecord {
    /// `mu_1 |Omega| < sigma_1 P(Omega)`, always recomputed from the stored
    /// sides.
    pub fn verdict(&self) -> bool {
        self.lhs < self.rhs
    }

    /// `(rhs - lhs) / rhs`; positive exactly when the verdict is true.
    pub fn margin(&self) -> f64 {
        (self.rhs - self.lhs) / self.rhs
    }

    /// `mu_1 / ((4 / L) eps)`.
    pub fn mu_bound_ratio(&self, length: f64) -> f64 {
        self.mu1 / (4.0 / length * self.eps)
    }
}

// The verdict is written for readers of the JSON but ignored on input.
impl Serialize for FemRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            eps: f64,
            h: f64,
            n_nodes: usize,
            mu1: f64,
            sigma1: f64,
            area: f64,
            perimeter: f64,
            lhs: f64,
            rhs: f64,
            verdict: bool,
            margin: f64,
        }
        Out {
            eps: self.eps,
            h: self.h,
            n_nodes: self.n_nodes,
            mu1: self.mu1,
            sigma1: self.sigma1,
            area: self.area,
            perimeter: self.perimeter,
            lhs: self.lhs,
            rhs: self.rhs,
            verdict: self.verdict(),
            margin: self.margin(),
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    #[serde(rename = "L")]
    pub length: f64,
    pub threshold: f64,
    pub alpha1: f64,
    pub bound_mu: f64,
    pub limit: LimitCheck,
    pub fem: Vec<FemRecord>,
}

impl CounterexampleReport {
    /// First FEM record (in probe order) where the inequality fails.
    pub fn first_counterexample(&self) -> Option<&FemRecord> {
        self.fem.iter().find(|r| r.verdict())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let l = &self.limit;
        let yes = |b: bool| if b { "yes" } else { "no" };
        let _ = writeln!(s, "tube length L          = {}", self.length);
        let _ = writeln!(s, "threshold              = {:.10}  (L above: {})", self.threshold, yes(l.above_threshold));
        let _ = writeln!(s, "w_1                    = {:.12}", l.w1);
        let _ = writeln!(s, "alpha_1 = w_1^2        = {:.12}", self.alpha1);
        let _ = writeln!(s, "9 pi^2 / (16 L^2)      = {:.12}", l.alpha_lower_bound);
        let _ = writeln!(s, "4 / ((2 sqrt pi + L) L) = {:.12}", self.bound_mu);
        let _ = writeln!(
            s,
            "f > 0 on (0, 3pi/4L)   : {} ({} samples, min {:.6e})",
            yes(l.f_positive),
            l.f_samples,
            l.f_min
        );
        let _ = writeln!(s, "alpha_1 >= 9pi^2/16L^2 : {}", yes(l.alpha_bound_holds));
        let _ = writeln!(s, "9pi^2/16L^2 > bound    : {}", yes(l.bound_comparison_holds));
        match l.failed_step() {
            None => {
                let _ = writeln!(s, "limit chain            : holds");
            }
            Some(step) => {
                let _ = writeln!(s, "limit chain            : stops at {step:?} (no conclusion drawn)");
            }
        }
        for r in &self.fem {
            let _ = writeln!(
                s,
                "eps = {:<6} h = {:<5} mu_1 = {:.6e} sigma_1 = {:.6e} |Omega| = {:.6} P = {:.6} \
                 lhs = {:.6e} rhs = {:.6e} lhs < rhs: {} (margin {:+.3}%) mu_1/(4 eps/L) = {:.4} sigma_1/(eps alpha_1) = {:.4}",
                r.eps,
                r.h,
                r.mu1,
                r.sigma1,
                r.area,
                r.perimeter,
                r.lhs,
                r.rhs,
                yes(r.verdict()),
                100.0 * r.margin(),
                r.mu_bound_ratio(self.length),
                r.sigma1 / (r.eps * self.alpha1)
            );
        }
        if !self.fem.is_empty() {
            match self.first_counterexample() {
                Some(r) => {
                    let _ = writeln!(s, "first width with mu_1 |Omega| < sigma_1 P(Omega): eps = {}", r.eps);
                }
                None => {
                    let _ = writeln!(s, "no probed width satisfies mu_1 |Omega| < sigma_1 P(Omega)");
                }
            }
        }
        s
    }
}

fn check_length(length: f64) -> Result<()> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidSpec(format!("L must be positive and finite, got {length}")));
    }
    Ok(())
}

/// Evaluates every step of the limit-level argument for tube length `L`.
pub fn check_limit_inequality(length: f64) -> Result<CounterexampleReport> {
    check_length(length)?;
    let p = 2.0 * PI.sqrt();
    let w1 = transcendental_roots(length, p, p, 1)?[0];
    let alpha1 = w1 * w1;
    let lower = alpha_lower_bound(length);
    let bound = bound_mu(length);

    let end = 3.0 * PI / (4.0 * length);
    let mut f_min = f64::INFINITY;
    for i in 1..=F_SAMPLES {
        let w = end * i as f64 / (F_SAMPLES + 1) as f64;
        f_min = f_min.min(f_eval(w, length)?);
    }
    let threshold = threshold();
    Ok(CounterexampleReport {
        length,
        threshold,
        alpha1,
        bound_mu: bound,
        limit: LimitCheck {
            w1,
            alpha1,
            alpha_lower_bound: lower,
            f_samples: F_SAMPLES,
            f_min,
            above_threshold: length > threshold,
            f_positive: f_min > 0.0,
            alpha_bound_holds: alpha1 >= lower,
            bound_comparison_holds: lower > bound,
        },
        fem: Vec::new(),
    })
}

/// Both sides of the inequality on one mesh of the unit-area-disk dumbbell.
pub fn fem_record(length: f64, eps: f64, h: f64, settings: &NumericSettings) -> Result<FemRecord> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("mesh size must be positive, got {h}")));
    }
    let spec = DumbbellSpec::unit_area_disks(length, eps).resolved_for(h);
    let geom = make_dumbbell(&spec)?;
    let mesh = mesh_dumbbell(&geom, h, N_Y)?;
    let sys = assemble(&mesh)?;
    let mu1 = solve_neumann_with(&sys, 1, settings)?.values[0];
    let sigma1 = solve_steklov_with(&sys, 1, settings)?.values()[1];
    let ones = vec![1.0; sys.n_dofs()];
    let area = sys.mass.bilinear(&ones, &ones);
    let perimeter = sys.boundary_mass.bilinear(&ones, &ones);
    Ok(FemRecord {
        eps,
        h,
        n_nodes: mesh.n_nodes(),
        mu1,
        sigma1,
        area,
        perimeter,
        lhs: mu1 * area,
        rhs: sigma1 * perimeter,
    })
}

/// Limit-level report plus one FEM record.
pub fn check_fem_inequality(length: f64, eps: f64, h: f64) -> Result<CounterexampleReport> {
    probe(length, &[eps], h, &NumericSettings::default())
}

/// Limit-level report plus one FEM record per width, in the given order.
pub fn probe(length: f64, eps_list: &[f64], h: f64, settings: &NumericSettings) -> Result<CounterexampleReport> {
    let mut report = check_limit_inequality(length)?;
    for &eps in eps_list {
        DumbbellSpec::unit_area_disks(length, eps).validate()?;
    }
    report.fem = try_map_indexed(settings.execution, eps_list.len(), |i| {
        fem_record(length, eps_list[i], h, settings)
    })?;
    Ok(report)
}
