//! Parametric dumbbells and their polygonal boundary.
//!
//! A dumbbell is two disks `D1`, `D2` joined by the tube
//! `{ |x1| <= L/2, |x2| <= eps * rho(x1) }`. Each disk loses the circular cap
//! beyond the tube end, so it meets the tube along a flat vertical face of
//! half-width `eps * rho(-+L/2)`. The boundary is realized as one closed
//! counterclockwise loop made of four tagged chains:
//!
//! ```text
//!   TubeMinus (left to right)  ->  D2 arc  ->  TubePlus (right to left)  ->  D1 arc
//! ```
//!
//! Consecutive chains share their end points (the four junction nodes), and
//! areas and perimeters are always measured on this realized polygon.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Points used to check positivity / take the maximum of a profile.
const PROFILE_SAMPLES: usize = 1024;

/// Half-width profile `rho` of the tube, defined on `[-L/2, L/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TubeProfile {
    Constant(f64),
    /// `rho(x) = c0 + c1 cos(pi x / L)`.
    CosineBump { c0: f64, c1: f64 },
    /// Piecewise-linear interpolation of `[x1, rho]` samples sorted by `x1`;
    /// constant beyond the first/last sample.
    Table(Vec<[f64; 2]>),
}

impl Default for TubeProfile {
    fn default() -> Self {
        TubeProfile::Constant(1.0)
    }
}

impl TubeProfile {
    /// `rho(x1)` for a tube of length `length`.
    pub fn eval(&self, x1: f64, length: f64) -> Result<f64> {
        let half = 0.5 * length;
        if !(x1.abs() <= half * (1.0 + 1e-14)) {
            return Err(Error::OutOfDomain { x: x1, half_length: half });
        }
        Ok(self.eval_unchecked(x1, length))
    }

    fn eval_unchecked(&self, x1: f64, length: f64) -> f64 {
        match self {
            TubeProfile::Constant(c) => *c,
            TubeProfile::CosineBump { c0, c1 } => c0 + c1 * (PI * x1 / length).cos(),
            TubeProfile::Table(samples) => interpolate(samples, x1),
        }
    }

    /// Rejects non-positive values on a dense sample grid (and at every table
    /// node), and unsorted tables.
    pub fn validate(&self, length: f64) -> Result<()> {
        if let TubeProfile::Table(samples) = self {
            if samples.is_empty() {
                return Err(Error::InvalidSpec("profile table is empty".into()));
            }
            if samples.windows(2).any(|w| !(w[0][0] < w[1][0])) {
                return Err(Error::InvalidSpec("profile table must be strictly increasing in x1".into()));
            }
            if let Some(s) = samples.iter().find(|s| !(s[1] > 0.0)) {
                return Err(Error::DegenerateProfile { x: s[0], value: s[1] });
            }
        }
        for x in sample_grid(length) {
            let v = self.eval_unchecked(x, length);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::DegenerateProfile { x, value: v });
            }
        }
        Ok(())
    }

    /// Maximum over the sample grid (exact for the three supported families,
    /// whose extrema sit at grid points or table nodes).
    pub fn max_on(&self, length: f64) -> f64 {
        let grid_max = sample_grid(length)
            .map(|x| self.eval_unchecked(x, length))
            .fold(f64::MIN, f64::max);
        match self {
            TubeProfile::Table(samples) => samples
                .iter()
                .filter(|s| s[0].abs() <= 0.5 * length)
                .map(|s| s[1])
                .fold(grid_max, f64::max),
            _ => grid_max,
        }
    }

    /// `c * rho`.
    pub fn scaled(&self, c: f64) -> TubeProfile {
        match self {
            TubeProfile::Constant(v) => TubeProfile::Constant(c * v),
            TubeProfile::CosineBump { c0, c1 } => TubeProfile::CosineBump { c0: c * c0, c1: c * c1 },
            TubeProfile::Table(s) => TubeProfile::Table(s.iter().map(|p| [p[0], c * p[1]]).collect()),
        }
    }

    /// Same profile on a tube stretched by `s` along `x1`.
    pub fn stretched(&self, s: f64) -> TubeProfile {
        match self {
            TubeProfile::Table(t) => TubeProfile::Table(t.iter().map(|p| [s * p[0], p[1]]).collect()),
            other => other.clone(),
        }
    }

    /// `rho(-x) == rho(x)` for every sample.
    pub fn is_even(&self, length: f64) -> bool {
        sample_grid(length).all(|x| self.eval_unchecked(x, length) == self.eval_unchecked(-x, length))
    }
}

/// `rho(x1)`, see [`TubeProfile::eval`].
pub fn profile_eval(profile: &TubeProfile, x1: f64, length: f64) -> Result<f64> {
    profile.eval(x1, length)
}

fn sample_grid(length: f64) -> impl Iterator<Item = f64> {
    let half = 0.5 * length;
    (0..=PROFILE_SAMPLES).map(move |i| -half + length * i as f64 / PROFILE_SAMPLES as f64)
}

fn interpolate(samples: &[[f64; 2]], x: f64) -> f64 {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if x <= first[0] {
        return first[1];
    }
    if x >= last[0] {
        return last[1];
    }
    let k = samples.partition_point(|s| s[0] <= x);
    let (a, b) = (samples[k - 1], samples[k]);
    let t = (x - a[0]) / (b[0] - a[0]);
    a[1] + t * (b[1] - a[1])
}

/// Which part of the boundary a chain (or mesh edge) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundaryTag {
    D1,
    D2,
    /// Upper tube side, `x2 = +eps rho(x1)`.
    TubePlus,
    /// Lower tube side, `x2 = -eps rho(x1)`.
    TubeMinus,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 4] = [
        BoundaryTag::D1,
        BoundaryTag::D2,
        BoundaryTag::TubePlus,
        BoundaryTag::TubeMinus,
    ];
}

/// Parameters of one member of the dumbbell family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumbbellSpec {
    pub r1: f64,
    pub r2: f64,
    /// Tube length `L`.
    #[serde(alias = "L")]
    pub length: f64,
    #[serde(default)]
    pub profile: TubeProfile,
    /// Width scale: the tube half-width is `eps * rho(x1)`.
    pub eps: f64,
    /// Segments per disk arc.
    pub n_arc: usize,
    /// Segments per tube side.
    pub n_tube: usize,
    /// Ambient dimension. Only 2 can be realized; higher values are carried
    /// for the one-dimensional limit problems.
    pub dim: usize,
}

impl DumbbellSpec {
    pub fn new(r1: f64, r2: f64, length: f64, profile: TubeProfile, eps: f64) -> Self {
        Self {
            r1,
            r2,
            length,
            profile,
            eps,
            n_arc: 64,
            n_tube: 64,
            dim: 2,
        }
    }

    /// Two disks of unit area joined by a straight tube (`rho = 1`).
    pub fn unit_area_disks(length: f64, eps: f64) -> Self {
        let r = 1.0 / PI.sqrt();
        Self::new(r, r, length, TubeProfile::Constant(1.0), eps)
    }

    pub fn with_arcs(mut self, n_arc: usize) -> Self {
        self.n_arc = n_arc;
        self
    }

    pub fn with_tube_segments(mut self, n_tube: usize) -> Self {
        self.n_tube = n_tube;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    /// Chooses `n_tube = ceil(L / h)` and roughly `h`-sized arc segments
    /// (never fewer than 16).
    pub fn resolved_for(mut self, h: f64) -> Self {
        self.n_tube = (self.length / h).ceil().max(1.0) as usize;
        let arc = 2.0 * PI * self.r1.max(self.r2);
        self.n_arc = ((arc / h).ceil() as usize).max(16);
        self
    }

    /// Uniform dilation by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            r1: s * self.r1,
            r2: s * self.r2,
            length: s * self.length,
            profile: self.profile.stretched(s),
            eps: s * self.eps,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("r1", self.r1), ("r2", self.r2), ("L", self.length), ("eps", self.eps)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.n_arc < 16 {
            return Err(Error::InvalidSpec(format!("n_arc must be at least 16, got {}", self.n_arc)));
        }
        if self.n_tube < 1 {
            return Err(Error::InvalidSpec("n_tube must be at least 1".into()));
        }
        if self.dim < 2 {
            return Err(Error::InvalidSpec(format!("dimension must be at least 2, got {}", self.dim)));
        }
        self.profile.validate(self.length)?;
        let widest = self.eps * self.profile.max_on(self.length);
        if widest >= self.r1.min(self.r2) {
            return Err(Error::InvalidSpec(format!(
                "tube half-width {widest} must be below min(r1, r2) = {}",
                self.r1.min(self.r2)
            )));
        }
        Ok(())
    }

    /// Half-width `eps * rho(x1)`.
    pub fn half_width(&self, x1: f64) -> f64 {
        self.eps * self.profile.eval_unchecked(x1, self.length)
    }
}

/// A tagged polyline; consecutive chains of a loop share end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub tag: BoundaryTag,
    pub points: Vec<[f64; 2]>,
}

impl Chain {
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    pub fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Closed polygon assembled from tagged chains. Serializes as
/// `{"chains": [{"tag": ..., "points": [[x, y], ...]}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLoop {
    pub chains: Vec<Chain>,
}

impl BoundaryLoop {
    /// Validates that the chains close up end to start.
    pub fn new(chains: Vec<Chain>) -> Result<Self> {
        if chains.is_empty() || chains.iter().any(|c| c.points.len() < 2) {
            return Err(Error::NonSimpleBoundary("every chain needs at least two points".into()));
        }
        for (i, c) in chains.iter().enumerate() {
            let next = &chains[(i + 1) % chains.len()];
            if c.points[c.points.len() - 1] != next.points[0] {
                return Err(Error::NonSimpleBoundary(format!("chain {i} does not connect to its successor")));
            }
        }
        Ok(Self { chains })
    }

    /// Single-chain closed polygon (test fixtures). `points` must not repeat
    /// the first vertex.
    pub fn polygon(points: &[[f64; 2]], tag: BoundaryTag) -> Result<Self> {
        let mut pts = points.to_vec();
        pts.push(points[0]);
        Self::new(vec![Chain { tag, points: pts }])
    }

    /// Loop vertices without repetition, in order.
    pub fn vertices(&self) -> Vec<[f64; 2]> {
        self.chains
            .iter()
            .flat_map(|c| c.points[..c.points.len() - 1].iter().copied())
            .collect()
    }

    pub fn segments(&self) -> impl Iterator<Item = (BoundaryTag, [f64; 2], [f64; 2])> + '_ {
        self.chains
            .iter()
            .flat_map(|c| c.segments().map(move |(a, b)| (c.tag, a, b)))
    }

    /// Shoelace signed area (positive for counterclockwise loops).
    pub fn signed_area(&self) -> f64 {
        let v = self.vertices();
        let n = v.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    /// Finds a pair of intersecting non-adjacent segments, if any.
    pub fn check_simple(&self) -> Result<()> {
        let segs: Vec<([f64; 2], [f64; 2])> = self.segments().map(|(_, a, b)| (a, b)).collect();
        let n = segs.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (p, q) = (segs[i], segs[j]);
                if adjacent {
                    // shared vertex only; reject folding back onto each other
                    let (other_p, other_q) = if j == i + 1 { (p.0, q.1) } else { (p.1, q.0) };
                    if on_segment(other_q, p) || on_segment(other_p, q) {
                        return Err(Error::NonSimpleBoundary(format!("segments {i} and {j} overlap")));
                    }
                } else if segments_intersect(p, q) {
                    return Err(Error::NonSimpleBoundary(format!("segments {i} and {j} intersect")));
                }
            }
        }
        Ok(())
    }
}

/// Sum of segment lengths of the chains carrying `tag` (all chains for `None`).
pub fn perimeter(boundary: &BoundaryLoop, tag: Option<BoundaryTag>) -> f64 {
    boundary
        .chains
        .iter()
        .filter(|c| tag.is_none_or(|t| c.tag == t))
        .map(Chain::length)
        .sum()
}

/// Enclosed area of a simple loop.
pub fn area(boundary: &BoundaryLoop) -> Result<f64> {
    boundary.check_simple()?;
    Ok(boundary.signed_area().abs())
}

/// Realized dumbbell: the spec plus its tagged boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumbbellGeometry {
    pub spec: DumbbellSpec,
    pub boundary: BoundaryLoop,
    /// `(-L/2, -a1)`, `(L/2, -a2)`, `(L/2, a2)`, `(-L/2, a1)`.
    pub junction_nodes: [[f64; 2]; 4],
    pub disk_centers: [[f64; 2]; 2],
}

impl DumbbellGeometry {
    pub fn chain(&self, tag: BoundaryTag) -> &Chain {
        self.boundary
            .chains
            .iter()
            .find(|c| c.tag == tag)
            .expect("dumbbell geometry carries all four chains")
    }

    pub fn perimeter(&self, tag: Option<BoundaryTag>) -> f64 {
        perimeter(&self.boundary, tag)
    }

    pub fn area(&self) -> Result<f64> {
        area(&self.boundary)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.boundary)?)
    }
}

/// Builds the polygonal boundary of the dumbbell described by `spec`.
pub fn make_dumbbell(spec: &DumbbellSpec) -> Result<DumbbellGeometry> {
    spec.validate()?;
    let half = 0.5 * spec.length;
    let a1 = spec.half_width(-half);
    let a2 = spec.half_width(half);

    let xs: Vec<f64> = (0..=spec.n_tube)
        .map(|i| match i {
            0 => -half,
            i if i == spec.n_tube => half,
            i => -half + spec.length * i as f64 / spec.n_tube as f64,
        })
        .collect();
    let widths: Vec<f64> = xs.iter().map(|&x| spec.half_width(x)).collect();

    let tube_minus = Chain {
        tag: BoundaryTag::TubeMinus,
        points: xs.iter().zip(&widths).map(|(&x, &w)| [x, -w]).collect(),
    };
    let tube_plus = Chain {
        tag: BoundaryTag::TubePlus,
        points: xs.iter().zip(&widths).rev().map(|(&x, &w)| [x, w]).collect(),
    };

    let d1 = (spec.r1 * spec.r1 - a1 * a1).sqrt();
    let d2 = (spec.r2 * spec.r2 - a2 * a2).sqrt();
    let c1 = [-half - d1, 0.0];
    let c2 = [half + d2, 0.0];
    let phi1 = a1.atan2(d1);
    let phi2 = a2.atan2(d2);

    let d2_arc = arc(c2, spec.r2, -PI + phi2, PI - phi2, spec.n_arc, [half, -a2], [half, a2]);
    let d1_arc = arc(c1, spec.r1, phi1, 2.0 * PI - phi1, spec.n_arc, [-half, a1], [-half, -a1]);

    let boundary = BoundaryLoop::new(vec![
        tube_minus,
        Chain { tag: BoundaryTag::D2, points: d2_arc },
        tube_plus,
        Chain { tag: BoundaryTag::D1, points: d1_arc },
    ])?;
    boundary.check_simple()?;
    if boundary.signed_area() <= 0.0 {
        return Err(Error::NonSimpleBoundary("boundary is not counterclockwise".into()));
    }
    Ok(DumbbellGeometry {
        spec: spec.clone(),
        boundary,
        junction_nodes: [[-half, -a1], [half, -a2], [half, a2], [-half, a1]],
        disk_centers: [c1, c2],
    })
}

/// Counterclockwise arc from `from` to `to` angle with pinned end points.
fn arc(center: [f64; 2], r: f64, from: f64, to: f64, n: usize, start: [f64; 2], end: [f64; 2]) -> Vec<[f64; 2]> {
    (0..=n)
        .map(|i| match i {
            0 => start,
            i if i == n => end,
            i => {
                let t = from + (to - from) * i as f64 / n as f64;
                [center[0] + r * t.cos(), center[1] + r * t.sin()]
            }
        })
        .collect()
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(p: [f64; 2], s: ([f64; 2], [f64; 2])) -> bool {
    orient2d(s.0, s.1, p) == 0.0
        && p[0] >= s.0[0].min(s.1[0])
        && p[0] <= s.0[0].max(s.1[0])
        && p[1] >= s.0[1].min(s.1[1])
        && p[1] <= s.0[1].max(s.1[1])
}

fn segments_intersect(p: ([f64; 2], [f64; 2]), q: ([f64; 2], [f64; 2])) -> bool {
    if p.0[0].max(p.1[0]) < q.0[0].min(q.1[0])
        || q.0[0].max(q.1[0]) < p.0[0].min(p.1[0])
        || p.0[1].max(p.1[1]) < q.0[1].min(q.1[1])
        || q.0[1].max(q.1[1]) < p.0[1].min(p.1[1])
    {
        return false;
    }
    let d1 = orient2d(q.0, q.1, p.0);
    let d2 = orient2d(q.0, q.1, p.1);
    let d3 = orient2d(p.0, p.1, q.0);
    let d4 = orient2d(p.0, p.1, q.1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    on_segment(p.0, q) || on_segment(p.1, q) || on_segment(q.0, p) || on_segment(q.1, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: a disk of radius `r` minus the cap cut off by a
    /// chord of half-length `a`.
    fn cap_arc_length(r: f64, a: f64) -> f64 {
        r * (2.0 * PI - 2.0 * (a / r).asin())
    }

    fn cap_area(r: f64, a: f64) -> f64 {
        let phi = (a / r).asin();
        PI * r * r - 0.5 * r * r * (2.0 * phi - (2.0 * phi).sin())
    }

    fn figure_spec() -> DumbbellSpec {
        DumbbellSpec::unit_area_disks(12.0, 0.1)
    }

    #[test]
    fn profile_values() {
        let l = 2.0;
        assert_eq!(profile_eval(&TubeProfile::Constant(1.0), 0.3, l).unwrap(), 1.0);
        let bump = TubeProfile::CosineBump { c0: 1.0, c1: 0.5 };
        assert_eq!(bump.eval(0.0, l).unwrap(), 1.5);
        let table = TubeProfile::Table(vec![[-1.0, 1.0], [1.0, 2.0]]);
        assert_eq!(table.eval(0.0, l).unwrap(), 1.5);
        assert!(matches!(table.eval(1.5, l), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn figure_two_geometry() {
        let g = make_dumbbell(&figure_spec()).unwrap();
        assert_eq!(g.boundary.chains.len(), 4);
        let tags: Vec<_> = g.boundary.chains.iter().map(|c| c.tag).collect();
        assert_eq!(tags, [BoundaryTag::TubeMinus, BoundaryTag::D2, BoundaryTag::TubePlus, BoundaryTag::D1]);
        assert_eq!(g.junction_nodes[3], [-6.0, 0.1]);
        assert_eq!(g.junction_nodes[0], [-6.0, -0.1]);
        assert!(g.chain(BoundaryTag::TubePlus).points.iter().all(|p| p[1] > 0.0));
        assert!(g.chain(BoundaryTag::TubeMinus).points.iter().all(|p| p[1] < 0.0));
        assert!(g.chain(BoundaryTag::D1).points.iter().all(|p| p[0] <= -6.0));
        assert!((g.perimeter(Some(BoundaryTag::TubePlus)) - 12.0).abs() < 1e-12);
        assert!(g.boundary.signed_area() > 0.0);
    }

    #[test]
    fn tube_too_wide_is_rejected() {
        let r = 1.0 / PI.sqrt();
        let spec = DumbbellSpec::unit_area_disks(12.0, r);
        assert!(matches!(make_dumbbell(&spec), Err(Error::InvalidSpec(_))));
        let spec = DumbbellSpec::new(1.0, 1.0, 2.0, TubeProfile::CosineBump { c0: 0.2, c1: -0.5 }, 0.1);
        assert!(matches!(make_dumbbell(&spec), Err(Error::DegenerateProfile { .. })));
    }

    #[test]
    fn disk_chain_matches_cap_formula() {
        let mut prev_err = f64::INFINITY;
        for n_arc in [32, 64, 128, 256] {
            let spec = DumbbellSpec::new(1.0, 1.0, 4.0, TubeProfile::Constant(1.0), 0.2).with_arcs(n_arc);
            let g = make_dumbbell(&spec).unwrap();
            let err = (g.perimeter(Some(BoundaryTag::D1)) - cap_arc_length(1.0, 0.2)).abs();
            assert!(err < 0.01);
            assert!(err * 3.0 <= prev_err, "n_arc {n_arc}: {err} vs {prev_err}");
            prev_err = err;
        }
    }

    #[test]
    fn unit_area_disk_perimeter() {
        let spec = figure_spec().with_arcs(4096);
        let g = make_dumbbell(&spec).unwrap();
        let r = 1.0 / PI.sqrt();
        let p = g.perimeter(Some(BoundaryTag::D1));
        assert!((p - cap_arc_length(r, 0.1)).abs() < 1e-5);
        assert!(p < 2.0 * PI.sqrt());
    }

    #[test]
    fn composite_area() {
        let spec = DumbbellSpec::unit_area_disks(12.0, 0.05).with_arcs(2048);
        let g = make_dumbbell(&spec).unwrap();
        let r = 1.0 / PI.sqrt();
        let exact = 2.0 * cap_area(r, 0.05) + 2.0 * 0.05 * 12.0;
        assert!((g.area().unwrap() - exact).abs() < 1e-5);
        let mut prev = f64::INFINITY;
        for eps in [0.2, 0.1, 0.05, 0.01, 0.001] {
            let a = make_dumbbell(&spec.clone().with_eps(eps)).unwrap().area().unwrap();
            assert!(a < prev && a > 2.0 * cap_area(r, 0.0) - 1e-4);
            prev = a;
        }
    }

    #[test]
    fn unit_square() {
        let sq = BoundaryLoop::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], BoundaryTag::D1).unwrap();
        assert_eq!(perimeter(&sq, None), 4.0);
        assert_eq!(area(&sq).unwrap(), 1.0);
    }

    #[test]
    fn bow_tie_is_not_simple() {
        let bow = BoundaryLoop::polygon(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], BoundaryTag::D1).unwrap();
        assert!(matches!(area(&bow), Err(Error::NonSimpleBoundary(_))));
    }

    #[test]
    fn json_export_schema() {
        let g = make_dumbbell(&figure_spec()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&g.to_json().unwrap()).unwrap();
        let chains = v["chains"].as_array().unwrap();
        assert_eq!(chains.len(), 4);
        assert_eq!(chains[0]["tag"], "TubeMinus");
        assert_eq!(chains[0]["points"][0][0], -6.0);
    }

    fn arb_spec() -> impl Strategy<Value = DumbbellSpec> {
        (
            0.3f64..2.0,
            0.3f64..2.0,
            0.5f64..10.0,
            0.01f64..0.9,
            0.0f64..0.45,
            16usize..48,
            1usize..40,
            0usize..3,
        )
            .prop_map(|(r1, r2, l, frac, bump, n_arc, n_tube, kind)| {
                let profile = match kind {
                    0 => TubeProfile::Constant(1.0),
                    1 => TubeProfile::CosineBump { c0: 1.0, c1: bump },
                    _ => TubeProfile::Table(vec![[-0.5 * l, 1.0], [0.0, 1.0 + bump], [0.5 * l, 1.0 - bump]]),
                };
                let widest = profile.max_on(l);
                let eps = frac * r1.min(r2) / widest;
                DumbbellSpec::new(r1, r2, l, profile, eps)
                    .with_arcs(n_arc)
                    .with_tube_segments(n_tube)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn realized_loop_is_simple_and_closed(spec in arb_spec()) {
            let g = make_dumbbell(&spec).unwrap();
            prop_assert!(g.boundary.check_simple().is_ok());
            prop_assert!(g.boundary.signed_area() > 0.0);
            let total: f64 = BoundaryTag::ALL.iter().map(|&t| g.perimeter(Some(t))).sum();
            prop_assert!((total - g.perimeter(None)).abs() <= 1e-12 * total);
        }

        #[test]
        fn dilation_scales_area_and_perimeter(spec in arb_spec(), s in 0.2f64..5.0) {
            let g = make_dumbbell(&spec).unwrap();
            let gs = make_dumbbell(&spec.scaled(s)).unwrap();
            let (a, a_s) = (g.area().unwrap(), gs.area().unwrap());
            prop_assert!((a_s - s * s * a).abs() <= 1e-12 * a_s);
            prop_assert!((gs.perimeter(None) - s * g.perimeter(None)).abs() <= 1e-12 * gs.perimeter(None));
        }
    }
}
