//! Conforming P1 triangle meshes.
//!
//! Dumbbells are meshed as a structured `n_x x n_y` grid on the tube (each
//! quad split in two) plus a ring mesh on each disk: concentric scaled copies
//! of the disk outline toward the disk center, consecutive rings stitched by
//! an angle-ordered zipper, and a fan at the center. The tube end columns are
//! the disks' junction faces, so the pieces share nodes and no hanging nodes
//! appear.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{dist, make_dumbbell, orient2d, BoundaryTag, DumbbellGeometry};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub i: usize,
    pub j: usize,
    pub tag: BoundaryTag,
}

/// Triangle mesh with tagged boundary edges and the boundary/interior node
/// partition derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Sorted endpoints of the boundary edges.
    pub boundary_nodes: Vec<usize>,
    /// Sorted complement of `boundary_nodes`.
    pub interior_nodes: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl TriMesh {
    /// Validates orientation and conformity, and derives the node partition.
    pub fn new(nodes: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, boundary_edges: Vec<BoundaryEdge>) -> Result<Self> {
        let n = nodes.len();
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing node")));
            }
            let a = orient2d(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
            if !(a > 0.0) {
                return Err(Error::InvalidMesh(format!("triangle {t} is not positively oriented")));
            }
        }
        let edges = edge_counts(&triangles);
        if let Some((e, c)) = edges.iter().find(|(_, &c)| c > 2) {
            return Err(Error::InvalidMesh(format!("edge {e:?} is shared by {c} triangles")));
        }
        let open: usize = edges.values().filter(|&&c| c == 1).count();
        if open != boundary_edges.len() {
            return Err(Error::InvalidMesh(format!(
                "{open} edges have a single triangle but {} boundary edges are tagged",
                boundary_edges.len()
            )));
        }
        for e in &boundary_edges {
            if edges.get(&edge_key(e.i, e.j)) != Some(&1) {
                return Err(Error::InvalidMesh(format!("tagged edge ({}, {}) is not on the boundary", e.i, e.j)));
            }
        }
        let mut on_boundary = vec![false; n];
        for e in &boundary_edges {
            on_boundary[e.i] = true;
            on_boundary[e.j] = true;
        }
        let boundary_nodes = (0..n).filter(|&i| on_boundary[i]).collect();
        let interior_nodes = (0..n).filter(|&i| !on_boundary[i]).collect();
        Ok(Self {
            nodes,
            triangles,
            boundary_edges,
            boundary_nodes,
            interior_nodes,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * orient2d(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Total length of boundary edges carrying `tag` (all for `None`).
    pub fn boundary_length(&self, tag: Option<BoundaryTag>) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| tag.is_none_or(|t| e.tag == t))
            .map(|e| dist(self.nodes[e.i], self.nodes[e.j]))
            .sum()
    }

    pub fn n_edges(&self) -> usize {
        edge_counts(&self.triangles).len()
    }

    /// `V - E + F` with `F` counting triangles only (1 for a disk topology).
    pub fn euler_characteristic(&self) -> i64 {
        self.n_nodes() as i64 - self.n_edges() as i64 + self.triangles.len() as i64
    }

    pub fn to_json(&self) -> Result<String> {
        let file = MeshFile {
            nodes: self.nodes.clone(),
            triangles: self.triangles.clone(),
            boundary_edges: self.boundary_edges.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: MeshFile = serde_json::from_str(s)?;
        Self::new(file.nodes, file.triangles, file.boundary_edges)
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }
}

fn edge_key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

fn edge_counts(triangles: &[[usize; 3]]) -> HashMap<(usize, usize), usize> {
    let mut map = HashMap::with_capacity(triangles.len() * 2);
    for t in triangles {
        for k in 0..3 {
            *map.entry(edge_key(t[k], t[(k + 1) % 3])).or_insert(0) += 1;
        }
    }
    map
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshQuality {
    /// Smallest interior angle, degrees.
    pub min_angle: f64,
    /// Largest ratio longest / shortest edge of a triangle.
    pub max_aspect: f64,
    pub n_nodes: usize,
    pub n_tris: usize,
}

pub fn mesh_quality(mesh: &TriMesh) -> MeshQuality {
    let mut min_angle = 180.0f64;
    let mut max_aspect = 1.0f64;
    for t in &mesh.triangles {
        let p = [mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]];
        let len = [dist(p[1], p[2]), dist(p[2], p[0]), dist(p[0], p[1])];
        for k in 0..3 {
            let (a, b, c) = (len[k], len[(k + 1) % 3], len[(k + 2) % 3]);
            let cos = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0);
            min_angle = min_angle.min(cos.acos().to_degrees());
        }
        let longest = len.iter().fold(0.0f64, |m, &v| m.max(v));
        let shortest = len.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        max_aspect = max_aspect.max(longest / shortest);
    }
    MeshQuality {
        min_angle,
        max_aspect,
        n_nodes: mesh.n_nodes(),
        n_tris: mesh.triangles.len(),
    }
}

/// Meshes a dumbbell: `n_x = ceil(L / h)` tube columns, `n_y` cross layers
/// (even, so the midline `x2 = 0` is a row of nodes), disks with `~h` rings.
///
/// The tube sides are re-sampled at the `n_x` columns when the geometry was
/// built with a different `n_tube`.
pub fn mesh_dumbbell(geom: &DumbbellGeometry, h: f64, n_y: usize) -> Result<TriMesh> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("mesh size must be positive, got {h}")));
    }
    if n_y < 2 || !n_y.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("n_y must be even and >= 2, got {n_y}")));
    }
    let n_x = (geom.spec.length / h).ceil().max(1.0) as usize;
    let resampled;
    let geom = if geom.spec.n_tube == n_x {
        geom
    } else {
        resampled = make_dumbbell(&geom.spec.clone().with_tube_segments(n_x))?;
        &resampled
    };

    let bottom = &geom.chain(BoundaryTag::TubeMinus).points;
    let top = &geom.chain(BoundaryTag::TubePlus).points;
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut tris: Vec<[usize; 3]> = Vec::new();
    let mut edges: Vec<BoundaryEdge> = Vec::new();

    // tube grid, column-major: grid(i, j) = i * (n_y + 1) + j
    let grid = |i: usize, j: usize| i * (n_y + 1) + j;
    for i in 0..=n_x {
        let x = bottom[i][0];
        let a = top[n_x - i][1];
        for j in 0..=n_y {
            let y = match j {
                0 => bottom[i][1],
                j if j == n_y => a,
                j => a * (2.0 * j as f64 / n_y as f64 - 1.0),
            };
            nodes.push([x, y]);
        }
    }
    for i in 0..n_x {
        for j in 0..n_y {
            let (p00, p10, p11, p01) = (grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1));
            tris.push([p00, p10, p11]);
            tris.push([p00, p11, p01]);
        }
        edges.push(BoundaryEdge { i: grid(i, 0), j: grid(i + 1, 0), tag: BoundaryTag::TubeMinus });
        edges.push(BoundaryEdge { i: grid(i + 1, n_y), j: grid(i, n_y), tag: BoundaryTag::TubePlus });
    }

    for (side, tag) in [(0usize, BoundaryTag::D1), (1, BoundaryTag::D2)] {
        let arc = &geom.chain(tag).points;
        let center = geom.disk_centers[side];
        let (r, face_col) = if side == 0 { (geom.spec.r1, 0) } else { (geom.spec.r2, n_x) };
        // D1 arc runs top junction -> bottom junction, D2 bottom -> top
        let (first, last) = if side == 0 { (grid(0, n_y), grid(0, 0)) } else { (grid(n_x, 0), grid(n_x, n_y)) };
        let mut ring = Vec::with_capacity(arc.len() + n_y);
        ring.push(first);
        for p in &arc[1..arc.len() - 1] {
            ring.push(nodes.len());
            nodes.push(*p);
        }
        ring.push(last);
        for k in 0..ring.len() - 1 {
            edges.push(BoundaryEdge { i: ring[k], j: ring[k + 1], tag });
        }
        if side == 0 {
            ring.extend((1..n_y).map(|j| grid(face_col, j)));
        } else {
            ring.extend((1..n_y).rev().map(|j| grid(face_col, j)));
        }
        // distance from the center to the flat face
        let face = (nodes[grid(face_col, 0)][0] - center[0]).abs();
        let toward = if side == 0 { 1.0 } else { -1.0 };
        let radial = move |theta: f64| {
            let c = toward * theta.cos();
            if c > 0.0 {
                r.min(face / c)
            } else {
                r
            }
        };
        fill_star(&mut nodes, &mut tris, &ring, center, r, h, radial)?;
    }

    TriMesh::new(nodes, tris, edges).map_err(|e| Error::MeshFailure(e.to_string()))
}

/// Full disk of radius `radius` centered at the origin, boundary tagged `D1`.
/// Built on the unit disk with size `h / radius` and then dilated, so meshes
/// for the same ratio differ only by the scale factor.
pub fn mesh_disk(radius: f64, h: f64) -> Result<TriMesh> {
    if !(radius > 0.0) || !(h > 0.0) || h >= radius {
        return Err(Error::InvalidArgument(format!("need 0 < h < radius, got h = {h}, radius = {radius}")));
    }
    let hu = h / radius;
    let n = ((2.0 * PI / hu).round() as usize).max(8);
    let mut nodes: Vec<[f64; 2]> = (0..n)
        .map(|q| {
            let t = 2.0 * PI * q as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let ring: Vec<usize> = (0..n).collect();
    let mut tris = Vec::new();
    fill_star(&mut nodes, &mut tris, &ring, [0.0, 0.0], 1.0, hu, |_| 1.0)?;
    for p in &mut nodes {
        p[0] *= radius;
        p[1] *= radius;
    }
    let edges = (0..n)
        .map(|q| BoundaryEdge { i: q, j: (q + 1) % n, tag: BoundaryTag::D1 })
        .collect();
    TriMesh::new(nodes, tris, edges).map_err(|e| Error::MeshFailure(e.to_string()))
}

/// Structured `nx x ny` mesh of `[0, width] x [0, height]`, boundary tagged
/// `D1` (fixture for the Neumann oracle).
pub fn mesh_rectangle(width: f64, height: f64, nx: usize, ny: usize) -> Result<TriMesh> {
    if !(width > 0.0 && height > 0.0) || nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument("rectangle needs positive sides and cell counts".into()));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([width * i as f64 / nx as f64, height * j as f64 / ny as f64]);
        }
    }
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    let mut edges = Vec::new();
    let tag = BoundaryTag::D1;
    for i in 0..nx {
        edges.push(BoundaryEdge { i: id(i, 0), j: id(i + 1, 0), tag });
        edges.push(BoundaryEdge { i: id(i + 1, ny), j: id(i, ny), tag });
    }
    for j in 0..ny {
        edges.push(BoundaryEdge { i: id(nx, j), j: id(nx, j + 1), tag });
        edges.push(BoundaryEdge { i: id(0, j + 1), j: id(0, j), tag });
    }
    TriMesh::new(nodes, tris, edges)
}

/// Fills the star-shaped region bounded by the counterclockwise node cycle
/// `outer` with rings toward `center`. `radial(theta)` is the distance from
/// the center to the outline in direction `theta`; `extent` its maximum.
fn fill_star(
    nodes: &mut Vec<[f64; 2]>,
    tris: &mut Vec<[usize; 3]>,
    outer: &[usize],
    center: [f64; 2],
    extent: f64,
    h: f64,
    radial: impl Fn(f64) -> f64,
) -> Result<()> {
    let layers = ((extent / h).round() as usize).max(1);
    let mut prev = outer.to_vec();
    for l in (1..layers).rev() {
        let t = l as f64 / layers as f64;
        let count = ((2.0 * PI * extent * t / h).round() as usize).max(6);
        let offset = if l % 2 == 0 { 0.0 } else { PI / count as f64 };
        let ring: Vec<usize> = (0..count)
            .map(|q| {
                let theta = offset + 2.0 * PI * q as f64 / count as f64;
                let rho = t * radial(theta);
                nodes.push([center[0] + rho * theta.cos(), center[1] + rho * theta.sin()]);
                nodes.len() - 1
            })
            .collect();
        zip_rings(nodes, tris, &prev, &ring, center)?;
        prev = ring;
    }
    let c = nodes.len();
    nodes.push(center);
    for k in 0..prev.len() {
        let tri = [c, prev[k], prev[(k + 1) % prev.len()]];
        check_positive(nodes, tri)?;
        tris.push(tri);
    }
    Ok(())
}

/// Triangulates the annulus between two counterclockwise node cycles,
/// advancing along whichever ring has the next smaller angle.
fn zip_rings(nodes: &[[f64; 2]], tris: &mut Vec<[usize; 3]>, outer: &[usize], inner: &[usize], center: [f64; 2]) -> Result<()> {
    let angle = |v: usize| (nodes[v][1] - center[1]).atan2(nodes[v][0] - center[0]);
    let unwrap = |ring: &[usize], start: usize, a0: f64| {
        let n = ring.len();
        let mut out = Vec::with_capacity(n + 1);
        out.push(a0);
        for k in 1..=n {
            let d = angle(ring[(start + k) % n]) - angle(ring[(start + k - 1) % n]);
            out.push(out[k - 1] + d.rem_euclid(2.0 * PI));
        }
        out
    };
    let a_start = angle(outer[0]);
    let j0 = (0..inner.len())
        .min_by(|&p, &q| {
            let dp = wrap_symmetric(angle(inner[p]) - a_start).abs();
            let dq = wrap_symmetric(angle(inner[q]) - a_start).abs();
            dp.total_cmp(&dq)
        })
        .expect("inner ring is not empty");
    let a = unwrap(outer, 0, a_start);
    let b = unwrap(inner, j0, a_start + wrap_symmetric(angle(inner[j0]) - a_start));
    let (na, nb) = (outer.len(), inner.len());
    let o = |i: usize| outer[i % na];
    let q = |j: usize| inner[(j0 + j) % nb];

    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let advance_outer = [o(i), o(i + 1), q(j)];
        let advance_inner = [o(i), q(j + 1), q(j)];
        let prefer_outer = j == nb || (i < na && a[i + 1] <= b[j + 1]);
        let (first, second, first_is_outer) = if prefer_outer {
            (advance_outer, advance_inner, true)
        } else {
            (advance_inner, advance_outer, false)
        };
        let second_allowed = if first_is_outer { j < nb } else { i < na };
        let outer_step = if is_positive(nodes, first) {
            tris.push(first);
            first_is_outer
        } else if second_allowed && is_positive(nodes, second) {
            tris.push(second);
            !first_is_outer
        } else {
            return Err(Error::MeshFailure(format!(
                "ring stitching produced an inverted triangle near ({:.4}, {:.4})",
                nodes[o(i)][0],
                nodes[o(i)][1]
            )));
        };
        if outer_step {
            i += 1;
        } else {
            j += 1;
        }
    }
    Ok(())
}

fn wrap_symmetric(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

fn is_positive(nodes: &[[f64; 2]], t: [usize; 3]) -> bool {
    orient2d(nodes[t[0]], nodes[t[1]], nodes[t[2]]) > 0.0
}

fn check_positive(nodes: &[[f64; 2]], t: [usize; 3]) -> Result<()> {
    if is_positive(nodes, t) {
        Ok(())
    } else {
        Err(Error::MeshFailure(format!("inverted triangle {t:?}")))
    }
}

/// Bucketed point location with barycentric interpolation of nodal values.
pub struct PointLocator<'a> {
    mesh: &'a TriMesh,
    lo: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl<'a> PointLocator<'a> {
    pub fn new(mesh: &'a TriMesh) -> Self {
        let (lo, hi) = mesh.bounding_box();
        let span = [(hi[0] - lo[0]).max(1e-300), (hi[1] - lo[1]).max(1e-300)];
        let target_cells = (mesh.triangles.len() as f64).max(1.0);
        let cell = (span[0] * span[1] / target_cells).sqrt().max(span[0].max(span[1]) / 4096.0);
        let dims = [
            ((span[0] / cell).ceil() as usize).max(1),
            ((span[1] / cell).ceil() as usize).max(1),
        ];
        let mut buckets = vec![Vec::new(); dims[0] * dims[1]];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let pts = tri.map(|v| mesh.nodes[v]);
            let xmin = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let xmax = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let ymin = pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            let ymax = pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
            let (i0, j0) = Self::cell_of(lo, cell, dims, [xmin, ymin]);
            let (i1, j1) = Self::cell_of(lo, cell, dims, [xmax, ymax]);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    buckets[j * dims[0] + i].push(t);
                }
            }
        }
        Self { mesh, lo, cell, dims, buckets }
    }

    fn cell_of(lo: [f64; 2], cell: f64, dims: [usize; 2], p: [f64; 2]) -> (usize, usize) {
        let i = (((p[0] - lo[0]) / cell).floor().max(0.0) as usize).min(dims[0] - 1);
        let j = (((p[1] - lo[1]) / cell).floor().max(0.0) as usize).min(dims[1] - 1);
        (i, j)
    }

    /// Triangle containing `p` and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let (i, j) = Self::cell_of(self.lo, self.cell, self.dims, p);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.buckets[j * self.dims[0] + i] {
            let [a, b, c] = self.mesh.triangles[t].map(|v| self.mesh.nodes[v]);
            let area = orient2d(a, b, c);
            let l = [orient2d(p, b, c) / area, orient2d(a, p, c) / area, orient2d(a, b, p) / area];
            let worst = l[0].min(l[1]).min(l[2]);
            if best.is_none_or(|(_, _, w)| worst > w) {
                best = Some((t, l, worst));
            }
        }
        best.filter(|&(_, _, w)| w >= -1e-10).map(|(t, l, _)| (t, l))
    }

    /// Value of the P1 interpolant of nodal `values` at `p`.
    pub fn interpolate(&self, values: &[f64], p: [f64; 2]) -> Option<f64> {
        self.locate(p).map(|(t, l)| {
            let tri = self.mesh.triangles[t];
            l[0] * values[tri[0]] + l[1] * values[tri[1]] + l[2] * values[tri[2]]
        })
    }
}
