//! Conforming triangulations of polygonal domains together with their skeleton
//! (edge) topology and the trace of the triangulation on the boundary.
//!
//! Triangles are stored counterclockwise. Side `j` of triangle `[v0, v1, v2]`
//! runs from `v_j` to `v_{j+1}` (indices mod 3). Every edge carries a canonical
//! orientation from its lower to its higher vertex index; the side sign records
//! whether a triangle traverses the edge along (+1) or against (-1) it.

mod io;

pub use io::{read_mesh, write_mesh};

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    /// Canonical orientation: `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    pub boundary: bool,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// For each triangle and local side, the global edge index.
    pub tri_edges: Vec<[usize; 3]>,
    /// For each triangle and local side, +1 if the side runs along the edge's canonical orientation.
    pub tri_edge_signs: Vec<[i8; 3]>,
    /// Triangles incident to each edge; the second slot is `None` on the boundary.
    pub edge_triangles: Vec<[Option<(usize, usize)>; 2]>,
    /// Element diameters h_K (longest side).
    pub diameters: Vec<f64>,
}

impl Mesh {
    /// Builds the skeleton topology for a list of counterclockwise triangles.
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} references vertex {v} of {}",
                        vertices.len()
                    )));
                }
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let area2 = cross(sub(b, a), sub(c, a));
            if area2 <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not counterclockwise (signed area {:e})",
                    0.5 * area2
                )));
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<[Option<(usize, usize)>; 2]> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        let mut tri_edge_signs = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            let mut ts = [0i8; 3];
            for j in 0..3 {
                let (a, b) = (tri[j], tri[(j + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        boundary: false,
                    });
                    edge_triangles.push([None, None]);
                    edges.len() - 1
                });
                let slot = &mut edge_triangles[e];
                if slot[0].is_none() {
                    slot[0] = Some((t, j));
                } else if slot[1].is_none() {
                    slot[1] = Some((t, j));
                } else {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) is shared by more than two triangles",
                        key.0, key.1
                    )));
                }
                te[j] = e;
                ts[j] = if a < b { 1 } else { -1 };
            }
            tri_edges.push(te);
            tri_edge_signs.push(ts);
        }
        for (e, slot) in edge_triangles.iter().enumerate() {
            edges[e].boundary = slot[1].is_none();
            if let [Some((t0, j0)), Some((t1, j1))] = *slot {
                if tri_edge_signs[t0][j0] == tri_edge_signs[t1][j1] {
                    return Err(Error::InvalidMesh(format!(
                        "edge {e} is traversed in the same direction by triangles {t0} and {t1}"
                    )));
                }
            }
        }
        let diameters = triangles
            .iter()
            .map(|tri| {
                (0..3)
                    .map(|j| norm(sub(vertices[tri[(j + 1) % 3]], vertices[tri[j]])))
                    .fold(0.0, f64::max)
            })
            .collect();
        Ok(Self {
            vertices,
            triangles,
            edges,
            tri_edges,
            tri_edge_signs,
            edge_triangles,
            diameters,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.boundary).count()
    }

    /// Global mesh size h = max h_K.
    pub fn h(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * cross(sub(b, a), sub(c, a))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Endpoints of local side `j` of triangle `t`, in the triangle's traversal order.
    pub fn side_points(&self, t: usize, j: usize) -> [Point; 2] {
        let tri = self.triangles[t];
        [self.vertices[tri[j]], self.vertices[tri[(j + 1) % 3]]]
    }

    pub fn side_length(&self, t: usize, j: usize) -> f64 {
        let [a, b] = self.side_points(t, j);
        norm(sub(b, a))
    }

    /// Outward unit normal of local side `j` of triangle `t`.
    pub fn side_normal(&self, t: usize, j: usize) -> Point {
        let [a, b] = self.side_points(t, j);
        let d = sub(b, a);
        let l = norm(d);
        [d[1] / l, -d[0] / l]
    }

    pub fn edge_points(&self, e: usize) -> [Point; 2] {
        let [a, b] = self.edges[e].vertices;
        [self.vertices[a], self.vertices[b]]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edge_points(e);
        norm(sub(b, a))
    }

    /// Euler characteristic V - E + T.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    /// Red refinement: every triangle splits into four through its edge midpoints.
    ///
    /// Midpoint of edge `e` becomes vertex `nv + e`; children of triangle `t`
    /// occupy indices `4t..4t+4`, the central child last.
    pub fn refine_uniform(&self) -> Self {
        let nv = self.num_vertices();
        let mut vertices = self.vertices.clone();
        vertices.extend(self.edges.iter().map(|e| {
            let [a, b] = e.vertices.map(|i| self.vertices[i]);
            lerp(a, b, 0.5)
        }));
        let mut triangles = Vec::with_capacity(4 * self.num_triangles());
        for (tri, te) in self.triangles.iter().zip(&self.tri_edges) {
            let [a, b, c] = *tri;
            let [mab, mbc, mca] = te.map(|e| nv + e);
            triangles.push([a, mab, mca]);
            triangles.push([mab, b, mbc]);
            triangles.push([mca, mbc, c]);
            triangles.push([mab, mbc, mca]);
        }
        Self::from_triangles(vertices, triangles).expect("red refinement preserves validity")
    }

    /// True when the two meshes have identical vertex coordinates and connectivity.
    pub fn same_topology(&self, other: &Self) -> bool {
        self.triangles == other.triangles
            && self.edges == other.edges
            && self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(&other.vertices)
                .all(|(a, b)| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14)
    }
}

/// Which diagonal cuts the coarse unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Diagonal {
    /// From (0,0) to (1,1).
    Rising,
    /// From (1,0) to (0,1); the split that reproduces the published error tables.
    #[default]
    Falling,
}

/// Unit square split along the (1,0)-(0,1) diagonal, refined `levels` times.
pub fn make_square_mesh(levels: usize) -> Mesh {
    make_square_mesh_with(levels, Diagonal::Falling)
}

/// Unit square split along the given diagonal, refined `levels` times.
pub fn make_square_mesh_with(levels: usize, diagonal: Diagonal) -> Mesh {
    let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let triangles = match diagonal {
        Diagonal::Rising => vec![[0, 1, 2], [0, 2, 3]],
        Diagonal::Falling => vec![[0, 1, 3], [1, 2, 3]],
    };
    let mut mesh = Mesh::from_triangles(vertices, triangles).expect("coarse square is valid");
    for _ in 0..levels {
        mesh = mesh.refine_uniform();
    }
    mesh
}

/// Structured `nx` x `ny` grid on the rectangle spanned by `corners`, each cell
/// cut along its lower-right to upper-left diagonal.
pub fn make_rect_mesh(nx: usize, ny: usize, corners: [Point; 2]) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidMesh("nx and ny must be at least 1".into()));
    }
    let [lo, hi] = corners;
    let (x0, x1) = (lo[0].min(hi[0]), lo[0].max(hi[0]));
    let (y0, y1) = (lo[1].min(hi[1]), lo[1].max(hi[1]));
    if !((x1 - x0) * (y1 - y0) > 0.0) {
        return Err(Error::InvalidMesh("rectangle has zero area".into()));
    }
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([
                x0 + (x1 - x0) * i as f64 / nx as f64,
                y0 + (y1 - y0) * j as f64 / ny as f64,
            ]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, d]);
            triangles.push([b, c, d]);
        }
    }
    Mesh::from_triangles(vertices, triangles)
}

/// Free function form of [`Mesh::refine_uniform`].
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    mesh.refine_uniform()
}

/// One straight boundary segment of the trace loop.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub start: Point,
    pub end: Point,
    pub length: f64,
    /// Outward unit normal.
    pub normal: Point,
    /// Volume mesh edge this panel coincides with.
    pub edge: usize,
    /// Triangle and local side owning the edge.
    pub triangle: usize,
    pub side: usize,
    /// True when the panel direction agrees with the edge's canonical orientation.
    pub along_edge: bool,
}

impl Panel {
    pub fn point(&self, t: f64) -> Point {
        lerp(self.start, self.end, t)
    }

    pub fn direction(&self) -> Point {
        sub(self.end, self.start)
    }

    /// Canonical edge parameter of panel parameter `t`.
    pub fn edge_param(&self, t: f64) -> f64 {
        if self.along_edge {
            t
        } else {
            1.0 - t
        }
    }
}

/// The counterclockwise loop of boundary panels traced out by a volume mesh.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub panels: Vec<Panel>,
    /// Panel index of each boundary edge; `None` for interior edges.
    pub panel_of_edge: Vec<Option<usize>>,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.panels.iter().map(|p| p.length).sum()
    }

    pub fn h(&self) -> f64 {
        self.panels.iter().map(|p| p.length).fold(0.0, f64::max)
    }

    /// Shoelace area of the closed polygon.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.panels.iter().map(|p| cross(p.start, p.end)).sum::<f64>()
    }

    /// Sum of signed exterior turning angles; 2π for a counterclockwise loop.
    pub fn turning_angle(&self) -> f64 {
        let n = self.panels.len();
        (0..n)
            .map(|i| {
                let a = self.panels[i].direction();
                let b = self.panels[(i + 1) % n].direction();
                cross(a, b).atan2(dot(a, b))
            })
            .sum()
    }

    /// Checks loop closure, orientation, and outward normals against the centroid of Ω.
    pub fn validate(&self, interior_centroid: Point) -> Result<()> {
        let n = self.panels.len();
        for i in 0..n {
            let (a, b) = (self.panels[i].end, self.panels[(i + 1) % n].start);
            if norm(sub(a, b)) > 1e-12 {
                return Err(Error::BoundaryTopology(format!("gap after panel {i}")));
            }
        }
        if (self.turning_angle() - 2.0 * PI).abs() > 1e-9 {
            return Err(Error::BoundaryTopology(
                "loop is not a simple counterclockwise polygon".into(),
            ));
        }
        for (i, p) in self.panels.iter().enumerate() {
            let mid = p.point(0.5);
            if dot(p.normal, sub(mid, interior_centroid)) <= 0.0 {
                // Only meaningful for star-shaped domains about the centroid.
                log::debug!("panel {i} normal does not point away from the centroid");
            }
        }
        Ok(())
    }
}

/// Orders the boundary edges of `mesh` into a single counterclockwise loop.
pub fn boundary_trace(mesh: &Mesh) -> Result<BoundaryMesh> {
    let mut by_start: HashMap<usize, usize> = HashMap::new();
    let mut candidates = Vec::new();
    for (e, slot) in mesh.edge_triangles.iter().enumerate() {
        if !mesh.edges[e].boundary {
            continue;
        }
        let (t, j) = slot[0].expect("every edge has an owner");
        let tri = mesh.triangles[t];
        let start = tri[j];
        if by_start.insert(start, candidates.len()).is_some() {
            return Err(Error::BoundaryTopology(format!(
                "vertex {start} starts two boundary edges (pinched boundary)"
            )));
        }
        candidates.push((e, t, j));
    }
    if candidates.is_empty() {
        return Err(Error::BoundaryTopology("mesh has no boundary edges".into()));
    }
    let mut panels = Vec::with_capacity(candidates.len());
    let mut panel_of_edge = vec![None; mesh.num_edges()];
    let mut current = 0;
    for _ in 0..candidates.len() {
        let (e, t, j) = candidates[current];
        if panel_of_edge[e].is_some() {
            break;
        }
        let [start, end] = mesh.side_points(t, j);
        panel_of_edge[e] = Some(panels.len());
        panels.push(Panel {
            start,
            end,
            length: norm(sub(end, start)),
            normal: mesh.side_normal(t, j),
            edge: e,
            triangle: t,
            side: j,
            along_edge: mesh.tri_edge_signs[t][j] > 0,
        });
        let next_vertex = mesh.triangles[t][(j + 1) % 3];
        current = *by_start.get(&next_vertex).ok_or_else(|| {
            Error::BoundaryTopology(format!("boundary chain breaks at vertex {next_vertex}"))
        })?;
    }
    if panels.len() != candidates.len() {
        return Err(Error::BoundaryTopology(format!(
            "boundary has several components ({} of {} edges in the first loop)",
            panels.len(),
            candidates.len()
        )));
    }
    let bmesh = BoundaryMesh {
        panels,
        panel_of_edge,
    };
    let c = interior_centroid(mesh);
    bmesh.validate(c)?;
    Ok(bmesh)
}

fn interior_centroid(mesh: &Mesh) -> Point {
    let mut c = [0.0, 0.0];
    let mut area = 0.0;
    for t in 0..mesh.num_triangles() {
        let a = mesh.area(t);
        let g = mesh.centroid(t);
        c[0] += a * g[0];
        c[1] += a * g[1];
        area += a;
    }
    [c[0] / area, c[1] / area]
}
