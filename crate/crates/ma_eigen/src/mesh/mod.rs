//! Conforming triangulations of convex domains (disks and superellipses) and the
//! per-vertex geometric quantities the lumped P1 discretization needs.

mod generate;
mod io;

pub use generate::generate_mesh;
pub use io::{load_mesh, save_mesh};

use crate::error::{Error, Result};

/// Plain 2-D point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(self, o: Point2) -> f64 {
        f64::hypot(self.x - o.x, self.y - o.y)
    }
}

/// Which convex domain to mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainKind {
    UnitDisk,
    Superellipse,
}

/// A disk or superellipse `|x1-c1|^p + |x2-c2|^p < r^p`; the disk is `p = 2`.
#[derive(Clone, Copy, Debug)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Superellipse exponent; must exceed 1 for a convex boundary.
    pub exponent: f64,
    pub center: Point2,
    /// Half-width `r` of the domain.
    pub radius_param: f64,
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec {
            kind: DomainKind::UnitDisk,
            exponent: 2.0,
            center: Point2::new(0.0, 0.0),
            radius_param: 1.0,
        }
    }

    pub fn superellipse(exponent: f64, radius_param: f64, center: Point2) -> Self {
        DomainSpec { kind: DomainKind::Superellipse, exponent, center, radius_param }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent > 1.0) {
            return Err(Error::Invalid(format!(
                "superellipse exponent must exceed 1 for convexity, got {}",
                self.exponent
            )));
        }
        if !(self.radius_param > 0.0) {
            return Err(Error::Invalid(format!(
                "radius parameter must be positive, got {}",
                self.radius_param
            )));
        }
        Ok(())
    }

    /// Distance from the center to the boundary along direction `theta`.
    pub fn boundary_radius(&self, theta: f64) -> f64 {
        match self.kind {
            DomainKind::UnitDisk => self.radius_param,
            DomainKind::Superellipse => {
                let p = self.exponent;
                let s = theta.cos().abs().powf(p) + theta.sin().abs().powf(p);
                self.radius_param * s.powf(-1.0 / p)
            }
        }
    }
}

/// Conforming triangulation with precomputed areas, vertex patches and the
/// interior renumbering used by the Dirichlet solves.
#[derive(Clone, Debug)]
pub struct TriMesh {
    pub vertices: Vec<Point2>,
    /// Vertex index triples, counterclockwise.
    pub triangles: Vec<[usize; 3]>,
    /// True exactly for vertices on the polygonal boundary.
    pub boundary: Vec<bool>,
    /// Length of the longest edge.
    pub h: f64,
    /// Area of the patch of triangles around each vertex.
    pub patch_area: Vec<f64>,
    pub triangle_area: Vec<f64>,
    /// Total polygon area.
    pub area: f64,
    /// Vertex index -> interior degree of freedom, if interior.
    pub interior_index: Vec<Option<usize>>,
    /// Interior degree of freedom -> vertex index.
    pub interior_vertices: Vec<usize>,
}

impl TriMesh {
    /// Builds derived quantities from raw connectivity. Orientation must already
    /// be counterclockwise; triangle areas must be strictly positive.
    pub fn new(
        vertices: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<TriMesh> {
        if boundary.len() != vertices.len() {
            return Err(Error::MeshInvalid(format!(
                "{} boundary flags for {} vertices",
                boundary.len(),
                vertices.len()
            )));
        }
        let nv = vertices.len();
        let mut patch_area = vec![0.0; nv];
        let mut triangle_area = Vec::with_capacity(triangles.len());
        let mut h: f64 = 0.0;
        let mut area = 0.0;
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(Error::MeshInvalid(format!(
                        "triangle {t} references vertex {v}, but there are only {nv} vertices"
                    )));
                }
            }
            let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
            let twice = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
            if twice <= 0.0 {
                return Err(Error::MeshInvalid(format!(
                    "triangle {t} has non-positive area {:e} (inverted or degenerate)",
                    0.5 * twice
                )));
            }
            let at = 0.5 * twice;
            triangle_area.push(at);
            area += at;
            for &v in tri {
                patch_area[v] += at;
            }
            h = h.max(a.dist(b)).max(b.dist(c)).max(c.dist(a));
        }
        let mut interior_index = vec![None; nv];
        let mut interior_vertices = Vec::new();
        for v in 0..nv {
            if !boundary[v] {
                interior_index[v] = Some(interior_vertices.len());
                interior_vertices.push(v);
            }
        }
        Ok(TriMesh {
            vertices,
            triangles,
            boundary,
            h,
            patch_area,
            triangle_area,
            area,
            interior_index,
            interior_vertices,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_interior(&self) -> usize {
        self.interior_vertices.len()
    }

    /// Undirected edges with their incidence counts, in a deterministic order.
    fn edge_counts(&self) -> Vec<((usize, usize), usize)> {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * self.triangles.len());
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                edges.push(if a < b { (a, b) } else { (b, a) });
            }
        }
        edges.sort_unstable();
        let mut out: Vec<((usize, usize), usize)> = Vec::new();
        for e in edges {
            match out.last_mut() {
                Some((last, n)) if *last == e => *n += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// Full structural check: edge conformity, boundary-flag consistency and the
    /// patch-area identity. Positive areas were already enforced in `new`.
    pub fn validate(&self) -> Result<()> {
        let mut on_boundary_edge = vec![false; self.n_vertices()];
        for ((a, b), count) in self.edge_counts() {
            match count {
                1 => {
                    on_boundary_edge[a] = true;
                    on_boundary_edge[b] = true;
                }
                2 => {}
                n => {
                    return Err(Error::MeshInvalid(format!(
                        "edge ({a},{b}) is shared by {n} triangles; mesh is not conforming"
                    )))
                }
            }
        }
        for v in 0..self.n_vertices() {
            if self.boundary[v] != on_boundary_edge[v] {
                return Err(Error::MeshInvalid(format!(
                    "vertex {v}: boundary flag {} but the triangulation says {}",
                    self.boundary[v], on_boundary_edge[v]
                )));
            }
        }
        // sum of patches counts each triangle three times
        let patch_total: f64 = self.patch_area.iter().sum();
        if (patch_total - 3.0 * self.area).abs() > 1e-12 * 3.0 * self.area {
            return Err(Error::MeshInvalid(format!(
                "patch areas sum to {patch_total} but 3 * area = {}",
                3.0 * self.area
            )));
        }
        Ok(())
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut min = f64::INFINITY;
        for tri in &self.triangles {
            let p = [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]];
            for k in 0..3 {
                let a = p[k];
                let b = p[(k + 1) % 3];
                let c = p[(k + 2) % 3];
                let u = [b.x - a.x, b.y - a.y];
                let v = [c.x - a.x, c.y - a.y];
                let dot = u[0] * v[0] + u[1] * v[1];
                let cross = u[0] * v[1] - u[1] * v[0];
                min = min.min(cross.atan2(dot).abs());
            }
        }
        min.to_degrees()
    }
}
