//! P1 finite-element primitives: nodal fields, the vertex-lumped inner product
//! `(phi, theta)_h = (1/3) sum_k |omega_k| phi(Q_k) theta(Q_k)`, stiffness
//! assembly with a tensor coefficient, and the screened elliptic substep of the
//! splitting scheme.

mod assemble;
mod sparse;

pub use assemble::assemble_stiffness;
pub use sparse::{solve_spd, CsrMatrix, SparseSpdSystem, CG_TOLERANCE};

pub(crate) use assemble::{
    assemble, assemble_laplacian, p1_gradients, triangle_mean_tensor, DofMap,
};
pub(crate) use sparse::{dot, norm2};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hessian::SymTensorField;
use crate::mesh::{Point2, TriMesh};

/// One value per mesh vertex; a P1 function through its nodal values.
#[derive(Clone, Debug)]
pub struct NodalField {
    mesh: Arc<TriMesh>,
    pub values: Vec<f64>,
}

impl NodalField {
    pub fn zero(mesh: &Arc<TriMesh>) -> Self {
        NodalField { mesh: mesh.clone(), values: vec![0.0; mesh.n_vertices()] }
    }

    pub fn constant(mesh: &Arc<TriMesh>, value: f64) -> Self {
        NodalField { mesh: mesh.clone(), values: vec![value; mesh.n_vertices()] }
    }

    pub fn from_values(mesh: &Arc<TriMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_vertices() {
            return Err(Error::Invalid(format!(
                "{} values for a mesh with {} vertices",
                values.len(),
                mesh.n_vertices()
            )));
        }
        Ok(NodalField { mesh: mesh.clone(), values })
    }

    /// Interpolates a function of position at the vertices.
    pub fn interpolate(mesh: &Arc<TriMesh>, f: impl Fn(Point2) -> f64) -> Self {
        NodalField {
            mesh: mesh.clone(),
            values: mesh.vertices.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn same_mesh(&self, other: &NodalField) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh)
    }

    /// True if the field vanishes at every boundary vertex.
    pub fn is_v0h(&self) -> bool {
        self.mesh
            .boundary
            .iter()
            .zip(&self.values)
            .all(|(&b, &v)| !b || v == 0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Lumped norm `sqrt((v, v)_h)`.
    pub fn norm_0h(&self) -> f64 {
        let mut acc = 0.0;
        for (k, &v) in self.values.iter().enumerate() {
            acc += self.mesh.patch_area[k] * v * v;
        }
        (acc / 3.0).sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    /// `|self - other|_0h`.
    pub fn increment_norm(&self, other: &NodalField) -> Result<f64> {
        if !self.same_mesh(other) {
            return Err(Error::MeshMismatch);
        }
        let mut acc = 0.0;
        for k in 0..self.values.len() {
            let d = self.values[k] - other.values[k];
            acc += self.mesh.patch_area[k] * d * d;
        }
        Ok((acc / 3.0).sqrt())
    }
}

/// Lumped inner product `(phi, theta)_h`; the sum runs over all vertices.
pub fn lumped_inner(phi: &NodalField, theta: &NodalField) -> Result<f64> {
    if !phi.same_mesh(theta) {
        return Err(Error::MeshMismatch);
    }
    let mesh = phi.mesh();
    let mut acc = 0.0;
    for k in 0..phi.values.len() {
        acc += mesh.patch_area[k] * phi.values[k] * theta.values[k];
    }
    Ok(acc / 3.0)
}

/// Solves `(u, v)_h + tau int (eps I + cof p) grad u . grad v = (g, v)_h` for
/// `u` in the zero-boundary space; `g` enters as data only.
pub(crate) fn elliptic_step_with_rhs(
    p: &SymTensorField,
    g: &NodalField,
    eps: f64,
    tau: f64,
) -> Result<NodalField> {
    let mesh = g.mesh().clone();
    if !Arc::ptr_eq(p.mesh(), &mesh) {
        return Err(Error::MeshMismatch);
    }
    if tau == 0.0 {
        // mass-only system: the solution is g restricted to the interior
        let mut out = NodalField::zero(&mesh);
        for &v in &mesh.interior_vertices {
            out.values[v] = g.values[v];
        }
        return Ok(out);
    }
    let coeff = p.map(|t| t.cofactor().add_scaled_identity(eps));
    let matrix = assemble_stiffness(&mesh, &coeff, tau)?;
    let rhs: Vec<f64> = mesh
        .interior_vertices
        .iter()
        .map(|&v| mesh.patch_area[v] / 3.0 * g.values[v])
        .collect();
    let x = solve_spd(&SparseSpdSystem { matrix, rhs })?;
    Ok(scatter_interior(&mesh, &x))
}

/// The elliptic substep of the splitting scheme:
/// `(u, v)_h + tau int (eps I + cof p) grad u . grad v = (u_prev, v)_h`.
/// The lumped-norm contraction `|u|_0h <= |u_prev|_0h` holds by SPD structure.
pub fn elliptic_step(
    p: &SymTensorField,
    u_prev: &NodalField,
    eps: f64,
    tau: f64,
) -> Result<NodalField> {
    elliptic_step_with_rhs(p, u_prev, eps, tau)
}

/// Poisson solve `int grad u . grad v = (f, v)_h` over the zero-boundary space.
pub fn poisson_solve(mesh: &Arc<TriMesh>, f: &NodalField) -> Result<NodalField> {
    if !Arc::ptr_eq(f.mesh(), mesh) {
        return Err(Error::MeshMismatch);
    }
    let matrix = assemble_laplacian(mesh);
    let rhs: Vec<f64> = mesh
        .interior_vertices
        .iter()
        .map(|&v| mesh.patch_area[v] / 3.0 * f.values[v])
        .collect();
    let x = solve_spd(&SparseSpdSystem { matrix, rhs })?;
    Ok(scatter_interior(mesh, &x))
}

/// Expands an interior-DOF vector to a full field with zero boundary values.
pub(crate) fn scatter_interior(mesh: &Arc<TriMesh>, interior: &[f64]) -> NodalField {
    let mut out = NodalField::zero(mesh);
    for (dof, &v) in mesh.interior_vertices.iter().enumerate() {
        out.values[v] = interior[dof];
    }
    out
}

/// Restriction of a nodal field to the horizontal line `y = line_y`: vertex hits
/// plus linear interpolation at every mesh-edge crossing, sorted by `x`.
pub fn centerline_profile(u: &NodalField, line_y: f64) -> Vec<(f64, f64)> {
    let mesh = u.mesh();
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for (k, p) in mesh.vertices.iter().enumerate() {
        if (p.y - line_y).abs() <= 1e-12 {
            samples.push((p.x, u.values[k]));
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * mesh.triangles.len());
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edges.push(if a < b { (a, b) } else { (b, a) });
        }
    }
    edges.sort_unstable();
    edges.dedup();
    for (a, b) in edges {
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let (da, db) = (pa.y - line_y, pb.y - line_y);
        if da * db < 0.0 {
            let t = da / (da - db);
            samples.push((pa.x + t * (pb.x - pa.x), u.values[a] + t * (u.values[b] - u.values[a])));
        }
    }
    samples.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    // crossings through a vertex that sits on the line duplicate the vertex hit
    samples.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12);
    samples
}

/// Exact P1 energy `int (G grad u) . grad u` with the per-triangle mean
/// coefficient rule; `G = eps I + cof(p)`.
pub(crate) fn coefficient_energy(p: &SymTensorField, u: &NodalField, eps: f64) -> Result<f64> {
    if !Arc::ptr_eq(p.mesh(), u.mesh()) {
        return Err(Error::MeshMismatch);
    }
    let mesh = u.mesh();
    let coeff = p.map(|t| t.cofactor().add_scaled_identity(eps));
    let mut energy = 0.0;
    for t in 0..mesh.triangles.len() {
        let (grads, area) = p1_gradients(mesh, t);
        let tri = mesh.triangles[t];
        let mut gu = [0.0, 0.0];
        for i in 0..3 {
            gu[0] += u.values[tri[i]] * grads[i][0];
            gu[1] += u.values[tri[i]] * grads[i][1];
        }
        let g = triangle_mean_tensor(&coeff, mesh, t);
        energy += area * g.bilinear(gu, gu);
    }
    Ok(energy)
}
