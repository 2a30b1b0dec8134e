//! Nodal symmetric tensor fields and the double-regularization recovery of a
//! discrete Hessian from a P1 function: two screened elliptic solves per
//! component, the first over the zero-boundary space, the second over the whole
//! vertex set, both with the triangle-size-weighted stiffness
//! `c sum_T |T| int_T grad . grad` plus the lumped mass.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{
    assemble, p1_gradients, scatter_interior, solve_spd, CsrMatrix, DofMap, NodalField,
    SparseSpdSystem,
};
use crate::mesh::TriMesh;
use crate::tensor::SymTensor2;

/// One symmetric 2x2 tensor per mesh vertex.
#[derive(Clone, Debug)]
pub struct SymTensorField {
    mesh: Arc<TriMesh>,
    pub values: Vec<SymTensor2>,
}

impl SymTensorField {
    pub fn zero(mesh: &Arc<TriMesh>) -> Self {
        SymTensorField { mesh: mesh.clone(), values: vec![SymTensor2::ZERO; mesh.n_vertices()] }
    }

    pub fn identity(mesh: &Arc<TriMesh>) -> Self {
        SymTensorField {
            mesh: mesh.clone(),
            values: vec![SymTensor2::identity(); mesh.n_vertices()],
        }
    }

    pub fn from_fn(mesh: &Arc<TriMesh>, mut f: impl FnMut(crate::mesh::Point2) -> SymTensor2) -> Self {
        SymTensorField {
            mesh: mesh.clone(),
            values: mesh.vertices.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    /// Pointwise map over the vertex tensors.
    pub fn map(&self, f: impl Fn(SymTensor2) -> SymTensor2) -> Self {
        SymTensorField {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|&t| f(t)).collect(),
        }
    }

    /// Pointwise positive-semidefinite projection.
    pub fn project_psd(&self) -> Self {
        self.map(SymTensor2::project_psd)
    }

    /// Pointwise cofactor field.
    pub fn cofactor(&self) -> Self {
        self.map(SymTensor2::cofactor)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values
            .iter()
            .map(|t| t.min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Pointwise relaxation of the tensor state towards a recovered Hessian:
/// `P_+[ e^(-gamma tau) p_old + (1 - e^(-gamma tau)) hess ]` at every vertex.
pub fn relax_p(
    p_old: &SymTensorField,
    hess: &SymTensorField,
    gamma: f64,
    tau: f64,
) -> Result<SymTensorField> {
    if !Arc::ptr_eq(p_old.mesh(), hess.mesh()) {
        return Err(Error::MeshMismatch);
    }
    let decay = (-gamma * tau).exp();
    let blend = 1.0 - decay;
    let values = p_old
        .values
        .iter()
        .zip(&hess.values)
        .map(|(&p, &h)| p.scale(decay).add(h.scale(blend)).project_psd())
        .collect();
    Ok(SymTensorField { mesh: p_old.mesh.clone(), values })
}

/// The two regularization operators for a mesh, assembled and reused across
/// every recovery on that mesh (they do not depend on the input function).
pub struct HessianOperator {
    mesh: Arc<TriMesh>,
    /// Zero-boundary operator for the first solve.
    interior: CsrMatrix,
    /// Whole-space operator for the second solve.
    full: CsrMatrix,
}

impl HessianOperator {
    pub fn new(mesh: &Arc<TriMesh>, c: f64) -> Self {
        let identity = |_: usize| SymTensor2::identity();
        let interior = assemble(
            mesh,
            &DofMap::interior(mesh),
            identity,
            |t| c * mesh.triangle_area[t],
            true,
        );
        let full = assemble(
            mesh,
            &DofMap::all(mesh),
            identity,
            |t| c * mesh.triangle_area[t],
            true,
        );
        HessianOperator { mesh: mesh.clone(), interior, full }
    }

    /// Recovers the three components of the discrete Hessian of `u`.
    pub fn recover(&self, u: &NodalField) -> Result<SymTensorField> {
        if !Arc::ptr_eq(u.mesh(), &self.mesh) {
            return Err(Error::MeshMismatch);
        }
        let mesh = &self.mesh;
        let nv = mesh.n_vertices();
        let mut out = SymTensorField::zero(mesh);
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            // first pass: -(1/2) int [d_i u d_j phi + d_j u d_i phi], phi in V_0h
            let mut rhs = vec![0.0; mesh.n_interior()];
            for t in 0..mesh.triangles.len() {
                let (grads, area) = p1_gradients(mesh, t);
                let tri = mesh.triangles[t];
                let mut gu = [0.0, 0.0];
                for k in 0..3 {
                    gu[0] += u.values[tri[k]] * grads[k][0];
                    gu[1] += u.values[tri[k]] * grads[k][1];
                }
                for k in 0..3 {
                    if let Some(dof) = mesh.interior_index[tri[k]] {
                        rhs[dof] -= 0.5 * area * (gu[i] * grads[k][j] + gu[j] * grads[k][i]);
                    }
                }
            }
            let pi = solve_spd(&SparseSpdSystem { matrix: self.interior.clone(), rhs })?;
            let pi = scatter_interior(mesh, &pi);

            // second pass: lift to the whole space against the lumped mass of pi
            let rhs: Vec<f64> = (0..nv)
                .map(|k| mesh.patch_area[k] / 3.0 * pi.values[k])
                .collect();
            let d2 = solve_spd(&SparseSpdSystem { matrix: self.full.clone(), rhs })?;

            for k in 0..nv {
                match (i, j) {
                    (0, 0) => out.values[k].a11 = d2[k],
                    (0, 1) => out.values[k].a12 = d2[k],
                    _ => out.values[k].a22 = d2[k],
                }
            }
        }
        Ok(out)
    }
}

/// Discrete Hessian by double regularization with constant `c` (about 1).
pub fn discrete_hessian(mesh: &Arc<TriMesh>, u: &NodalField, c: f64) -> Result<SymTensorField> {
    HessianOperator::new(mesh, c).recover(u)
}
