//! P1 stiffness assembly. Gradients of the hat functions are triangle-constant,
//! so the variable-coefficient integrals are exact once the tensor coefficient is
//! frozen per triangle (arithmetic mean of its three vertex tensors).

use std::sync::Arc;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::hessian::SymTensorField;
use crate::mesh::TriMesh;
use crate::tensor::SymTensor2;

/// Degrees of freedom the assembled operator ranges over.
#[derive(Clone)]
pub(crate) struct DofMap {
    map: Vec<Option<usize>>,
    n: usize,
}

impl DofMap {
    pub fn interior(mesh: &TriMesh) -> DofMap {
        DofMap { map: mesh.interior_index.clone(), n: mesh.n_interior() }
    }

    pub fn all(mesh: &TriMesh) -> DofMap {
        DofMap {
            map: (0..mesh.n_vertices()).map(Some).collect(),
            n: mesh.n_vertices(),
        }
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.map[vertex]
    }

    pub fn len(&self) -> usize {
        self.n
    }
}

/// Constant gradients of the three hat functions on triangle `t`, and its area.
pub(crate) fn p1_gradients(mesh: &TriMesh, t: usize) -> ([[f64; 2]; 3], f64) {
    let tri = mesh.triangles[t];
    let [a, b, c] = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
    let area = mesh.triangle_area[t];
    let inv = 1.0 / (2.0 * area);
    // grad of the hat at vertex a is rot90(c - b) / (2 |T|) with rot90 the
    // counterclockwise quarter turn (x, y) -> (-y, x)
    (
        [
            [-(c.y - b.y) * inv, (c.x - b.x) * inv],
            [-(a.y - c.y) * inv, (a.x - c.x) * inv],
            [-(b.y - a.y) * inv, (b.x - a.x) * inv],
        ],
        area,
    )
}

/// Local stiffness `K[i][j] = |T| (G grad phi_i) . grad phi_j` for one triangle.
pub(crate) fn local_stiffness(grads: &[[f64; 2]; 3], area: f64, g: SymTensor2) -> [[f64; 3]; 3] {
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = area * g.bilinear(grads[i], grads[j]);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}

/// Core assembler: `sum_T weight(T) K_T(G(T))`, optionally plus the lumped mass
/// `(1/3)|omega_k|` on the diagonal. Triangle order is fixed, the triplet sort is
/// stable, and transposed local entries are pushed with identical values, so the
/// result is exactly symmetric and bit-reproducible.
pub(crate) fn assemble(
    mesh: &TriMesh,
    dofs: &DofMap,
    coeff: impl Fn(usize) -> SymTensor2,
    weight: impl Fn(usize) -> f64,
    with_mass: bool,
) -> CsrMatrix {
    let mut triplets: Vec<(u32, u32, f64)> = Vec::with_capacity(9 * mesh.triangles.len());
    for t in 0..mesh.triangles.len() {
        let w = weight(t);
        if w == 0.0 {
            continue;
        }
        let (grads, area) = p1_gradients(mesh, t);
        let k = local_stiffness(&grads, area, coeff(t));
        let tri = mesh.triangles[t];
        for i in 0..3 {
            let Some(r) = dofs.dof(tri[i]) else { continue };
            for j in 0..3 {
                let Some(c) = dofs.dof(tri[j]) else { continue };
                triplets.push((r as u32, c as u32, w * k[i][j]));
            }
        }
    }
    if with_mass {
        for v in 0..mesh.n_vertices() {
            if let Some(r) = dofs.dof(v) {
                triplets.push((r as u32, r as u32, mesh.patch_area[v] / 3.0));
            }
        }
    }
    CsrMatrix::from_triplets(dofs.len(), triplets)
}

/// Mean of the three vertex tensors, the coefficient rule used everywhere a
/// tensor field enters a stiffness integral.
pub(crate) fn triangle_mean_tensor(field: &SymTensorField, mesh: &TriMesh, t: usize) -> SymTensor2 {
    let tri = mesh.triangles[t];
    field.values[tri[0]]
        .add(field.values[tri[1]])
        .add(field.values[tri[2]])
        .scale(1.0 / 3.0)
}

/// Lumped mass + `scale` times the variable-coefficient stiffness, over the
/// interior degrees of freedom. Errors if the coefficient is indefinite beyond
/// `-1e-10` on the smallest eigenvalue at any vertex.
pub fn assemble_stiffness(
    mesh: &Arc<TriMesh>,
    coeff: &SymTensorField,
    scale: f64,
) -> Result<CsrMatrix> {
    if !Arc::ptr_eq(coeff.mesh(), mesh) {
        return Err(Error::MeshMismatch);
    }
    for (v, t) in coeff.values.iter().enumerate() {
        let min = t.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::NotPsd { vertex: v, min_eigenvalue: min });
        }
    }
    let dofs = DofMap::interior(mesh);
    Ok(assemble(
        mesh,
        &dofs,
        |t| triangle_mean_tensor(coeff, mesh, t),
        |_| scale,
        true,
    ))
}

/// Plain Laplace stiffness over the interior degrees of freedom (no mass term).
pub(crate) fn assemble_laplacian(mesh: &TriMesh) -> CsrMatrix {
    let dofs = DofMap::interior(mesh);
    assemble(mesh, &dofs, |_| SymTensor2::identity(), |_| 1.0, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Point2;

    fn right_triangle_mesh() -> TriMesh {
        TriMesh::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
            vec![[0, 1, 2]],
            vec![true, true, true],
        )
        .unwrap()
    }

    #[test]
    fn local_stiffness_identity_coefficient() {
        // unit right triangle, G = I: the classic local matrix
        let mesh = right_triangle_mesh();
        let (grads, area) = p1_gradients(&mesh, 0);
        let k = local_stiffness(&grads, area, SymTensor2::identity());
        let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (k[i][j] - expected[i][j]).abs() <= 1e-15,
                    "K[{i}][{j}] = {}",
                    k[i][j]
                );
            }
        }
    }

    #[test]
    fn gradients_sum_to_zero() {
        let mesh = right_triangle_mesh();
        let (grads, _) = p1_gradients(&mesh, 0);
        for d in 0..2 {
            let s: f64 = grads.iter().map(|g| g[d]).sum();
            assert!(s.abs() <= 1e-15);
        }
        // hat at vertex 0 decreases towards the opposite edge
        assert_eq!(grads[0], [-1.0, -1.0]);
        assert_eq!(grads[1], [1.0, 0.0]);
        assert_eq!(grads[2], [0.0, 1.0]);
    }

    #[test]
    fn cofactor_of_identity_matches_identity_coefficient() {
        let mesh = right_triangle_mesh();
        let (grads, area) = p1_gradients(&mesh, 0);
        let k_id = local_stiffness(&grads, area, SymTensor2::identity());
        let k_cof = local_stiffness(&grads, area, SymTensor2::identity().cofactor());
        assert_eq!(k_id, k_cof);
    }
}
