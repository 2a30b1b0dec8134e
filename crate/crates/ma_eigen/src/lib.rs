//! Ground-state solutions of nonlinear eigenvalue problems for the Monge-Ampere
//! operator `u -> det D^2 u` on convex 2-D domains.
//!
//! Three problems are solved, all posed for `u <= 0` convex with `u = 0` on the
//! boundary and a constraint fixing the scale of the eigenfunction:
//!
//! * `det D^2 u = lambda |u|`       with `int |u|^2 = 1`
//! * `det D^2 u = lambda |u|^d`     with `int |u|^(d+1) = 1`
//! * `det D^2 u = lambda e^(-u)`    with `int (e^(-u) - 1) = C`
//!
//! The method rewrites each problem in divergence form through the cofactor
//! identity `div(cof(D^2 u) grad u) = d det D^2 u`, relaxes the Hessian into an
//! auxiliary tensor field, and time-steps the resulting constrained gradient
//! flow by operator splitting: a linear elliptic substep, a pointwise relaxation
//! of the tensor field with projection onto positive-semidefinite matrices, and
//! a projection onto the constraint manifold (a normalization, or a sequential
//! quadratic programming loop for the nonlinear constraints).
//!
//! Space is discretized with P1 triangles, a vertex-lumped inner product and a
//! double-regularization Hessian recovery. Independent radial shooting solvers
//! and dense linear-algebra references live in [`oracle`] for verification.

pub mod continuation;
pub mod error;
pub mod fem;
pub mod hessian;
pub mod io;
pub mod mesh;
pub mod oracle;
pub mod solver;
pub mod tensor;

pub mod cli;

pub use error::{Error, Result};
pub use mesh::{generate_mesh, load_mesh, save_mesh, DomainKind, DomainSpec, Point2, TriMesh};
pub use tensor::SymTensor2;
