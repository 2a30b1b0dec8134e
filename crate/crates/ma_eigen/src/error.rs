use std::fmt;

/// Errors produced by meshing, assembly, linear solves and the splitting loops.
#[derive(Debug)]
pub enum Error {
    /// Parse or validation failure in the mesh text format; `line` is 1-based.
    MeshFormat { line: usize, msg: String },
    /// A structural mesh invariant is violated (conformity, orientation, flags).
    MeshInvalid(String),
    /// The requested mesh resolution cannot produce a valid boundary polygon.
    InfeasibleResolution(String),
    /// Two fields built on different meshes were combined.
    MeshMismatch,
    /// A coefficient tensor is indefinite beyond tolerance at some vertex.
    NotPsd { vertex: usize, min_eigenvalue: f64 },
    /// Conjugate gradients hit its iteration cap.
    LinearSolve { iterations: usize, residual: f64 },
    /// A constraint-projection loop hit its iteration cap.
    SqpNoConvergence { iterations: usize, constraint_residual: f64 },
    /// An exponent in the Bratu projection left the representable range.
    SqpOverflow { value: f64 },
    /// An operation received an identically zero field where a nonzero one is required.
    ZeroField(&'static str),
    /// A fixed-point iteration (initialization or shooting) failed to converge.
    NoConvergence { what: &'static str, iterations: usize, residual: f64 },
    /// Invalid argument or configuration value.
    Invalid(String),
    Io(std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MeshFormat { line, msg } => write!(f, "mesh file, line {line}: {msg}"),
            Error::MeshInvalid(msg) => write!(f, "invalid mesh: {msg}"),
            Error::InfeasibleResolution(msg) => write!(f, "infeasible target resolution: {msg}"),
            Error::MeshMismatch => write!(f, "fields are defined on different meshes"),
            Error::NotPsd { vertex, min_eigenvalue } => write!(
                f,
                "coefficient tensor at vertex {vertex} is indefinite (min eigenvalue {min_eigenvalue:e}); \
                 a positive-semidefinite projection is missing upstream"
            ),
            Error::LinearSolve { iterations, residual } => write!(
                f,
                "conjugate gradients reached the iteration cap ({iterations}) with relative residual {residual:e}"
            ),
            Error::SqpNoConvergence { iterations, constraint_residual } => write!(
                f,
                "constraint projection did not converge in {iterations} iterations \
                 (constraint residual {constraint_residual:e})"
            ),
            Error::SqpOverflow { value } => write!(
                f,
                "constraint projection diverged: exponent argument {value:e} exceeds the overflow guard"
            ),
            Error::ZeroField(what) => write!(f, "{what} is identically zero"),
            Error::NoConvergence { what, iterations, residual } => write!(
                f,
                "{what} did not converge within {iterations} iterations (residual {residual:e})"
            ),
            Error::Invalid(msg) => write!(f, "{msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
