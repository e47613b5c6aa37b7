use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("cone must be convex (opening ≤ π or full plane), got opening {0:.6} rad")]
    NonConvexCone(f64),

    #[error("mesh generation failed: {0}")]
    Mesh(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("problem has no Dirichlet boundary (Γ0 empty)")]
    NoDirichletBoundary,

    #[error("operation requires a degree-{required} field, got degree {actual}")]
    Degree { required: usize, actual: usize },

    #[error("linear solver failed: {reason} (relative residual {residual:.3e})")]
    Solver { reason: String, residual: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("center violates the Γ1 constraint: |<z, ν>| = {0:.3e}")]
    CenterConstraint(f64),

    #[error("degenerate normal derivative: min u_ν = {0:.6e} is not positive")]
    NonPositiveFlux(f64),

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config error: {0}")]
    ConfigValue(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidDomain(_)
            | Error::NonConvexCone(_)
            | Error::InvalidArgument(_)
            | Error::MissingInput(_)
            | Error::Config { .. }
            | Error::ConfigValue(_)
            | Error::NoDirichletBoundary
            | Error::Degree { .. }
            | Error::CenterConstraint(_) => 1,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 2,
        }
    }
}
