use thiserror::Error;

/// Errors surfaced by the library.  The CLI maps them to exit codes: schema
/// problems exit 2, mathematical domain errors exit 3, resource bounds exit 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no primitive representative")]
    ZeroVector,

    #[error("sample point lies on a chamber wall (some vertex slack is zero)")]
    OnWall,

    #[error("no basis has all slacks positive at the sample point")]
    EmptyChamber,

    #[error("coset condition varies over the parameter space")]
    NonUniformCosetCondition,

    #[error("evaluation direction pairs degenerately with a cone generator")]
    DegenerateDirection,

    #[error("negative-order coefficients failed to cancel in a vertex sum")]
    ResidueCancellationFailure,

    #[error("support numbers from the given normals do not reproduce the vertices")]
    NormalsInsufficient,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Io(_) => 2,
            Error::ResourceBound(_) => 4,
            _ => 3,
        }
    }
}
