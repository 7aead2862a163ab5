use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {element} has non-positive Jacobian determinant {det:e} at quadrature point {point}")]
    NonPositiveJacobian { element: usize, point: usize, det: f64 },

    #[error("unsupported polynomial degree (p_t = {p_t}, p_s = {p_s}); supported range is 0..=4")]
    UnsupportedDegree { p_t: usize, p_s: usize },

    #[error("unsupported spatial dimension {0}; expected 1 or 2")]
    UnsupportedDimension(usize),

    #[error("mass matrix of element {element} is numerically singular")]
    SingularMass { element: usize },

    #[error("local block A_uu of element {element} is singular (condition estimate {condition:e})")]
    SingularLocalBlock { element: usize, condition: f64 },

    #[error("facet solve failed ({reason}): backward error {residual:e}")]
    SolveFailure { residual: f64, reason: String },

    #[error("slab {slab}: {source}")]
    Slab {
        slab: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("eigenvalue solve failed: {0}")]
    EigSolveFailure(String),

    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("mesh format error on line {line}: {message}")]
    MeshFormat { line: usize, message: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn in_slab(self, slab: usize) -> Error {
        match self {
            e @ Error::Slab { .. } => e,
            e => Error::Slab { slab, source: Box::new(e) },
        }
    }

    pub fn config(field: &str, message: impl Into<String>) -> Error {
        Error::Config { field: field.to_string(), message: message.into() }
    }
}
