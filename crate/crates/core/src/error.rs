use thiserror::Error;

/// Errors produced by the algebra, duality and verification layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed algebra: {0}")]
    MalformedAlgebra(String),

    #[error("malformed structure: {0}")]
    MalformedStructure(String),

    #[error("signature mismatch between `{0}` and `{1}`")]
    SignatureMismatch(String, String),

    #[error("closure of the empty set needs a seed: `{0}` has no constants")]
    NeedsSeed(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("not a congruence of `{0}`")]
    InvalidCongruence(String),

    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("unknown generator: {0}")]
    UnknownGenerator(String),

    #[error("size guard exceeded for {what}: needs {needed}, limit {limit}")]
    SizeGuard {
        what: String,
        needed: usize,
        limit: usize,
    },

    #[error("no separating map for {0}")]
    NoWitness(String),

    #[error("involution is not well defined on the quotient: {0}")]
    IllDefinedInvolution(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
