use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    /// Postselection probability is exactly zero, so no centroid exists.
    #[error("undefined postselection: the postselected meter has zero norm")]
    UndefinedPostselection,

    #[error(
        "orthogonal pre/postselection: |<post|pre>| = {overlap:e} is below the floor {floor:e}"
    )]
    OrthogonalSelection { overlap: f64, floor: f64 },

    #[error("weak-value divergence: alpha + b0 t = {theta:e} is within the overlap floor of 0")]
    Divergence { theta: f64 },

    #[error("observable is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("grid too small: extent {extent:e} m < required {required:e} m")]
    GridTooSmall { extent: f64, required: f64 },

    #[error("density at the grid boundary is {ratio:e} of the peak (limit {limit:e})")]
    BoundaryMass { ratio: f64, limit: f64 },

    #[error("no extremum: coupling a*b1*t is zero")]
    NoExtremum,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
