use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "jacobian is rank deficient: smallest singular value {sigma_min:e} <= tolerance {tol:e}"
    )]
    RankDeficient { sigma_min: f64, tol: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("vector is not normal: tangential component {tangential:e} exceeds {tol:e}")]
    NotNormal { tangential: f64, tol: f64 },

    #[error("change-of-basis factor R is singular")]
    SingularR,

    #[error("principal curvatures are undefined for a zero normal vector")]
    ZeroNormal,

    #[error("metric matrix is not symmetric positive definite")]
    NotSpd,

    #[error("relative condition number undefined for a zero output")]
    ZeroOutput,

    #[error("point lies outside the domain: {0}")]
    OutsideDomain(String),

    #[error(
        "linear triangulation kernel is ambiguous (singular values {sigma_a:e} and {sigma_b:e})"
    )]
    DegenerateKernel { sigma_a: f64, sigma_b: f64 },

    #[error("triangulated point is at infinity (homogeneous weight {0:e})")]
    AtInfinity(f64),

    #[error("iterates left the domain after {retries} damping increases")]
    DomainEscape { retries: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no records left to summarize")]
    Empty,
}
