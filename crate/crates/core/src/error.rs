use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point was passed outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A shape could not be sampled into a valid boundary frame.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    /// Contrast outside `|lambda| >= 1/2`, or sigma equal to one.
    #[error("contrast error: {0}")]
    Contrast(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    /// The finite section of the Grunsky operator is not a contraction
    /// relative to `2|lambda|`.
    #[error("finite section ill-conditioned: ||G|| = {norm:.6} >= 2|lambda| = {bound:.6}")]
    Truncation { norm: f64, bound: f64 },

    #[error("degenerate inclusion: {0}")]
    DegenerateInclusion(String),

    #[error("degenerate equivalent ellipse: denominator {denominator:.3e} below threshold {threshold:.3e}")]
    DegenerateEllipse { denominator: f64, threshold: f64 },

    #[error("ellipse map is not univalent: |e1| = {e1_abs:.6} >= gamma_e^2 = {gamma_sq:.6}")]
    NonUnivalent { e1_abs: f64, gamma_sq: f64 },

    /// `|sigma - gamma_D^2|` too small for the N^(1) channel of the disk
    /// recovery.
    #[error("near-singular denominator |sigma - gamma_D^2| = {gap:.3e} (threshold {threshold:.3e})")]
    NearSingular { gap: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
