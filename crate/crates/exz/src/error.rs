//! Error taxonomy for the whole crate.
//!
//! Geometry rejections are reported exactly (they come from rational
//! predicates); numerical failures carry enough context to retune the
//! offending parameter (degree, precision, mesh density, step budget).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    // geometry
    #[error("polygon boundary self-intersects near vertex {vertex_index}")]
    SelfIntersecting { vertex_index: usize },

    #[error("polygon has fewer than 3 distinct vertices or zero area")]
    DegeneratePolygon,

    #[error("union parts {first} and {second} overlap or touch")]
    OverlappingUnionParts { first: usize, second: usize },

    #[error("sector is degenerate: {reason}")]
    DegenerateSector { reason: String },

    #[error("triangulation failed: {reason}")]
    TriangulationFailed { reason: String },

    // numerics
    #[error("Newton iteration for Gauss-Legendre node {index} of {count} did not converge")]
    NoConvergence { index: usize, count: usize },

    #[error("QR iteration stagnated after {iterations} sweeps on a {size}x{size} block")]
    QrStagnation { iterations: usize, size: usize },

    // orthopoly
    #[error(
        "quadrature degree {degree} too coarse for n_max {n_max}: \
         orthonormality residual {residual:e} exceeds tolerance {tol:e}"
    )]
    QuadratureTooCoarse {
        degree: u32,
        n_max: usize,
        residual: f64,
        tol: f64,
    },

    #[error("norm collapse at step {step}: remaining mass below working precision")]
    PrecisionExhausted { step: usize },

    #[error("exterior map series has {have} tail coefficients but degree {need} is required")]
    InsufficientSeriesTail { have: usize, need: usize },

    // potential
    #[error("boundary mesh spacing {spacing:e} exceeds diameter/(4*count) = {required:e}")]
    MeshTooCoarse { spacing: f64, required: f64 },

    #[error("logarithmic potential is infinite: evaluation point coincides with atom {atom}")]
    PotentialInfinite { atom: usize },

    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("probe radius {radius:e} leaves the domain along the inward ray")]
    RadiiOutsideDomain { radius: f64 },

    // balayage
    #[error("walk exceeded {max_steps} steps before reaching the boundary shell")]
    MaxStepsExceeded { max_steps: usize },

    #[error("atom {atom} at ({x}, {y}) lies outside the closed domain")]
    AtomOutsideDomain { atom: usize, x: f64, y: f64 },

    #[error("operation unsupported for this geometry: {reason}")]
    GeometryUnsupported { reason: String },

    // diagnostics
    #[error("region filter leaves no mass in one of the compared measures")]
    EmptyRestriction,

    // configuration and serialization
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end: 2 for invalid
    /// input (specs, configs, malformed files), 1 for runtime failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::SelfIntersecting { .. }
            | Error::DegeneratePolygon
            | Error::OverlappingUnionParts { .. }
            | Error::DegenerateSector { .. }
            | Error::MeshTooCoarse { .. }
            | Error::OutsideDomain { .. }
            | Error::RadiiOutsideDomain { .. }
            | Error::AtomOutsideDomain { .. }
            | Error::GeometryUnsupported { .. }
            | Error::EmptyRestriction
            | Error::InsufficientSeriesTail { .. }
            | Error::InvalidConfig(_)
            | Error::Parse(_)
            | Error::Json(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
