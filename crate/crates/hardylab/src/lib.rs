//! Numerical verification of Hardy inequalities on discretized domains.
//!
//! The library builds uniform Cartesian grids over a handful of planar and
//! spatial domains, computes exact distance-to-boundary fields δ, and checks
//! three families of statements about the Hardy quotient
//!
//! ```text
//!     Q(ζ) = ∫ |ζ/δ|^p dx / ∫ |∇ζ|^p dx
//! ```
//!
//! for compactly supported grid functions ζ:
//!
//! * `geometry` owns domains, grids, distance fields and the eikonal and
//!   Lipschitz audits of δ.
//! * `fields` owns discrete calculus: forward-difference gradients, lattice
//!   quadrature, the Hardy quotient and the two sides of the logarithmic
//!   Caccioppoli estimate.
//! * `barriers` constructs p-superharmonic barrier candidates (δ on convex
//!   domains, δ^α for p > n, the exterior-sphere barrier for p < n) and
//!   certifies them against the exhaustive nonnegative hat-function basis.
//! * `estimator` estimates best constants by power-family sweeps and
//!   projected gradient ascent, probes the punctured-disk failure at p = n,
//!   and checks the classical series and interval inequalities.
//! * `report` and `config` serialize reports and parse run configurations
//!   for the `hardylab` binary.

pub mod barriers;
pub mod config;
pub mod estimator;
pub mod fields;
pub mod geometry;
pub mod jobs;
pub mod report;

/// Library-wide error type; variants name the precondition they guard.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported domain kind for this operation: {0}")]
    UnsupportedKind(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("exterior sphere radius is not set on this domain")]
    MissingRadius,
    #[error("zero denominator: the gradient of the test function vanishes identically")]
    ZeroDenominator,
    #[error("grid mismatch: fields live on different grids")]
    GridMismatch,
    #[error("barrier is not strictly positive on the test-function support")]
    NonpositiveBarrier,
    #[error("parameter out of range: {0}")]
    ParamRange(String),
    #[error("the distance barrier requires a convex domain")]
    NonConvexDomain,
    #[error("test function must be nonnegative everywhere")]
    NegativeTestFunction,
    #[error("wrong barrier construction: {0}")]
    WrongConstruction(String),
    #[error("family exponent t = {t} is at or below the integrability threshold {threshold}")]
    BelowThreshold { t: f64, threshold: f64 },
    #[error("ascent made no progress: {0}")]
    NonConvergence(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
