//! Upper bounds on the scaling exponent μ of polar codes over binary
//! memoryless symmetric (BMS) channels.
//!
//! The crate follows one pipeline from end to end:
//!
//! 1. [`channel`] — exact finite BSC-mixture channel algebra, used as the
//!    brute-force oracle for every closed-form inequality.
//! 2. [`scalar`] — the closed-form bounds: the serial lower bound
//!    `f(x,y) = √(x²+y²−x²y²)`, the trivariate function `g(x,y,z)` and its
//!    diagonal closed form.
//! 3. [`envelope`] — the discrete tri-convex lower envelope of `g` on a
//!    uniform 3-D mesh, with a fast Graham-scan convexifier.
//! 4. [`rigor`] — outward-rounded interval arithmetic and certified
//!    sub-gridpoint lower-bound meshes (monotone shift, smoothness
//!    correction, and their merge).
//! 5. [`power`] — the classic and two-state power iterations that turn a
//!    diagonal lower bound into an eigenvalue λ and the bound
//!    μ ≤ 1/(−log₂ λ).
//! 6. [`pipeline`] — batch orchestration, mesh caching, reports, and the
//!    randomized verification suites.
//!
//! Running the full pipeline at mesh resolution n = 200 and grid size
//! ℓ = 10⁶ certifies μ ≤ 4.63 (the computed value is ≈ 4.621); the classic
//! single-function iteration gives ≈ 4.695 and the non-rigorous limit of the
//! method is ≈ 4.611.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod channel;
pub mod envelope;
pub mod pipeline;
pub mod power;
pub mod rigor;
pub mod scalar;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument was outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver hit its iteration cap before reaching the
    /// requested tolerance. The payload carries the best residual seen.
    #[error("iteration limit {limit} reached; best residual {residual:.3e}")]
    IterationLimit { limit: usize, residual: f64 },

    /// The envelope convexifier hit its pass cap; the best mesh computed so
    /// far is returned along with its convexity residual.
    #[error("convexification pass cap {limit} reached; residual {residual:.3e}")]
    EnvelopeIterationLimit {
        limit: usize,
        residual: f64,
        best: Box<envelope::Mesh3>,
    },

    /// Two meshes of different resolutions were combined.
    #[error("mesh resolution mismatch: {0} vs {1}")]
    ResolutionMismatch(usize, usize),

    /// A mesh allocation would exceed the configured memory budget.
    #[error("mesh resolution {n} exceeds the memory budget ({bytes} bytes)")]
    MemoryBudget { n: usize, bytes: u64 },

    /// A cache file failed validation (bad header, size mismatch, ...).
    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
