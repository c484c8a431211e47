//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by graph construction, spectral assembly, and the
/// reducibility machinery.
#[derive(Debug, Clone, Error)]
pub enum QgError {
    /// The energy hits a Dirichlet eigenvalue of one or more edges, where
    /// the edge Dirichlet-to-Neumann maps have poles.
    #[error("lambda = {lambda} is a Dirichlet eigenvalue for edge(s) {edges:?}")]
    PoleAtLambda { lambda: f64, edges: Vec<usize> },

    /// Operands live in different numbers of Floquet variables (or the
    /// periodicity dimensions of two graphs differ).
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// A Laurent polynomial cannot be evaluated at a point with a zero
    /// coordinate.
    #[error("evaluation point has a zero coordinate (index {0})")]
    ZeroEvaluationPoint(usize),

    /// The powers of the composite variable are linearly dependent, so the
    /// fit coefficients are not determined.
    #[error("powers of the composite variable are linearly dependent (numerical rank {rank} < {cols})")]
    RankDeficient { rank: usize, cols: usize },

    /// The Newton polytope of the polynomial handed to the factor probe has
    /// too many lattice points for the bounded search.
    #[error("support too large for the factor probe: {points} lattice points (limit {limit})")]
    SupportTooLarge { points: usize, limit: usize },

    /// A vertex id does not exist in the graph.
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    /// An edge id does not exist in the graph.
    #[error("unknown edge {0}")]
    UnknownEdge(usize),

    /// Subdivision fraction must be strictly interior to (0, 1).
    #[error("subdivision point t = {0} is not strictly inside (0, 1)")]
    BoundaryT(f64),

    /// Single-vertex joins require Robin conditions at the joined vertices.
    #[error("join vertex {0} carries a Dirichlet condition")]
    DirichletJoinPoint(usize),

    /// The dispersion is not a polynomial in the supplied composite
    /// variable up to the requested degree.
    #[error("dispersion is not a polynomial in the composite variable (residual {residual:.3e})")]
    StructureNotFound { residual: f64 },

    /// Corresponding edges across layers do not share a Dirichlet spectrum.
    #[error("layers {layer_a} and {layer_b} are not Dirichlet-isospectral on edge {edge} (zero mismatch {mismatch:.3e})")]
    IsospectralityViolation {
        layer_a: usize,
        layer_b: usize,
        edge: usize,
        mismatch: f64,
    },

    /// A verification sample landed on a Dirichlet eigenvalue of an edge
    /// involved in the identity being checked.
    #[error("sample at lambda = {0} hits a Dirichlet eigenvalue of an involved edge")]
    SampleAtPole(f64),

    /// The two routes of the join calculus disagree, which signals an
    /// assembly bug.
    #[error("join identity violated: relative error {0:.3e}")]
    JoinIdentityViolation(f64),

    /// A potential description is malformed.
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// A graph failed validation.
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// A config file could not be parsed.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, QgError>;
