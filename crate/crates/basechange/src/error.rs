//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The requested extension parameters violate the tameness hypotheses
    /// (p odd, p coprime to e*f, e | p-1, gcd(e, f) = 1).
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),

    /// Teichmuller representative of the zero residue does not exist.
    #[error("zero residue has no Teichmuller representative")]
    ZeroResidue,

    /// A value is indistinguishable from zero (or otherwise ambiguous) at the
    /// working precision, so the operation cannot certify its output.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// Input to a d-th root was not topologically unipotent.
    #[error("not topologically unipotent: {0}")]
    NotTopologicallyUnipotent(String),

    /// A regular-semisimple precondition failed (vanishing discriminant at
    /// precision, or a centralizer of unexpected dimension).
    #[error("irregular input: {0}")]
    IrregularInput(String),

    /// Argument lies outside the domain of the Cayley transform or its inverse.
    #[error("not in domain: {0}")]
    NotInDomain(String),

    /// The coefficient ring of the tower does not contain a primitive d-th
    /// root of unity, so the requested eigenspace split cannot be represented.
    #[error("root of unity of order {0} unavailable in this tower")]
    RootOfUnityUnavailable(u32),

    /// The descent iteration failed to gain depth, indicating a violated
    /// precondition on the lattice or the input.
    #[error("descent did not converge: {0}")]
    NonConvergence(String),

    /// The transfer-factor precondition (gamma is a norm of delta) failed.
    #[error("gamma is not a norm of delta")]
    NotANorm,

    /// Enumeration reached the configured depth without certifying support
    /// exhaustion.
    #[error("enumeration depth exceeded: {0}")]
    DepthExceeded(String),

    /// A matching comparison was requested but one side is uncertified at the
    /// given depth.
    #[error("uncertified comparison: {0}")]
    UncertifiedComparison(String),

    /// Experiment configuration is invalid.
    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    /// Input shape accepted by the API but outside the implemented scope.
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
