use crate::algebra::Signature;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KaError {
    #[error("signature mismatch: {left} vs {right}")]
    SignatureMismatch { left: Signature, right: Signature },

    #[error("dimension {0} outside the supported range 1..=10")]
    UnsupportedDimension(u32),

    #[error("{0}")]
    DegreePrecondition(&'static str),

    #[error("{0}")]
    ParityPrecondition(&'static str),

    #[error("zero spinor")]
    ZeroSpinor,

    #[error("adjoint type s={requested} is not admissible for signature {sig} (forced s={forced})")]
    AdjointTypeForced { sig: Signature, requested: i8, forced: i8 },

    #[error("intertwiner solution space has dimension {0}, expected 1")]
    StructureSpaceDimension(usize),

    #[error("anti-linear structure squares to {measured} but the residue class forces {expected}")]
    StructureEpsilonMismatch { expected: i8, measured: i8 },

    #[error("pairing is not admissible: residual {0:.3e}")]
    NotAdmissible(f64),

    #[error("compatibility map squares to a non-scalar operator (residual {0:.3e})")]
    CompatibilityNotScalar(f64),

    #[error("no witness β found with |(α◇β)^(0)| above threshold (best {0:.3e})")]
    NoWitness(f64),

    #[error("endomorphism is not numerically rank one (σ₂/σ₁ = {0:.3e})")]
    NotRankOne(f64),

    #[error("form is not decomposable: Plücker residual {0:.3e}")]
    NotDecomposable(f64),

    #[error("structure data violates invariant `{name}`: residual {residual:.3e}")]
    StructureInvariant { name: &'static str, residual: f64 },

    #[error("unknown condition case `{0}`")]
    UnknownCase(String),

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Parse(String),
}
