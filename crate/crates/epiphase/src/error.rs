use alloc::string::String;

/// Errors raised when inputs fall outside the supported domain or violate a
/// structural invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension {d} is not prime; the phase space is only defined for prime d")]
    NonPrimeDimension { d: u32 },
    #[error("dimension {d} outside supported range 2..={max}")]
    DimensionOutOfRange { d: u32, max: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator is not a valid {role}: {reason}")]
    InvalidOperator { role: &'static str, reason: String },
    #[error("channel is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },
    #[error("channel is not unital (residual {residual:.3e}); only unital transformations are representable")]
    NotUnital { residual: f64 },
    #[error("transition table has a negative entry {min:.3e} beyond tolerance; the channel is invalid or the symplectic framework lies outside the allowed set")]
    NegativeTransitionProbability { min: f64 },
    #[error("framework is incoherent: measurement striation {meas} is not the image of preparation striation {prep} under the chain")]
    IncoherentFramework { prep: usize, meas: usize },
    #[error("experiment record is incomplete: {reason}")]
    IncompleteRecord { reason: String },
    #[error("transformation is not invertible (inverse-partner residual {residual:.3e})")]
    NotInvertible { residual: f64 },
    #[error("the matrices do not form a nonsingular-difference subgroup of order d^2 - 1")]
    InvalidSubgroup,
    #[error("line average is not a rank-one projector (residual {residual:.3e})")]
    DegenerateProjector { residual: f64 },
    #[error("transition quasiprobability matrix is not block diagonal under conjugation (residual {residual:.3e})")]
    NotBlockDiagonal { residual: f64 },
}
