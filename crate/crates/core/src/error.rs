use thiserror::Error;

/// Errors raised by the operator algebra, the conversion engine and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-canonical input: {0}")]
    NonCanonicalInput(String),

    #[error("angle {label} = {value} is outside (-pi/2, pi/2)")]
    AngleOutOfDomain { label: String, value: f64 },

    #[error("no value assigned to angle {0}")]
    UnassignedAngle(String),

    #[error("mutual match between {left} and {right}")]
    EdgeCaseMutualMatch { left: String, right: String },

    #[error("normalization stuck: {0}")]
    NormalizationStuck(String),

    #[error("exponential series did not converge within {0} terms")]
    SeriesDivergence(usize),

    #[error("dense matrix over {0} orbitals exceeds the size guard")]
    DimensionTooLarge(usize),

    #[error("reference coefficient {0:e} is too small to normalize against")]
    ReferenceDepleted(f64),

    #[error("state has support at excitation rank {found}, above max rank {max}")]
    RankOverflow { found: usize, max: usize },

    #[error("symbolic state grew beyond {0} determinants")]
    SymbolicTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
