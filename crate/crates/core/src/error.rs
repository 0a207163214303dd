use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group of order {order} exceeds the character-table bound {bound}")]
    SizeBound { order: usize, bound: usize },
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    #[error("cocycle mismatch: {0}")]
    CocycleMismatch(String),
    #[error("connector inconsistency: {0}")]
    ConnectorInconsistency(String),
    #[error("invalid projective representation: {0}")]
    InvalidProjectiveRep(String),
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("invalid torus action: {0}")]
    InvalidTorusAction(String),
    #[error("inertial-class invariant violated: {0}")]
    InertialInvariant(String),
    #[error("constituents not conjugate: {0}")]
    NotConjugate(String),
    #[error("sample not stable under the group: {0}")]
    SampleNotStable(String),
    #[error("incompatible parameters: {0}")]
    Incompatible(String),
    #[error("non-tempered input: {0}")]
    NotTempered(String),
    #[error("element not in the declared group: {0}")]
    NotInGroup(String),
    #[error("packet relation failed: {0}")]
    PacketRelation(String),
    #[error("filtration not respected: {0}")]
    Filtration(String),
    #[error("pairing not bijective: {0}")]
    Pairing(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
