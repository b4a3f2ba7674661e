use thiserror::Error;

/// Errors raised by the exact groupoid engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arrow #{0} is not part of the groupoid")]
    UnknownArrow(usize),
    #[error("atom #{0} is not part of the unit space")]
    UnknownAtom(usize),
    #[error("arrow set is not one-sheeted")]
    NotOneSheeted,
    #[error("atom subset is empty")]
    EmptySubset,
    #[error("arrow functions live on different groupoids")]
    GroupoidMismatch,
    #[error("malformed groupoid tables: {0}")]
    Structure(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("action does not preserve the measure: atom #{atom} is sent to atom #{image}")]
    NotMeasurePreserving { atom: usize, image: usize },
    #[error("G-space axiom violated: {0}")]
    GSpace(String),
    #[error("action is not free: non-unit arrow #{arrow} fixes point #{point}")]
    NotFree { arrow: usize, point: usize },
    #[error("subspace is not invariant: {0}")]
    NotInvariant(String),
    #[error("complex has no level {0}")]
    MissingLevel(usize),
    #[error("level {0} is not closed under the groupoid action")]
    LevelNotInvariant(usize),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("graphing members are not pairwise disjoint")]
    NotDisjoint,
    #[error("not a subcomplex: {0}")]
    NotSubcomplex(String),
    #[error("arrow set is not a subgroupoid: {0}")]
    NotSubgroupoid(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
