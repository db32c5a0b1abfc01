use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse rational literal: {0}")]
    BadRational(String),

    #[error("inner series of a composition must vanish at the origin")]
    NonzeroConstantTerm,

    #[error("linear part is singular")]
    SingularLinearPart,

    #[error("matrix of series has identically vanishing determinant through the truncation degree")]
    SingularSeriesMatrix,

    #[error("map is rank deficient: expected generic rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },

    #[error("annihilating-polynomial scan exceeded weighted-degree bound {bound}")]
    ScanBoundExceeded { bound: usize },

    #[error("reduction loop exceeded its iteration cap {cap}; this indicates a degenerate truncation or a bug")]
    IterationCapExceeded { cap: usize },

    #[error("component {0} vanishes identically through the truncation degree")]
    DegenerateComponent(usize),

    #[error("series is not a unit (zero constant term)")]
    NotAUnit,

    #[error("manifold data violates {0}")]
    ManifoldInvariant(String),

    #[error("{0}")]
    Precondition(String),

    #[error("composition-inversion rank growth failed at degree cap {cap}")]
    RankGrowthFailed { cap: usize },
}
