use num_bigint::BigUint;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Problem parameters violate an invariant (subset larger than the
    /// universe, empty subset family, ...).
    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    /// Overlap level outside `0..=T`.
    #[error("overlap level {t} out of range 0..={t_count}")]
    LevelOutOfRange { t: u32, t_count: usize },

    /// Symmetric polynomial degree outside `0..=T`.
    #[error("symmetric polynomial degree {degree} exceeds subset count {t_count}")]
    DegreeOutOfRange { degree: usize, t_count: usize },

    /// Empty summation range for an alternating binomial sum.
    #[error("alternating binomial sum needs m1 <= m2, got m1={m1}, m2={m2}")]
    EmptySumRange { m1: i64, m2: i64 },

    /// The layered dynamic program would exceed its state budget.
    #[error("state budget exceeded: reached {reached} weighted states (budget {budget})")]
    StateBudgetExceeded { reached: u64, budget: u64 },

    /// Exhaustive enumeration refused: too many subset tuples.
    #[error("enumeration budget exceeded: {tuples} subset tuples (budget {budget})")]
    EnumerationBudgetExceeded { tuples: BigUint, budget: u64 },

    /// Membership-pattern summation refused: too many subsets.
    #[error(
        "pattern budget exceeded: {t_count} subsets (budget {budget}); \
         use the exact distribution or Monte Carlo sampling instead"
    )]
    PatternBudgetExceeded { t_count: usize, budget: usize },

    /// Chebyshev bound queried with a non-positive deviation.
    #[error("deviation must be positive, got {0}")]
    InvalidDeviation(f64),

    /// Inference configuration outside its domain.
    #[error("invalid inference configuration: {0}")]
    InvalidConfig(String),

    /// Observed histogram inconsistent with the problem it is paired with.
    #[error("observed histogram does not match problem: {0}")]
    HistogramMismatch(String),

    /// Input file problem (unreadable, unknown identifiers, ...).
    #[error("{0}")]
    Input(String),

    /// File I/O failure with the offending path.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed serialized document.
    #[error("invalid JSON document: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
