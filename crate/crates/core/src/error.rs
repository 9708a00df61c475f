use alloc::string::String;

use crate::index::MultiIndex;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Operator inequality checked on a Kraus family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrausCondition {
    /// `Σ K_j* K_j ⪯ 1`, equivalent to `T(1) ⪯ 1`.
    Subunital,
    /// `Σ K_j K_j* ⪯ 1`, equivalent to `τ∘T ≤ τ`.
    TraceDecreasing,
}

impl core::fmt::Display for KrausCondition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            KrausCondition::Subunital => f.write_str("sum K_j^* K_j <= 1 (subunital)"),
            KrausCondition::TraceDecreasing => {
                f.write_str("sum K_j K_j^* <= 1 (trace-decreasing)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("kraus family rejected: {condition} fails (largest eigenvalue {max_eigenvalue:.6})")]
    KrausRejected {
        condition: KrausCondition,
        max_eigenvalue: f64,
    },
    #[error("contraction rejected: {0}")]
    ContractionRejected(String),
    #[error("map is not Hermiticity-preserving (deviation {deviation:.3e})")]
    NotHermiticityPreserving { deviation: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {points} lattice points requested, budget is {budget}")]
    Budget { points: u128, budget: u64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("declared bound {bound} violated at index {witness}: |a(k)| = {value}")]
    BoundViolated {
        bound: f64,
        value: f64,
        witness: MultiIndex,
    },
}
