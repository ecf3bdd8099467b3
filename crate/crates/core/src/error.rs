use thiserror::Error;

use crate::lattice::Vector;

pub type Result<T> = std::result::Result<T, Error>;

fn show(v: &[num_bigint::BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("ambient groups differ")]
    AmbientMismatch,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("matrix is not a homomorphism: {0}")]
    InvalidHomomorphism(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("enumeration too large: {what} exceeds the cap of {cap}")]
    EnumerationTooLarge { what: &'static str, cap: u64 },
    #[error("relation is neither an endogeny nor a quasi-endomorphism: {0}")]
    Classification(String),
    #[error("illegal restriction: {reason} (witness {})", show(.witness))]
    IllegalRestriction { reason: String, witness: Vector },
    #[error("quotient action undefined: generator {generator} moves {} outside the subgroup", show(.witness))]
    NotInvariant { generator: usize, witness: Vector },
    #[error("not a quasi-projection: {0}")]
    NotAProjection(String),
    #[error("unknown suite `{name}`; available: {}", .available.join(", "))]
    UnknownSuite { name: String, available: Vec<String> },
}
