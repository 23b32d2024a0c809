use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sequence parameters: {0}")]
    InvalidSequence(String),

    #[error("index {index} exceeds the index cap {cap}")]
    IndexCapExceeded { index: i64, cap: i64 },

    #[error("no certified ratio bound for this sequence: {0}")]
    RatioBoundUnavailable(String),

    #[error("z is within {distance:e} of the pole or accumulation point {pole}")]
    PoleProximity { pole: f64, distance: f64 },

    #[error("tail bound {bound:e} still above tolerance {tol:e} at window cap {cap}")]
    ToleranceUnreachable { bound: f64, tol: f64, cap: i64 },

    #[error("certified evaluation requested but the sequence has no proven tail bound")]
    UncertifiedOnly,

    #[error("Mobius transformation has a pole at this point")]
    MobiusPole,

    #[error("mirror parameter {mirror_a} does not match sequence parameter a = {seq_a}")]
    InvalidPairing { seq_a: i64, mirror_a: i64 },

    #[error("identity checks require an even weight, got {0}")]
    OddWeight(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
