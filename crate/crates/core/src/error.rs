use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The state violates a structural invariant (overlap, disk outside the table).
    #[error("corrupt state: {0}")]
    CorruptState(String),

    /// An operation was called outside its precondition.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("integer overflow at step {step} for disk {disk}")]
    Overflow { step: u64, disk: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("equipartition index undefined: total kinetic energy is zero")]
    ZeroEnergy,

    #[error("state size mismatch: {0} vs {1} disks")]
    SizeMismatch(usize, usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("placement failed: {0}")]
    Placement(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
