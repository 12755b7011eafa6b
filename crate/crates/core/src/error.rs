use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid {name}: {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("at least two relays are required, got {0}")]
    TooFewRelays(usize),
    #[error("relay index out of range: rx={rx}, tx={tx}, n={n}")]
    IndexOutOfRange { rx: usize, tx: usize, n: usize },
    #[error("receiver and transmitter must differ (both {0})")]
    SameRelay(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("channel gains must be finite and nonnegative")]
    InvalidGain,
    #[error("inter-relay gains are not reciprocal at ({i}, {j})")]
    NotReciprocal { i: usize, j: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("mean channel powers must be positive and finite")]
    InvalidMean,
    #[error("estimation error variance {sigma_eta_sq} must lie in [0, {limit})")]
    InvalidErrorVariance { sigma_eta_sq: f64, limit: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("episode needs at least one slot")]
    NoSlots,
    #[error("initial fill {fill} outside [0, {capacity}]")]
    InvalidFill { fill: f64, capacity: f64 },
    #[error("inconsistent decision {0}")]
    InconsistentDecision(String),
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("unknown scheme {name:?}; expected one of: {allowed}")]
    UnknownScheme { name: String, allowed: String },
    #[error("unknown sweep axis {name:?}; expected one of: {allowed}")]
    UnknownAxis { name: String, allowed: String },
    #[error("sweep values must be nonempty and strictly increasing")]
    BadValues,
    #[error("invalid sweep setting: {0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
