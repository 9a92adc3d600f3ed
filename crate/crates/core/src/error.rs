use thiserror::Error;

/// Error type shared by all numeric modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies outside the open unit disk (|z| = {0})")]
    OutsideDisk(f64),

    #[error("coincident arguments would make the kernel infinite")]
    CoincidentPoints,

    #[error("invalid boundary measure: {0}")]
    InvalidMeasure(String),

    #[error("bubble sampler failed to exceed diameter {eps_exc} after {attempts} attempts")]
    BubbleRejection { eps_exc: f64, attempts: usize },

    #[error("path never enters the inner region; no slice decomposition exists")]
    NoSlice,

    #[error("measures are not dominated: {0}")]
    NotDominated(String),

    #[error("right arc is blocked by the occupancy mask; envelope undefined")]
    RightArcBlocked,

    #[error("curve point {index} falls inside the current hull; driving function undefined")]
    HullViolation { index: usize },

    #[error("tip sits on the boundary arc; drift undefined at this time")]
    TipOnBoundary,

    #[error("point was swallowed by the hull at time {last_valid}")]
    Swallowed { last_valid: f64 },

    #[error("SDE stalled: drift integral diverged over a full step at t = {t}")]
    Stalled { t: f64 },

    #[error("{0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!(
            "json parse error at line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
