use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the function it was passed to.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} is not a European payoff; use the Next Goal or Half Time / Full Time pricers")]
    NotEuropean(String),

    #[error("half-time score is required once the clock reaches half time")]
    MissingHalfTimeScore,

    #[error("cannot parse bet token `{0}`")]
    UnknownBet(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("no snapshots")]
    NoSnapshots,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("model is not identifiable from the snapshot: {0}")]
    Unidentifiable(String),

    #[error("hedging instruments {first} and {second} are linearly dependent (|det| = {det:e})")]
    LinearlyDependent {
        first: String,
        second: String,
        det: f64,
    },

    #[error("missing Arrow-Debreu price for score {0}-{1}")]
    MissingArrowDebreu(u32, u32),

    #[error("calibration did not converge at {0} step(s)")]
    NonConvergence(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) | Error::LinearlyDependent { .. } => 3,
            Error::Unidentifiable(_) => 3,
            _ => 2,
        }
    }
}
