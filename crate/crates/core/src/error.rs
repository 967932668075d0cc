use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree distribution has zero mean degree")]
    ZeroMeanDegree,

    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),

    #[error("probability {name}={value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("no finite percolation threshold: <p^2> <= <p>")]
    NoGiantComponentPossible,

    #[error("infeasible degree sequence: {0}")]
    InfeasibleSequence(String),

    #[error("publisher {publisher} is not a node of a {n}-node overlay")]
    InvalidPublisher { publisher: usize, n: usize },

    #[error("subscription vector has {got} entries, overlay has {n} nodes")]
    SubscriptionMismatch { got: usize, n: usize },

    #[error("exact enumeration needs {links} gossip links, limit is {limit}")]
    TooLarge { links: usize, limit: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("refusing to write an empty report")]
    EmptyReport,

    #[error("grid point sigma={sigma}, gamma={gamma}: {source}")]
    GridPoint {
        sigma: f64,
        gamma: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input rather than a failure while running.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::ZeroMeanDegree
            | Error::InvalidDistribution(_)
            | Error::InvalidProbability { .. }
            | Error::InvalidPublisher { .. }
            | Error::SubscriptionMismatch { .. }
            | Error::Parse { .. }
            | Error::Config(_)
            | Error::Json(_) => true,
            Error::GridPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
