use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid position {0}: positions are 1-based")]
    InvalidPosition(usize),

    #[error("invalid relevance judgment {0}: must be finite and non-negative")]
    InvalidRelevance(f64),

    #[error("invalid gain {0}: must be finite and non-negative")]
    InvalidGain(f64),

    #[error("invalid score {0}: must be finite")]
    InvalidScore(f64),

    #[error("invalid probability {0}: must lie in [0, 1]")]
    InvalidProbability(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid size {0}: must be at least 1")]
    InvalidSize(usize),

    #[error("degenerate score distribution: max equals min")]
    DegenerateDistribution,

    #[error("no upper outlier: max does not exceed the upper whisker")]
    NoOutlier,

    #[error("need at least 2 control points, got {0}")]
    InsufficientPoints(usize),

    #[error("invalid knots: {0}")]
    InvalidKnots(String),

    #[error("phi relevance requested but no relevance function supplied")]
    MissingRelevanceFunction,

    #[error("item `{0}` has no relevance judgment")]
    MissingRelevance(String),

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("ranking `{ranking_id}`: {message}")]
    Validation { ranking_id: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used in batch reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidPosition(_) => "invalid-position",
            Error::InvalidRelevance(_) => "invalid-relevance",
            Error::InvalidGain(_) => "invalid-gain",
            Error::InvalidScore(_) => "invalid-score",
            Error::InvalidProbability(_) => "invalid-probability",
            Error::EmptyInput => "empty-input",
            Error::InvalidSize(_) => "invalid-size",
            Error::DegenerateDistribution => "degenerate-distribution",
            Error::NoOutlier => "no-outlier",
            Error::InsufficientPoints(_) => "insufficient-points",
            Error::InvalidKnots(_) => "invalid-knots",
            Error::MissingRelevanceFunction => "missing-relevance-function",
            Error::MissingRelevance(_) => "missing-relevance",
            Error::InvalidRanking(_) => "invalid-ranking",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
            Error::Io(_) => "io",
        }
    }
}
