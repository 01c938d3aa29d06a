use thiserror::Error;

/// Errors produced by parsing, validation, and metric evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("manifest: {0}")]
    Manifest(String),

    /// Score-file validation failure, pointing at the offending line
    /// (1-based, counting the header for CSV input).
    #[error("score file line {line}: {msg}")]
    ScoreFile { line: usize, msg: String },

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("species `{0}` has no records")]
    EmptySpecies(String),

    #[error("score set contains no bona fide records")]
    EmptyBonaFide,

    #[error("no attack species has any records")]
    AllSpeciesEmpty,

    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cascade join: {0}")]
    CascadeJoin(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("report: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;
