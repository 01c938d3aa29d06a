//! Evaluation toolkit for presentation-attack-detection classifiers per
//! ISO/IEC 30107-3: multi-class APCER/BPCER/ACER, EER with interpolation,
//! BPCER_AP operating points with saturation handling, probit-warped DET
//! curves, KDE score plots, two-stage cascade evaluation, balanced class
//! weights, and auto-generated operating-point reports.
//!
//! The toolkit consumes classifier score files (CSV or JSONL) plus a JSON
//! class manifest; it never trains or runs a classifier. A score for the
//! bona fide class strictly greater than the threshold τ accepts the sample
//! as bona fide; a score ≤ τ rejects it as an attack. Every module inherits
//! this boundary rule.

pub mod cascade;
pub mod curves;
pub mod error;
pub mod metrics;
pub mod report;
pub mod scores;
pub mod svg;
pub mod synth;
pub mod taxonomy;
pub mod weights;

pub use error::{Error, Result};
pub use scores::{decide, Decision, ScoreRecord, ScoreSet};
pub use taxonomy::ClassTaxonomy;
