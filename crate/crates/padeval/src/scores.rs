//! Score records and score sets: parsing, validation, serialization, and the
//! single-sample accept/reject decision rule.
//!
//! Two on-disk formats are supported:
//!
//! - CSV with header `sample_id,label,<class_1>,...,<class_k>`, where the
//!   class columns are exactly the taxonomy classes (bona fide first, then
//!   species in manifest order);
//! - JSONL with one `{"sample_id", "label", "scores"}` object per line.
//!
//! All validation failures are hard errors naming the offending line.

use std::collections::{BTreeMap, HashSet};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::taxonomy::ClassTaxonomy;

/// Outcome of the threshold decision rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    BonaFide,
    Attack,
}

/// A single sample: id, true label, and one score per taxonomy class.
///
/// Scores are stored in `classes()` order, so index 0 is always the bona
/// fide class score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    sample_id: String,
    true_label: String,
    scores: Vec<f64>,
}

impl ScoreRecord {
    /// Builds a validated record with `scores` in taxonomy class order.
    pub fn new(
        taxonomy: &ClassTaxonomy,
        sample_id: impl Into<String>,
        true_label: impl Into<String>,
        scores: Vec<f64>,
    ) -> Result<ScoreRecord> {
        let sample_id = sample_id.into();
        let true_label = true_label.into();
        if sample_id.is_empty() {
            return Err(Error::InvalidParameter("empty sample_id".into()));
        }
        if !taxonomy.contains(&true_label) {
            return Err(Error::UnknownClass(true_label));
        }
        if scores.len() != taxonomy.n_classes() {
            return Err(Error::InvalidParameter(format!(
                "expected {} scores, got {}",
                taxonomy.n_classes(),
                scores.len()
            )));
        }
        let mut scores = scores;
        for (cls, s) in taxonomy.classes().iter().zip(scores.iter_mut()) {
            validate_score(cls, *s)?;
            if *s == 0.0 {
                *s = 0.0; // normalize -0.0
            }
        }
        Ok(ScoreRecord {
            sample_id,
            true_label,
            scores,
        })
    }

    pub fn sample_id(&self) -> &str {
        &self.sample_id
    }

    pub fn true_label(&self) -> &str {
        &self.true_label
    }

    /// Scores in taxonomy class order (bona fide first).
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// The bona-fide-class score, which drives every threshold decision.
    pub fn bona_fide_score(&self) -> f64 {
        self.scores[0]
    }
}

fn validate_score(class: &str, s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "non-finite score for class `{class}`"
        )));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "score {s} for class `{class}` outside [0, 1]"
        )));
    }
    Ok(())
}

/// Accept/reject rule at threshold `tau`: a bona-fide-class score strictly
/// greater than `tau` is accepted as bona fide; a score less than or equal
/// to `tau` is a presentation attack.
pub fn decide(record: &ScoreRecord, tau: f64) -> Decision {
    if record.bona_fide_score() > tau {
        Decision::BonaFide
    } else {
        Decision::Attack
    }
}

/// An immutable, validated collection of score records over one taxonomy.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    taxonomy: ClassTaxonomy,
    records: Vec<ScoreRecord>,
    n_bona_fide: usize,
    n_per_species: Vec<usize>,
}

impl ScoreSet {
    /// Assembles a set from pre-built records, enforcing unique sample ids
    /// and at least one bona fide record.
    pub fn new(taxonomy: ClassTaxonomy, records: Vec<ScoreRecord>) -> Result<ScoreSet> {
        let mut seen = HashSet::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if !taxonomy.contains(&r.true_label) || r.scores.len() != taxonomy.n_classes() {
                return Err(Error::InvalidParameter(format!(
                    "record {} does not match the taxonomy",
                    i + 1
                )));
            }
            if !seen.insert(r.sample_id.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate sample_id `{}`",
                    r.sample_id
                )));
            }
        }
        let mut n_bona_fide = 0usize;
        let mut n_per_species = vec![0usize; taxonomy.attack_species().len()];
        for r in &records {
            match taxonomy.species_index(&r.true_label) {
                None => n_bona_fide += 1,
                Some(i) => n_per_species[i] += 1,
            }
        }
        if n_bona_fide == 0 {
            return Err(Error::EmptyBonaFide);
        }
        Ok(ScoreSet {
            taxonomy,
            records,
            n_bona_fide,
            n_per_species,
        })
    }

    /// Parses a score file, auto-detecting CSV vs JSONL from the first
    /// non-whitespace character (ignoring a UTF-8 BOM).
    pub fn parse_scores(text: &str, taxonomy: &ClassTaxonomy) -> Result<ScoreSet> {
        let body = text.trim_start_matches('\u{feff}');
        match body.trim_start().chars().next() {
            Some('{') => ScoreSet::parse_jsonl(body, taxonomy),
            _ => ScoreSet::parse_csv(body, taxonomy),
        }
    }

    /// Parses the CSV score format. Line numbers in errors are 1-based and
    /// count the header line.
    pub fn parse_csv(text: &str, taxonomy: &ClassTaxonomy) -> Result<ScoreSet> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::ScoreFile {
                line: 1,
                msg: format!("unreadable header: {e}"),
            })?
            .clone();
        let mut expected: Vec<&str> = vec!["sample_id", "label"];
        expected.extend(taxonomy.classes());
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(Error::ScoreFile {
                line: 1,
                msg: format!(
                    "header mismatch: expected `{}`, got `{}`",
                    expected.join(","),
                    got.join(",")
                ),
            });
        }

        let n_classes = taxonomy.n_classes();
        let mut records = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        for (i, row) in reader.records().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| Error::ScoreFile {
                line,
                msg: format!("unreadable row: {e}"),
            })?;
            if row.len() != 2 + n_classes {
                return Err(Error::ScoreFile {
                    line,
                    msg: format!(
                        "expected {} fields (missing class column?), got {}",
                        2 + n_classes,
                        row.len()
                    ),
                });
            }
            let sample_id = row.get(0).unwrap_or("");
            let label = row.get(1).unwrap_or("");
            let mut scores = Vec::with_capacity(n_classes);
            for (j, cls) in taxonomy.classes().iter().enumerate() {
                let raw = row.get(2 + j).unwrap_or("");
                let v: f64 = raw.parse().map_err(|_| Error::ScoreFile {
                    line,
                    msg: format!("unparsable score `{raw}` for class `{cls}`"),
                })?;
                scores.push(v);
            }
            let record = ScoreRecord::new(taxonomy, sample_id, label, scores)
                .map_err(|e| at_line(line, e))?;
            if !seen.insert(record.sample_id.clone()) {
                return Err(Error::ScoreFile {
                    line,
                    msg: format!("duplicate sample_id `{}`", record.sample_id),
                });
            }
            records.push(record);
        }
        ScoreSet::new(taxonomy.clone(), records)
    }

    /// Parses the JSONL score format (line numbers 1-based).
    pub fn parse_jsonl(text: &str, taxonomy: &ClassTaxonomy) -> Result<ScoreSet> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawLine {
            sample_id: String,
            label: String,
            scores: BTreeMap<String, f64>,
        }

        let mut records = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let parsed: RawLine = serde_json::from_str(raw).map_err(|e| Error::ScoreFile {
                line,
                msg: format!("malformed JSON object: {e}"),
            })?;
            let mut scores = Vec::with_capacity(taxonomy.n_classes());
            for cls in taxonomy.classes() {
                match parsed.scores.get(cls) {
                    Some(v) => scores.push(*v),
                    None => {
                        return Err(Error::ScoreFile {
                            line,
                            msg: format!("missing score for class `{cls}`"),
                        })
                    }
                }
            }
            if parsed.scores.len() != taxonomy.n_classes() {
                let extra = parsed
                    .scores
                    .keys()
                    .find(|k| !taxonomy.contains(k))
                    .cloned()
                    .unwrap_or_default();
                return Err(Error::ScoreFile {
                    line,
                    msg: format!("score for unknown class `{extra}`"),
                });
            }
            let record = ScoreRecord::new(taxonomy, parsed.sample_id, parsed.label, scores)
                .map_err(|e| at_line(line, e))?;
            if !seen.insert(record.sample_id.clone()) {
                return Err(Error::ScoreFile {
                    line,
                    msg: format!("duplicate sample_id `{}`", record.sample_id),
                });
            }
            records.push(record);
        }
        ScoreSet::new(taxonomy.clone(), records)
    }

    /// Serializes to the CSV score format. Floats use the shortest
    /// round-trip representation, so `parse_csv` restores the set exactly.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        let mut header: Vec<String> = vec!["sample_id".into(), "label".into()];
        header.extend(self.taxonomy.classes().iter().map(|c| c.to_string()));
        w.write_record(&header).expect("csv header");
        for r in &self.records {
            let mut row: Vec<String> = vec![r.sample_id.clone(), r.true_label.clone()];
            row.extend(r.scores.iter().map(|s| format!("{s}")));
            w.write_record(&row).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv utf-8")
    }

    /// Serializes to JSONL with scores keyed by class name in class order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "{{\"sample_id\":{},\"label\":{},\"scores\":{{",
                json_str(&r.sample_id),
                json_str(&r.true_label)
            ));
            for (j, cls) in self.taxonomy.classes().iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}:{}", json_str(cls), r.scores[j]));
            }
            out.push_str("}}\n");
        }
        out
    }

    pub fn taxonomy(&self) -> &ClassTaxonomy {
        &self.taxonomy
    }

    pub fn records(&self) -> &[ScoreRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// N_BF: number of bona fide records.
    pub fn n_bona_fide(&self) -> usize {
        self.n_bona_fide
    }

    /// N_PAIS for one species.
    pub fn n_species(&self, species: &str) -> Option<usize> {
        self.taxonomy
            .species_index(species)
            .map(|i| self.n_per_species[i])
    }

    /// Per-species counts aligned with `taxonomy().attack_species()`.
    pub fn species_counts(&self) -> &[usize] {
        &self.n_per_species
    }
}

fn at_line(line: usize, e: Error) -> Error {
    Error::ScoreFile {
        line,
        msg: e.to_string(),
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}
