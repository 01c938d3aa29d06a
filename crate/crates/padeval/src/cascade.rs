//! Two-stage cascade evaluation: joins two score sets on sample id and
//! evaluates decision-level conjunction — a sample is bona fide only when
//! both stages accept it.
//!
//! The two sets may have different taxonomies (say, a composite/synthetic
//! detector paired with a print/plastic/display detector), but they must
//! share the bona fide label, carry identical sample-id sets, and agree on
//! each sample's true label.

use crate::error::{Error, Result};
use crate::metrics::{ConfusionMatrix, MatrixMode};
use crate::scores::{decide, Decision, ScoreRecord, ScoreSet};

/// A validated pairing of two score sets with per-stage thresholds.
#[derive(Debug, Clone)]
pub struct CascadeConfig {
    border: ScoreSet,
    source: ScoreSet,
    tau_border: f64,
    tau_source: f64,
    /// Index pairs (border record, source record) in border record order.
    pairs: Vec<(usize, usize)>,
}

impl CascadeConfig {
    pub fn new(
        border: ScoreSet,
        source: ScoreSet,
        tau_border: f64,
        tau_source: f64,
    ) -> Result<CascadeConfig> {
        for tau in [tau_border, tau_source] {
            if !(tau.is_finite() && (0.0..=1.0).contains(&tau)) {
                return Err(Error::InvalidThreshold(tau));
            }
        }
        if border.taxonomy().bona_fide() != source.taxonomy().bona_fide() {
            return Err(Error::CascadeJoin(format!(
                "bona fide labels differ: `{}` vs `{}`",
                border.taxonomy().bona_fide(),
                source.taxonomy().bona_fide()
            )));
        }
        if border.len() != source.len() {
            return Err(Error::CascadeJoin(format!(
                "sample-id sets differ: {} border records vs {} source records",
                border.len(),
                source.len()
            )));
        }
        let by_id: std::collections::HashMap<&str, usize> = source
            .records()
            .iter()
            .enumerate()
            .map(|(i, r)| (r.sample_id(), i))
            .collect();
        let mut pairs = Vec::with_capacity(border.len());
        for (bi, br) in border.records().iter().enumerate() {
            let si = *by_id.get(br.sample_id()).ok_or_else(|| {
                Error::CascadeJoin(format!(
                    "sample `{}` is missing from the source set",
                    br.sample_id()
                ))
            })?;
            let sr = &source.records()[si];
            if br.true_label() != sr.true_label() {
                return Err(Error::CascadeJoin(format!(
                    "sample `{}` is labelled `{}` in the border set but `{}` in the source set",
                    br.sample_id(),
                    br.true_label(),
                    sr.true_label()
                )));
            }
            pairs.push((bi, si));
        }
        Ok(CascadeConfig {
            border,
            source,
            tau_border,
            tau_source,
            pairs,
        })
    }

    pub fn border(&self) -> &ScoreSet {
        &self.border
    }

    pub fn source(&self) -> &ScoreSet {
        &self.source
    }

    pub fn tau_border(&self) -> f64 {
        self.tau_border
    }

    pub fn tau_source(&self) -> f64 {
        self.tau_source
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Attack species of both stages: border species first, then source
    /// species not already listed, preserving manifest order within a stage.
    pub fn union_species(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .border
            .taxonomy()
            .attack_species()
            .to_vec();
        for s in self.source.taxonomy().attack_species() {
            if !v.contains(s) {
                v.push(s.clone());
            }
        }
        v
    }

    fn joined(&self) -> impl Iterator<Item = (&ScoreRecord, &ScoreRecord)> {
        self.pairs
            .iter()
            .map(|&(bi, si)| (&self.border.records()[bi], &self.source.records()[si]))
    }
}

/// Conjunction decision: bona fide only when both stages accept.
pub fn combined_decide(
    border: &ScoreRecord,
    source: &ScoreRecord,
    tau_border: f64,
    tau_source: f64,
) -> Result<Decision> {
    if border.sample_id() != source.sample_id() {
        return Err(Error::CascadeJoin(format!(
            "record id mismatch: `{}` vs `{}`",
            border.sample_id(),
            source.sample_id()
        )));
    }
    let accepted = decide(border, tau_border) == Decision::BonaFide
        && decide(source, tau_source) == Decision::BonaFide;
    Ok(if accepted {
        Decision::BonaFide
    } else {
        Decision::Attack
    })
}

/// Combined operating point of the two-stage system.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadePoint {
    pub tau_border: f64,
    pub tau_source: f64,
    /// Fraction of bona fide samples rejected by at least one stage.
    pub bpcer: f64,
    /// Per species (union order): fraction accepted by both stages.
    pub apcer_per_species: Vec<(String, f64)>,
    pub apcer_worst: f64,
    pub worst_species: String,
    pub acer: f64,
}

/// Combined BPCER and per-species APCER of the joined pair.
pub fn cascade_rates(cfg: &CascadeConfig) -> Result<CascadePoint> {
    let bona_fide = cfg.border.taxonomy().bona_fide().to_string();
    let union = cfg.union_species();
    let mut n_bf = 0u64;
    let mut rejected_bf = 0u64;
    let mut n_sp = vec![0u64; union.len()];
    let mut accepted_sp = vec![0u64; union.len()];

    for (br, sr) in cfg.joined() {
        let accepted = decide(br, cfg.tau_border) == Decision::BonaFide
            && decide(sr, cfg.tau_source) == Decision::BonaFide;
        if br.true_label() == bona_fide {
            n_bf += 1;
            if !accepted {
                rejected_bf += 1;
            }
        } else {
            let idx = union
                .iter()
                .position(|s| s == br.true_label())
                .expect("label validated against a stage taxonomy");
            n_sp[idx] += 1;
            if accepted {
                accepted_sp[idx] += 1;
            }
        }
    }
    if n_bf == 0 {
        return Err(Error::EmptyBonaFide);
    }
    let bpcer = rejected_bf as f64 / n_bf as f64;
    let mut apcer_per_species = Vec::new();
    for (i, species) in union.iter().enumerate() {
        if n_sp[i] > 0 {
            apcer_per_species.push((species.clone(), accepted_sp[i] as f64 / n_sp[i] as f64));
        }
    }
    let (apcer_worst, worst_species) = apcer_per_species
        .iter()
        .fold(None::<(f64, &str)>, |best, (s, r)| match best {
            Some((b, _)) if *r <= b => best,
            _ => Some((*r, s)),
        })
        .ok_or(Error::AllSpeciesEmpty)?;
    Ok(CascadePoint {
        tau_border: cfg.tau_border,
        tau_source: cfg.tau_source,
        bpcer,
        apcer_per_species: apcer_per_species.clone(),
        apcer_worst,
        worst_species: worst_species.to_string(),
        acer: (apcer_worst + bpcer) / 2.0,
    })
}

/// Cascade confusion matrix. Predicted label is bona fide when both stages
/// accept; otherwise the attack class with the maximum score across the
/// union of both stages' attack classes, ties resolved border-first, then
/// manifest order within a stage.
pub fn cascade_confusion(cfg: &CascadeConfig, mode: MatrixMode) -> Result<ConfusionMatrix> {
    let bona_fide = cfg.border.taxonomy().bona_fide().to_string();
    let union = cfg.union_species();

    // candidate (union index, stage, species index) in tie-break priority
    let mut candidates: Vec<(usize, bool, usize)> = Vec::new();
    for (j, s) in cfg.border.taxonomy().attack_species().iter().enumerate() {
        candidates.push((union.iter().position(|u| u == s).unwrap(), true, j));
    }
    for (j, s) in cfg.source.taxonomy().attack_species().iter().enumerate() {
        candidates.push((union.iter().position(|u| u == s).unwrap(), false, j));
    }

    let full_labels: Vec<String> = std::iter::once(bona_fide.clone())
        .chain(union.iter().cloned())
        .collect();
    let k = full_labels.len();
    let mut counts = vec![vec![0u64; k]; k];

    for (br, sr) in cfg.joined() {
        let row = full_labels
            .iter()
            .position(|l| l == br.true_label())
            .expect("label validated against a stage taxonomy");
        let accepted = decide(br, cfg.tau_border) == Decision::BonaFide
            && decide(sr, cfg.tau_source) == Decision::BonaFide;
        let col = if accepted {
            0
        } else {
            let mut best_union = candidates[0].0;
            let mut best_score = f64::NEG_INFINITY;
            for &(u, is_border, j) in &candidates {
                let score = if is_border {
                    br.scores()[1 + j]
                } else {
                    sr.scores()[1 + j]
                };
                if score > best_score {
                    best_score = score;
                    best_union = u;
                }
            }
            1 + best_union
        };
        counts[row][col] += 1;
    }

    match mode {
        MatrixMode::Full => Ok(ConfusionMatrix {
            labels: full_labels,
            counts,
        }),
        MatrixMode::Binary => {
            let mut bin = vec![vec![0u64; 2]; 2];
            for (r, row) in counts.iter().enumerate() {
                for (c, &count) in row.iter().enumerate() {
                    bin[usize::from(r != 0)][usize::from(c != 0)] += count;
                }
            }
            Ok(ConfusionMatrix {
                labels: vec![bona_fide, "attack".to_string()],
                counts: bin,
            })
        }
    }
}
