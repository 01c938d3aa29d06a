//! ISO/IEC 30107-3 error rates: BPCER, per-species APCER, worst-case APCER,
//! ACER, EER with interpolation, the BPCER_AP operating-point search with
//! saturation handling, and thresholded confusion matrices.
//!
//! Every rate is a step function of the threshold that only changes value at
//! observed bona-fide-class scores, so the candidate grid
//! `{0, 1} ∪ observed scores` is lossless.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scores::ScoreSet;

/// Attack-potential values of the standard BPCER_AP ladder.
pub const LADDER_APS: [u32; 8] = [10, 20, 50, 100, 200, 500, 1000, 10000];

/// Which species' APCER drives a threshold search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    /// Maximum APCER over all non-empty species at each threshold.
    Worst,
    /// One named species.
    Species(String),
}

/// Candidate thresholds where the rate step functions can change value:
/// 0.0, 1.0, and every distinct observed bona-fide-class score.
#[derive(Debug, Clone)]
pub struct ThresholdGrid {
    thresholds: Vec<f64>,
}

impl ThresholdGrid {
    pub fn from_set(set: &ScoreSet) -> ThresholdGrid {
        let mut t: Vec<f64> = Vec::with_capacity(set.len() + 2);
        t.push(0.0);
        t.push(1.0);
        t.extend(set.records().iter().map(|r| r.bona_fide_score()));
        t.sort_by(f64::total_cmp);
        t.dedup();
        ThresholdGrid { thresholds: t }
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always contains 0.0 and 1.0
    }

    pub fn max(&self) -> f64 {
        *self.thresholds.last().expect("non-empty grid")
    }
}

/// Sorted per-class score index for O(log n) rate queries during sweeps.
/// Counting by binary search is exactly equivalent to a direct per-record
/// loop; only the complexity differs.
pub(crate) struct SweepIndex {
    bona_fide: Vec<f64>,
    per_species: Vec<Vec<f64>>,
}

impl SweepIndex {
    pub(crate) fn new(set: &ScoreSet) -> SweepIndex {
        let mut bona_fide = Vec::with_capacity(set.n_bona_fide());
        let mut per_species: Vec<Vec<f64>> =
            vec![Vec::new(); set.taxonomy().attack_species().len()];
        for r in set.records() {
            match set.taxonomy().species_index(r.true_label()) {
                None => bona_fide.push(r.bona_fide_score()),
                Some(i) => per_species[i].push(r.bona_fide_score()),
            }
        }
        bona_fide.sort_by(f64::total_cmp);
        for v in &mut per_species {
            v.sort_by(f64::total_cmp);
        }
        SweepIndex {
            bona_fide,
            per_species,
        }
    }

    fn count_le(sorted: &[f64], tau: f64) -> usize {
        sorted.partition_point(|&s| s <= tau)
    }

    pub(crate) fn bpcer(&self, tau: f64) -> f64 {
        Self::count_le(&self.bona_fide, tau) as f64 / self.bona_fide.len() as f64
    }

    pub(crate) fn apcer(&self, species_idx: usize, tau: f64) -> f64 {
        let v = &self.per_species[species_idx];
        (v.len() - Self::count_le(v, tau)) as f64 / v.len() as f64
    }

    /// Max APCER over the given species indices (all assumed non-empty).
    pub(crate) fn apcer_over(&self, indices: &[usize], tau: f64) -> f64 {
        indices
            .iter()
            .map(|&i| self.apcer(i, tau))
            .fold(0.0, f64::max)
    }
}

fn validate_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && (0.0..=1.0).contains(&tau) {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(tau))
    }
}

/// Resolves a selector to the species indices it sweeps over.
pub(crate) fn resolve_selector(set: &ScoreSet, selector: &Selector) -> Result<Vec<usize>> {
    match selector {
        Selector::Species(name) => {
            let idx = set
                .taxonomy()
                .species_index(name)
                .ok_or_else(|| Error::UnknownClass(name.clone()))?;
            if set.species_counts()[idx] == 0 {
                return Err(Error::EmptySpecies(name.clone()));
            }
            Ok(vec![idx])
        }
        Selector::Worst => {
            let idxs: Vec<usize> = set
                .species_counts()
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(i, _)| i)
                .collect();
            if idxs.is_empty() {
                return Err(Error::AllSpeciesEmpty);
            }
            Ok(idxs)
        }
    }
}

/// BPCER(τ): proportion of bona fide presentations classified as attacks,
/// i.e. with bona-fide score ≤ τ.
pub fn bpcer(set: &ScoreSet, tau: f64) -> Result<f64> {
    validate_tau(tau)?;
    if set.n_bona_fide() == 0 {
        return Err(Error::EmptyBonaFide);
    }
    let rejected = set
        .records()
        .iter()
        .filter(|r| r.true_label() == set.taxonomy().bona_fide() && r.bona_fide_score() <= tau)
        .count();
    Ok(rejected as f64 / set.n_bona_fide() as f64)
}

/// APCER_PAIS(τ): proportion of one species' attack presentations classified
/// as bona fide, i.e. with bona-fide score > τ.
pub fn apcer_pais(set: &ScoreSet, species: &str, tau: f64) -> Result<f64> {
    validate_tau(tau)?;
    let n = set
        .n_species(species)
        .ok_or_else(|| Error::UnknownClass(species.to_string()))?;
    if n == 0 {
        return Err(Error::EmptySpecies(species.to_string()));
    }
    let accepted = set
        .records()
        .iter()
        .filter(|r| r.true_label() == species && r.bona_fide_score() > tau)
        .count();
    Ok(accepted as f64 / n as f64)
}

/// Worst-case APCER over non-empty species; ties go to the first species in
/// manifest order.
pub fn apcer_worst(set: &ScoreSet, tau: f64) -> Result<(f64, &str)> {
    validate_tau(tau)?;
    let mut best: Option<(f64, &str)> = None;
    for (species, &n) in set
        .taxonomy()
        .attack_species()
        .iter()
        .zip(set.species_counts())
    {
        if n == 0 {
            continue;
        }
        let rate = apcer_pais(set, species, tau)?;
        match best {
            Some((b, _)) if rate <= b => {}
            _ => best = Some((rate, species)),
        }
    }
    best.ok_or(Error::AllSpeciesEmpty)
}

/// ACER(τ) = (worst-case APCER + BPCER) / 2.
pub fn acer(set: &ScoreSet, tau: f64) -> Result<f64> {
    let (worst, _) = apcer_worst(set, tau)?;
    Ok(acer_from_rates(worst, bpcer(set, tau)?))
}

/// The ACER arithmetic on already-computed rates.
pub fn acer_from_rates(apcer_worst: f64, bpcer: f64) -> f64 {
    (apcer_worst + bpcer) / 2.0
}

/// Equal-error-rate search result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EerResult {
    pub eer: f64,
    pub tau: f64,
    /// True when APCER(τ) = BPCER(τ) exactly at an observed grid threshold;
    /// false when interpolated or distance-minimizing.
    pub exact: bool,
}

/// Finds the EER by sweeping the grid. If the rate difference changes sign
/// between adjacent thresholds, both step functions are linearly interpolated
/// in τ and their common value at the crossing is returned. If no crossing
/// exists, the grid threshold minimising |APCER − BPCER| is used and the EER
/// is reported as the mean of the two rates there.
pub fn eer(set: &ScoreSet, selector: &Selector) -> Result<EerResult> {
    let indices = resolve_selector(set, selector)?;
    if set.n_bona_fide() == 0 {
        return Err(Error::EmptyBonaFide);
    }
    let grid = ThresholdGrid::from_set(set);
    let index = SweepIndex::new(set);

    let mut prev: Option<(f64, f64, f64, f64)> = None; // tau, apcer, bpcer, diff
    let mut best: Option<(f64, f64, f64, f64)> = None; // |diff|, tau, apcer, bpcer
    for &tau in grid.thresholds() {
        let a = index.apcer_over(&indices, tau);
        let b = index.bpcer(tau);
        let d = a - b;
        if d == 0.0 {
            return Ok(EerResult {
                eer: a,
                tau,
                exact: true,
            });
        }
        if let Some((pt, pa, _, pd)) = prev {
            if pd > 0.0 && d < 0.0 {
                // linear interpolation of both step functions in τ; the
                // crossing value depends only on the rates, not the spacing
                let s = pd / (pd - d);
                let tau_star = pt + s * (tau - pt);
                let eer = pa + s * (a - pa);
                return Ok(EerResult {
                    eer,
                    tau: tau_star,
                    exact: false,
                });
            }
        }
        if best.is_none_or(|(bd, ..)| d.abs() < bd) {
            best = Some((d.abs(), tau, a, b));
        }
        prev = Some((tau, a, b, d));
    }
    let (_, tau, a, b) = best.expect("grid is never empty");
    Ok(EerResult {
        eer: (a + b) / 2.0,
        tau,
        exact: false,
    })
}

/// One row of the BPCER_AP ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpcerApResult {
    /// Attack potential: the APCER target is 100/AP percent.
    pub ap: u32,
    pub target_apcer: f64,
    /// BPCER at `tau`, the smallest grid threshold whose APCER meets the
    /// target (the reject-everything endpoint when saturated).
    pub bpcer: f64,
    pub tau: f64,
    /// True when the target is only reachable at the maximum grid threshold
    /// because attack scores pile at the top score.
    pub saturated: bool,
    /// BPCER linearly interpolated in APCER when adjacent grid thresholds
    /// strictly bracket the target; `None` when the target is hit exactly,
    /// already met at the lowest threshold, or saturated.
    pub bpcer_interpolated: Option<f64>,
}

/// BPCER at the operating point where the selected APCER is fixed to 1/AP.
pub fn bpcer_at_ap(set: &ScoreSet, ap: u32, selector: &Selector) -> Result<BpcerApResult> {
    if ap < 2 {
        return Err(Error::InvalidParameter(format!(
            "attack potential must be ≥ 2, got {ap}"
        )));
    }
    let indices = resolve_selector(set, selector)?;
    if set.n_bona_fide() == 0 {
        return Err(Error::EmptyBonaFide);
    }
    let target = 1.0 / f64::from(ap);
    let grid = ThresholdGrid::from_set(set);
    let index = SweepIndex::new(set);
    let ts = grid.thresholds();

    // APCER is non-increasing in τ, so the predicate APCER > target is
    // monotone and the first admissible threshold can be bisected.
    let pos = ts.partition_point(|&t| index.apcer_over(&indices, t) > target);
    debug_assert!(pos < ts.len(), "APCER(1.0) = 0 always meets the target");
    let tau = ts[pos];
    let bpcer = index.bpcer(tau);
    let saturated = pos == ts.len() - 1;

    let bpcer_interpolated = if !saturated && pos > 0 {
        let a_prev = index.apcer_over(&indices, ts[pos - 1]);
        let a_cur = index.apcer_over(&indices, tau);
        if a_cur < target && a_prev > target {
            let b_prev = index.bpcer(ts[pos - 1]);
            let frac = (a_prev - target) / (a_prev - a_cur);
            Some(b_prev + frac * (bpcer - b_prev))
        } else {
            None
        }
    } else {
        None
    };

    Ok(BpcerApResult {
        ap,
        target_apcer: target,
        bpcer,
        tau,
        saturated,
        bpcer_interpolated,
    })
}

/// The full standard ladder, AP ascending.
pub fn bpcer_ladder(set: &ScoreSet, selector: &Selector) -> Result<Vec<BpcerApResult>> {
    LADDER_APS
        .iter()
        .map(|&ap| bpcer_at_ap(set, ap, selector))
        .collect()
}

/// Confusion matrix layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixMode {
    /// One row/column per taxonomy class.
    Full,
    /// Bona fide versus the fusion of all attack species.
    Binary,
}

/// Row-major matrix of counts; rows are true classes, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Multi-class prediction at τ: bona fide when the bona-fide score exceeds τ,
/// otherwise the attack class with the maximum score (ties go to the first
/// species in manifest order). Returns the class index in taxonomy order.
fn predict_class(scores: &[f64], tau: f64) -> usize {
    if scores[0] > tau {
        return 0;
    }
    let mut best = 1;
    for (j, &s) in scores.iter().enumerate().skip(2) {
        if s > scores[best] {
            best = j;
        }
    }
    best
}

/// Thresholded confusion matrix over all taxonomy classes.
pub fn confusion_matrix(set: &ScoreSet, tau: f64, mode: MatrixMode) -> Result<ConfusionMatrix> {
    validate_tau(tau)?;
    match mode {
        MatrixMode::Full => {
            let labels: Vec<String> = set
                .taxonomy()
                .classes()
                .iter()
                .map(|c| c.to_string())
                .collect();
            let k = labels.len();
            let mut counts = vec![vec![0u64; k]; k];
            for r in set.records() {
                let row = set
                    .taxonomy()
                    .class_index(r.true_label())
                    .expect("validated label");
                let col = predict_class(r.scores(), tau);
                counts[row][col] += 1;
            }
            Ok(ConfusionMatrix { labels, counts })
        }
        MatrixMode::Binary => {
            let labels = vec![set.taxonomy().bona_fide().to_string(), "attack".to_string()];
            let mut counts = vec![vec![0u64; 2]; 2];
            for r in set.records() {
                let row = usize::from(r.true_label() != set.taxonomy().bona_fide());
                let col = usize::from(r.bona_fide_score() <= tau);
                counts[row][col] += 1;
            }
            Ok(ConfusionMatrix { labels, counts })
        }
    }
}

/// A threshold with its realized rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub tau: f64,
    pub bpcer: f64,
    /// Per-species APCER for non-empty species, in manifest order.
    pub apcer_per_species: Vec<(String, f64)>,
    pub apcer_worst: f64,
    pub worst_species: String,
    pub acer: f64,
    pub saturated: bool,
    pub interpolated: bool,
}

/// Evaluates every rate at one threshold.
pub fn operating_point(set: &ScoreSet, tau: f64) -> Result<OperatingPoint> {
    let b = bpcer(set, tau)?;
    let mut apcer_per_species = Vec::new();
    for (species, &n) in set
        .taxonomy()
        .attack_species()
        .iter()
        .zip(set.species_counts())
    {
        if n > 0 {
            apcer_per_species.push((species.clone(), apcer_pais(set, species, tau)?));
        }
    }
    let (worst, worst_species) = apcer_worst(set, tau)?;
    Ok(OperatingPoint {
        tau,
        bpcer: b,
        apcer_per_species,
        apcer_worst: worst,
        worst_species: worst_species.to_string(),
        acer: acer_from_rates(worst, b),
        saturated: false,
        interpolated: false,
    })
}
