//! Summary reports: the EER row, the BPCER_AP ladder with thresholds, and
//! per-species APCER/BPCER/ACER at a chosen operating threshold, rendered as
//! versioned JSON (full precision) or a markdown table (percents and
//! thresholds rounded to 4 decimals).

use serde::{Deserialize, Serialize};

use crate::cascade::{cascade_rates, CascadeConfig};
use crate::error::{Error, Result};
use crate::metrics::{
    bpcer_at_ap, bpcer_ladder, eer, operating_point, BpcerApResult, EerResult, Selector,
    LADDER_APS,
};
use crate::scores::ScoreSet;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Rounds a rate to 4 decimal places of percent. Decimal ties (and near-ties
/// within 1e-6 of the midpoint, which is where binary representation error
/// lives) round away from zero, matching how reported tables are printed.
pub fn round_pct4(rate: f64) -> f64 {
    let scaled = rate * 1_000_000.0; // percent × 10^4
    ((scaled.abs() + 1e-6).round() / 10_000.0).copysign(scaled)
}

/// Rounds a threshold to 4 decimals with the same tie rule.
pub fn round_tau4(tau: f64) -> f64 {
    let scaled = tau * 10_000.0;
    ((scaled.abs() + 1e-6).round() / 10_000.0).copysign(scaled)
}

/// How the operating threshold is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum TauSelector {
    Literal(f64),
    /// `auto:bpcerN`: the threshold of the BPCER_N ladder row.
    AutoBpcer(u32),
}

impl TauSelector {
    pub fn parse(text: &str) -> Result<TauSelector> {
        if let Some(n) = text.strip_prefix("auto:bpcer") {
            let ap: u32 = n.parse().map_err(|_| {
                Error::InvalidParameter(format!("bad threshold selector `{text}`"))
            })?;
            if !LADDER_APS.contains(&ap) {
                return Err(Error::InvalidParameter(format!(
                    "auto:bpcerN supports N in {LADDER_APS:?}, got {ap}"
                )));
            }
            return Ok(TauSelector::AutoBpcer(ap));
        }
        let v: f64 = text
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad threshold selector `{text}`")))?;
        if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidThreshold(v));
        }
        Ok(TauSelector::Literal(v))
    }
}

impl std::fmt::Display for TauSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TauSelector::Literal(v) => write!(f, "{v}"),
            TauSelector::AutoBpcer(n) => write!(f, "auto:bpcer{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesCount {
    pub species: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesRate {
    pub species: String,
    pub apcer: f64,
}

/// The full single-model evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub dataset: String,
    pub toolkit_version: String,
    pub n_records: usize,
    pub n_bona_fide: usize,
    pub n_per_species: Vec<SpeciesCount>,
    /// `worst` or a species name: which APCER drove the EER and the ladder.
    pub species_selector: String,
    pub eer: EerResult,
    pub ladder: Vec<BpcerApResult>,
    pub tau_selector: String,
    pub chosen_tau: f64,
    pub per_species_apcer: Vec<SpeciesRate>,
    pub bpcer_at_tau: f64,
    pub acer_at_tau: f64,
}

fn selector_name(selector: &Selector) -> String {
    match selector {
        Selector::Worst => "worst".to_string(),
        Selector::Species(s) => s.clone(),
    }
}

/// Resolves a threshold selector against a score set.
pub fn resolve_tau(set: &ScoreSet, selector: &Selector, tau_sel: &TauSelector) -> Result<f64> {
    match tau_sel {
        TauSelector::Literal(v) => Ok(*v),
        TauSelector::AutoBpcer(ap) => Ok(bpcer_at_ap(set, *ap, selector)?.tau),
    }
}

/// Builds the evaluation report. The default operating threshold follows the
/// BPCER_100 row.
pub fn build_report(
    set: &ScoreSet,
    selector: &Selector,
    tau_selector: &TauSelector,
    dataset: &str,
) -> Result<EvaluationReport> {
    let eer = eer(set, selector)?;
    let ladder = bpcer_ladder(set, selector)?;
    let chosen_tau = resolve_tau(set, selector, tau_selector)?;
    let op = operating_point(set, chosen_tau)?;
    let n_per_species = set
        .taxonomy()
        .attack_species()
        .iter()
        .zip(set.species_counts())
        .map(|(s, &c)| SpeciesCount {
            species: s.clone(),
            count: c,
        })
        .collect();
    Ok(EvaluationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        dataset: dataset.to_string(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        n_records: set.len(),
        n_bona_fide: set.n_bona_fide(),
        n_per_species,
        species_selector: selector_name(selector),
        eer,
        ladder,
        tau_selector: tau_selector.to_string(),
        chosen_tau,
        per_species_apcer: op
            .apcer_per_species
            .into_iter()
            .map(|(species, apcer)| SpeciesRate { species, apcer })
            .collect(),
        bpcer_at_tau: op.bpcer,
        acer_at_tau: op.acer,
    })
}

/// Full-precision JSON rendering; byte-deterministic.
pub fn render_report_json(report: &EvaluationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization");
    s.push('\n');
    s
}

/// Parses a report, rejecting unknown fields.
pub fn parse_report(text: &str) -> Result<EvaluationReport> {
    let report: EvaluationReport =
        serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(Error::Report(format!(
            "unsupported schema_version {}",
            report.schema_version
        )));
    }
    Ok(report)
}

fn pct(rate: f64) -> String {
    format!("{:.4}", round_pct4(rate))
}

fn tau4(tau: f64) -> String {
    format!("{:.4}", round_tau4(tau))
}

/// Markdown table in the layout of the reported assessment tables: one EER
/// row, the 8-row ladder, then the operating-threshold block.
pub fn render_report_markdown(report: &EvaluationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# PAD assessment — {}\n\n\
         - records: {} ({} bona fide{})\n\
         - species selector: {}\n\
         - threshold selector: {}\n\
         - toolkit version: {}\n\n",
        report.dataset,
        report.n_records,
        report.n_bona_fide,
        report
            .n_per_species
            .iter()
            .map(|c| format!(", {} {}", c.count, c.species))
            .collect::<String>(),
        report.species_selector,
        report.tau_selector,
        report.toolkit_version
    ));
    out.push_str("| Metric | Score (%) | Threshold |\n|---|---:|---:|\n");
    let eer_kind = if report.eer.exact { "" } else { " (interpolated)" };
    out.push_str(&format!(
        "| EER{} | {} | {} |\n",
        eer_kind,
        pct(report.eer.eer),
        tau4(report.eer.tau)
    ));
    for row in &report.ladder {
        let mark = if row.saturated { " (saturated)" } else { "" };
        out.push_str(&format!(
            "| BPCER_{} (APCER_{} = {}%){} | {} | {} |\n",
            row.ap,
            report.species_selector,
            pct(row.target_apcer),
            mark,
            pct(row.bpcer),
            tau4(row.tau)
        ));
    }
    for sp in &report.per_species_apcer {
        out.push_str(&format!(
            "| APCER_{}(t) | {} | {} |\n",
            sp.species,
            pct(sp.apcer),
            tau4(report.chosen_tau)
        ));
    }
    out.push_str(&format!(
        "| BPCER(t) | {} | {} |\n",
        pct(report.bpcer_at_tau),
        tau4(report.chosen_tau)
    ));
    out.push_str(&format!(
        "| ACER(t) | {} | {} |\n",
        pct(report.acer_at_tau),
        tau4(report.chosen_tau)
    ));
    out
}

/// Cascade (two-stage) evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeReport {
    pub schema_version: u32,
    pub dataset: String,
    pub toolkit_version: String,
    pub n_samples: usize,
    pub tau_border_selector: String,
    pub tau_source_selector: String,
    pub tau_border: f64,
    pub tau_source: f64,
    pub combined_bpcer: f64,
    pub combined_apcer_per_species: Vec<SpeciesRate>,
    pub combined_apcer_worst: f64,
    pub worst_species: String,
    pub combined_acer: f64,
    /// Single-stage BPCER at each stage's own threshold, for reference.
    pub stage_bpcer_border: f64,
    pub stage_bpcer_source: f64,
}

pub fn build_cascade_report(
    cfg: &CascadeConfig,
    tau_border_selector: &str,
    tau_source_selector: &str,
    dataset: &str,
) -> Result<CascadeReport> {
    let point = cascade_rates(cfg)?;
    Ok(CascadeReport {
        schema_version: REPORT_SCHEMA_VERSION,
        dataset: dataset.to_string(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        n_samples: cfg.len(),
        tau_border_selector: tau_border_selector.to_string(),
        tau_source_selector: tau_source_selector.to_string(),
        tau_border: point.tau_border,
        tau_source: point.tau_source,
        combined_bpcer: point.bpcer,
        combined_apcer_per_species: point
            .apcer_per_species
            .into_iter()
            .map(|(species, apcer)| SpeciesRate { species, apcer })
            .collect(),
        combined_apcer_worst: point.apcer_worst,
        worst_species: point.worst_species,
        combined_acer: point.acer,
        stage_bpcer_border: crate::metrics::bpcer(cfg.border(), point.tau_border)?,
        stage_bpcer_source: crate::metrics::bpcer(cfg.source(), point.tau_source)?,
    })
}

pub fn render_cascade_json(report: &CascadeReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization");
    s.push('\n');
    s
}

pub fn parse_cascade_report(text: &str) -> Result<CascadeReport> {
    serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))
}

pub fn render_cascade_markdown(report: &CascadeReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# Cascade PAD assessment — {}\n\n\
         - samples: {}\n\
         - border threshold: {} ({})\n\
         - source threshold: {} ({})\n\
         - worst species: {}\n\n",
        report.dataset,
        report.n_samples,
        tau4(report.tau_border),
        report.tau_border_selector,
        tau4(report.tau_source),
        report.tau_source_selector,
        report.worst_species
    ));
    out.push_str("| Metric | Score (%) |\n|---|---:|\n");
    out.push_str(&format!(
        "| Combined APCER (worst) | {} |\n",
        pct(report.combined_apcer_worst)
    ));
    for sp in &report.combined_apcer_per_species {
        out.push_str(&format!(
            "| Combined APCER_{} | {} |\n",
            sp.species,
            pct(sp.apcer)
        ));
    }
    out.push_str(&format!(
        "| Combined BPCER | {} |\n",
        pct(report.combined_bpcer)
    ));
    out.push_str(&format!(
        "| Combined ACER | {} |\n",
        pct(report.combined_acer)
    ));
    out.push_str(&format!(
        "| Border-stage BPCER | {} |\n",
        pct(report.stage_bpcer_border)
    ));
    out.push_str(&format!(
        "| Source-stage BPCER | {} |\n",
        pct(report.stage_bpcer_source)
    ));
    out
}
