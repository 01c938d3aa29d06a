//! Balanced class weights from per-class sample counts:
//! weight_i = N_samples / (N_classes × samples_i).

use crate::error::{Error, Result};

/// Ordered per-class sample counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    entries: Vec<(String, u64)>,
}

impl ClassCounts {
    pub fn new(entries: Vec<(String, u64)>) -> Result<ClassCounts> {
        if entries.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "class weights need at least 2 classes, got {}",
                entries.len()
            )));
        }
        for (i, (name, count)) in entries.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidParameter(format!("class #{} has an empty name", i + 1)));
            }
            if *count == 0 {
                return Err(Error::InvalidParameter(format!("class `{name}` has a zero count")));
            }
            if entries[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidParameter(format!("duplicate class `{name}`")));
            }
        }
        Ok(ClassCounts { entries })
    }

    /// Parses the two-column CSV `class,count` (header optional).
    pub fn parse_csv(text: &str) -> Result<ClassCounts> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if i == 0 && line.eq_ignore_ascii_case("class,count") {
                continue;
            }
            let (name, count) = line.split_once(',').ok_or_else(|| {
                Error::InvalidParameter(format!("line {}: expected `class,count`", i + 1))
            })?;
            let count: u64 = count.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("line {}: unparsable count `{count}`", i + 1))
            })?;
            entries.push((name.trim().to_string(), count));
        }
        ClassCounts::new(entries)
    }

    /// Parses the inline form `name=count,name=count,...`.
    pub fn parse_inline(text: &str) -> Result<ClassCounts> {
        let mut entries = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (name, count) = part.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected `name=count`, got `{part}`"))
            })?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("unparsable count `{count}`")))?;
            entries.push((name.trim().to_string(), count));
        }
        ClassCounts::new(entries)
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }
}

/// Computes balanced class weights at full precision; rounding happens only
/// at report time.
pub fn class_weights(counts: &ClassCounts) -> Vec<(String, f64)> {
    let total = counts.total() as f64;
    let k = counts.entries().len() as f64;
    counts
        .entries()
        .iter()
        .map(|(name, c)| (name.clone(), total / (k * *c as f64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::round_pct4;

    #[test]
    fn balanced_counts_give_unit_weights() {
        let counts = ClassCounts::new(vec![("a".into(), 100), ("b".into(), 100)]).unwrap();
        let w = class_weights(&counts);
        assert_eq!(w, vec![("a".into(), 1.0), ("b".into(), 1.0)]);
    }

    #[test]
    fn composite_synthetic_network_weights() {
        // training counts: bona fide 9,526+11,613; composite 7,779+13,669;
        // synthetic 9,931+9,931
        let counts = ClassCounts::new(vec![
            ("bonafide".into(), 21_139),
            ("composite".into(), 21_448),
            ("synthetic".into(), 19_862),
        ])
        .unwrap();
        let w = class_weights(&counts);
        let rounded: Vec<f64> = w.iter().map(|(_, v)| round4(*v)).collect();
        assert_eq!(rounded, vec![0.9847, 0.9705, 1.0480]);
    }

    #[test]
    fn print_plastic_display_network_weights() {
        // print+plastic merged: 9,774+12,341+1,768+1,878; display 12,124+13,299
        let counts = ClassCounts::new(vec![
            ("bonafide".into(), 21_139),
            ("print_plastic".into(), 25_761),
            ("display".into(), 25_423),
        ])
        .unwrap();
        let w = class_weights(&counts);
        let rounded: Vec<f64> = w.iter().map(|(_, v)| round4(*v)).collect();
        assert_eq!(rounded, vec![1.1404, 0.9358, 0.9483]);
    }

    fn round4(x: f64) -> f64 {
        round_pct4(x / 100.0)
    }

    #[test]
    fn weighted_mass_is_conserved() {
        let counts = ClassCounts::new(vec![
            ("a".into(), 123),
            ("b".into(), 456),
            ("c".into(), 789),
        ])
        .unwrap();
        let w = class_weights(&counts);
        let mass: f64 = w
            .iter()
            .zip(counts.entries())
            .map(|((_, weight), (_, c))| weight * *c as f64)
            .sum();
        assert!((mass - counts.total() as f64).abs() < 1e-9);
    }

    #[test]
    fn scaling_counts_leaves_weights_unchanged() {
        let base = ClassCounts::new(vec![("a".into(), 12), ("b".into(), 34)]).unwrap();
        let scaled = ClassCounts::new(vec![("a".into(), 12 * 7), ("b".into(), 34 * 7)]).unwrap();
        assert_eq!(class_weights(&base), class_weights(&scaled));
    }

    #[test]
    fn weight_below_one_iff_count_above_mean() {
        let counts = ClassCounts::new(vec![
            ("a".into(), 10),
            ("b".into(), 20),
            ("c".into(), 30),
        ])
        .unwrap();
        let mean = counts.total() as f64 / 3.0;
        for ((_, weight), (_, c)) in class_weights(&counts).iter().zip(counts.entries()) {
            assert_eq!(*weight < 1.0, (*c as f64) > mean);
        }
    }

    #[test]
    fn invalid_counts_are_rejected() {
        assert!(ClassCounts::new(vec![("a".into(), 1)]).is_err());
        assert!(ClassCounts::new(vec![("a".into(), 0), ("b".into(), 1)]).is_err());
        assert!(ClassCounts::new(vec![("a".into(), 1), ("a".into(), 2)]).is_err());
    }

    #[test]
    fn inline_and_csv_forms_parse() {
        let inline = ClassCounts::parse_inline("bonafide=100, attack=200").unwrap();
        assert_eq!(inline.entries()[1], ("attack".into(), 200));
        let csv = ClassCounts::parse_csv("class,count\nbonafide,100\nattack,200\n").unwrap();
        assert_eq!(inline, csv);
        assert!(ClassCounts::parse_inline("bonafide:100").is_err());
        assert!(ClassCounts::parse_csv("bonafide,xyz\n").is_err());
    }
}
