//! Class taxonomy: the bona fide class plus the ordered attack species (PAIS).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names the bona fide class and the attack species of a PAD problem.
///
/// The species order is significant: it fixes score-column order, confusion
/// matrix layout, and worst-case tie-breaking throughout the toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTaxonomy {
    bona_fide: String,
    attack_species: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    bona_fide: String,
    attack_species: Vec<String>,
}

impl ClassTaxonomy {
    pub fn new(
        bona_fide: impl Into<String>,
        attack_species: Vec<String>,
    ) -> Result<ClassTaxonomy> {
        let bona_fide = bona_fide.into();
        if bona_fide.is_empty() {
            return Err(Error::Manifest("bona fide class name is empty".into()));
        }
        if attack_species.is_empty() {
            return Err(Error::Manifest("attack species list is empty".into()));
        }
        for (i, s) in attack_species.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Manifest(format!("attack species #{} is empty", i + 1)));
            }
            if *s == bona_fide {
                return Err(Error::Manifest(format!(
                    "`{s}` is listed both as bona fide and as an attack species"
                )));
            }
            if attack_species[..i].contains(s) {
                return Err(Error::Manifest(format!("duplicate attack species `{s}`")));
            }
        }
        Ok(ClassTaxonomy {
            bona_fide,
            attack_species,
        })
    }

    /// Parses the JSON manifest `{"bona_fide": ..., "attack_species": [...]}`.
    pub fn parse_manifest(text: &str) -> Result<ClassTaxonomy> {
        let doc: ManifestDoc = serde_json::from_str(text)
            .map_err(|e| Error::Manifest(format!("malformed document: {e}")))?;
        ClassTaxonomy::new(doc.bona_fide, doc.attack_species)
    }

    /// Serializes back to the manifest format.
    pub fn to_manifest_json(&self) -> String {
        let doc = ManifestDoc {
            bona_fide: self.bona_fide.clone(),
            attack_species: self.attack_species.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("manifest serialization");
        s.push('\n');
        s
    }

    pub fn bona_fide(&self) -> &str {
        &self.bona_fide
    }

    pub fn attack_species(&self) -> &[String] {
        &self.attack_species
    }

    /// All class names, bona fide first, then species in manifest order.
    pub fn classes(&self) -> Vec<&str> {
        let mut v = Vec::with_capacity(1 + self.attack_species.len());
        v.push(self.bona_fide.as_str());
        v.extend(self.attack_species.iter().map(|s| s.as_str()));
        v
    }

    pub fn n_classes(&self) -> usize {
        1 + self.attack_species.len()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.bona_fide == label || self.attack_species.iter().any(|s| s == label)
    }

    /// Index of `species` within the attack species list.
    pub fn species_index(&self, species: &str) -> Option<usize> {
        self.attack_species.iter().position(|s| s == species)
    }

    /// Position of `label` in [`classes`](Self::classes) order (bona fide = 0).
    pub fn class_index(&self, label: &str) -> Option<usize> {
        if label == self.bona_fide {
            Some(0)
        } else {
            self.species_index(label).map(|i| i + 1)
        }
    }
}
