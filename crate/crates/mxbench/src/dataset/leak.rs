//! Class-leakage checks between dataset splits.
//!
//! A split "leaks" into another when they share isomorphism classes; whether
//! that is a defect depends on the dataset's build method, so the checker
//! reports all pairwise overlaps and separately flags the ones the manifest
//! declares must be empty.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use crate::canon::CanonicalForm;
use crate::error::{Error, Result};

use super::builder::DatasetPlan;
use super::formats;
use super::manifest::DatasetManifest;

#[derive(Debug, Clone)]
pub struct OverlapReport {
    pub a: String,
    pub b: String,
    pub a_classes: usize,
    pub b_classes: usize,
    pub shared: usize,
}

impl OverlapReport {
    pub fn line(&self) -> String {
        format!(
            "{} ({} classes) vs {} ({} classes): {} shared",
            self.a, self.a_classes, self.b, self.b_classes, self.shared
        )
    }
}

#[derive(Debug, Clone)]
pub struct LeakReport {
    pub overlaps: Vec<OverlapReport>,
    /// Overlap lines that violate the manifest's disjointness contract.
    pub violations: Vec<String>,
}

impl LeakReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn class_set_of_dir(split_dir: &Path) -> Result<HashSet<CanonicalForm>> {
    let path = split_dir.join(formats::CLASS_FILE);
    let file = std::fs::File::open(&path)
        .map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))?;
    let ids = formats::read_classes(std::io::BufReader::new(file))?;
    Ok(ids.into_iter().collect())
}

fn overlap(a: &str, sa: &HashSet<CanonicalForm>, b: &str, sb: &HashSet<CanonicalForm>) -> OverlapReport {
    OverlapReport {
        a: a.to_string(),
        b: b.to_string(),
        a_classes: sa.len(),
        b_classes: sb.len(),
        shared: sa.intersection(sb).count(),
    }
}

/// Classes shared between two directories that each hold a `classes.txt`.
pub fn overlap_between_dirs(dir_a: &Path, dir_b: &Path) -> Result<OverlapReport> {
    let sa = class_set_of_dir(dir_a)?;
    let sb = class_set_of_dir(dir_b)?;
    Ok(overlap(
        &dir_a.display().to_string(),
        &sa,
        &dir_b.display().to_string(),
        &sb,
    ))
}

fn check_pairs(
    sets: &BTreeMap<String, HashSet<CanonicalForm>>,
    required_disjoint: &[(&str, &str)],
) -> LeakReport {
    let names: Vec<&String> = sets.keys().collect();
    let mut overlaps = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            overlaps.push(overlap(a, &sets[*a], b, &sets[*b]));
        }
    }
    let violations = overlaps
        .iter()
        .filter(|o| {
            o.shared > 0
                && required_disjoint
                    .iter()
                    .any(|(a, b)| (o.a == *a && o.b == *b) || (o.a == *b && o.b == *a))
        })
        .map(OverlapReport::line)
        .collect();
    LeakReport {
        overlaps,
        violations,
    }
}

/// Reads a materialized dataset directory and checks every split pair,
/// flagging overlaps the build method requires to be empty.
pub fn check_dataset(dataset_dir: &Path) -> Result<LeakReport> {
    let manifest = DatasetManifest::load(dataset_dir)?;
    let mut sets = BTreeMap::new();
    for name in manifest.splits.keys() {
        sets.insert(name.clone(), class_set_of_dir(&dataset_dir.join(name))?);
    }
    Ok(check_pairs(&sets, &manifest.build.required_disjoint_pairs()))
}

/// Plan-level variant of [`check_dataset`]: same contract, no files needed.
pub fn check_plan(plan: &DatasetPlan) -> LeakReport {
    let mut sets: BTreeMap<String, HashSet<CanonicalForm>> = BTreeMap::new();
    for split in &plan.splits {
        // indices are catalog-stable, so synthesize ids from them directly
        sets.insert(
            split.name.clone(),
            split
                .samples
                .iter()
                .map(|s| {
                    CanonicalForm::from_hex(&format!("{:08x}", s.class_index))
                        .expect("8 hex digits")
                })
                .collect(),
        );
    }
    check_pairs(&sets, &plan.spec.build.required_disjoint_pairs())
}
