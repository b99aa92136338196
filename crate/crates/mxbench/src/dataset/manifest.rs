//! Dataset manifest: everything needed to audit or rebuild a dataset.
//! Serialized as `manifest.json` in the dataset root. Contains no wall-clock
//! data, so rebuilding with the same seed is byte-identical.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::SimConfig;
use crate::error::{Error, Result};
use crate::graph::GraphKind;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SPLIT_NAMES: [&str; 3] = ["train", "val", "test"];

/// Samples per split. Grid builders read these as initial conditions per
/// class; sampling builders read them as total draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl SplitCounts {
    pub fn get(&self, split: &str) -> usize {
        match split {
            "train" => self.train,
            "val" => self.val,
            "test" => self.test,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationAxis {
    /// Class statistic: charged vertices in the first collective layer.
    Charge,
    /// Class statistic: total edges over pairwise layers.
    Spring,
}

impl ExtrapolationAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "charge" => Ok(ExtrapolationAxis::Charge),
            "spring" => Ok(ExtrapolationAxis::Spring),
            other => Err(Error::invalid(format!("unknown extrapolation axis {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExtrapolationAxis::Charge => "charge",
            ExtrapolationAxis::Spring => "spring",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationMode {
    /// Train on the low band, hold out the high band.
    High,
    /// Train on the high band, hold out the low band.
    Low,
    /// Train on the outer terciles, hold out the middle.
    Interpolate,
}

impl ExtrapolationMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "high" => Ok(ExtrapolationMode::High),
            "low" => Ok(ExtrapolationMode::Low),
            "interpolate" => Ok(ExtrapolationMode::Interpolate),
            other => Err(Error::invalid(format!("unknown extrapolation mode {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExtrapolationMode::High => "high",
            ExtrapolationMode::Low => "low",
            ExtrapolationMode::Interpolate => "interpolate",
        }
    }
}

/// How a dataset's splits were populated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BuildMethod {
    /// Independent draws from the per-layer ER process; splits may share
    /// classes freely.
    OriginalEr { p: f64, counts: SplitCounts },
    /// Like `original_er`, but train draws whose class appears in val or
    /// test are rejected and redrawn. `budget_factor` bounds the attempts as
    /// a multiple of the target count.
    RejectionEr {
        p: f64,
        counts: SplitCounts,
        budget_factor: u64,
    },
    /// Every class crossed with per-split initial-condition seed lists.
    ConGrid { inits: SplitCounts },
    /// Classes partitioned across splits; one shared seed list, so splits
    /// differ only in which classes appear.
    IsoGrid { inits: usize, class_split: [usize; 3] },
    /// Classes partitioned across splits and seed lists disjoint per split.
    ConIsoGrid {
        inits: SplitCounts,
        class_split: [usize; 3],
    },
    /// Train restricted to the iso-grid train classes; val and test are
    /// byte-identical to the `con_grid` val and test at the same seed.
    SubConGrid {
        inits: SplitCounts,
        class_split: [usize; 3],
    },
    /// Train and held-out bands separated along a class statistic.
    Extrapolation {
        axis: ExtrapolationAxis,
        mode: ExtrapolationMode,
        inits: SplitCounts,
    },
}

impl BuildMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BuildMethod::OriginalEr { .. } => "original_er",
            BuildMethod::RejectionEr { .. } => "rejection_er",
            BuildMethod::ConGrid { .. } => "con_grid",
            BuildMethod::IsoGrid { .. } => "iso_grid",
            BuildMethod::ConIsoGrid { .. } => "con_iso_grid",
            BuildMethod::SubConGrid { .. } => "sub_con_grid",
            BuildMethod::Extrapolation { .. } => "extrapolation",
        }
    }

    /// Split pairs that must not share classes for this build to be sound.
    pub fn required_disjoint_pairs(&self) -> Vec<(&'static str, &'static str)> {
        match self {
            BuildMethod::OriginalEr { .. } | BuildMethod::ConGrid { .. } => vec![],
            BuildMethod::RejectionEr { .. } => vec![("train", "val"), ("train", "test")],
            BuildMethod::IsoGrid { .. } | BuildMethod::ConIsoGrid { .. } => {
                vec![("train", "val"), ("train", "test"), ("val", "test")]
            }
            // sub_con val/test reuse every class, so only train is split-pure
            BuildMethod::SubConGrid { .. } => vec![],
            BuildMethod::Extrapolation { .. } => vec![("train", "val"), ("train", "test")],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub samples: usize,
    pub distinct_classes: usize,
}

/// Complete description of a dataset. The same struct serves as generation
/// request and as the `manifest.json` written next to the data: `splits`,
/// `reports` and `generator_version` are outputs and may be omitted from a
/// hand-written request, everything else is input. Feeding a written
/// manifest back to generation reproduces the dataset byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub name: String,
    pub n: usize,
    pub layer_kinds: Vec<GraphKind>,
    pub seed: u64,
    pub build: BuildMethod,
    pub sim: SimConfig,
    #[serde(default)]
    pub splits: BTreeMap<String, SplitSummary>,
    /// Human-readable build diagnostics (coverage, histograms, baselines).
    #[serde(default)]
    pub reports: Vec<String>,
    #[serde(default)]
    pub generator_version: String,
}

impl DatasetManifest {
    pub fn write_json(&self, w: &mut impl Write) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "refusing to write schema_version {}",
                self.schema_version
            )));
        }
        serde_json::to_writer_pretty(&mut *w, self)?;
        w.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_json(r: impl Read) -> Result<Self> {
        let manifest: DatasetManifest = serde_json::from_reader(r)?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(Error::parse(format!(
                "unsupported manifest schema_version {} (expected {SCHEMA_VERSION})",
                manifest.schema_version
            )));
        }
        Ok(manifest)
    }

    pub fn load(dataset_dir: &Path) -> Result<Self> {
        let path = dataset_dir.join(MANIFEST_FILE);
        let file = std::fs::File::open(&path)
            .map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))?;
        Self::read_json(std::io::BufReader::new(file))
    }

    /// The generation inputs carried by this manifest.
    pub fn to_spec(&self) -> super::builder::DatasetSpec {
        super::builder::DatasetSpec {
            name: self.name.clone(),
            seed: self.seed,
            build: self.build.clone(),
            sim: self.sim.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_json_round_trips() {
        let manifest = DatasetManifest {
            schema_version: SCHEMA_VERSION,
            name: "demo".to_string(),
            n: 5,
            layer_kinds: vec![GraphKind::Pairwise, GraphKind::Collective],
            seed: 42,
            build: BuildMethod::IsoGrid {
                inits: 155,
                class_split: [324, 65, 65],
            },
            sim: SimConfig::for_kinds(&[GraphKind::Pairwise, GraphKind::Collective]),
            splits: BTreeMap::from([
                (
                    "train".to_string(),
                    SplitSummary {
                        samples: 50220,
                        distinct_classes: 324,
                    },
                ),
                (
                    "val".to_string(),
                    SplitSummary {
                        samples: 10075,
                        distinct_classes: 65,
                    },
                ),
            ]),
            reports: vec!["classes: train=324 val=65 test=65".to_string()],
            generator_version: crate::VERSION.to_string(),
        };
        let mut buf = Vec::new();
        manifest.write_json(&mut buf).unwrap();
        let back = DatasetManifest::read_json(&buf[..]).unwrap();
        assert_eq!(back, manifest);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"method\": \"iso_grid\""));
        assert!(text.contains("\"schema_version\": 1"));
    }

    #[test]
    fn request_manifest_needs_no_output_fields() {
        let request = r#"{
            "schema_version": 1,
            "name": "con-grid-demo",
            "n": 4,
            "layer_kinds": ["pairwise", "collective"],
            "seed": 7,
            "build": {
                "method": "con_grid",
                "inits": { "train": 3, "val": 1, "test": 1 }
            },
            "sim": {
                "dt": 0.001, "subsample": 100, "n_frames": 70,
                "pos_std": 0.5, "vel_norm": 0.5, "softening": 0.1,
                "box_half": null,
                "forces": [
                    { "type": "spring", "k": 0.1 },
                    { "type": "charge", "strength": 1.0 }
                ]
            }
        }"#;
        let manifest = DatasetManifest::read_json(request.as_bytes()).unwrap();
        assert!(manifest.splits.is_empty());
        assert!(manifest.reports.is_empty());
        assert_eq!(manifest.generator_version, "");
        let spec = manifest.to_spec();
        assert_eq!(spec.name, "con-grid-demo");
        assert_eq!(spec.seed, 7);
    }

    #[test]
    fn unknown_schema_versions_are_rejected() {
        let text = r#"{"schema_version": 9, "name": "x"}"#;
        assert!(DatasetManifest::read_json(text.as_bytes()).is_err());
    }

    #[test]
    fn method_names_and_disjointness_contracts() {
        let con = BuildMethod::ConGrid {
            inits: SplitCounts {
                train: 111,
                val: 22,
                test: 22,
            },
        };
        assert_eq!(con.name(), "con_grid");
        assert!(con.required_disjoint_pairs().is_empty());
        let iso = BuildMethod::IsoGrid {
            inits: 155,
            class_split: [324, 65, 65],
        };
        assert_eq!(iso.required_disjoint_pairs().len(), 3);
        let rej = BuildMethod::RejectionEr {
            p: 0.5,
            counts: SplitCounts {
                train: 100,
                val: 20,
                test: 20,
            },
            budget_factor: 10,
        };
        assert_eq!(
            rej.required_disjoint_pairs(),
            vec![("train", "val"), ("train", "test")]
        );
    }

    #[test]
    fn axis_and_mode_parse() {
        assert_eq!(
            ExtrapolationAxis::parse("charge").unwrap(),
            ExtrapolationAxis::Charge
        );
        assert_eq!(
            ExtrapolationMode::parse("interpolate").unwrap(),
            ExtrapolationMode::Interpolate
        );
        assert!(ExtrapolationAxis::parse("mass").is_err());
        assert!(ExtrapolationMode::parse("mid").is_err());
    }
}
