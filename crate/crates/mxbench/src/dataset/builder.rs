//! Dataset planning and materialization.
//!
//! Planning decides, per split, which labeled network each sample uses and
//! which seed generates its initial conditions; it never runs the simulator,
//! so split-design checks stay cheap at full dataset sizes.
//! Materialization simulates every planned sample and writes the on-disk
//! files.
//!
//! All randomness is derived from the dataset seed through tagged streams,
//! so any two builders that construct the same (tag, index) pairs produce
//! byte-identical samples. The sub_con_grid builder relies on this: its val
//! and test splits use the con_grid tags and therefore match a con_grid
//! dataset built from the same seed byte for byte.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{sample_initial_conditions, simulate, Trajectory};
use crate::error::{Error, Result};
use crate::graph::GraphKind;
use crate::multiplex::{IsoClass, IsoClassCatalog, MultiplexNetwork};
use crate::sampling::{er_sample_network, uniform_member};

use super::formats;
use super::manifest::{
    BuildMethod, DatasetManifest, ExtrapolationAxis, ExtrapolationMode, SplitCounts,
    SplitSummary, MANIFEST_FILE, SCHEMA_VERSION, SPLIT_NAMES,
};
use super::metrics::stationary_mse;

/// Everything that defines a dataset besides the catalog itself.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub name: String,
    pub seed: u64,
    pub build: BuildMethod,
    pub sim: crate::dynamics::SimConfig,
}

/// One planned sample: a labeled network, the catalog class it belongs to,
/// and the seed that will generate its initial conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub class_index: usize,
    pub network: MultiplexNetwork,
    pub init_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub name: String,
    pub samples: Vec<SamplePlan>,
}

impl SplitPlan {
    pub fn class_set(&self) -> HashSet<usize> {
        self.samples.iter().map(|s| s.class_index).collect()
    }
}

#[derive(Debug, Clone)]
pub struct DatasetPlan {
    pub spec: DatasetSpec,
    pub n: usize,
    pub layer_kinds: Vec<GraphKind>,
    pub splits: Vec<SplitPlan>,
    pub reports: Vec<String>,
}

impl DatasetPlan {
    pub fn split(&self, name: &str) -> Option<&SplitPlan> {
        self.splits.iter().find(|s| s.name == name)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-purpose seed stream: FNV-1a over the tag, folded with
/// the master seed, finalized per index with splitmix64.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ master;
    for &b in tag.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(h ^ splitmix64(index))
}

fn seed_list(master: u64, tag: &str, count: usize) -> Vec<u64> {
    (0..count).map(|i| derive_seed(master, tag, i as u64)).collect()
}

/// Uniformly relabeled copy of a class representative, seeded per sample.
fn relabeled_member(class: &IsoClass, seed: u64) -> MultiplexNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    uniform_member(&class.representative, &mut rng)
}

/// Grid split: the cross product of `class_indices` and per-init seeds, in
/// (class, init) construction order, then shuffled by the split's order tag.
/// Tags depend on (split, class, init) only, so two builders constructing
/// the same cross product agree byte for byte.
fn grid_split(
    catalog: &IsoClassCatalog,
    split: &str,
    class_indices: &[usize],
    init_seeds: &[u64],
    master: u64,
) -> SplitPlan {
    let mut samples = Vec::with_capacity(class_indices.len() * init_seeds.len());
    for &ci in class_indices {
        for (ii, &init_seed) in init_seeds.iter().enumerate() {
            let relabel_seed = derive_seed(master, &format!("relabel:{split}:{ci}"), ii as u64);
            samples.push(SamplePlan {
                class_index: ci,
                network: relabeled_member(&catalog.classes[ci], relabel_seed),
                init_seed,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, &format!("order:{split}"), 0));
    samples.shuffle(&mut rng);
    SplitPlan {
        name: split.to_string(),
        samples,
    }
}

/// Partitions catalog indices into train/val/test by seeded shuffle; each
/// part is returned sorted ascending.
fn class_partition(
    catalog_len: usize,
    split: [usize; 3],
    master: u64,
) -> Result<[Vec<usize>; 3]> {
    let total: usize = split.iter().sum();
    if total != catalog_len {
        return Err(Error::invalid(format!(
            "class split {split:?} sums to {total}, catalog has {catalog_len} classes"
        )));
    }
    if split.iter().any(|&c| c == 0) {
        return Err(Error::invalid("every split needs at least one class"));
    }
    let mut indices: Vec<usize> = (0..catalog_len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, "class_split", 0));
    indices.shuffle(&mut rng);
    let mut parts: Vec<Vec<usize>> = Vec::with_capacity(3);
    let mut at = 0;
    for &count in &split {
        let mut part = indices[at..at + count].to_vec();
        part.sort_unstable();
        parts.push(part);
        at += count;
    }
    Ok([parts.remove(0), parts.remove(0), parts.remove(0)])
}

struct ErSplitOutcome {
    plan: SplitPlan,
    draws: u64,
}

fn er_split(
    catalog: &IsoClassCatalog,
    index_map: &std::collections::HashMap<&crate::canon::CanonicalForm, usize>,
    split: &str,
    p: f64,
    count: usize,
    master: u64,
    reject: Option<&HashSet<usize>>,
    max_draws: u64,
) -> Result<ErSplitOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, &format!("er:{split}"), 0));
    let mut samples = Vec::with_capacity(count);
    let mut draws = 0u64;
    while samples.len() < count {
        if draws >= max_draws {
            return Err(Error::ResourceLimit(format!(
                "{split}: rejection budget exhausted after {draws} draws ({} of {count} accepted)",
                samples.len()
            )));
        }
        draws += 1;
        let network = er_sample_network(catalog.n, &catalog.layer_kinds, p, &mut rng)?;
        let id = network.canonical_form()?;
        let &class_index = index_map.get(&id).ok_or_else(|| {
            Error::Verification(format!("sampled class {} missing from catalog", id.hex()))
        })?;
        if reject.is_some_and(|set| set.contains(&class_index)) {
            continue;
        }
        let init_seed = derive_seed(master, &format!("erinit:{split}"), (samples.len()) as u64);
        samples.push(SamplePlan {
            class_index,
            network,
            init_seed,
        });
    }
    Ok(ErSplitOutcome {
        plan: SplitPlan {
            name: split.to_string(),
            samples,
        },
        draws,
    })
}

fn class_statistic(class: &IsoClass, axis: ExtrapolationAxis) -> usize {
    class
        .representative
        .layers()
        .iter()
        .map(|g| match (axis, g.kind()) {
            (ExtrapolationAxis::Charge, GraphKind::Collective) => {
                g.charged_set().map(|s| s.len()).unwrap_or(0)
            }
            (ExtrapolationAxis::Spring, GraphKind::Pairwise) => g.edge_count(),
            _ => 0,
        })
        .sum()
}

fn coverage_report(split: &SplitPlan, catalog_len: usize) -> String {
    let distinct = split.class_set().len();
    format!(
        "split {}: {} samples, {} distinct classes ({:.1}% of catalog)",
        split.name,
        split.samples.len(),
        distinct,
        100.0 * distinct as f64 / catalog_len as f64
    )
}

fn overlap_report(splits: &[SplitPlan]) -> String {
    let sets: Vec<HashSet<usize>> = splits.iter().map(SplitPlan::class_set).collect();
    format!(
        "class overlap: train/val={} train/test={} val/test={}",
        sets[0].intersection(&sets[1]).count(),
        sets[0].intersection(&sets[2]).count(),
        sets[1].intersection(&sets[2]).count()
    )
}

/// Lays out every sample of every split without simulating anything.
pub fn plan_dataset(catalog: &IsoClassCatalog, spec: &DatasetSpec) -> Result<DatasetPlan> {
    if catalog.is_empty() {
        return Err(Error::invalid("catalog is empty"));
    }
    spec.sim.validate_for(&catalog.classes[0].representative)?;
    let master = spec.seed;
    let mut reports = Vec::new();

    let splits: Vec<SplitPlan> = match &spec.build {
        BuildMethod::OriginalEr { p, counts } => {
            check_counts(counts)?;
            let index_map = catalog.index_map();
            let mut out = Vec::with_capacity(3);
            for split in SPLIT_NAMES {
                let count = counts.get(split);
                let outcome = er_split(
                    catalog,
                    &index_map,
                    split,
                    *p,
                    count,
                    master,
                    None,
                    u64::MAX,
                )?;
                out.push(outcome.plan);
            }
            out
        }
        BuildMethod::RejectionEr {
            p,
            counts,
            budget_factor,
        } => {
            check_counts(counts)?;
            if *budget_factor == 0 {
                return Err(Error::invalid("budget_factor must be at least 1"));
            }
            let index_map = catalog.index_map();
            // val and test are drawn first; train rejects their classes
            let val = er_split(catalog, &index_map, "val", *p, counts.val, master, None, u64::MAX)?;
            let test =
                er_split(catalog, &index_map, "test", *p, counts.test, master, None, u64::MAX)?;
            let mut held: HashSet<usize> = val.plan.class_set();
            held.extend(test.plan.class_set());
            let budget = (counts.train as u64).saturating_mul(*budget_factor);
            let train = er_split(
                catalog,
                &index_map,
                "train",
                *p,
                counts.train,
                master,
                Some(&held),
                budget,
            )?;
            reports.push(format!(
                "rejection sampling: train accepted {} of {} draws (budget {budget}), {} classes held out",
                counts.train, train.draws, held.len()
            ));
            vec![train.plan, val.plan, test.plan]
        }
        BuildMethod::ConGrid { inits } => {
            check_counts(inits)?;
            let all: Vec<usize> = (0..catalog.len()).collect();
            SPLIT_NAMES
                .iter()
                .map(|split| {
                    let seeds = seed_list(master, &format!("init:{split}"), inits.get(split));
                    grid_split(catalog, split, &all, &seeds, master)
                })
                .collect()
        }
        BuildMethod::IsoGrid { inits, class_split } => {
            if *inits == 0 {
                return Err(Error::invalid("inits must be positive"));
            }
            let parts = class_partition(catalog.len(), *class_split, master)?;
            // one shared seed list: splits differ only in their classes
            let seeds = seed_list(master, "init:shared", *inits);
            SPLIT_NAMES
                .iter()
                .zip(&parts)
                .map(|(split, part)| grid_split(catalog, split, part, &seeds, master))
                .collect()
        }
        BuildMethod::ConIsoGrid { inits, class_split } => {
            check_counts(inits)?;
            let parts = class_partition(catalog.len(), *class_split, master)?;
            SPLIT_NAMES
                .iter()
                .zip(&parts)
                .map(|(split, part)| {
                    let seeds =
                        seed_list(master, &format!("coniso:init:{split}"), inits.get(split));
                    grid_split(catalog, split, part, &seeds, master)
                })
                .collect()
        }
        BuildMethod::SubConGrid { inits, class_split } => {
            check_counts(inits)?;
            let parts = class_partition(catalog.len(), *class_split, master)?;
            let all: Vec<usize> = (0..catalog.len()).collect();
            SPLIT_NAMES
                .iter()
                .map(|&split| {
                    // val/test reuse the con_grid construction verbatim
                    let classes: &[usize] = if split == "train" { &parts[0] } else { &all };
                    let seeds = seed_list(master, &format!("init:{split}"), inits.get(split));
                    grid_split(catalog, split, classes, &seeds, master)
                })
                .collect()
        }
        BuildMethod::Extrapolation { axis, mode, inits } => {
            check_counts(inits)?;
            let stats: Vec<usize> = catalog
                .classes
                .iter()
                .map(|c| class_statistic(c, *axis))
                .collect();
            let mut sorted = stats.clone();
            sorted.sort_unstable();
            let (train_classes, held_classes) = match mode {
                ExtrapolationMode::High | ExtrapolationMode::Low => {
                    let med = sorted[(sorted.len() - 1) / 2];
                    // ties sit in the low band in both modes
                    let low: Vec<usize> =
                        (0..stats.len()).filter(|&i| stats[i] <= med).collect();
                    let high: Vec<usize> =
                        (0..stats.len()).filter(|&i| stats[i] > med).collect();
                    match mode {
                        ExtrapolationMode::High => (low, high),
                        _ => (high, low),
                    }
                }
                ExtrapolationMode::Interpolate => {
                    let t1 = sorted[(sorted.len() - 1) / 3];
                    let t2 = sorted[2 * (sorted.len() - 1) / 3];
                    let outer: Vec<usize> = (0..stats.len())
                        .filter(|&i| stats[i] <= t1 || stats[i] > t2)
                        .collect();
                    let middle: Vec<usize> = (0..stats.len())
                        .filter(|&i| stats[i] > t1 && stats[i] <= t2)
                        .collect();
                    (outer, middle)
                }
            };
            if train_classes.is_empty() || held_classes.is_empty() {
                return Err(Error::invalid(format!(
                    "extrapolation axis {} cannot split this catalog: one band is empty",
                    axis.name()
                )));
            }
            let mut histogram: std::collections::BTreeMap<usize, usize> =
                std::collections::BTreeMap::new();
            for &s in &stats {
                *histogram.entry(s).or_insert(0) += 1;
            }
            let hist = histogram
                .iter()
                .map(|(k, v)| format!("{k}=>{v}"))
                .collect::<Vec<_>>()
                .join(" ");
            reports.push(format!(
                "extrapolation axis={} mode={}: stat histogram {{{hist}}}, train band {} classes, held-out band {} classes",
                axis.name(),
                mode.name(),
                train_classes.len(),
                held_classes.len()
            ));
            // val and test draw from the held-out band with distinct seeds
            SPLIT_NAMES
                .iter()
                .map(|&split| {
                    let classes: &[usize] = if split == "train" {
                        &train_classes
                    } else {
                        &held_classes
                    };
                    let seeds = seed_list(master, &format!("xinit:{split}"), inits.get(split));
                    grid_split(catalog, split, classes, &seeds, master)
                })
                .collect()
        }
    };

    for split in &splits {
        reports.push(coverage_report(split, catalog.len()));
    }
    reports.push(overlap_report(&splits));

    Ok(DatasetPlan {
        spec: spec.clone(),
        n: catalog.n,
        layer_kinds: catalog.layer_kinds.clone(),
        splits,
        reports,
    })
}

fn check_counts(counts: &SplitCounts) -> Result<()> {
    if counts.train == 0 || counts.val == 0 || counts.test == 0 {
        return Err(Error::invalid("every split needs at least one sample"));
    }
    Ok(())
}

/// Simulates every planned sample and writes one directory per split plus
/// the manifest. Returns the manifest that was written.
pub fn materialize(
    plan: &DatasetPlan,
    catalog: &IsoClassCatalog,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    std::fs::create_dir_all(out_dir)?;
    let mut summaries = std::collections::BTreeMap::new();
    let mut reports = plan.reports.clone();
    for split in &plan.splits {
        let dir = out_dir.join(&split.name);
        std::fs::create_dir_all(&dir)?;
        let trajectories: Vec<Trajectory> = split
            .samples
            .par_iter()
            .map(|sample| {
                let mut rng = ChaCha8Rng::seed_from_u64(sample.init_seed);
                let init = sample_initial_conditions(plan.n, &plan.spec.sim, &mut rng);
                simulate(&sample.network, &init, &plan.spec.sim)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut w = std::io::BufWriter::new(std::fs::File::create(
            dir.join(formats::TRAJECTORY_FILE),
        )?);
        formats::write_trajectories(&mut w, &trajectories)?;
        drop(w);

        let networks: Vec<MultiplexNetwork> =
            split.samples.iter().map(|s| s.network.clone()).collect();
        let mut w =
            std::io::BufWriter::new(std::fs::File::create(dir.join(formats::NETWORK_FILE))?);
        formats::write_networks(&mut w, &networks)?;
        drop(w);

        let ids: Vec<crate::canon::CanonicalForm> = split
            .samples
            .iter()
            .map(|s| catalog.classes[s.class_index].class_id.clone())
            .collect();
        let mut w =
            std::io::BufWriter::new(std::fs::File::create(dir.join(formats::CLASS_FILE))?);
        formats::write_classes(&mut w, &ids)?;
        drop(w);

        let horizon = (plan.spec.sim.n_frames - 1).min(10);
        if horizon > 0 {
            reports.push(format!(
                "stationary baseline {}: mse@1={:.6e} mse@{horizon}={:.6e}",
                split.name,
                stationary_mse(&trajectories, 0, 1)?,
                stationary_mse(&trajectories, 0, horizon)?,
            ));
        }
        summaries.insert(
            split.name.clone(),
            SplitSummary {
                samples: split.samples.len(),
                distinct_classes: split.class_set().len(),
            },
        );
    }
    let manifest = DatasetManifest {
        schema_version: SCHEMA_VERSION,
        name: plan.spec.name.clone(),
        n: plan.n,
        layer_kinds: plan.layer_kinds.clone(),
        seed: plan.spec.seed,
        build: plan.spec.build.clone(),
        sim: plan.spec.sim.clone(),
        splits: summaries,
        reports,
        generator_version: crate::VERSION.to_string(),
    };
    let mut w = std::io::BufWriter::new(std::fs::File::create(out_dir.join(MANIFEST_FILE))?);
    manifest.write_json(&mut w)?;
    Ok(manifest)
}
