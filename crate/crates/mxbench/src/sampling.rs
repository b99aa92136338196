//! Network samplers and exact class-probability computations.
//!
//! Three sampling models are supported:
//!
//! * `original_er`: every layer is drawn independently from an
//!   Erdos-Renyi-style process with parameter p (edges for pairwise layers,
//!   charged vertices for collective layers).
//! * `uniform_basis`: each layer picks one of its single-layer isomorphism
//!   classes uniformly, then a uniform labeled member of that class.
//! * `uniform_multiplex`: one multiplex class is picked uniformly from the
//!   full catalog, then a uniform labeled member.
//!
//! Class probabilities are computed in exact rational arithmetic so that
//! ties in the rank-frequency table are exact ties, not float accidents.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{pair_count, GraphKind, LabeledGraph};
use crate::multiplex::{IsoClass, IsoClassCatalog, MultiplexNetwork};
use crate::perm::Permutation;

/// Which distribution to sample networks from (and to compute exact class
/// probabilities for).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingModel {
    OriginalEr { p: f64 },
    UniformBasis,
    UniformMultiplex,
}

impl SamplingModel {
    pub fn parse(name: &str, p: Option<f64>) -> Result<Self> {
        match name.replace('-', "_").as_str() {
            "original_er" => {
                let p = p.ok_or_else(|| Error::invalid("original_er needs a p value"))?;
                check_p(p)?;
                Ok(SamplingModel::OriginalEr { p })
            }
            "uniform_basis" => Ok(SamplingModel::UniformBasis),
            "uniform_multiplex" => Ok(SamplingModel::UniformMultiplex),
            other => Err(Error::invalid(format!(
                "unknown sampling model {other:?} (expected original_er, uniform_basis or uniform_multiplex)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SamplingModel::OriginalEr { .. } => "original_er",
            SamplingModel::UniformBasis => "uniform_basis",
            SamplingModel::UniformMultiplex => "uniform_multiplex",
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!(
            "edge probability must lie strictly between 0 and 1, got {p}"
        )));
    }
    Ok(())
}

/// The exact rational equal to the f64 `p` (f64s are dyadic, so this is
/// lossless; 0.5 becomes exactly 1/2).
pub fn exact_p(p: f64) -> Result<BigRational> {
    check_p(p)?;
    BigRational::from_float(p).ok_or_else(|| Error::invalid(format!("p={p} is not finite")))
}

fn rpow(base: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= base;
    }
    acc
}

/// Probability of drawing exactly the labeled configuration `g` from the
/// per-layer ER process with parameter `p`.
///
/// Pairwise layers flip one coin per vertex pair. Collective layers charge
/// each vertex independently; a single charged vertex induces no edges, so
/// the empty layer absorbs both the k=0 and the k=1 outcomes.
pub fn layer_er_weight(g: &LabeledGraph, p: &BigRational) -> BigRational {
    let n = g.n();
    let q = BigRational::one() - p;
    match g.kind() {
        GraphKind::Pairwise => {
            let e = g.edge_count();
            rpow(p, e) * rpow(&q, pair_count(n) - e)
        }
        GraphKind::Collective => {
            let k = g.charged_set().map(|s| s.len()).unwrap_or(0);
            if k == 0 {
                rpow(&q, n) + BigRational::from_integer(BigInt::from(n)) * p * rpow(&q, n - 1)
            } else {
                rpow(p, k) * rpow(&q, n - k)
            }
        }
    }
}

/// Samples one labeled network with every layer drawn independently from the
/// ER process with parameter `p`.
pub fn er_sample_network(
    n: usize,
    kinds: &[GraphKind],
    p: f64,
    rng: &mut impl Rng,
) -> Result<MultiplexNetwork> {
    check_p(p)?;
    if kinds.is_empty() {
        return Err(Error::invalid("need at least one layer kind"));
    }
    let mut layers = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let layer = match kind {
            GraphKind::Pairwise => {
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if rng.random_bool(p) {
                            edges.push((i, j));
                        }
                    }
                }
                LabeledGraph::pairwise(n, &edges)?
            }
            GraphKind::Collective => {
                let charged: Vec<usize> = (0..n).filter(|_| rng.random_bool(p)).collect();
                if charged.len() == 1 {
                    LabeledGraph::empty(n, GraphKind::Collective)?
                } else {
                    LabeledGraph::collective(n, &charged)?
                }
            }
        };
        layers.push(layer);
    }
    MultiplexNetwork::new(layers)
}

fn random_permutation(n: usize, rng: &mut impl Rng) -> Permutation {
    let mut map: Vec<u8> = (0..n as u8).collect();
    map.shuffle(rng);
    Permutation::from_map(map).expect("shuffled identity is a bijection")
}

/// Uniform labeled member of the isomorphism class containing `network`.
///
/// A uniformly random relabeling of a fixed representative hits each member
/// of the orbit through exactly |Aut| permutations, hence uniformly.
pub fn uniform_member(network: &MultiplexNetwork, rng: &mut impl Rng) -> MultiplexNetwork {
    network.relabel(&random_permutation(network.n(), rng))
}

/// Samples each layer by picking one of its basis classes uniformly and then
/// a uniform labeled member of that class.
pub fn uniform_basis_sample(
    basis_sets: &[Vec<IsoClass>],
    rng: &mut impl Rng,
) -> Result<MultiplexNetwork> {
    if basis_sets.is_empty() {
        return Err(Error::invalid("need at least one basis set"));
    }
    let mut layers = Vec::with_capacity(basis_sets.len());
    for set in basis_sets {
        if set.is_empty() {
            return Err(Error::invalid("empty basis set"));
        }
        let class = &set[rng.random_range(0..set.len())];
        let member = uniform_member(&class.representative, rng);
        layers.push(*member.layer(0));
    }
    MultiplexNetwork::new(layers)
}

/// Samples a multiplex class uniformly from the catalog, then a uniform
/// labeled member of it.
pub fn uniform_multiplex_sample(
    catalog: &IsoClassCatalog,
    rng: &mut impl Rng,
) -> Result<MultiplexNetwork> {
    if catalog.is_empty() {
        return Err(Error::invalid("empty catalog"));
    }
    let class = &catalog.classes[rng.random_range(0..catalog.len())];
    Ok(uniform_member(&class.representative, rng))
}

/// Dispatches to the sampler for `model`. `basis_sets` must match the
/// catalog's layer kinds (only used by `uniform_basis`).
pub fn sample_network(
    model: SamplingModel,
    catalog: &IsoClassCatalog,
    basis_sets: &[Vec<IsoClass>],
    rng: &mut impl Rng,
) -> Result<MultiplexNetwork> {
    match model {
        SamplingModel::OriginalEr { p } => {
            er_sample_network(catalog.n, &catalog.layer_kinds, p, rng)
        }
        SamplingModel::UniformBasis => uniform_basis_sample(basis_sets, rng),
        SamplingModel::UniformMultiplex => uniform_multiplex_sample(catalog, rng),
    }
}

/// Exact probability of each catalog class under `model`, in catalog order.
///
/// Every labeled member of a class has identical per-layer edge and charge
/// counts and identical per-layer basis classes, so class probability is the
/// per-member probability times the orbit size.
pub fn class_probabilities(
    catalog: &IsoClassCatalog,
    basis_sets: &[Vec<IsoClass>],
    model: SamplingModel,
) -> Result<Vec<BigRational>> {
    match model {
        SamplingModel::OriginalEr { p } => {
            let p = exact_p(p)?;
            Ok(catalog
                .classes
                .iter()
                .map(|class| {
                    let mut w = BigRational::from_integer(BigInt::from(class.orbit_size));
                    for layer in class.representative.layers() {
                        w *= layer_er_weight(layer, &p);
                    }
                    w
                })
                .collect())
        }
        SamplingModel::UniformBasis => {
            if basis_sets.len() != catalog.layer_kinds.len() {
                return Err(Error::ShapeMismatch(format!(
                    "catalog has {} layers but {} basis sets were given",
                    catalog.layer_kinds.len(),
                    basis_sets.len()
                )));
            }
            // member probability per layer: 1 / (basis class count * orbit)
            let maps: Vec<std::collections::HashMap<crate::canon::CanonicalForm, u64>> =
                basis_sets
                    .iter()
                    .map(|set| {
                        set.iter()
                            .map(|c| (c.class_id.clone(), c.orbit_size))
                            .collect()
                    })
                    .collect();
            catalog
                .classes
                .iter()
                .map(|class| {
                    let mut w = BigRational::from_integer(BigInt::from(class.orbit_size));
                    for (li, layer) in class.representative.layers().iter().enumerate() {
                        let id = crate::canon::canonical_form_graph(layer);
                        let orbit = maps[li].get(&id).ok_or_else(|| {
                            Error::Verification(format!(
                                "layer {li} of class {} is outside its basis set",
                                class.class_id.hex()
                            ))
                        })?;
                        let denom = BigInt::from(basis_sets[li].len() as u64) * BigInt::from(*orbit);
                        w /= BigRational::from_integer(denom);
                    }
                    Ok(w)
                })
                .collect()
        }
        SamplingModel::UniformMultiplex => {
            let share = BigRational::new(BigInt::one(), BigInt::from(catalog.len() as u64));
            Ok(vec![share; catalog.len()])
        }
    }
}

/// One row of a rank-frequency table: all classes sharing one exact
/// probability, at competition rank `rank`.
#[derive(Debug, Clone)]
pub struct RankRow {
    pub rank: usize,
    pub probability: BigRational,
    pub class_indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RankFrequency {
    pub rows: Vec<RankRow>,
    /// max probability / min probability; None when a class has zero mass.
    pub ratio: Option<BigRational>,
}

/// Groups exactly equal probabilities into shared ranks, most probable first.
pub fn rank_frequency(probs: &[BigRational]) -> RankFrequency {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].cmp(&probs[a]).then(a.cmp(&b)));
    let mut rows: Vec<RankRow> = Vec::new();
    for idx in order {
        match rows.last_mut() {
            Some(row) if row.probability == probs[idx] => row.class_indices.push(idx),
            _ => {
                let rank = rows
                    .last()
                    .map(|r| r.rank + r.class_indices.len())
                    .unwrap_or(1);
                rows.push(RankRow {
                    rank,
                    probability: probs[idx].clone(),
                    class_indices: vec![idx],
                });
            }
        }
    }
    let ratio = match (rows.first(), rows.last()) {
        (Some(hi), Some(lo)) if !lo.probability.is_zero() => {
            Some(&hi.probability / &lo.probability)
        }
        _ => None,
    };
    RankFrequency { rows, ratio }
}

/// f64 view of an exact rational, for reporting.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Writes `rank,probability,class_count,class_ids` rows; ids within a rank
/// are semicolon-separated canonical hex.
pub fn write_rank_frequency_csv(
    w: &mut impl std::io::Write,
    catalog: &IsoClassCatalog,
    rf: &RankFrequency,
) -> Result<()> {
    writeln!(w, "rank,probability,class_count,class_ids")?;
    for row in &rf.rows {
        let ids = row
            .class_indices
            .iter()
            .map(|&i| catalog.classes[i].class_id.hex())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            w,
            "{},{},{},{}",
            row.rank,
            rational_to_f64(&row.probability),
            row.class_indices.len(),
            ids
        )?;
    }
    Ok(())
}

/// Skew comparison of the two class-aware models at one edge probability.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub p: f64,
    pub er_ratio: f64,
    pub basis_ratio: f64,
}

/// Rank-frequency max:min ratios for `original_er` across `ps`, next to the
/// (p-independent) `uniform_basis` ratio.
pub fn p_sweep(
    catalog: &IsoClassCatalog,
    basis_sets: &[Vec<IsoClass>],
    ps: &[f64],
) -> Result<Vec<SweepPoint>> {
    let basis_probs = class_probabilities(catalog, basis_sets, SamplingModel::UniformBasis)?;
    let basis_ratio = rank_frequency(&basis_probs)
        .ratio
        .map(|r| rational_to_f64(&r))
        .ok_or_else(|| Error::Verification("uniform_basis has a zero-mass class".to_string()))?;
    let mut out = Vec::with_capacity(ps.len());
    for &p in ps {
        let probs = class_probabilities(catalog, basis_sets, SamplingModel::OriginalEr { p })?;
        let er_ratio = rank_frequency(&probs)
            .ratio
            .map(|r| rational_to_f64(&r))
            .ok_or_else(|| Error::Verification("original_er has a zero-mass class".to_string()))?;
        out.push(SweepPoint {
            p,
            er_ratio,
            basis_ratio,
        });
    }
    Ok(out)
}
