//! Multiplex networks and the generation of their isomorphism classes.
//!
//! The central routine is [`combine_layers`]: given a base object and a new
//! layer, it partitions all n! inter-layer pairings into equivalence classes
//! by closing each pairing under the base's automorphisms (applied to the
//! labels, i.e. composed on the right) and the new layer's automorphisms
//! (applied to the label positions, i.e. composed on the left). Each closed
//! set of pairings is one combined isomorphism class. Chaining through
//! [`flatten`] extends a two-layer class by a third basis network.

use std::collections::HashMap;
use std::time::SystemTime;

use rayon::prelude::*;

use crate::canon::{canonical_form, canonical_graph, stack_automorphisms, tables, CanonicalForm};
use crate::error::{Error, Result};
use crate::graph::{check_vertex_count, pair_count, GraphKind, LabeledGraph};
use crate::perm::{factorial, AutomorphismGroup, Permutation};

/// Enumeration above this vertex count would scan more than 2^21 labeled
/// graphs per layer; the exact approach is intended for small systems.
pub const MAX_BASIS_VERTICES: usize = 6;

/// Layer chaining depth supported by [`enumerate_multiplex`].
pub const MAX_ENUM_LAYERS: usize = 3;

/// Default cap on labeled layer tuples visited by [`brute_force_multiplex`].
pub const DEFAULT_BRUTE_FORCE_BUDGET: u128 = 20_000;

/// An ordered stack of layers over one shared vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiplexNetwork {
    n: usize,
    layers: Vec<LabeledGraph>,
}

impl MultiplexNetwork {
    pub fn new(layers: Vec<LabeledGraph>) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::invalid("a multiplex needs at least one layer".to_string()));
        };
        let n = first.n();
        if layers.iter().any(|g| g.n() != n) {
            return Err(Error::ShapeMismatch(
                "all layers must share the vertex set".to_string(),
            ));
        }
        Ok(MultiplexNetwork { n, layers })
    }

    pub fn single(layer: LabeledGraph) -> Self {
        MultiplexNetwork {
            n: layer.n(),
            layers: vec![layer],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[LabeledGraph] {
        &self.layers
    }

    pub fn layer(&self, i: usize) -> &LabeledGraph {
        &self.layers[i]
    }

    pub fn kinds(&self) -> Vec<GraphKind> {
        self.layers.iter().map(LabeledGraph::kind).collect()
    }

    pub fn relabel(&self, p: &Permutation) -> MultiplexNetwork {
        MultiplexNetwork {
            n: self.n,
            layers: self.layers.iter().map(|g| p.apply(g)).collect(),
        }
    }

    pub fn canonical_form(&self) -> Result<CanonicalForm> {
        canonical_form(&self.layers)
    }

    /// Permutations fixing every layer simultaneously.
    pub fn automorphisms(&self) -> Result<AutomorphismGroup> {
        stack_automorphisms(&self.layers)
    }

    pub fn is_isomorphic_to(&self, other: &MultiplexNetwork) -> Result<bool> {
        crate::canon::is_isomorphic(&self.layers, &other.layers)
    }
}

/// One multiplex isomorphism class: a representative, the number of labeled
/// networks in the class, and the canonical form that identifies it.
#[derive(Debug, Clone)]
pub struct IsoClass {
    pub representative: MultiplexNetwork,
    pub orbit_size: u64,
    pub class_id: CanonicalForm,
}

impl IsoClass {
    /// Builds a class record from any member, deriving orbit size from the
    /// stack stabilizer.
    pub fn from_member(member: MultiplexNetwork) -> Result<Self> {
        let aut = member.automorphisms()?;
        let orbit_size = factorial(member.n()) / aut.order() as u64;
        let class_id = member.canonical_form()?;
        Ok(IsoClass {
            representative: member,
            orbit_size,
            class_id,
        })
    }

    pub fn n(&self) -> usize {
        self.representative.n()
    }

    /// Per-layer edge counts, the primary sort key for catalog files.
    fn edge_profile(&self) -> Vec<usize> {
        self.representative
            .layers()
            .iter()
            .map(LabeledGraph::edge_count)
            .collect()
    }
}

/// Provenance recorded alongside a catalog. The timestamp is kept in memory
/// only; output files stay byte-stable across reruns.
#[derive(Debug, Clone)]
pub struct GenerationMetadata {
    pub seed: u64,
    pub method: String,
    pub timestamp: Option<u64>,
}

impl GenerationMetadata {
    pub fn now(method: &str, seed: u64) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(SystemTime::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        GenerationMetadata {
            seed,
            method: method.to_string(),
            timestamp,
        }
    }
}

/// A complete set of isomorphism classes for one layer-kind signature.
#[derive(Debug, Clone)]
pub struct IsoClassCatalog {
    pub n: usize,
    pub layer_kinds: Vec<GraphKind>,
    pub classes: Vec<IsoClass>,
    pub metadata: GenerationMetadata,
}

impl IsoClassCatalog {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index lookup by canonical form.
    pub fn index_map(&self) -> HashMap<&CanonicalForm, usize> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, c)| (&c.class_id, i))
            .collect()
    }

    pub fn total_orbit(&self) -> u128 {
        self.classes.iter().map(|c| c.orbit_size as u128).sum()
    }

    /// Deterministic order: per-layer edge counts, then canonical bytes.
    pub fn sort(&mut self) {
        self.classes
            .sort_by(|a, b| (a.edge_profile(), &a.class_id).cmp(&(b.edge_profile(), &b.class_id)));
    }

    pub fn write_to(&self, w: &mut impl std::io::Write) -> Result<()> {
        let kinds = self
            .layer_kinds
            .iter()
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "# mxbench catalog v1")?;
        writeln!(w, "# n={} kinds={}", self.n, kinds)?;
        writeln!(
            w,
            "# generator=mxbench/{} method={} seed={}",
            crate::VERSION,
            self.metadata.method,
            self.metadata.seed
        )?;
        for class in &self.classes {
            let layers = class
                .representative
                .layers()
                .iter()
                .map(|g| {
                    g.edges()
                        .iter()
                        .map(|(i, j)| format!("{i}-{j}"))
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect::<Vec<_>>()
                .join(";");
            writeln!(
                w,
                "class={} orbit={} layers=[{}]",
                class.class_id.hex(),
                class.orbit_size,
                layers
            )?;
        }
        Ok(())
    }

    pub fn read_from(r: impl std::io::BufRead) -> Result<Self> {
        let mut n = None;
        let mut kinds: Option<Vec<GraphKind>> = None;
        let mut seed = 0u64;
        let mut method = String::from("file");
        let mut classes = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for field in rest.split_whitespace() {
                    if let Some((key, value)) = field.split_once('=') {
                        match key {
                            "n" => {
                                n = Some(value.parse::<usize>().map_err(|e| {
                                    Error::parse(format!("bad n in header: {e}"))
                                })?)
                            }
                            "kinds" => {
                                kinds = Some(
                                    value
                                        .split(',')
                                        .map(GraphKind::parse)
                                        .collect::<Result<Vec<_>>>()?,
                                )
                            }
                            "seed" => seed = value.parse().unwrap_or(0),
                            "method" => method = value.to_string(),
                            _ => {}
                        }
                    }
                }
                continue;
            }
            let n = n.ok_or_else(|| Error::parse("catalog body before n= header".to_string()))?;
            let kinds = kinds
                .as_ref()
                .ok_or_else(|| Error::parse("catalog body before kinds= header".to_string()))?;
            classes.push(parse_class_line(line, n, kinds)?);
        }
        let n = n.ok_or_else(|| Error::parse("missing catalog header".to_string()))?;
        let layer_kinds =
            kinds.ok_or_else(|| Error::parse("missing kinds= in catalog header".to_string()))?;
        Ok(IsoClassCatalog {
            n,
            layer_kinds,
            classes,
            metadata: GenerationMetadata {
                seed,
                method,
                timestamp: None,
            },
        })
    }
}

fn parse_class_line(line: &str, n: usize, kinds: &[GraphKind]) -> Result<IsoClass> {
    let mut class_id = None;
    let mut orbit = None;
    let mut layers = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("expected key=value, got {field:?}")))?;
        match key {
            "class" => class_id = Some(CanonicalForm::from_hex(value)?),
            "orbit" => {
                orbit = Some(
                    value
                        .parse::<u64>()
                        .map_err(|e| Error::parse(format!("bad orbit {value:?}: {e}")))?,
                )
            }
            "layers" => {
                let inner = value
                    .strip_prefix('[')
                    .and_then(|v| v.strip_suffix(']'))
                    .ok_or_else(|| Error::parse(format!("bad layers field {value:?}")))?;
                let parts: Vec<&str> = if inner.is_empty() {
                    vec![""]
                } else {
                    inner.split(';').collect()
                };
                if parts.len() != kinds.len() {
                    return Err(Error::parse(format!(
                        "class line has {} layers, header says {}",
                        parts.len(),
                        kinds.len()
                    )));
                }
                let mut parsed = Vec::with_capacity(parts.len());
                for (part, &kind) in parts.iter().zip(kinds) {
                    let mut edges = Vec::new();
                    if !part.is_empty() {
                        for e in part.split(',') {
                            let (a, b) = e
                                .split_once('-')
                                .ok_or_else(|| Error::parse(format!("bad edge {e:?}")))?;
                            edges.push((
                                a.parse::<usize>()
                                    .map_err(|err| Error::parse(format!("bad edge {e:?}: {err}")))?,
                                b.parse::<usize>()
                                    .map_err(|err| Error::parse(format!("bad edge {e:?}: {err}")))?,
                            ));
                        }
                    }
                    parsed.push(LabeledGraph::new(n, kind, &edges)?);
                }
                layers = Some(parsed);
            }
            _ => {}
        }
    }
    let representative = MultiplexNetwork::new(
        layers.ok_or_else(|| Error::parse("class line missing layers=".to_string()))?,
    )?;
    let class_id = class_id.ok_or_else(|| Error::parse("class line missing class=".to_string()))?;
    let orbit_size = orbit.ok_or_else(|| Error::parse("class line missing orbit=".to_string()))?;
    if representative.canonical_form()? != class_id {
        return Err(Error::Verification(
            "stored class id does not match its representative".to_string(),
        ));
    }
    Ok(IsoClass {
        representative,
        orbit_size,
        class_id,
    })
}

/// All pairwise isomorphism classes on n vertices, by exhaustive scan over
/// edge sets. Representatives are the canonical graphs of their classes.
pub fn enumerate_pairwise_basis(n: usize) -> Result<Vec<IsoClass>> {
    check_vertex_count(n)?;
    if n > MAX_BASIS_VERTICES {
        return Err(Error::ResourceLimit(format!(
            "pairwise basis enumeration scans 2^{} graphs; n={n} exceeds the supported n<={MAX_BASIS_VERTICES}",
            pair_count(n)
        )));
    }
    let total = 1u32 << pair_count(n);
    let mut seen: HashMap<CanonicalForm, IsoClass> = HashMap::new();
    for mask in 0..total {
        let g = LabeledGraph::from_bits(n, GraphKind::Pairwise, mask);
        let id = crate::canon::canonical_form_graph(&g);
        if !seen.contains_key(&id) {
            let rep = canonical_graph(&g);
            let class = IsoClass::from_member(MultiplexNetwork::single(rep))?;
            seen.insert(id, class);
        }
    }
    let mut classes: Vec<IsoClass> = seen.into_values().collect();
    classes.sort_by(|a, b| (a.edge_profile(), &a.class_id).cmp(&(b.edge_profile(), &b.class_id)));
    let sum: u128 = classes.iter().map(|c| c.orbit_size as u128).sum();
    debug_assert_eq!(sum, GraphKind::Pairwise.labeled_count(n));
    Ok(classes)
}

/// All collective isomorphism classes on n vertices: the empty layer plus one
/// clique class per charged-set size k in 2..=n.
pub fn enumerate_collective_basis(n: usize) -> Result<Vec<IsoClass>> {
    check_vertex_count(n)?;
    let mut classes = Vec::new();
    for k in std::iter::once(0).chain(2..=n) {
        let charged: Vec<usize> = (0..k).collect();
        let g = canonical_graph(&LabeledGraph::collective(n, &charged)?);
        classes.push(IsoClass::from_member(MultiplexNetwork::single(g))?);
    }
    let sum: u128 = classes.iter().map(|c| c.orbit_size as u128).sum();
    debug_assert_eq!(sum, GraphKind::Collective.labeled_count(n));
    Ok(classes)
}

/// Keeps one class per complement pair: the member with at most half the
/// possible edges. Self-complementary classes are kept once; a pair tied at
/// exactly half keeps the lexicographically smaller canonical form.
pub fn sparse_half(classes: &[IsoClass]) -> Result<Vec<IsoClass>> {
    let mut out = Vec::new();
    for class in classes {
        if class.representative.layer_count() != 1
            || class.representative.layer(0).kind() != GraphKind::Pairwise
        {
            return Err(Error::invalid(
                "sparse_half expects single-layer pairwise classes".to_string(),
            ));
        }
        let g = class.representative.layer(0);
        let np = pair_count(g.n());
        let e = g.edge_count();
        let keep = match (2 * e).cmp(&np) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => {
                let cid = crate::canon::canonical_form_graph(&g.complement()?);
                // self-complementary classes have cid == class_id
                class.class_id <= cid
            }
        };
        if keep {
            out.push(class.clone());
        }
    }
    Ok(out)
}

/// One combined class produced by [`combine_layers`]: the class record, the
/// representative pairing that pins it, and how many of the n! pairings
/// collapse onto it.
#[derive(Debug, Clone)]
pub struct CombinedClass {
    pub class: IsoClass,
    pub pairing: Permutation,
    pub pairing_orbit: u64,
}

/// Partitions all n! pairings of `base` against `layer` into combined
/// isomorphism classes. `base` is relabeled by the pairing; `layer` stays
/// static as the new last layer.
pub fn combine_layers(
    base: &MultiplexNetwork,
    base_aut: &AutomorphismGroup,
    layer: &LabeledGraph,
    layer_aut: &AutomorphismGroup,
) -> Result<Vec<CombinedClass>> {
    let n = base.n();
    if layer.n() != n || base_aut.n() != n || layer_aut.n() != n {
        return Err(Error::ShapeMismatch(
            "base, layer and automorphism groups must share the vertex set".to_string(),
        ));
    }
    let t = tables(n)?;
    let nfact = t.perms.len();
    let base_gen: Vec<u32> = base_aut.elements().iter().map(|p| t.index_of(p)).collect();
    let layer_gen: Vec<u32> = layer_aut.elements().iter().map(|p| t.index_of(p)).collect();

    let mut assigned = vec![false; nfact];
    let mut out = Vec::new();
    let mut frontier: Vec<u32> = Vec::new();
    for seed in 0..nfact {
        if assigned[seed] {
            continue;
        }
        // close the pairing under right-composition by base automorphisms and
        // left-composition by layer automorphisms
        assigned[seed] = true;
        frontier.clear();
        frontier.push(seed as u32);
        let mut members = 1u64;
        while let Some(idx) = frontier.pop() {
            let p = &t.perms[idx as usize];
            for &a in &base_gen {
                let q = p.compose(&t.perms[a as usize]);
                let qi = t.index_of(&q) as usize;
                if !assigned[qi] {
                    assigned[qi] = true;
                    members += 1;
                    frontier.push(qi as u32);
                }
            }
            for &b in &layer_gen {
                let q = t.perms[b as usize].compose(p);
                let qi = t.index_of(&q) as usize;
                if !assigned[qi] {
                    assigned[qi] = true;
                    members += 1;
                    frontier.push(qi as u32);
                }
            }
        }
        let pairing = t.perms[seed].clone();
        let mut layers = base.relabel(&pairing).layers().to_vec();
        layers.push(*layer);
        let network = MultiplexNetwork::new(layers)?;
        // |Aut(combined)| = |Aut(base)| * |Aut(layer)| / pairing orbit
        let orbit_size = (factorial(n) as u128 * members as u128
            / (base_aut.order() as u128 * layer_aut.order() as u128)) as u64;
        let class_id = network.canonical_form()?;
        out.push(CombinedClass {
            class: IsoClass {
                representative: network,
                orbit_size,
                class_id,
            },
            pairing,
            pairing_orbit: members,
        });
    }
    debug_assert_eq!(out.iter().map(|c| c.pairing_orbit).sum::<u64>(), factorial(n));
    Ok(out)
}

/// Convenience wrapper combining two single graphs, computing both groups.
pub fn combine_pair(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<Vec<CombinedClass>> {
    let base = MultiplexNetwork::single(*g1);
    let base_aut = base.automorphisms()?;
    let layer_aut = crate::canon::automorphisms(g2);
    combine_layers(&base, &base_aut, g2, &layer_aut)
}

/// A multiplex class pinned to a concrete pairing, ready to act as the base
/// of another [`combine_layers`] round.
#[derive(Debug, Clone)]
pub struct FlattenedGraph {
    pub base: MultiplexNetwork,
    pub shared_automorphisms: AutomorphismGroup,
}

/// Pins `class` at `pairing` (layers after the first are relabeled into the
/// first layer's frame) and records the automorphisms shared by all layers.
pub fn flatten(class: &IsoClass, pairing: &Permutation) -> Result<FlattenedGraph> {
    let rep = &class.representative;
    if rep.layer_count() < 2 {
        return Err(Error::invalid("flatten needs at least two layers".to_string()));
    }
    if pairing.n() != rep.n() {
        return Err(Error::ShapeMismatch("pairing size mismatch".to_string()));
    }
    let mut layers = vec![*rep.layer(0)];
    for g in &rep.layers()[1..] {
        layers.push(pairing.apply(g));
    }
    let base = MultiplexNetwork::new(layers)?;
    let shared_automorphisms = base.automorphisms()?;
    Ok(FlattenedGraph {
        base,
        shared_automorphisms,
    })
}

/// Generates the full catalog of multiplex isomorphism classes whose layer i
/// lies in one of the classes of `basis_sets[i]`. Layers are joined with
/// [`combine_layers`], chaining through [`flatten`] for a third layer, and
/// deduplicated by canonical form.
pub fn enumerate_multiplex(basis_sets: &[Vec<IsoClass>], n: usize) -> Result<IsoClassCatalog> {
    check_vertex_count(n)?;
    if basis_sets.is_empty() || basis_sets.len() > MAX_ENUM_LAYERS {
        return Err(Error::invalid(format!(
            "enumeration supports 1..={MAX_ENUM_LAYERS} layers, got {}",
            basis_sets.len()
        )));
    }
    let mut layer_kinds = Vec::with_capacity(basis_sets.len());
    for (li, set) in basis_sets.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::invalid(format!("basis set {li} is empty")));
        }
        let kind = set[0].representative.layer(0).kind();
        for class in set {
            if class.n() != n {
                return Err(Error::ShapeMismatch(format!(
                    "basis set {li} has a class on {} vertices, expected {n}",
                    class.n()
                )));
            }
            if class.representative.layer_count() != 1
                || class.representative.layer(0).kind() != kind
            {
                return Err(Error::invalid(format!(
                    "basis set {li} must hold single-layer classes of one kind"
                )));
            }
        }
        layer_kinds.push(kind);
    }

    let mut classes: Vec<IsoClass> = match basis_sets.len() {
        1 => basis_sets[0].clone(),
        _ => {
            // stage one: all ordered pairs from the first two basis sets
            let pairs: Vec<(usize, usize)> = (0..basis_sets[0].len())
                .flat_map(|i| (0..basis_sets[1].len()).map(move |j| (i, j)))
                .collect();
            let two_layer: Vec<CombinedClass> = pairs
                .par_iter()
                .map(|&(i, j)| {
                    combine_pair(
                        basis_sets[0][i].representative.layer(0),
                        basis_sets[1][j].representative.layer(0),
                    )
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            if basis_sets.len() == 2 {
                two_layer.into_iter().map(|c| c.class).collect()
            } else {
                // stage two: pin each two-layer class and chain the third set
                let tasks: Vec<(usize, usize)> = (0..two_layer.len())
                    .flat_map(|i| (0..basis_sets[2].len()).map(move |j| (i, j)))
                    .collect();
                let flattened: Vec<FlattenedGraph> = two_layer
                    .par_iter()
                    .map(|c| flatten(&c.class, &Permutation::identity(n)))
                    .collect::<Result<Vec<_>>>()?;
                tasks
                    .par_iter()
                    .map(|&(i, j)| {
                        let third = &basis_sets[2][j];
                        let layer_aut = crate::canon::automorphisms(third.representative.layer(0));
                        combine_layers(
                            &flattened[i].base,
                            &flattened[i].shared_automorphisms,
                            third.representative.layer(0),
                            &layer_aut,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .map(|c| c.class)
                    .collect()
            }
        }
    };

    // distinct basis tuples yield distinct classes, so this dedup is a
    // consistency net rather than a merge step
    let mut by_id: HashMap<CanonicalForm, usize> = HashMap::with_capacity(classes.len());
    let mut unique: Vec<IsoClass> = Vec::with_capacity(classes.len());
    for class in classes.drain(..) {
        match by_id.get(&class.class_id) {
            Some(&at) => {
                if unique[at].orbit_size != class.orbit_size {
                    return Err(Error::Verification(
                        "duplicate class with conflicting orbit size".to_string(),
                    ));
                }
            }
            None => {
                by_id.insert(class.class_id.clone(), unique.len());
                unique.push(class);
            }
        }
    }

    let mut catalog = IsoClassCatalog {
        n,
        layer_kinds,
        classes: unique,
        metadata: GenerationMetadata::now("algorithmic", 0),
    };
    catalog.sort();

    let expected: u128 = basis_sets
        .iter()
        .map(|set| set.iter().map(|c| c.orbit_size as u128).sum::<u128>())
        .product();
    if catalog.total_orbit() != expected {
        return Err(Error::Verification(format!(
            "orbit sizes sum to {} but {} labeled networks exist",
            catalog.total_orbit(),
            expected
        )));
    }
    Ok(catalog)
}

/// Reference implementation: expands every labeled layer tuple and groups by
/// pairwise isomorphism tests. Exponentially expensive; guarded by `budget`
/// (in labeled tuples).
pub fn brute_force_multiplex_with_budget(
    basis_sets: &[Vec<IsoClass>],
    n: usize,
    budget: u128,
) -> Result<IsoClassCatalog> {
    check_vertex_count(n)?;
    if basis_sets.is_empty() || basis_sets.len() > MAX_ENUM_LAYERS {
        return Err(Error::invalid(format!(
            "brute force supports 1..={MAX_ENUM_LAYERS} layers, got {}",
            basis_sets.len()
        )));
    }
    let t = tables(n)?;
    // expand each basis set to its labeled members, deduplicated and sorted
    let mut labeled: Vec<Vec<LabeledGraph>> = Vec::new();
    let mut work: u128 = 1;
    for set in basis_sets {
        let mut members = Vec::new();
        let kind = set[0].representative.layer(0).kind();
        let mut seen = std::collections::HashSet::new();
        for class in set {
            if class.n() != n || class.representative.layer_count() != 1 {
                return Err(Error::invalid(
                    "brute force expects single-layer basis classes".to_string(),
                ));
            }
            let bits = class.representative.layer(0).bits();
            for idx in 0..t.perms.len() {
                let moved = t.relabel(idx, bits);
                if seen.insert(moved) {
                    members.push(LabeledGraph::from_bits(n, kind, moved));
                }
            }
        }
        members.sort_by_key(LabeledGraph::bits);
        work = work.saturating_mul(members.len() as u128);
        labeled.push(members);
    }
    if work > budget {
        return Err(Error::ResourceLimit(format!(
            "brute force would visit {work} labeled tuples (budget {budget})"
        )));
    }

    // group tuples into classes, bucketing by cheap invariants first
    type Bucket = Vec<usize>; // indices into `reps`
    let mut reps: Vec<(MultiplexNetwork, u64)> = Vec::new();
    let mut buckets: HashMap<Vec<(usize, Vec<usize>)>, Bucket> = HashMap::new();
    let mut cursor = vec![0usize; labeled.len()];
    loop {
        let layers: Vec<LabeledGraph> = cursor
            .iter()
            .enumerate()
            .map(|(li, &i)| labeled[li][i])
            .collect();
        let network = MultiplexNetwork::new(layers.clone())?;
        let key: Vec<(usize, Vec<usize>)> = layers
            .iter()
            .map(|g| {
                let mut d = g.degrees();
                d.sort_unstable();
                (g.edge_count(), d)
            })
            .collect();
        let bucket = buckets.entry(key).or_default();
        let mut found = false;
        for &ri in bucket.iter() {
            if reps[ri].0.is_isomorphic_to(&network)? {
                reps[ri].1 += 1;
                found = true;
                break;
            }
        }
        if !found {
            bucket.push(reps.len());
            reps.push((network, 1));
        }
        // advance the mixed-radix cursor
        let mut li = labeled.len();
        loop {
            if li == 0 {
                break;
            }
            li -= 1;
            cursor[li] += 1;
            if cursor[li] < labeled[li].len() {
                break;
            }
            cursor[li] = 0;
        }
        if cursor.iter().all(|&c| c == 0) {
            break;
        }
    }

    let layer_kinds: Vec<GraphKind> = basis_sets
        .iter()
        .map(|set| set[0].representative.layer(0).kind())
        .collect();
    let classes = reps
        .into_iter()
        .map(|(network, count)| {
            let class_id = network.canonical_form()?;
            Ok(IsoClass {
                representative: network,
                orbit_size: count,
                class_id,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut catalog = IsoClassCatalog {
        n,
        layer_kinds,
        classes,
        metadata: GenerationMetadata::now("brute_force", 0),
    };
    catalog.sort();
    Ok(catalog)
}

/// [`brute_force_multiplex_with_budget`] at the default budget.
pub fn brute_force_multiplex(basis_sets: &[Vec<IsoClass>], n: usize) -> Result<IsoClassCatalog> {
    brute_force_multiplex_with_budget(basis_sets, n, DEFAULT_BRUTE_FORCE_BUDGET)
}

/// Builds basis sets for a kind signature, e.g. for [`enumerate_multiplex`].
pub fn basis_sets_for(n: usize, kinds: &[GraphKind]) -> Result<Vec<Vec<IsoClass>>> {
    kinds
        .iter()
        .map(|&k| match k {
            GraphKind::Pairwise => enumerate_pairwise_basis(n),
            GraphKind::Collective => enumerate_collective_basis(n),
        })
        .collect()
}
