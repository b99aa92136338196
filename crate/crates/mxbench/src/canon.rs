//! Canonical forms, isomorphism tests and automorphism search.
//!
//! Everything here is exhaustive over vertex relabelings, which is exact and
//! fast enough for the supported range n <= 8. Automorphism search prunes by
//! the per-layer degree vector; canonical forms scan the full symmetric group
//! so that the minimum is taken over every relabeling.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::{bits_to_bytes, check_vertex_count, pair_count, LabeledGraph, MAX_VERTICES};
use crate::perm::{AutomorphismGroup, Permutation};

/// Canonical form of a layer stack: the lexicographically minimal
/// layer-concatenated edge bitset over all common relabelings, packed
/// MSB-first and byte-padded per layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::parse(format!("bad class id {s:?}: {e}")))?;
        Ok(CanonicalForm { bytes })
    }
}

impl std::fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.hex())
    }
}

/// Shared per-n tables: all permutations plus their pair-index remaps.
pub(crate) struct PermTables {
    pub perms: Vec<Permutation>,
    pub pair_maps: Vec<Vec<u8>>,
    index: HashMap<u32, u32>,
}

impl PermTables {
    pub fn index_of(&self, p: &Permutation) -> u32 {
        self.index[&p.packed()]
    }

    /// Applies permutation `idx` to an edge bitset.
    #[inline]
    pub fn relabel(&self, idx: usize, bits: u32) -> u32 {
        let map = &self.pair_maps[idx];
        let mut out = 0u32;
        let mut b = bits;
        while b != 0 {
            let k = b.trailing_zeros() as usize;
            out |= 1 << map[k];
            b &= b - 1;
        }
        out
    }
}

static TABLES: [OnceLock<PermTables>; MAX_VERTICES + 1] = [const { OnceLock::new() }; MAX_VERTICES + 1];

pub(crate) fn tables(n: usize) -> Result<&'static PermTables> {
    check_vertex_count(n)?;
    Ok(TABLES[n].get_or_init(|| {
        let perms = Permutation::all(n).expect("n validated");
        let pair_maps = perms.iter().map(Permutation::pair_map).collect();
        let index = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.packed(), i as u32))
            .collect();
        PermTables {
            perms,
            pair_maps,
            index,
        }
    }))
}

fn check_stack(layers: &[LabeledGraph]) -> Result<usize> {
    let Some(first) = layers.first() else {
        return Err(Error::invalid("layer stack is empty".to_string()));
    };
    let n = first.n();
    if layers.iter().any(|g| g.n() != n) {
        return Err(Error::ShapeMismatch(
            "all layers must share the vertex set".to_string(),
        ));
    }
    Ok(n)
}

/// Canonical form of a single graph.
pub fn canonical_form_graph(g: &LabeledGraph) -> CanonicalForm {
    canonical_form(std::slice::from_ref(g)).expect("single layer is a valid stack")
}

/// Canonical form of a layer stack under a common relabeling.
pub fn canonical_form(layers: &[LabeledGraph]) -> Result<CanonicalForm> {
    let n = check_stack(layers)?;
    let t = tables(n)?;
    let np = pair_count(n);
    if layers.len() * np.div_ceil(8) * 8 > 128 {
        return Err(Error::ResourceLimit(format!(
            "canonical form supports at most {} layers at n={n}",
            128 / (np.div_ceil(8) * 8).max(1)
        )));
    }
    let layer_bits: Vec<u32> = layers.iter().map(|g| g.bits()).collect();
    let mut best = u128::MAX;
    for idx in 0..t.perms.len() {
        let mut key = 0u128;
        for &bits in &layer_bits {
            key = (key << (np.div_ceil(8) * 8)) | pack_key(t.relabel(idx, bits), np);
        }
        if key < best {
            best = key;
        }
    }
    // unpack the winning key back into per-layer byte blocks
    let block = np.div_ceil(8) * 8;
    let mut bytes = Vec::with_capacity(layers.len() * np.div_ceil(8));
    for li in (0..layers.len()).rev() {
        let chunk = (best >> (block * li)) as u32 & ((1u64 << block) - 1) as u32;
        let mut bits = 0u32;
        for k in 0..np {
            if chunk >> (block - 1 - k) & 1 == 1 {
                bits |= 1 << k;
            }
        }
        bytes.extend_from_slice(&bits_to_bytes(bits, np));
    }
    Ok(CanonicalForm { bytes })
}

/// Packs relabeled bits into a key chunk whose numeric order equals the
/// byte-lexicographic order of the MSB-first byte encoding.
#[inline]
fn pack_key(bits: u32, np: usize) -> u128 {
    let block = np.div_ceil(8) * 8;
    let mut out = 0u128;
    for k in 0..np {
        if bits >> k & 1 == 1 {
            out |= 1 << (block - 1 - k);
        }
    }
    out
}

/// The canonical representative graph of a single layer's class.
pub fn canonical_graph(g: &LabeledGraph) -> LabeledGraph {
    let n = g.n();
    let t = tables(n).expect("graph n already validated");
    let bits = (0..t.perms.len())
        .map(|idx| t.relabel(idx, g.bits()))
        .min_by_key(|&b| pack_key(b, pair_count(n)))
        .expect("at least the identity");
    LabeledGraph::from_bits(n, g.kind(), bits)
}

/// Automorphism group of a single graph.
pub fn automorphisms(g: &LabeledGraph) -> AutomorphismGroup {
    stack_automorphisms(std::slice::from_ref(g)).expect("single layer is a valid stack")
}

/// Common automorphisms of a layer stack: permutations fixing every layer.
pub fn stack_automorphisms(layers: &[LabeledGraph]) -> Result<AutomorphismGroup> {
    let n = check_stack(layers)?;
    // vertices can only map to vertices with the same per-layer degree vector
    let invariant: Vec<Vec<usize>> = (0..n)
        .map(|v| layers.iter().map(|g| g.degree(v)).collect())
        .collect();
    let mut elements = Vec::new();
    let mut map = vec![0u8; n];
    let mut used = [false; MAX_VERTICES];
    search(layers, &invariant, 0, &mut map, &mut used, &mut elements);
    Ok(AutomorphismGroup::new(n, elements))
}

fn search(
    layers: &[LabeledGraph],
    invariant: &[Vec<usize>],
    v: usize,
    map: &mut Vec<u8>,
    used: &mut [bool; MAX_VERTICES],
    out: &mut Vec<Permutation>,
) {
    let n = invariant.len();
    if v == n {
        out.push(Permutation::from_map(map.clone()).expect("bijection by construction"));
        return;
    }
    for img in 0..n {
        if used[img] || invariant[v] != invariant[img] {
            continue;
        }
        // partial consistency: edges to already-placed vertices must be preserved
        let ok = (0..v).all(|u| {
            layers.iter().all(|g| {
                g.contains_edge(u.min(v), u.max(v))
                    == g.contains_edge((map[u] as usize).min(img), (map[u] as usize).max(img))
            })
        });
        if !ok {
            continue;
        }
        map[v] = img as u8;
        used[img] = true;
        search(layers, invariant, v + 1, map, used, out);
        used[img] = false;
    }
}

/// Whether a single permutation maps every layer of `a` onto the
/// corresponding layer of `b`.
pub fn is_isomorphic(a: &[LabeledGraph], b: &[LabeledGraph]) -> Result<bool> {
    let n = check_stack(a)?;
    let nb = check_stack(b)?;
    if n != nb || a.len() != b.len() {
        return Ok(false);
    }
    if a.iter().zip(b).any(|(x, y)| {
        x.kind() != y.kind() || x.edge_count() != y.edge_count()
    }) {
        return Ok(false);
    }
    let t = tables(n)?;
    let abits: Vec<u32> = a.iter().map(|g| g.bits()).collect();
    let bbits: Vec<u32> = b.iter().map(|g| g.bits()).collect();
    Ok((0..t.perms.len())
        .any(|idx| abits.iter().zip(&bbits).all(|(&x, &y)| t.relabel(idx, x) == y)))
}
