//! Labeled graphs on a small vertex set, stored as edge bitsets.
//!
//! Vertex pairs are indexed in row-major lexicographic order:
//! (0,1), (0,2), ..., (0,n-1), (1,2), ... This order is normative for
//! canonical forms and for every on-disk format that stores edge flags.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on vertices; edge bitsets for stacks of three layers fit a u128.
pub const MAX_VERTICES: usize = 8;

/// Number of unordered vertex pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

/// Index of pair (i, j), i < j, in lexicographic pair order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_at(n: usize, idx: usize) -> (usize, usize) {
    debug_assert!(idx < pair_count(n));
    let mut i = 0;
    let mut base = 0;
    loop {
        let row = n - 1 - i;
        if idx < base + row {
            return (i, i + 1 + idx - base);
        }
        base += row;
        i += 1;
    }
}

/// Which family a layer belongs to: arbitrary simple graphs, or cliques on a
/// charged vertex subset (size 0 or >= 2; a single charged vertex has no
/// edges and is indistinguishable from the empty layer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Pairwise,
    Collective,
}

impl GraphKind {
    pub fn short(self) -> &'static str {
        match self {
            GraphKind::Pairwise => "p",
            GraphKind::Collective => "c",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Pairwise => "pairwise",
            GraphKind::Collective => "collective",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "p" | "pairwise" => Ok(GraphKind::Pairwise),
            "c" | "collective" => Ok(GraphKind::Collective),
            other => Err(Error::parse(format!("unknown graph kind {other:?}"))),
        }
    }

    /// Count of distinct labeled graphs of this kind on `n` vertices.
    pub fn labeled_count(self, n: usize) -> u128 {
        match self {
            GraphKind::Pairwise => 1u128 << pair_count(n),
            // empty set plus every charged subset of size >= 2
            GraphKind::Collective => (1u128 << n) - n as u128,
        }
    }
}

impl std::fmt::Display for GraphKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A simple graph on vertices 0..n with a layer kind tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledGraph {
    n: u8,
    kind: GraphKind,
    bits: u32,
}

impl LabeledGraph {
    /// Builds a graph from an explicit edge list, validating the kind invariant.
    pub fn new(n: usize, kind: GraphKind, edges: &[(usize, usize)]) -> Result<Self> {
        check_vertex_count(n)?;
        let mut bits = 0u32;
        for &(a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            bits |= 1 << pair_index(n, i, j);
        }
        let g = LabeledGraph { n: n as u8, kind, bits };
        if kind == GraphKind::Collective {
            g.validate_collective()?;
        }
        Ok(g)
    }

    pub fn pairwise(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, GraphKind::Pairwise, edges)
    }

    /// Clique on the charged subset. A singleton charge set collapses to the
    /// empty layer since it induces no edges.
    pub fn collective(n: usize, charged: &[usize]) -> Result<Self> {
        check_vertex_count(n)?;
        let mut seen = [false; MAX_VERTICES];
        for &v in charged {
            if v >= n {
                return Err(Error::invalid(format!("charged vertex {v} out of range")));
            }
            if seen[v] {
                return Err(Error::invalid(format!("charged vertex {v} repeated")));
            }
            seen[v] = true;
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if seen[i] && seen[j] {
                    edges.push((i, j));
                }
            }
        }
        Self::new(n, GraphKind::Collective, &edges)
    }

    pub fn empty(n: usize, kind: GraphKind) -> Result<Self> {
        Self::new(n, kind, &[])
    }

    pub fn complete(n: usize) -> Result<Self> {
        check_vertex_count(n)?;
        let bits = if pair_count(n) == 32 { u32::MAX } else { (1u32 << pair_count(n)) - 1 };
        Ok(LabeledGraph { n: n as u8, kind: GraphKind::Pairwise, bits })
    }

    /// Raw constructor used by enumeration loops; validates in debug builds.
    pub(crate) fn from_bits(n: usize, kind: GraphKind, bits: u32) -> Self {
        debug_assert!(n <= MAX_VERTICES);
        debug_assert_eq!(bits >> pair_count(n), 0);
        let g = LabeledGraph { n: n as u8, kind, bits };
        debug_assert!(kind == GraphKind::Pairwise || g.validate_collective().is_ok());
        g
    }

    fn validate_collective(&self) -> Result<()> {
        let n = self.n();
        let support: Vec<usize> = (0..n).filter(|&v| self.degree(v) > 0).collect();
        let mut clique = 0u32;
        for (a, &i) in support.iter().enumerate() {
            for &j in &support[a + 1..] {
                clique |= 1 << pair_index(n, i, j);
            }
        }
        if clique != self.bits {
            return Err(Error::invalid(
                "collective layer must be a clique on its charged set".to_string(),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub(crate) fn bits(&self) -> u32 {
        self.bits
    }

    pub fn edge_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.bits >> pair_index(self.n(), i, j) & 1 == 1
    }

    /// Edge list in lexicographic pair order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::with_capacity(self.edge_count());
        let mut b = self.bits;
        while b != 0 {
            let k = b.trailing_zeros() as usize;
            out.push(pair_at(n, k));
            b &= b - 1;
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        let n = self.n();
        (0..n)
            .filter(|&u| u != v && self.contains_edge(u.min(v), u.max(v)))
            .count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    /// Charged vertex set of a collective layer.
    pub fn charged_set(&self) -> Option<Vec<usize>> {
        match self.kind {
            GraphKind::Collective => {
                Some((0..self.n()).filter(|&v| self.degree(v) > 0).collect())
            }
            GraphKind::Pairwise => None,
        }
    }

    /// Edge complement. Defined for pairwise layers only: complementing a
    /// clique layer usually leaves the collective family.
    pub fn complement(&self) -> Result<LabeledGraph> {
        if self.kind != GraphKind::Pairwise {
            return Err(Error::invalid(
                "complement is defined for pairwise layers only".to_string(),
            ));
        }
        let mask = if pair_count(self.n()) == 32 {
            u32::MAX
        } else {
            (1u32 << pair_count(self.n())) - 1
        };
        Ok(LabeledGraph {
            n: self.n,
            kind: self.kind,
            bits: self.bits ^ mask,
        })
    }

    /// One-line text form: `n=<int> kind=<p|c> edges=<i-j,i-j,...>`.
    pub fn to_line(&self) -> String {
        let edges = self
            .edges()
            .iter()
            .map(|(i, j)| format!("{i}-{j}"))
            .collect::<Vec<_>>()
            .join(",");
        format!("n={} kind={} edges={}", self.n(), self.kind.short(), edges)
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let mut n = None;
        let mut kind = None;
        let mut edges: Option<Vec<(usize, usize)>> = None;
        for field in line.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("expected key=value, got {field:?}")))?;
            match key {
                "n" => {
                    n = Some(value.parse::<usize>().map_err(|e| {
                        Error::parse(format!("bad vertex count {value:?}: {e}"))
                    })?)
                }
                "kind" => kind = Some(GraphKind::parse(value)?),
                "edges" => {
                    let mut list = Vec::new();
                    if !value.is_empty() {
                        for part in value.split(',') {
                            let (a, b) = part.split_once('-').ok_or_else(|| {
                                Error::parse(format!("bad edge {part:?}"))
                            })?;
                            let a = a.parse::<usize>().map_err(|e| {
                                Error::parse(format!("bad edge endpoint {a:?}: {e}"))
                            })?;
                            let b = b.parse::<usize>().map_err(|e| {
                                Error::parse(format!("bad edge endpoint {b:?}: {e}"))
                            })?;
                            list.push((a, b));
                        }
                    }
                    edges = Some(list);
                }
                other => return Err(Error::parse(format!("unknown field {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::parse("missing n= field".to_string()))?;
        let kind = kind.ok_or_else(|| Error::parse("missing kind= field".to_string()))?;
        let edges = edges.ok_or_else(|| Error::parse("missing edges= field".to_string()))?;
        Self::new(n, kind, &edges)
    }

    /// Packs the edge flags into bytes, most significant bit first, padded to
    /// whole bytes. Matches the layout used by canonical forms and files.
    pub fn to_bytes(&self) -> Vec<u8> {
        bits_to_bytes(self.bits, pair_count(self.n()))
    }
}

pub(crate) fn bits_to_bytes(bits: u32, n_bits: usize) -> Vec<u8> {
    let n_bytes = n_bits.div_ceil(8);
    let mut out = vec![0u8; n_bytes];
    for k in 0..n_bits {
        if bits >> k & 1 == 1 {
            out[k / 8] |= 1 << (7 - k % 8);
        }
    }
    out
}

pub(crate) fn bytes_to_bits(bytes: &[u8], n_bits: usize) -> Result<u32> {
    if bytes.len() != n_bits.div_ceil(8) {
        return Err(Error::parse(format!(
            "expected {} bytes for {} edge flags, got {}",
            n_bits.div_ceil(8),
            n_bits,
            bytes.len()
        )));
    }
    let mut bits = 0u32;
    for k in 0..n_bits {
        if bytes[k / 8] >> (7 - k % 8) & 1 == 1 {
            bits |= 1 << k;
        }
    }
    for k in n_bits..bytes.len() * 8 {
        if bytes[k / 8] >> (7 - k % 8) & 1 == 1 {
            return Err(Error::parse("nonzero padding bits in edge bitset".to_string()));
        }
    }
    Ok(bits)
}

pub(crate) fn check_vertex_count(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::invalid("need at least one vertex".to_string()));
    }
    if n > MAX_VERTICES {
        return Err(Error::ResourceLimit(format!(
            "n={n} exceeds the supported maximum of {MAX_VERTICES} vertices"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_round_trips() {
        for n in 2..=MAX_VERTICES {
            let mut expect = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    assert_eq!(pair_index(n, i, j), expect);
                    assert_eq!(pair_at(n, expect), (i, j));
                    expect += 1;
                }
            }
            assert_eq!(expect, pair_count(n));
        }
    }

    #[test]
    fn edges_respect_lexicographic_order() {
        let g = LabeledGraph::pairwise(4, &[(2, 3), (0, 1), (1, 3)]).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 3), (2, 3)]);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degrees(), vec![1, 2, 1, 2]);
    }

    #[test]
    fn collective_must_be_clique() {
        assert!(LabeledGraph::new(4, GraphKind::Collective, &[(0, 1), (1, 2)]).is_err());
        let ok = LabeledGraph::new(4, GraphKind::Collective, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(ok.charged_set().unwrap(), vec![0, 1, 2]);
        // singleton charge set has no edges and equals the empty layer
        let single = LabeledGraph::collective(4, &[2]).unwrap();
        assert_eq!(single, LabeledGraph::empty(4, GraphKind::Collective).unwrap());
    }

    #[test]
    fn complement_is_involutive_and_pairwise_only() {
        let g = LabeledGraph::pairwise(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let c = g.complement().unwrap();
        assert_eq!(c.edge_count(), pair_count(5) - g.edge_count());
        assert_eq!(c.complement().unwrap(), g);
        let col = LabeledGraph::collective(4, &[0, 1]).unwrap();
        assert!(col.complement().is_err());
    }

    #[test]
    fn text_format_round_trips() {
        let cases = [
            LabeledGraph::pairwise(5, &[(0, 1), (1, 4), (2, 3)]).unwrap(),
            LabeledGraph::empty(3, GraphKind::Pairwise).unwrap(),
            LabeledGraph::collective(4, &[1, 2, 3]).unwrap(),
            LabeledGraph::collective(4, &[]).unwrap(),
        ];
        for g in cases {
            let line = g.to_line();
            assert_eq!(LabeledGraph::from_line(&line).unwrap(), g);
        }
        let p3 = LabeledGraph::from_line("n=3 kind=p edges=0-1,1-2").unwrap();
        assert_eq!(p3.edges(), vec![(0, 1), (1, 2)]);
        assert!(LabeledGraph::from_line("n=3 kind=p edges=0-0").is_err());
        assert!(LabeledGraph::from_line("n=3 edges=").is_err());
    }

    #[test]
    fn byte_packing_is_msb_first() {
        // edges (0,1) and (0,2) of n=5 are pair bits 0 and 1 -> byte 0b1100_0000
        let g = LabeledGraph::pairwise(5, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(g.to_bytes(), vec![0xC0, 0x00]);
        let bits = bytes_to_bits(&[0xC0, 0x00], pair_count(5)).unwrap();
        assert_eq!(bits, g.bits());
        assert!(bytes_to_bits(&[0x00, 0x01], pair_count(5)).is_err());
    }

    #[test]
    fn labeled_counts() {
        assert_eq!(GraphKind::Pairwise.labeled_count(5), 1024);
        assert_eq!(GraphKind::Collective.labeled_count(5), 27);
        assert_eq!(GraphKind::Collective.labeled_count(4), 12);
    }

    #[test]
    fn vertex_count_limits() {
        assert!(LabeledGraph::pairwise(9, &[]).is_err());
        assert!(LabeledGraph::pairwise(0, &[]).is_err());
        assert!(LabeledGraph::pairwise(8, &[(0, 7)]).is_ok());
    }
}
