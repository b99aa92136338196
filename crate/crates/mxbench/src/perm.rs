//! Vertex permutations and automorphism groups.

use crate::error::{Error, Result};
use crate::graph::{check_vertex_count, pair_count, pair_index, LabeledGraph, MAX_VERTICES};

/// A bijection of 0..n; `map[i]` is the image of vertex i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n as u8).collect(),
        }
    }

    pub fn from_map(map: Vec<u8>) -> Result<Self> {
        check_vertex_count(map.len())?;
        let mut seen = [false; MAX_VERTICES];
        for &v in &map {
            if v as usize >= map.len() || seen[v as usize] {
                return Err(Error::invalid(format!("not a bijection: {map:?}")));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { map })
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn image(&self, v: usize) -> usize {
        self.map[v] as usize
    }

    pub fn map(&self) -> &[u8] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Permutation { map: inv }
    }

    /// Composition `self ∘ first`: applies `first`, then `self`.
    pub fn compose(&self, first: &Permutation) -> Permutation {
        debug_assert_eq!(self.n(), first.n());
        Permutation {
            map: first.map.iter().map(|&v| self.map[v as usize]).collect(),
        }
    }

    /// Relabels a graph: edge (i, j) becomes (map[i], map[j]).
    pub fn apply(&self, g: &LabeledGraph) -> LabeledGraph {
        let n = g.n();
        debug_assert_eq!(n, self.n());
        let mut edges = Vec::with_capacity(g.edge_count());
        for (i, j) in g.edges() {
            edges.push((self.image(i), self.image(j)));
        }
        LabeledGraph::new(n, g.kind(), &edges).expect("relabeling preserves validity")
    }

    /// Pair-index remap table: entry k is the pair index of the image of pair k.
    pub(crate) fn pair_map(&self) -> Vec<u8> {
        let n = self.n();
        let mut out = vec![0u8; pair_count(n)];
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (self.image(i), self.image(j));
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                out[pair_index(n, i, j)] = pair_index(n, a, b) as u8;
            }
        }
        out
    }

    /// Nibble-packed key; unique for n <= 8.
    pub(crate) fn packed(&self) -> u32 {
        self.map
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &v)| acc | (v as u32) << (4 * i))
    }

    /// All n! permutations in lexicographic order of their maps.
    pub fn all(n: usize) -> Result<Vec<Permutation>> {
        check_vertex_count(n)?;
        let mut out = Vec::new();
        let mut current = (0..n as u8).collect::<Vec<_>>();
        loop {
            out.push(Permutation {
                map: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1])
            else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
            current.swap(i, j);
            current[i + 1..].reverse();
        }
        Ok(out)
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let word: Vec<String> = self.map.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", word.join(" "))
    }
}

/// The full automorphism group of a graph or layer stack, as a closed
/// element list. Always contains the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismGroup {
    n: usize,
    elements: Vec<Permutation>,
}

impl AutomorphismGroup {
    pub(crate) fn new(n: usize, elements: Vec<Permutation>) -> Self {
        debug_assert!(elements.iter().any(Permutation::is_identity));
        AutomorphismGroup { n, elements }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.iter().any(|e| e == p)
    }
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
