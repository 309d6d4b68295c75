//! Compact edge-index sets used throughout the interdiction algorithms.

use std::fmt;

const WORD_BITS: usize = 64;

/// A set of edge indices over a network with a fixed edge count, stored as a
/// bitset. The word count is derived from the edge universe at construction,
/// so sets from the same network compare and hash consistently.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    words: Vec<u64>,
}

impl EdgeSet {
    /// Empty set over a universe of `edge_count` edges.
    pub fn empty(edge_count: usize) -> Self {
        EdgeSet {
            words: vec![0; edge_count.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_indices(edge_count: usize, indices: &[usize]) -> Self {
        let mut set = EdgeSet::empty(edge_count);
        for &e in indices {
            set.insert(e);
        }
        set
    }

    pub fn insert(&mut self, edge: usize) {
        self.words[edge / WORD_BITS] |= 1u64 << (edge % WORD_BITS);
    }

    pub fn contains(&self, edge: usize) -> bool {
        match self.words.get(edge / WORD_BITS) {
            Some(w) => w & (1u64 << (edge % WORD_BITS)) != 0,
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        debug_assert_eq!(self.words.len(), other.words.len());
        EdgeSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn union_in_place(&mut self, other: &EdgeSet) {
        debug_assert_eq!(self.words.len(), other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &EdgeSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Ascending edge indices.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Lexicographic order on the ascending index sequence; a strict prefix
    /// sorts first. Used for deterministic tie-breaking among optima.
    pub fn lex_cmp(&self, other: &EdgeSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
