//! k-uniform hypergraphs and even covers.
//!
//! Hyperedges are kept as strictly increasing vertex lists at the API level.
//! Each edge is also packed into a little-endian `u64` bitset so that
//! intersection sizes against a Kikuchi vertex cost a handful of popcounts.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A k-uniform hypergraph on `n` vertices with a fixed edge order.
///
/// Edge indices are the colors of the Kikuchi edge-coloring and the
/// coordinates of sign vectors, so the order given at construction is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<u32>>,
    words: usize,
    masks: Vec<u64>,
}

/// Wire form: `{"n":int,"k":int,"edges":[[int,...],...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<Vec<u32>>,
}

/// Outcome of loading possibly non-canonical input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    /// True when the input already had sorted edges in lexicographic order.
    pub was_canonical: bool,
    /// `permutation[new_index] = original_index`.
    pub permutation: Vec<usize>,
}

impl Hypergraph {
    /// Builds a hypergraph, sorting the vertices of every edge.
    ///
    /// Rejects odd or zero `k`, out-of-range vertices, repeated vertices
    /// inside an edge and duplicate edges.
    pub fn new(n: usize, k: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 {
            return invalid("n must be positive");
        }
        if k < 2 || !k.is_multiple_of(2) {
            return invalid(format!("k must be even and at least 2, got {k}"));
        }
        if n > u32::MAX as usize {
            return invalid("n does not fit in u32 vertex labels");
        }
        let words = n.div_ceil(64);
        let mut masks = vec![0u64; words * edges.len()];
        let mut seen = HashSet::with_capacity(edges.len());
        let mut sorted_edges = Vec::with_capacity(edges.len());
        for (i, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            if e.len() != k {
                return invalid(format!("edge {i} has {} vertices, expected {k}", e.len()));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return invalid(format!("edge {i} repeats a vertex"));
            }
            if let Some(&v) = e.last() {
                if v as usize >= n {
                    return invalid(format!("edge {i} has vertex {v} >= n = {n}"));
                }
            }
            if !seen.insert(e.clone()) {
                return invalid(format!("edge {i} {e:?} is a duplicate"));
            }
            let row = &mut masks[i * words..(i + 1) * words];
            for &v in &e {
                row[v as usize / 64] |= 1u64 << (v % 64);
            }
            sorted_edges.push(e);
        }
        Ok(Self {
            n,
            k,
            edges: sorted_edges,
            words,
            masks,
        })
    }

    /// Loads the wire form, reordering edges lexicographically.
    pub fn from_json_normalized(raw: HypergraphJson) -> Result<(Self, Normalization)> {
        let HypergraphJson { n, k, edges } = raw;
        let was_sorted_inside = edges.iter().all(|e| e.windows(2).all(|w| w[0] < w[1]));
        let mut sorted: Vec<(Vec<u32>, usize)> = edges
            .into_iter()
            .enumerate()
            .map(|(i, mut e)| {
                e.sort_unstable();
                (e, i)
            })
            .collect();
        let in_order = sorted.windows(2).all(|w| w[0].0 <= w[1].0);
        sorted.sort();
        let permutation: Vec<usize> = sorted.iter().map(|(_, i)| *i).collect();
        let h = Self::new(n, k, sorted.into_iter().map(|(e, _)| e).collect())?;
        Ok((
            h,
            Normalization {
                was_canonical: was_sorted_inside && in_order,
                permutation,
            },
        ))
    }

    pub fn to_json(&self) -> HypergraphJson {
        HypergraphJson {
            n: self.n,
            k: self.k,
            edges: self.edges.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn half_k(&self) -> usize {
        self.k / 2
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &[u32] {
        &self.edges[index]
    }

    /// Edges sorted and in lexicographic order.
    pub fn is_canonical(&self) -> bool {
        self.edges.windows(2).all(|w| w[0] < w[1])
    }

    /// Number of `u64` words in a packed vertex set.
    pub(crate) fn words(&self) -> usize {
        self.words
    }

    pub(crate) fn edge_mask(&self, index: usize) -> &[u64] {
        &self.masks[index * self.words..(index + 1) * self.words]
    }

    pub(crate) fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Packs a sorted vertex list into the bitset layout used for edges.
    pub(crate) fn pack(&self, set: &[u32]) -> Vec<u64> {
        let mut out = vec![0u64; self.words];
        for &v in set {
            out[v as usize / 64] |= 1u64 << (v % 64);
        }
        out
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.m()) {
            return invalid(format!("edge index {bad} out of range (m = {})", self.m()));
        }
        Ok(())
    }
}

/// Unpacks a bitset into a sorted vertex list.
pub(crate) fn unpack(mask: &[u64]) -> Vec<u32> {
    let mut out = Vec::new();
    for (w, &word) in mask.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros();
            out.push((w * 64) as u32 + b);
            bits &= bits - 1;
        }
    }
    out
}

/// `a △ b` for strictly increasing inputs, by a linear merge.
pub fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// True iff `indices` is a nonempty set of edges covering every vertex an
/// even number of times.
pub fn verify_even_cover(h: &Hypergraph, indices: &[usize]) -> Result<bool> {
    h.check_indices(indices)?;
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return invalid("edge indices must be distinct");
    }
    if sorted.is_empty() {
        return Ok(false);
    }
    let mut acc = vec![0u64; h.words()];
    for &i in &sorted {
        for (a, m) in acc.iter_mut().zip(h.edge_mask(i)) {
            *a ^= m;
        }
    }
    Ok(acc.iter().all(|&w| w == 0))
}

/// A nonempty set of edge indices whose symmetric difference is empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvenCover(Vec<usize>);

impl EvenCover {
    /// Sorts `indices` and checks the cover property against `h`.
    pub fn new(h: &Hypergraph, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if !verify_even_cover(h, &indices)? {
            return invalid(format!("{indices:?} is not a nonempty even cover"));
        }
        Ok(Self(indices))
    }

    /// Wraps indices that are already known to be a sorted even cover.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn gadget() -> Hypergraph {
        Hypergraph::new(7, 4, vec![vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]).unwrap()
    }

    #[test]
    fn gadget_is_an_even_cover() {
        let h = gadget();
        assert!(verify_even_cover(&h, &[0, 1, 2]).unwrap());
        assert!(!verify_even_cover(&h, &[0]).unwrap());
        assert!(!verify_even_cover(&h, &[]).unwrap());
        assert!(!verify_even_cover(&h, &[0, 1]).unwrap());
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let h = gadget();
        assert!(verify_even_cover(&h, &[0, 3]).is_err());
        assert!(verify_even_cover(&h, &[1, 1]).is_err());
        assert!(EvenCover::new(&h, vec![0]).is_err());
        assert_eq!(EvenCover::new(&h, vec![2, 0, 1]).unwrap().indices(), &[0, 1, 2]);
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(Hypergraph::new(4, 3, vec![vec![0, 1, 2]]).is_err());
        assert!(Hypergraph::new(4, 4, vec![vec![0, 1, 2, 4]]).is_err());
        assert!(Hypergraph::new(5, 4, vec![vec![0, 1, 1, 2]]).is_err());
        assert!(Hypergraph::new(5, 4, vec![vec![0, 1, 2, 3], vec![3, 2, 1, 0]]).is_err());
        assert!(Hypergraph::new(0, 2, vec![]).is_err());
        let h = Hypergraph::new(5, 2, vec![vec![3, 1]]).unwrap();
        assert_eq!(h.edge(0), &[1, 3]);
    }

    #[test]
    fn wide_vertex_sets_pack_across_words() {
        let h = Hypergraph::new(
            200,
            4,
            vec![vec![0, 63, 64, 199], vec![0, 63, 100, 150], vec![64, 100, 150, 199]],
        )
        .unwrap();
        assert!(verify_even_cover(&h, &[0, 1, 2]).unwrap());
        assert_eq!(unpack(h.edge_mask(0)), vec![0, 63, 64, 199]);
    }

    #[test]
    fn normalization_flags_and_permutes() {
        let raw = HypergraphJson {
            n: 7,
            k: 4,
            edges: vec![vec![3, 4, 5, 6], vec![2, 1, 3, 4], vec![1, 2, 5, 6]],
        };
        let (h, norm) = Hypergraph::from_json_normalized(raw).unwrap();
        assert!(!norm.was_canonical);
        assert!(h.is_canonical());
        assert_eq!(norm.permutation, vec![1, 2, 0]);
        let (_, norm2) = Hypergraph::from_json_normalized(h.to_json()).unwrap();
        assert!(norm2.was_canonical);
    }

    #[test]
    fn symmetric_difference_examples() {
        assert_eq!(symmetric_difference(&[0, 1], &[0, 1]), Vec::<u32>::new());
        assert_eq!(symmetric_difference(&[0, 1], &[2, 3]), vec![0, 1, 2, 3]);
        assert_eq!(symmetric_difference(&[0, 1, 2, 3], &[2, 3, 4, 5]), vec![0, 1, 4, 5]);
    }

    fn sorted_set() -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::btree_set(0u32..40, 0..15).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn symmetric_difference_is_a_group_operation(a in sorted_set(), b in sorted_set(), c in sorted_set()) {
            prop_assert_eq!(symmetric_difference(&a, &b), symmetric_difference(&b, &a));
            prop_assert_eq!(
                symmetric_difference(&symmetric_difference(&a, &b), &c),
                symmetric_difference(&a, &symmetric_difference(&b, &c))
            );
            prop_assert_eq!(symmetric_difference(&a, &[]), a.clone());
            let d = symmetric_difference(&a, &b);
            prop_assert!(d.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
