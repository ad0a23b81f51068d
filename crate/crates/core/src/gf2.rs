//! GF(2) linear algebra over the vertex-edge incidence matrix.
//!
//! An even cover is exactly a nonzero vector in the right nullspace of the
//! n×m incidence matrix. These routines serve as exact oracles for the
//! walk-based cover search.

use crate::error::{Error, Result};
use crate::hypergraph::{EvenCover, Hypergraph};

/// Largest edge count accepted by [`enumerate_even_covers`].
pub const ENUMERATION_MAX_EDGES: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn unit(len: usize, i: usize) -> Self {
        let mut b = Self::zeros(len);
        b.0[i / 64] |= 1 << (i % 64);
        b
    }

    fn xor(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.0.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(i * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }
}

/// Basis of the right nullspace of the incidence matrix, one edge-index set
/// per basis vector.
///
/// Columns are reduced in edge order against pivots keyed by their lowest
/// set row, so the basis is reproducible. Each basis vector contains the
/// index of the column that produced it as its largest element.
pub fn nullspace_basis(h: &Hypergraph) -> Vec<Vec<usize>> {
    let m = h.m();
    let mut pivots: Vec<Option<(Bits, Bits)>> = vec![None; h.n()];
    let mut basis = Vec::new();
    for j in 0..m {
        let mut col = Bits(h.edge_mask(j).to_vec());
        let mut tag = Bits::unit(m, j);
        loop {
            match col.lowest() {
                None => {
                    basis.push(tag.ones());
                    break;
                }
                Some(r) => match &pivots[r] {
                    Some((pc, pt)) => {
                        col.xor(pc);
                        tag.xor(pt);
                    }
                    None => {
                        pivots[r] = Some((col, tag));
                        break;
                    }
                },
            }
        }
    }
    basis
}

/// Row-echelon span of edge-index sets, used for membership queries.
#[derive(Debug, Clone)]
pub struct Gf2Span {
    m: usize,
    rows: Vec<Option<Bits>>,
}

impl Gf2Span {
    pub fn new(m: usize) -> Self {
        Self { m, rows: vec![None; m] }
    }

    /// Span of the incidence matrix's nullspace.
    pub fn of_nullspace(h: &Hypergraph) -> Self {
        let mut span = Self::new(h.m());
        for v in nullspace_basis(h) {
            span.insert(&v);
        }
        span
    }

    fn reduce(&self, set: &[usize]) -> Bits {
        let mut v = Bits::zeros(self.m);
        for &i in set {
            v.0[i / 64] ^= 1 << (i % 64);
        }
        while let Some(p) = v.lowest() {
            match &self.rows[p] {
                Some(row) => v.xor(row),
                None => break,
            }
        }
        v
    }

    /// Adds a vector; returns false if it was already in the span.
    pub fn insert(&mut self, set: &[usize]) -> bool {
        let v = self.reduce(set);
        match v.lowest() {
            None => false,
            Some(p) => {
                self.rows[p] = Some(v);
                true
            }
        }
    }

    pub fn contains(&self, set: &[usize]) -> bool {
        self.reduce(set).lowest().is_none()
    }

    pub fn dimension(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }
}

/// All nonempty even covers with at most `max_size` edges, by exhaustive
/// subset enumeration. Sorted lexicographically by edge indices.
pub fn enumerate_even_covers(h: &Hypergraph, max_size: usize) -> Result<Vec<EvenCover>> {
    if h.m() > ENUMERATION_MAX_EDGES {
        return Err(Error::Capacity(format!(
            "enumeration is limited to {ENUMERATION_MAX_EDGES} edges, got {}",
            h.m()
        )));
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut acc = vec![0u64; h.words()];
    extend(h, 0, max_size.min(h.m()), &mut chosen, &mut acc, &mut out);
    out.sort();
    Ok(out)
}

fn extend(
    h: &Hypergraph,
    next: usize,
    budget: usize,
    chosen: &mut Vec<usize>,
    acc: &mut [u64],
    out: &mut Vec<EvenCover>,
) {
    if !chosen.is_empty() && acc.iter().all(|&w| w == 0) {
        out.push(EvenCover::from_sorted_unchecked(chosen.clone()));
    }
    if chosen.len() == budget {
        return;
    }
    for j in next..h.m() {
        let mask = h.edge_mask(j);
        acc.iter_mut().zip(mask).for_each(|(a, b)| *a ^= b);
        chosen.push(j);
        extend(h, j + 1, budget, chosen, acc, out);
        chosen.pop();
        acc.iter_mut().zip(mask).for_each(|(a, b)| *a ^= b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::verify_even_cover;
    use proptest::prelude::*;

    fn gadget() -> Hypergraph {
        Hypergraph::new(7, 4, vec![vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]).unwrap()
    }

    fn two_gadgets() -> Hypergraph {
        Hypergraph::new(
            14,
            4,
            vec![
                vec![1, 2, 3, 4],
                vec![1, 2, 5, 6],
                vec![3, 4, 5, 6],
                vec![8, 9, 10, 11],
                vec![8, 9, 12, 13],
                vec![10, 11, 12, 13],
            ],
        )
        .unwrap()
    }

    #[test]
    fn gadget_nullspace() {
        assert_eq!(nullspace_basis(&gadget()), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn single_edge_has_trivial_nullspace() {
        let h = Hypergraph::new(4, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert!(nullspace_basis(&h).is_empty());
        let h = Hypergraph::new(8, 4, vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5], vec![2, 3, 6, 7]]).unwrap();
        assert!(nullspace_basis(&h).is_empty());
    }

    #[test]
    fn enumeration_examples() {
        let covers = enumerate_even_covers(&gadget(), 3).unwrap();
        assert_eq!(covers.len(), 1);
        assert_eq!(covers[0].indices(), &[0, 1, 2]);
        assert!(enumerate_even_covers(&gadget(), 1).unwrap().is_empty());
        let covers: Vec<Vec<usize>> = enumerate_even_covers(&two_gadgets(), 6)
            .unwrap()
            .into_iter()
            .map(EvenCover::into_inner)
            .collect();
        assert_eq!(covers, vec![vec![0, 1, 2], vec![0, 1, 2, 3, 4, 5], vec![3, 4, 5]]);
    }

    #[test]
    fn enumeration_has_a_capacity_guard() {
        let edges: Vec<Vec<u32>> = (0..26u32).map(|i| vec![i, i + 1]).collect();
        let h = Hypergraph::new(30, 2, edges).unwrap();
        assert!(matches!(enumerate_even_covers(&h, 2), Err(Error::Capacity(_))));
    }

    #[test]
    fn span_membership() {
        let span = Gf2Span::of_nullspace(&two_gadgets());
        assert_eq!(span.dimension(), 2);
        assert!(span.contains(&[0, 1, 2, 3, 4, 5]));
        assert!(span.contains(&[]));
        assert!(!span.contains(&[0, 1]));
    }

    fn small_hypergraph() -> impl Strategy<Value = Hypergraph> {
        (4u32..8).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 1..=12).prop_map(move |pairs| {
                let edges: std::collections::BTreeSet<Vec<u32>> = pairs
                    .into_iter()
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| vec![a.min(b), a.max(b)])
                    .collect();
                Hypergraph::new(n as usize, 2, edges.into_iter().collect()).unwrap()
            })
        })
    }

    proptest! {
        // Exhaustive over all 2^m subsets: even covers are exactly the
        // nonzero members of the nullspace span.
        #[test]
        fn covers_are_exactly_the_nullspace(h in small_hypergraph()) {
            let span = Gf2Span::of_nullspace(&h);
            for v in nullspace_basis(&h) {
                prop_assert!(verify_even_cover(&h, &v).unwrap());
            }
            let m = h.m();
            let mut count = 0usize;
            for mask in 1u32..(1u32 << m) {
                let set: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                let is_cover = verify_even_cover(&h, &set).unwrap();
                prop_assert_eq!(is_cover, span.contains(&set));
                count += is_cover as usize;
            }
            prop_assert_eq!(count + 1, 1usize << span.dimension());
            prop_assert_eq!(enumerate_even_covers(&h, m).unwrap().len(), count);
        }
    }
}
