//! The level-ℓ Kikuchi graph of a hypergraph, queried implicitly.
//!
//! Vertices are ℓ-subsets of `[n]`; `w1 ~ w2` iff `w1 △ w2` is a hyperedge,
//! and that hyperedge's index is the color of the edge. A hyperedge `e` is
//! incident to `w` exactly when `|e ∩ w| = k/2`, and distinct incident edges
//! give distinct neighbors, so degree and neighbor queries are a single scan
//! over the hyperedges.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combin::{big_to_f64, binomial, ln_big};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{unpack, Hypergraph};

/// Largest vertex count [`materialize`] will build.
pub const MATERIALIZE_MAX_VERTICES: u64 = 100_000;

/// A strictly increasing ℓ-subset of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KikuchiVertex(Vec<u32>);

impl KikuchiVertex {
    pub fn new(mut set: Vec<u32>, n: usize, ell: usize) -> Result<Self> {
        set.sort_unstable();
        if set.len() != ell {
            return invalid(format!("vertex has {} elements, expected {ell}", set.len()));
        }
        if set.windows(2).any(|w| w[0] == w[1]) {
            return invalid("vertex repeats an element");
        }
        if set.last().is_some_and(|&v| v as usize >= n) {
            return invalid(format!("vertex element out of range for n = {n}"));
        }
        Ok(Self(set))
    }

    pub(crate) fn from_sorted_unchecked(set: Vec<u32>) -> Self {
        Self(set)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Size parameters of `K_ℓ(H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KikuchiParams {
    pub ell: usize,
    /// `C(n, ℓ)`.
    pub vertex_count: BigUint,
    /// `C(n−k, ℓ−k/2) / C(n, ℓ) · C(k, k/2) · m`, exactly.
    pub average_degree: BigRational,
    /// `C(k, k/2) · m / n^{k/2}`.
    pub density: f64,
    /// `ℓ^{k/2} · density`, the large-n estimate of the average degree.
    pub asymptotic_degree: f64,
}

impl KikuchiParams {
    pub fn average_degree_f64(&self) -> f64 {
        self.average_degree.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn ln_vertex_count(&self) -> f64 {
        ln_big(&self.vertex_count)
    }

    pub fn vertex_count_f64(&self) -> f64 {
        big_to_f64(&self.vertex_count)
    }

    /// `N^x`, computed as `exp(x · ln N)` from the exact `N`.
    pub fn vertex_count_pow(&self, x: f64) -> f64 {
        (x * self.ln_vertex_count()).exp()
    }
}

fn check_level(n: usize, k: usize, ell: usize) -> Result<()> {
    let half = k / 2;
    if ell < half || ell + half > n {
        return invalid(format!(
            "level ell = {ell} outside [k/2, n − k/2] = [{half}, {}]",
            n.saturating_sub(half)
        ));
    }
    Ok(())
}

pub fn compute_params(h: &Hypergraph, ell: usize) -> Result<KikuchiParams> {
    params_for(h.n(), h.k(), h.m(), ell)
}

/// Kikuchi parameters from the sizes alone; they do not depend on which
/// hyperedges are present.
pub fn params_for(n: usize, k: usize, m: usize, ell: usize) -> Result<KikuchiParams> {
    if k == 0 || k % 2 == 1 {
        return invalid(format!("k = {k} must be positive and even"));
    }
    check_level(n, k, ell)?;
    let (n, k, m) = (n as u64, k as u64, m as u64);
    let half = k / 2;
    let vertex_count = binomial(n, ell as u64);
    let central = binomial(k, half);
    let numer = binomial(n - k, ell as u64 - half) * &central * m;
    let average_degree = BigRational::new(BigInt::from(numer), BigInt::from(vertex_count.clone()));
    let density = big_to_f64(&central) * m as f64 / (n as f64).powi(half as i32);
    Ok(KikuchiParams {
        ell,
        vertex_count,
        average_degree,
        density,
        asymptotic_degree: (ell as f64).powi(half as i32) * density,
    })
}

/// Implicit view of `K_ℓ(H)`.
#[derive(Debug, Clone, Copy)]
pub struct KikuchiGraph<'a> {
    h: &'a Hypergraph,
    ell: usize,
}

impl<'a> KikuchiGraph<'a> {
    pub fn new(h: &'a Hypergraph, ell: usize) -> Result<Self> {
        check_level(h.n(), h.k(), ell)?;
        Ok(Self { h, ell })
    }

    pub fn hypergraph(&self) -> &'a Hypergraph {
        self.h
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn params(&self) -> KikuchiParams {
        compute_params(self.h, self.ell).expect("level checked at construction")
    }

    pub fn vertex(&self, set: Vec<u32>) -> Result<KikuchiVertex> {
        KikuchiVertex::new(set, self.h.n(), self.ell)
    }

    /// Collects into `out` the indices of hyperedges meeting `mask` in
    /// exactly k/2 vertices.
    pub(crate) fn incident_edges(&self, mask: &[u64], out: &mut Vec<usize>) {
        out.clear();
        let half = self.h.half_k() as u32;
        let words = self.h.words();
        if words == 1 {
            let w = mask[0];
            for (i, &e) in self.h.masks().iter().enumerate() {
                if (e & w).count_ones() == half {
                    out.push(i);
                }
            }
        } else {
            for (i, e) in self.h.masks().chunks_exact(words).enumerate() {
                let c: u32 = e.iter().zip(mask).map(|(a, b)| (a & b).count_ones()).sum();
                if c == half {
                    out.push(i);
                }
            }
        }
    }

    pub fn degree(&self, w: &KikuchiVertex) -> usize {
        let mut buf = Vec::new();
        self.incident_edges(&self.h.pack(w.as_slice()), &mut buf);
        buf.len()
    }

    /// All `(w △ e, e)` pairs, in edge order.
    pub fn neighbors(&self, w: &KikuchiVertex) -> Vec<(KikuchiVertex, usize)> {
        let mask = self.h.pack(w.as_slice());
        let mut buf = Vec::new();
        self.incident_edges(&mask, &mut buf);
        buf.into_iter().map(|e| (self.step_to(&mask, e), e)).collect()
    }

    pub(crate) fn step_to(&self, mask: &[u64], color: usize) -> KikuchiVertex {
        let next: Vec<u64> = mask.iter().zip(self.h.edge_mask(color)).map(|(a, b)| a ^ b).collect();
        KikuchiVertex::from_sorted_unchecked(unpack(&next))
    }

    /// Uniform random neighbor together with its color.
    pub fn sample_neighbor<R: Rng + ?Sized>(&self, w: &KikuchiVertex, rng: &mut R) -> Result<(KikuchiVertex, usize)> {
        let mask = self.h.pack(w.as_slice());
        let mut buf = Vec::new();
        self.incident_edges(&mask, &mut buf);
        if buf.is_empty() {
            return Err(Error::NoNeighbor(w.as_slice().to_vec()));
        }
        let color = buf[rng.gen_range(0..buf.len())];
        Ok((self.step_to(&mask, color), color))
    }

    /// Draws a vertex with probability proportional to its degree.
    ///
    /// Picks a uniform hyperedge `e`, a uniform half `e' ⊂ e`, and a uniform
    /// `(ℓ − k/2)`-subset `f` of `[n] ∖ e`, returning `e' ∪ f`. Each `w` is
    /// produced once per incident hyperedge, all with equal weight.
    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<KikuchiVertex> {
        let m = self.h.m();
        if m == 0 {
            return Err(Error::NoEdges);
        }
        let (n, k, half) = (self.h.n(), self.h.k(), self.h.half_k());
        let e = self.h.edge(rng.gen_range(0..m));
        let mut out: Vec<u32> = index::sample(rng, k, half).into_iter().map(|i| e[i]).collect();
        let rest = self.ell - half;
        if rest > 0 {
            let outside: Vec<u32> = (0..n as u32).filter(|v| e.binary_search(v).is_err()).collect();
            out.extend(index::sample(rng, outside.len(), rest).into_iter().map(|i| outside[i]));
        }
        out.sort_unstable();
        Ok(KikuchiVertex::from_sorted_unchecked(out))
    }
}

/// Explicit edge-colored Kikuchi graph for small instances.
///
/// Built with ordered-set arithmetic rather than the packed scan used by
/// [`KikuchiGraph`], so the two can be checked against each other.
#[derive(Debug, Clone)]
pub struct MaterializedKikuchi {
    pub ell: usize,
    /// All ℓ-subsets in lexicographic order.
    pub vertices: Vec<Vec<u32>>,
    /// `adjacency[v]` lists `(neighbor index, color)` in color order.
    pub adjacency: Vec<Vec<(usize, usize)>>,
}

impl MaterializedKikuchi {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn index_of(&self, set: &[u32]) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_slice().cmp(set)).ok()
    }

    /// `2|E| / N` as an exact rational.
    pub fn average_degree(&self) -> BigRational {
        if self.vertices.is_empty() {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(2 * self.edge_count()), BigInt::from(self.vertices.len()))
    }

    /// Graphviz rendering with edges labelled by color.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph kikuchi {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  {i} [label=\"{v:?}\"];");
        }
        for (i, adj) in self.adjacency.iter().enumerate() {
            for &(j, c) in adj {
                if i < j {
                    let _ = writeln!(out, "  {i} -- {j} [label=\"{c}\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn subsets(n: u32, ell: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(ell);
    fn rec(start: u32, n: u32, ell: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == ell {
            out.push(cur.clone());
            return;
        }
        let need = (ell - cur.len()) as u32;
        for v in start..=n.saturating_sub(need) {
            if v + need > n {
                break;
            }
            cur.push(v);
            rec(v + 1, n, ell, cur, out);
            cur.pop();
        }
    }
    rec(0, n, ell, &mut cur, &mut out);
    out
}

/// Builds `K_ℓ(H)` explicitly; capacity error above [`MATERIALIZE_MAX_VERTICES`].
pub fn materialize(h: &Hypergraph, ell: usize) -> Result<MaterializedKikuchi> {
    check_level(h.n(), h.k(), ell)?;
    let count = binomial(h.n() as u64, ell as u64);
    if count > BigUint::from(MATERIALIZE_MAX_VERTICES) {
        return Err(Error::Capacity(format!(
            "C({}, {ell}) = {count} exceeds {MATERIALIZE_MAX_VERTICES} vertices",
            h.n()
        )));
    }
    let vertices = subsets(h.n() as u32, ell);
    let lookup: HashMap<&[u32], usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    let edge_sets: Vec<BTreeSet<u32>> = h.edges().iter().map(|e| e.iter().copied().collect()).collect();
    let adjacency = vertices
        .iter()
        .map(|v| {
            let vs: BTreeSet<u32> = v.iter().copied().collect();
            edge_sets
                .iter()
                .enumerate()
                .filter_map(|(c, e)| {
                    let diff: Vec<u32> = vs.symmetric_difference(e).copied().collect();
                    (diff.len() == ell).then(|| (lookup[diff.as_slice()], c))
                })
                .collect()
        })
        .collect();
    Ok(MaterializedKikuchi {
        ell,
        vertices,
        adjacency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_edge() -> Hypergraph {
        Hypergraph::new(5, 4, vec![vec![0, 1, 2, 3]]).unwrap()
    }

    fn five_edges() -> Hypergraph {
        Hypergraph::new(
            6,
            4,
            vec![
                vec![0, 1, 2, 3],
                vec![0, 1, 4, 5],
                vec![2, 3, 4, 5],
                vec![0, 2, 4, 5],
                vec![1, 2, 3, 5],
            ],
        )
        .unwrap()
    }

    #[test]
    fn degree_examples() {
        let h = single_edge();
        let g = KikuchiGraph::new(&h, 2).unwrap();
        assert_eq!(g.degree(&g.vertex(vec![0, 1]).unwrap()), 1);
        assert_eq!(g.neighbors(&g.vertex(vec![0, 1]).unwrap())[0].0.as_slice(), &[2, 3]);
        assert_eq!(g.degree(&g.vertex(vec![0, 4]).unwrap()), 0);
        let h = Hypergraph::new(10, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let g = KikuchiGraph::new(&h, 2).unwrap();
        assert_eq!(g.degree(&g.vertex(vec![7, 8]).unwrap()), 0);
    }

    #[test]
    fn isolated_vertex_has_no_neighbor() {
        let h = single_edge();
        let g = KikuchiGraph::new(&h, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = g.vertex(vec![0, 4]).unwrap();
        assert!(matches!(g.sample_neighbor(&w, &mut rng), Err(Error::NoNeighbor(_))));
    }

    #[test]
    fn params_examples() {
        let h = five_edges();
        let p = compute_params(&h, 2).unwrap();
        assert_eq!(p.vertex_count, BigUint::from(15u32));
        assert_eq!(p.average_degree, BigRational::from_integer(2.into()));
        let mat = materialize(&h, 2).unwrap();
        assert_eq!(mat.average_degree(), p.average_degree);

        let empty = Hypergraph::new(6, 4, vec![]).unwrap();
        assert!(compute_params(&empty, 3).unwrap().average_degree.is_zero());
        assert!(compute_params(&h, 1).is_err());
        assert!(compute_params(&h, 5).is_err());
    }

    #[test]
    fn single_edge_materialization() {
        let mat = materialize(&single_edge(), 2).unwrap();
        assert_eq!(mat.vertex_count(), 10);
        assert_eq!(mat.edge_count(), 3);
        let pairs: Vec<(Vec<u32>, Vec<u32>)> = mat
            .adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().filter(move |&&(j, _)| i < j).map(move |&(j, _)| (i, j)))
            .map(|(i, j)| (mat.vertices[i].clone(), mat.vertices[j].clone()))
            .collect();
        assert_eq!(
            pairs,
            vec![
                (vec![0, 1], vec![2, 3]),
                (vec![0, 2], vec![1, 3]),
                (vec![0, 3], vec![1, 2])
            ]
        );
        assert!(mat.to_dot().contains("--"));
    }

    #[test]
    fn materialize_has_a_capacity_guard() {
        let h = Hypergraph::new(40, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert!(matches!(materialize(&h, 10), Err(Error::Capacity(_))));
    }

    #[test]
    fn implicit_matches_materialized() {
        let h = five_edges();
        for ell in 2..=4 {
            let g = KikuchiGraph::new(&h, ell).unwrap();
            let mat = materialize(&h, ell).unwrap();
            let total: usize = (0..mat.vertex_count()).map(|v| mat.degree(v)).sum();
            assert_eq!(total, 2 * mat.edge_count());
            for (i, set) in mat.vertices.iter().enumerate() {
                let w = g.vertex(set.clone()).unwrap();
                let nbrs: Vec<(usize, usize)> = g
                    .neighbors(&w)
                    .into_iter()
                    .map(|(u, c)| (mat.index_of(u.as_slice()).unwrap(), c))
                    .collect();
                assert_eq!(nbrs, mat.adjacency[i]);
                // Coloring: distinct colors at every vertex.
                let colors: BTreeSet<usize> = nbrs.iter().map(|&(_, c)| c).collect();
                assert_eq!(colors.len(), nbrs.len());
            }
            assert_eq!(mat.average_degree(), g.params().average_degree);
        }
    }

    #[test]
    fn neighbor_sampling_postcondition() {
        let h = five_edges();
        let g = KikuchiGraph::new(&h, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let w = g.sample_stationary(&mut rng).unwrap();
            assert_eq!(w.len(), 3);
            assert!(g.degree(&w) >= 1);
            let (u, c) = g.sample_neighbor(&w, &mut rng).unwrap();
            assert_eq!(
                u.as_slice(),
                crate::hypergraph::symmetric_difference(w.as_slice(), h.edge(c))
            );
        }
    }

    #[test]
    fn stationary_at_minimum_level_is_half_an_edge() {
        let h = five_edges();
        let g = KikuchiGraph::new(&h, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let w = g.sample_stationary(&mut rng).unwrap();
            assert!(h.edges().iter().any(|e| w.as_slice().iter().all(|v| e.contains(v))));
        }
        let empty = Hypergraph::new(6, 4, vec![]).unwrap();
        let g = KikuchiGraph::new(&empty, 2).unwrap();
        assert!(matches!(g.sample_stationary(&mut rng), Err(Error::NoEdges)));
    }
}
