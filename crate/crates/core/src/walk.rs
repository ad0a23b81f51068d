//! Birthday-collision search for closed walks in the Kikuchi graph, and
//! harvesting of many distinct even covers from their odd colors.
//!
//! A closed walk whose colors occur with odd multiplicity on a nonempty set
//! yields a nonempty even cover: every step toggles the vertices of its color,
//! and the walk returns to where it started.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{symmetric_difference, unpack, EvenCover, Hypergraph};
use crate::kikuchi::{KikuchiGraph, KikuchiParams, KikuchiVertex};
use crate::params::Profile;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStep {
    pub color: usize,
    pub to: KikuchiVertex,
}

/// A walk annotated with the hyperedge color of every step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredWalk {
    pub start: KikuchiVertex,
    pub steps: Vec<WalkStep>,
}

impl ColoredWalk {
    pub fn trivial(start: KikuchiVertex) -> Self {
        Self {
            start,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> &KikuchiVertex {
        self.steps.last().map_or(&self.start, |s| &s.to)
    }

    pub fn is_closed(&self) -> bool {
        self.end() == &self.start
    }

    /// `w_0, …, w_T`.
    pub fn vertices(&self) -> impl Iterator<Item = &KikuchiVertex> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.to))
    }

    pub fn colors(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.color)
    }

    /// Checks `to = previous △ edges[color]` for every step.
    pub fn is_consistent_with(&self, h: &Hypergraph) -> bool {
        let mut prev = &self.start;
        for s in &self.steps {
            if s.color >= h.m() || symmetric_difference(prev.as_slice(), h.edge(s.color)) != s.to.as_slice() {
                return false;
            }
            prev = &s.to;
        }
        true
    }

    /// The walk traversed backwards, keeping each step's color.
    pub fn reversed(&self) -> Self {
        let verts: Vec<&KikuchiVertex> = self.vertices().collect();
        let steps = (0..self.steps.len())
            .rev()
            .map(|t| WalkStep {
                color: self.steps[t].color,
                to: verts[t].clone(),
            })
            .collect();
        Self {
            start: self.end().clone(),
            steps,
        }
    }

    /// `self` followed by `other` reversed; both must share start and end.
    pub fn join_reversed(&self, other: &ColoredWalk) -> Result<Self> {
        if self.start != other.start || self.end() != other.end() {
            return invalid("walks must share both endpoints");
        }
        let mut steps = self.steps.clone();
        steps.extend(other.reversed().steps);
        Ok(Self {
            start: self.start.clone(),
            steps,
        })
    }
}

/// A sampled walk with the degree of every vertex it left from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWalk {
    pub walk: ColoredWalk,
    /// `deg(w_i)` for `0 ≤ i < T` (shorter if the walk aborted).
    pub degrees: Vec<usize>,
    pub aborted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub bad_count: usize,
    pub is_good: bool,
}

/// Counts β-bad vertices among `w_0..w_{T−1}`; good iff at most `1.1·β·T`.
///
/// Aborted walks are never good.
pub fn assess_goodness(walk: &SampledWalk, beta: f64, average_degree: f64) -> GoodnessReport {
    let cutoff = beta * average_degree;
    let bad_count = walk.degrees.iter().filter(|&&d| (d as f64) < cutoff).count();
    let allowed = 1.1 * beta * walk.walk.len() as f64;
    GoodnessReport {
        bad_count,
        is_good: !walk.aborted && bad_count as f64 <= allowed * (1.0 + 1e-12),
    }
}

fn sample_walk<R: Rng + ?Sized>(
    g: &KikuchiGraph<'_>,
    start: &KikuchiVertex,
    len: usize,
    rng: &mut R,
    buf: &mut Vec<usize>,
) -> SampledWalk {
    let h = g.hypergraph();
    let mut mask = h.pack(start.as_slice());
    let mut steps = Vec::with_capacity(len);
    let mut degrees = Vec::with_capacity(len);
    let mut aborted = false;
    for _ in 0..len {
        g.incident_edges(&mask, buf);
        degrees.push(buf.len());
        if buf.is_empty() {
            aborted = true;
            break;
        }
        let color = buf[rng.gen_range(0..buf.len())];
        mask.iter_mut().zip(h.edge_mask(color)).for_each(|(a, b)| *a ^= b);
        steps.push(WalkStep {
            color,
            to: KikuchiVertex::from_sorted_unchecked(unpack(&mask)),
        });
    }
    SampledWalk {
        walk: ColoredWalk {
            start: start.clone(),
            steps,
        },
        degrees,
        aborted,
    }
}

/// Random walk of exactly `len` steps from `start`.
pub fn run_walk<R: Rng + ?Sized>(
    g: &KikuchiGraph<'_>,
    start: &KikuchiVertex,
    len: usize,
    rng: &mut R,
) -> Result<SampledWalk> {
    let sampled = sample_walk(g, start, len, rng, &mut Vec::new());
    if sampled.aborted {
        let step = sampled.walk.len();
        return Err(Error::WalkAborted {
            step,
            vertex: sampled.walk.end().as_slice().to_vec(),
        });
    }
    Ok(sampled)
}

/// Odd-multiplicity colors of a closed walk, sorted.
pub fn odd_colors(walk: &ColoredWalk) -> Result<Vec<usize>> {
    if !walk.is_closed() {
        return invalid("odd colors are defined for closed walks only");
    }
    let mut colors: Vec<usize> = walk.colors().collect();
    colors.sort_unstable();
    let mut out = Vec::new();
    for run in colors.chunk_by(|a, b| a == b) {
        if run.len() % 2 == 1 {
            out.push(run[0]);
        }
    }
    Ok(out)
}

/// Tunables for the closed-walk search and cover harvest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSearchConfig {
    /// Length `T` of each half-walk.
    pub walk_len: usize,
    /// Walks `L` drawn per collision attempt.
    pub walks_per_attempt: u64,
    pub beta: f64,
    /// Harvest iterations `R`.
    pub max_iterations: u64,
    pub target_covers: usize,
    pub profile: Profile,
}

/// Default walk-count constant `C₁` in `L = ⌈C₁·√N⌉`.
pub const PAPER_WALK_CONSTANT: f64 = 200.0;
pub const DEFAULT_BETA: f64 = 0.05;
/// Walk batches larger than this are refused.
pub const MAX_WALKS_PER_ATTEMPT: u64 = 100_000_000;

impl WalkSearchConfig {
    /// Paper-profile constants: `L = ⌈200√N⌉`, `R = 100000·N^ε + 100000·log₂(1/δ)`,
    /// target `⌈10·N^ε⌉`.
    pub fn paper(params: &KikuchiParams, walk_len: usize, epsilon: f64, delta: f64) -> Self {
        let n_eps = params.vertex_count_pow(epsilon);
        let r = 100_000.0 * n_eps + 100_000.0 * (1.0 / delta).log2();
        Self {
            walk_len,
            walks_per_attempt: walks_for_constant(params, PAPER_WALK_CONSTANT),
            beta: DEFAULT_BETA,
            max_iterations: saturating_ceil(r),
            target_covers: saturating_ceil(10.0 * n_eps) as usize,
            profile: Profile::Paper,
        }
    }

    /// Desk profile: every constant supplied by the caller.
    pub fn desk(walk_len: usize, walks_per_attempt: u64, max_iterations: u64, target_covers: usize) -> Self {
        Self {
            walk_len,
            walks_per_attempt,
            beta: DEFAULT_BETA,
            max_iterations,
            target_covers,
            profile: Profile::Desk,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.walks_per_attempt < 2 {
            return invalid("need at least two walks per attempt");
        }
        if self.walks_per_attempt > MAX_WALKS_PER_ATTEMPT {
            return Err(Error::Capacity(format!(
                "{} walks per attempt exceeds {MAX_WALKS_PER_ATTEMPT}",
                self.walks_per_attempt
            )));
        }
        if self.walk_len < 1 {
            return invalid("walk length must be at least 1");
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return invalid(format!("beta = {} outside (0, 1]", self.beta));
        }
        Ok(())
    }
}

/// `⌈c·√N⌉`.
pub fn walks_for_constant(params: &KikuchiParams, c: f64) -> u64 {
    saturating_ceil(c * (0.5 * params.ln_vertex_count()).exp())
}

pub(crate) fn saturating_ceil(x: f64) -> u64 {
    if x.is_nan() || x <= 0.0 {
        0
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClosedWalkOutcome {
    /// `(W_i, W_j^rev)` of length `2T` for the lexicographically first
    /// colliding pair of good walks.
    Found {
        walk: ColoredWalk,
        pair: (u64, u64),
        good_walks: u64,
    },
    Fail {
        good_walks: u64,
    },
}

struct Endpoint {
    end: KikuchiVertex,
    good: bool,
}

/// Draws `L` independent length-`T` walks from `start` and looks for two good
/// ones ending at the same vertex.
///
/// Walk `i` uses sub-stream `i` of `stream`, so the result does not depend
/// on how the batch is scheduled.
pub fn find_good_closed_walk(
    g: &KikuchiGraph<'_>,
    start: &KikuchiVertex,
    cfg: &WalkSearchConfig,
    average_degree: f64,
    stream: &RngStream,
) -> Result<ClosedWalkOutcome> {
    cfg.validate()?;
    let walk = |i: u64, buf: &mut Vec<usize>| sample_walk(g, start, cfg.walk_len, &mut stream.derive(i).rng(), buf);
    let endpoints: Vec<Endpoint> = (0..cfg.walks_per_attempt)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let w = walk(i, buf);
            let good = assess_goodness(&w, cfg.beta, average_degree).is_good;
            Endpoint {
                end: w.walk.end().clone(),
                good,
            }
        })
        .collect();

    // Endpoint -> (first good index, second good index).
    let mut seen: BTreeMap<&KikuchiVertex, (u64, Option<u64>)> = BTreeMap::new();
    let mut good_walks = 0;
    for (i, ep) in endpoints.iter().enumerate().filter(|(_, ep)| ep.good) {
        good_walks += 1;
        seen.entry(&ep.end)
            .and_modify(|slot| {
                slot.1.get_or_insert(i as u64);
            })
            .or_insert((i as u64, None));
    }
    let pair = seen.values().filter_map(|&(i, j)| j.map(|j| (i, j))).min();
    let Some((i, j)) = pair else {
        return Ok(ClosedWalkOutcome::Fail { good_walks });
    };
    let mut buf = Vec::new();
    let first = walk(i, &mut buf).walk;
    let second = walk(j, &mut buf).walk;
    Ok(ClosedWalkOutcome::Found {
        walk: first.join_reversed(&second)?,
        pair: (i, j),
        good_walks,
    })
}

/// Distinct even covers found by repeated closed-walk searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Harvest {
    /// In discovery order.
    pub covers: Vec<EvenCover>,
    pub iterations: u64,
    pub closed_walks: u64,
    pub trivial_walks: u64,
    pub duplicate_covers: u64,
    pub walk_len: usize,
}

impl Harvest {
    pub fn success_rate(&self) -> f64 {
        if self.iterations == 0 {
            0.0
        } else {
            self.closed_walks as f64 / self.iterations as f64
        }
    }
}

pub fn harvest_distinct_covers(g: &KikuchiGraph<'_>, cfg: &WalkSearchConfig, stream: &RngStream) -> Result<Harvest> {
    harvest_distinct_covers_with(g, cfg, stream, &mut |_| {})
}

/// As [`harvest_distinct_covers`], calling `progress` after every iteration.
pub fn harvest_distinct_covers_with(
    g: &KikuchiGraph<'_>,
    cfg: &WalkSearchConfig,
    stream: &RngStream,
    progress: &mut dyn FnMut(&Harvest),
) -> Result<Harvest> {
    cfg.validate()?;
    let average_degree = g.params().average_degree_f64();
    let mut known: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Harvest {
        covers: Vec::new(),
        iterations: 0,
        closed_walks: 0,
        trivial_walks: 0,
        duplicate_covers: 0,
        walk_len: cfg.walk_len,
    };
    while out.covers.len() < cfg.target_covers && out.iterations < cfg.max_iterations {
        let it = stream.derive(out.iterations);
        out.iterations += 1;
        let start = g.sample_stationary(&mut it.derive_named("start").rng())?;
        let outcome = find_good_closed_walk(g, &start, cfg, average_degree, &it.derive_named("walks"))?;
        if let ClosedWalkOutcome::Found { walk, .. } = outcome {
            out.closed_walks += 1;
            let odd = odd_colors(&walk)?;
            if odd.is_empty() {
                out.trivial_walks += 1;
            } else if known.insert(odd.clone()) {
                out.covers.push(EvenCover::from_sorted_unchecked(odd));
            } else {
                out.duplicate_covers += 1;
            }
        }
        progress(&out);
    }
    if out.covers.len() < cfg.target_covers {
        return Err(Error::InsufficientCovers {
            found: out.covers.len(),
            target: cfg.target_covers,
            partial: Box::new(out),
        });
    }
    Ok(out)
}

/// Wire form for harvested covers: `{"covers":[[...],...],"T":int,"seed":...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoversFile {
    pub covers: Vec<Vec<usize>>,
    #[serde(rename = "T")]
    pub walk_len: usize,
    pub seed: u64,
}

impl CoversFile {
    pub fn new(covers: &[EvenCover], walk_len: usize, seed: u64) -> Self {
        Self {
            covers: covers.iter().map(|c| c.indices().to_vec()).collect(),
            walk_len,
            seed,
        }
    }

    /// Re-validates every cover against `h`.
    pub fn to_covers(&self, h: &Hypergraph) -> Result<Vec<EvenCover>> {
        self.covers.iter().map(|c| EvenCover::new(h, c.clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::Gf2Span;
    use crate::hypergraph::verify_even_cover;
    use crate::instance::sample_uniform_hypergraph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(set: &[u32]) -> KikuchiVertex {
        KikuchiVertex::from_sorted_unchecked(set.to_vec())
    }

    fn sampled(degrees: Vec<usize>) -> SampledWalk {
        let steps = degrees.iter().map(|_| WalkStep { color: 0, to: v(&[0]) }).collect();
        SampledWalk {
            walk: ColoredWalk { start: v(&[0]), steps },
            degrees,
            aborted: false,
        }
    }

    #[test]
    fn zero_length_walk_is_closed_and_trivial() {
        let h = Hypergraph::new(5, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let g = KikuchiGraph::new(&h, 2).unwrap();
        let w = run_walk(&g, &v(&[0, 4]), 0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(w.walk.is_closed());
        assert!(odd_colors(&w.walk).unwrap().is_empty());
        assert!(matches!(
            run_walk(&g, &v(&[0, 4]), 1, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(Error::WalkAborted { step: 0, .. })
        ));
    }

    #[test]
    fn single_kikuchi_edge_forces_backtrack() {
        let h = Hypergraph::new(5, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let g = KikuchiGraph::new(&h, 2).unwrap();
        for start in [v(&[0, 1]), v(&[2, 3])] {
            let w = run_walk(&g, &start, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
            assert!(w.walk.is_closed());
            assert_eq!(w.walk.colors().collect::<Vec<_>>(), vec![0, 0]);
            assert!(w.walk.is_consistent_with(&h));
        }
    }

    #[test]
    fn goodness_threshold_arithmetic() {
        let good = assess_goodness(&sampled(vec![10; 10]), 0.05, 100.0);
        assert_eq!(
            good,
            GoodnessReport {
                bad_count: 0,
                is_good: true
            }
        );
        let all_bad = assess_goodness(&sampled(vec![1; 10]), 0.05, 100.0);
        assert_eq!(
            all_bad,
            GoodnessReport {
                bad_count: 10,
                is_good: false
            }
        );
        // 1.1 * 0.5 * 10 = 5.5: five bad vertices are allowed, six are not.
        let mut d = vec![100; 10];
        d[..5].fill(0);
        assert!(assess_goodness(&sampled(d.clone()), 0.5, 100.0).is_good);
        d[5] = 0;
        assert!(!assess_goodness(&sampled(d), 0.5, 100.0).is_good);
        // 1.1 * 0.5 * 20 = 11 exactly.
        let mut d = vec![100; 20];
        d[..11].fill(0);
        assert!(assess_goodness(&sampled(d), 0.5, 100.0).is_good);
    }

    #[test]
    fn odd_color_parity() {
        let walk = |colors: &[usize]| ColoredWalk {
            start: v(&[0]),
            steps: colors.iter().map(|&c| WalkStep { color: c, to: v(&[0]) }).collect(),
        };
        assert!(odd_colors(&walk(&[3, 3])).unwrap().is_empty());
        assert_eq!(odd_colors(&walk(&[1, 2, 1])).unwrap(), vec![2]);
        assert_eq!(odd_colors(&walk(&[5, 1, 5, 5])).unwrap(), vec![1, 5]);
        let open = ColoredWalk {
            start: v(&[0]),
            steps: vec![WalkStep { color: 0, to: v(&[1]) }],
        };
        assert!(odd_colors(&open).is_err());
    }

    #[test]
    fn identical_walk_streams_give_a_trivial_collision() {
        let h = sample_uniform_hypergraph(12, 4, 120, &RngStream::root(4)).unwrap();
        let g = KikuchiGraph::new(&h, 2).unwrap();
        let start = g.sample_stationary(&mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let mut rng_a = RngStream::root(77).rng();
        let mut rng_b = RngStream::root(77).rng();
        let a = run_walk(&g, &start, 3, &mut rng_a).unwrap().walk;
        let b = run_walk(&g, &start, 3, &mut rng_b).unwrap().walk;
        let closed = a.join_reversed(&b).unwrap();
        assert_eq!(closed.len(), 6);
        assert!(closed.is_closed());
        assert!(closed.is_consistent_with(&h));
        assert!(odd_colors(&closed).unwrap().is_empty());
    }

    #[test]
    fn no_collision_means_fail() {
        // Every vertex has degree 1 and all walks of length 2 return home.
        // With 1.1·β·T < 1 a single bad vertex spoils a walk.
        let h = Hypergraph::new(5, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let g = KikuchiGraph::new(&h, 2).unwrap();
        let cfg = WalkSearchConfig {
            beta: 0.4,
            ..WalkSearchConfig::desk(2, 8, 1, 1)
        };
        let out = find_good_closed_walk(&g, &v(&[0, 1]), &cfg, 100.0, &RngStream::root(0)).unwrap();
        assert_eq!(out, ClosedWalkOutcome::Fail { good_walks: 0 });
        let out = find_good_closed_walk(&g, &v(&[0, 1]), &cfg, 2.0, &RngStream::root(0)).unwrap();
        match out {
            ClosedWalkOutcome::Found { pair, walk, good_walks } => {
                assert_eq!(pair, (0, 1));
                assert_eq!(good_walks, 8);
                assert!(odd_colors(&walk).unwrap().is_empty());
            }
            other => panic!("expected a collision, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(WalkSearchConfig::desk(2, 1, 10, 1).validate().is_err());
        assert!(WalkSearchConfig::desk(0, 4, 10, 1).validate().is_err());
        let mut c = WalkSearchConfig::desk(2, 4, 10, 1);
        c.beta = 0.0;
        assert!(c.validate().is_err());
        c.beta = 1.0;
        assert!(c.validate().is_ok());
    }

    fn desk_graph(seed: u64) -> Hypergraph {
        sample_uniform_hypergraph(16, 4, 455, &RngStream::root(seed)).unwrap()
    }

    #[test]
    fn harvest_yields_valid_distinct_covers() {
        let h = desk_graph(8);
        let g = KikuchiGraph::new(&h, 2).unwrap();
        let cfg = WalkSearchConfig::desk(3, 40, 2_000, 25);
        let harvest = harvest_distinct_covers(&g, &cfg, &RngStream::root(12)).unwrap();
        assert_eq!(harvest.covers.len(), 25);
        let span = Gf2Span::of_nullspace(&h);
        let distinct: BTreeSet<&EvenCover> = harvest.covers.iter().collect();
        assert_eq!(distinct.len(), 25);
        for c in &harvest.covers {
            assert!(!c.is_empty() && c.len() <= 6);
            assert!(verify_even_cover(&h, c.indices()).unwrap());
            assert!(span.contains(c.indices()));
        }
        let again = harvest_distinct_covers(&g, &cfg, &RngStream::root(12)).unwrap();
        assert_eq!(again, harvest);
    }

    #[test]
    fn one_cover_target() {
        let h = desk_graph(9);
        let g = KikuchiGraph::new(&h, 2).unwrap();
        let harvest = harvest_distinct_covers(&g, &WalkSearchConfig::desk(2, 30, 500, 1), &RngStream::root(1)).unwrap();
        assert_eq!(harvest.covers.len(), 1);
        assert!(verify_even_cover(&h, harvest.covers[0].indices()).unwrap());
        assert!(harvest.covers[0].len() <= 4);
    }

    #[test]
    fn full_rank_incidence_means_insufficient_covers() {
        // Disjoint-ish edges: the incidence matrix has full column rank.
        let h = Hypergraph::new(
            10,
            4,
            vec![vec![0, 1, 2, 3], vec![2, 3, 4, 5], vec![4, 5, 6, 7], vec![6, 7, 8, 9]],
        )
        .unwrap();
        assert!(crate::gf2::nullspace_basis(&h).is_empty());
        let g = KikuchiGraph::new(&h, 2).unwrap();
        let err = harvest_distinct_covers(&g, &WalkSearchConfig::desk(3, 20, 50, 1), &RngStream::root(3)).unwrap_err();
        match err {
            Error::InsufficientCovers { found, target, partial } => {
                assert_eq!((found, target), (0, 1));
                assert_eq!(partial.iterations, 50);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn covers_file_shape() {
        let h = Hypergraph::new(7, 4, vec![vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]).unwrap();
        let covers = vec![EvenCover::new(&h, vec![0, 1, 2]).unwrap()];
        let text = serde_json::to_string(&CoversFile::new(&covers, 2, 5)).unwrap();
        assert_eq!(text, r#"{"covers":[[0,1,2]],"T":2,"seed":5}"#);
        let back: CoversFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_covers(&h).unwrap(), covers);
    }
}
