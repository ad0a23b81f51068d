//! Block-linear restriction of the even-cover polynomial and the
//! thresholded Null/Planted decision.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::EvenCover;
use crate::instance::SignedInstance;
use crate::kikuchi::KikuchiParams;
use crate::params::Profile;
use crate::rng::RngStream;
use crate::walk::saturating_ceil;

/// Assignment of every hyperedge to one of `P` parts of near-equal size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    part_of: Vec<u32>,
    parts: usize,
}

impl BlockPartition {
    pub fn new(part_of: Vec<u32>, parts: usize) -> Result<Self> {
        if parts == 0 {
            return invalid("a partition needs at least one part");
        }
        let mut sizes = vec![0usize; parts];
        for &p in &part_of {
            match sizes.get_mut(p as usize) {
                Some(s) => *s += 1,
                None => return invalid(format!("part {p} out of range for {parts} parts")),
            }
        }
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        if hi - lo > 1 {
            return invalid(format!("part sizes range from {lo} to {hi}"));
        }
        Ok(Self { part_of, parts })
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    pub fn len(&self) -> usize {
        self.part_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.part_of.is_empty()
    }

    pub fn part(&self, edge: usize) -> usize {
        self.part_of[edge] as usize
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.parts];
        self.part_of.iter().for_each(|&p| sizes[p as usize] += 1);
        sizes
    }
}

/// Uniform partition of `m` edges into `parts` blocks of sizes `⌊m/P⌋` or
/// `⌈m/P⌉`: each edge gets a uniform real, edges are sorted by it, and the
/// sorted order is dealt round-robin.
pub fn sample_equipartition<R: Rng + ?Sized>(m: usize, parts: usize, rng: &mut R) -> Result<BlockPartition> {
    if parts == 0 {
        return invalid("a partition needs at least one part");
    }
    let mut keyed: Vec<(f64, usize)> = (0..m).map(|e| (rng.gen::<f64>(), e)).collect();
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut part_of = vec![0u32; m];
    for (pos, &(_, e)) in keyed.iter().enumerate() {
        part_of[e] = (pos % parts) as u32;
    }
    Ok(BlockPartition { part_of, parts })
}

/// True iff no two edges of `cover` share a part.
pub fn is_shattered(cover: &[usize], partition: &BlockPartition) -> bool {
    if cover.len() > partition.parts() {
        return false;
    }
    let mut seen: Vec<usize> = cover.iter().map(|&e| partition.part(e)).collect();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum ThresholdRule {
    /// `N^{c·ε}`; the paper profile uses `c = 0.6`.
    PowerOfN(f64),
    Fixed(f64),
    /// `f · Σ_{C∈C'} (ρ/2)^{|C|}`, a fraction of the planted noised mean.
    PlantedMeanFraction(f64),
}

/// Default cap on the partition loop in the desk profile.
pub const DESK_MAX_ROUNDS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherConfig {
    /// Cover-length parameter `T`; partitions have `2T` parts.
    pub walk_len: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub rho: f64,
    /// `ln N`, from the exact vertex count.
    pub ln_vertex_count: f64,
    /// Partition loop bound `S`.
    pub max_rounds: u64,
    /// Unclamped shatter floor.
    pub shatter_floor: f64,
    pub threshold: ThresholdRule,
    pub c_anti: f64,
    /// Independent noisings per decision, combined by majority vote.
    pub repetitions: usize,
    pub profile: Profile,
}

/// `⌈10·e^{2T}⌉`, saturating.
pub fn paper_max_rounds(walk_len: usize) -> u64 {
    let ln = 10f64.ln() + 2.0 * walk_len as f64;
    if ln >= 64.0 * std::f64::consts::LN_2 {
        u64::MAX
    } else {
        saturating_ceil(ln.exp())
    }
}

impl DistinguisherConfig {
    /// `S = ⌈10e^{2T}⌉`, floor `N^ε·0.1^T`, threshold `N^{0.6ε}`, single shot.
    pub fn paper(params: &KikuchiParams, walk_len: usize, epsilon: f64, delta: f64, rho: f64) -> Self {
        let ln_n = params.ln_vertex_count();
        Self {
            walk_len,
            epsilon,
            delta,
            rho,
            ln_vertex_count: ln_n,
            max_rounds: paper_max_rounds(walk_len),
            shatter_floor: (epsilon * ln_n + walk_len as f64 * 0.1f64.ln()).exp(),
            threshold: ThresholdRule::PowerOfN(0.6),
            c_anti: 2.0,
            repetitions: 1,
            profile: Profile::Paper,
        }
    }

    /// Paper-profile defaults with the loop bound capped at `max_rounds`, switched to
    /// the desk profile. Callers then override floor and threshold as needed.
    pub fn desk(params: &KikuchiParams, walk_len: usize, epsilon: f64, rho: f64, max_rounds: u64) -> Self {
        let mut cfg = Self::paper(params, walk_len, epsilon, 0.5, rho);
        cfg.max_rounds = cfg.max_rounds.min(max_rounds);
        cfg.profile = Profile::Desk;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.walk_len < 1 {
            return invalid("T must be at least 1");
        }
        if self.repetitions < 1 {
            return invalid("need at least one repetition");
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return invalid(format!("rho = {} outside (0, 1]", self.rho));
        }
        if self.c_anti.is_nan() || self.c_anti <= 1.2 {
            return invalid(format!("c_anti = {} must exceed 1.2", self.c_anti));
        }
        if self.profile == Profile::Paper {
            if !(self.delta > 0.0 && self.delta < 1.0) {
                return invalid(format!("delta = {} outside (0, 1)", self.delta));
            }
            if 4.0 * (1.0 / self.delta).log2() >= self.walk_len as f64 {
                return invalid(format!(
                    "paper profile needs 4·log(1/δ) < T, got δ = {} and T = {}",
                    self.delta, self.walk_len
                ));
            }
        }
        Ok(())
    }

    pub fn parts(&self) -> usize {
        2 * self.walk_len
    }

    /// `max(1, floor)`.
    pub fn effective_floor(&self) -> f64 {
        self.shatter_floor.max(1.0)
    }

    pub fn floor_clamped(&self) -> bool {
        self.shatter_floor < 1.0
    }

    /// Number of covers kept after a successful round.
    pub fn keep_count(&self) -> usize {
        saturating_ceil(self.effective_floor()) as usize
    }

    pub fn threshold_for(&self, kept: &[EvenCover]) -> f64 {
        match self.threshold {
            ThresholdRule::PowerOfN(c) => (c * self.epsilon * self.ln_vertex_count).exp(),
            ThresholdRule::Fixed(t) => t,
            ThresholdRule::PlantedMeanFraction(f) => f * planted_noised_mean(kept, self.rho),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Selected {
        partition: BlockPartition,
        /// The first `keep_count` shattered covers, in input order.
        covers: Vec<EvenCover>,
        /// Zero-based round that broke the loop.
        round: u64,
        shattered: usize,
    },
    Fail {
        rounds: u64,
    },
}

/// Samples `2T`-part equipartitions until one shatters at least the floor's
/// worth of covers. Round `s` draws from sub-stream `s`.
pub fn select_shattered_covers(
    covers: &[EvenCover],
    cfg: &DistinguisherConfig,
    m: usize,
    stream: &RngStream,
) -> Result<Selection> {
    cfg.validate()?;
    if let Some(bad) = covers.iter().flat_map(|c| c.indices()).find(|&&e| e >= m) {
        return invalid(format!("cover index {bad} out of range for m = {m}"));
    }
    let floor = cfg.effective_floor();
    for round in 0..cfg.max_rounds {
        let partition = sample_equipartition(m, cfg.parts(), &mut stream.derive(round).rng())?;
        let kept: Vec<&EvenCover> = covers
            .iter()
            .filter(|c| is_shattered(c.indices(), &partition))
            .collect();
        if kept.len() as f64 >= floor {
            let shattered = kept.len();
            return Ok(Selection::Selected {
                partition,
                covers: kept.into_iter().take(cfg.keep_count()).cloned().collect(),
                round,
                shattered,
            });
        }
    }
    Ok(Selection::Fail { rounds: cfg.max_rounds })
}

/// `Σ_{C} (ρ/2)^{|C|}`, the planted mean of the noised statistic.
pub fn planted_noised_mean(covers: &[EvenCover], rho: f64) -> f64 {
    pairwise_sum(
        &covers
            .iter()
            .map(|c| (rho / 2.0).powi(c.len() as i32))
            .collect::<Vec<_>>(),
    )
}

/// Pairwise summation in a fixed tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `Σ_C ∏_{e∈C} ξ_e·b_e` for given noise values.
pub fn evaluate_with_noise(covers: &[EvenCover], signs: &[i8], xi: &[f64]) -> f64 {
    let terms: Vec<f64> = covers
        .iter()
        .map(|c| c.indices().iter().map(|&e| xi[e] * signs[e] as f64).product())
        .collect();
    pairwise_sum(&terms)
}

/// `ξ_e ∼ U[0,1)` keyed by edge index.
pub fn sample_noise(m: usize, stream: &RngStream) -> Vec<f64> {
    let mut keyed = stream.keyed();
    (0..m).map(|e| keyed.at(e as u64)).collect()
}

/// The statistic under fresh noise drawn from `stream`.
pub fn evaluate_noised_polynomial(covers: &[EvenCover], signs: &[i8], stream: &RngStream) -> Result<f64> {
    if covers.is_empty() {
        return invalid("the polynomial needs at least one cover");
    }
    if let Some(bad) = covers.iter().flat_map(|c| c.indices()).find(|&&e| e >= signs.len()) {
        return invalid(format!("cover index {bad} out of range for {} signs", signs.len()));
    }
    Ok(evaluate_with_noise(covers, signs, &sample_noise(signs.len(), stream)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Null,
    Planted,
    Fail,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Null => "null",
            Decision::Planted => "planted",
            Decision::Fail => "fail",
        })
    }
}

/// Planted iff `statistic ≥ threshold`.
pub fn decide(statistic: f64, threshold: f64) -> Decision {
    if statistic >= threshold {
        Decision::Planted
    } else {
        Decision::Null
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub decision: Decision,
    /// Mean over repetitions; NaN on failure.
    pub statistic: f64,
    pub statistics: Vec<f64>,
    pub threshold: f64,
    pub planted_mean: f64,
    pub rounds: u64,
    pub shattered: usize,
    pub kept: usize,
    pub floor: f64,
    pub floor_clamped: bool,
}

/// Restricts `covers`, evaluates the noised statistic and thresholds it.
///
/// Partition rounds use the `"partition"` sub-stream and repetition `r`
/// draws its noise from `"noise"`, sub-stream `r`.
pub fn distinguish(
    covers: &[EvenCover],
    inst: &SignedInstance,
    cfg: &DistinguisherConfig,
    stream: &RngStream,
) -> Result<DecisionReport> {
    let m = inst.hypergraph.m();
    let selection = select_shattered_covers(covers, cfg, m, &stream.derive_named("partition"))?;
    let (kept, round, shattered) = match selection {
        Selection::Selected {
            covers,
            round,
            shattered,
            ..
        } => (covers, round, shattered),
        Selection::Fail { rounds } => {
            return Ok(DecisionReport {
                decision: Decision::Fail,
                statistic: f64::NAN,
                statistics: Vec::new(),
                threshold: f64::NAN,
                planted_mean: f64::NAN,
                rounds,
                shattered: 0,
                kept: 0,
                floor: cfg.effective_floor(),
                floor_clamped: cfg.floor_clamped(),
            })
        }
    };
    let threshold = cfg.threshold_for(&kept);
    let noise = stream.derive_named("noise");
    let statistics = (0..cfg.repetitions)
        .map(|r| evaluate_noised_polynomial(&kept, &inst.signs, &noise.derive(r as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let planted_votes = statistics
        .iter()
        .filter(|&&s| decide(s, threshold) == Decision::Planted)
        .count();
    let decision = if 2 * planted_votes > cfg.repetitions {
        Decision::Planted
    } else {
        Decision::Null
    };
    Ok(DecisionReport {
        decision,
        statistic: statistics.iter().sum::<f64>() / statistics.len() as f64,
        statistics,
        threshold,
        planted_mean: planted_noised_mean(&kept, cfg.rho),
        rounds: round + 1,
        shattered,
        kept: kept.len(),
        floor: cfg.effective_floor(),
        floor_clamped: cfg.floor_clamped(),
    })
}
