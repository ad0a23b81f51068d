//! Null and ρ-planted right-hand sides, and random hypergraphs.

use std::collections::HashSet;

use num_bigint::BigUint;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combin::binomial;
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{verify_even_cover, Hypergraph, HypergraphJson, Normalization};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Null,
    Planted,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Null => "null",
            Label::Planted => "planted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub z: Vec<i8>,
    pub rho: f64,
    pub label: Label,
}

/// A hypergraph with one ±1 right-hand side per hyperedge.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedInstance {
    pub hypergraph: Hypergraph,
    pub signs: Vec<i8>,
    pub ground_truth: Option<GroundTruth>,
}

/// Wire form: the hypergraph schema plus `signs` and optional `ground_truth`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    #[serde(flatten)]
    pub hypergraph: HypergraphJson,
    pub signs: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
}

fn check_pm_one(values: &[i8], what: &str) -> Result<()> {
    if values.iter().any(|&s| s != 1 && s != -1) {
        return invalid(format!("{what} must be ±1"));
    }
    Ok(())
}

impl SignedInstance {
    pub fn new(hypergraph: Hypergraph, signs: Vec<i8>, ground_truth: Option<GroundTruth>) -> Result<Self> {
        if signs.len() != hypergraph.m() {
            return invalid(format!("{} signs for {} edges", signs.len(), hypergraph.m()));
        }
        check_pm_one(&signs, "signs")?;
        if let Some(gt) = &ground_truth {
            if gt.z.len() != hypergraph.n() {
                return invalid(format!(
                    "assignment has length {}, expected n = {}",
                    gt.z.len(),
                    hypergraph.n()
                ));
            }
            check_pm_one(&gt.z, "assignment entries")?;
            if !(0.0..=1.0).contains(&gt.rho) {
                return invalid(format!("rho = {} outside [0, 1]", gt.rho));
            }
        }
        Ok(Self {
            hypergraph,
            signs,
            ground_truth,
        })
    }

    /// Loads the wire form, sorting edges and permuting signs to match.
    pub fn from_json_normalized(raw: InstanceJson) -> Result<(Self, Normalization)> {
        let (h, norm) = Hypergraph::from_json_normalized(raw.hypergraph)?;
        if raw.signs.len() != h.m() {
            return invalid(format!("{} signs for {} edges", raw.signs.len(), h.m()));
        }
        let signs = norm.permutation.iter().map(|&i| raw.signs[i]).collect();
        Ok((Self::new(h, signs, raw.ground_truth)?, norm))
    }

    pub fn to_json(&self) -> InstanceJson {
        InstanceJson {
            hypergraph: self.hypergraph.to_json(),
            signs: self.signs.clone(),
            ground_truth: self.ground_truth.clone(),
        }
    }

    /// `∏_{e∈F} b_e` for an even cover `F`.
    pub fn cover_product(&self, cover: &[usize]) -> Result<i8> {
        even_cover_sign_product(&self.hypergraph, &self.signs, cover)
    }
}

/// Product of the signs over `cover`; rejects sets that are not even covers.
pub fn even_cover_sign_product(h: &Hypergraph, signs: &[i8], cover: &[usize]) -> Result<i8> {
    if !verify_even_cover(h, cover)? {
        return invalid(format!("{cover:?} is not a nonempty even cover"));
    }
    Ok(cover.iter().map(|&e| signs[e]).product())
}

/// Noise bits `η_e` with `E[η_e] = rho`, drawn per edge index from `stream`.
pub fn noise_bits(m: usize, rho: f64, stream: &RngStream) -> Result<Vec<i8>> {
    if !(0.0..=1.0).contains(&rho) {
        return invalid(format!("rho = {rho} outside [0, 1]"));
    }
    let p_plus = (1.0 + rho) / 2.0;
    let mut keyed = stream.keyed();
    Ok((0..m as u64)
        .map(|e| if keyed.at(e) < p_plus { 1 } else { -1 })
        .collect())
}

/// `b_e = η_e ∏_{v∈e} z_v` with `η` from [`noise_bits`].
pub fn planted_signs(h: &Hypergraph, z: &[i8], rho: f64, stream: &RngStream) -> Result<Vec<i8>> {
    if z.len() != h.n() {
        return invalid(format!("assignment has length {}, expected n = {}", z.len(), h.n()));
    }
    check_pm_one(z, "assignment entries")?;
    let eta = noise_bits(h.m(), rho, stream)?;
    Ok(h.edges()
        .iter()
        .zip(eta)
        .map(|(e, n)| n * e.iter().map(|&v| z[v as usize]).product::<i8>())
        .collect())
}

pub fn sample_planted_signs(h: &Hypergraph, z: &[i8], rho: f64, stream: &RngStream) -> Result<SignedInstance> {
    let signs = planted_signs(h, z, rho, stream)?;
    SignedInstance::new(
        h.clone(),
        signs,
        Some(GroundTruth {
            z: z.to_vec(),
            rho,
            label: Label::Planted,
        }),
    )
}

/// A uniformly random hidden assignment in `{±1}^n`.
pub fn sample_assignment(n: usize, stream: &RngStream) -> Vec<i8> {
    let mut rng = stream.rng();
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

/// Uniform signs: the ρ = 0 case with the all-ones assignment.
pub fn sample_null_signs(h: &Hypergraph, stream: &RngStream) -> SignedInstance {
    let z = vec![1i8; h.n()];
    let signs = planted_signs(h, &z, 0.0, stream).expect("rho = 0 and z are valid");
    SignedInstance {
        hypergraph: h.clone(),
        signs,
        ground_truth: Some(GroundTruth {
            z,
            rho: 0.0,
            label: Label::Null,
        }),
    }
}

/// `m` distinct k-subsets of `[n]`, uniformly without replacement, in
/// canonical (lexicographic) order.
pub fn sample_uniform_hypergraph(n: usize, k: usize, m: usize, stream: &RngStream) -> Result<Hypergraph> {
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    if BigUint::from(m) > binomial(n as u64, k as u64) {
        return Err(Error::Capacity(format!("m = {m} exceeds C({n}, {k})")));
    }
    let mut rng = stream.rng();
    let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(m);
    let budget = 100 * m.max(1);
    let mut attempts = 0;
    while seen.len() < m {
        if attempts == budget {
            return Err(Error::Capacity(format!(
                "rejection sampling drew only {} distinct edges in {budget} attempts",
                seen.len()
            )));
        }
        attempts += 1;
        let mut e: Vec<u32> = index::sample(&mut rng, n, k).into_iter().map(|v| v as u32).collect();
        e.sort_unstable();
        seen.insert(e);
    }
    let mut edges: Vec<Vec<u32>> = seen.into_iter().collect();
    edges.sort();
    Hypergraph::new(n, k, edges)
}
