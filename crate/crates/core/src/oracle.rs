//! Brute-force oracles and statistical helpers for cross-checking the fast
//! paths. Nothing here shares set or linear-algebra code with them.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::kikuchi::MaterializedKikuchi;

/// `π(v) = deg(v) / 2|E|`, exactly, indexed like `g.vertices`.
pub fn exact_stationary_distribution(g: &MaterializedKikuchi) -> Result<Vec<BigRational>> {
    let total: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
    if total == 0 {
        return Err(Error::UndefinedDistribution("graph has no edges".into()));
    }
    let denom = BigInt::from(total);
    Ok((0..g.vertex_count())
        .map(|v| BigRational::new(BigInt::from(g.degree(v)), denom.clone()))
        .collect())
}

/// `Pr_{v∼π}[deg(v) < β·d̄]`, exactly.
pub fn low_degree_mass(g: &MaterializedKikuchi, beta: f64) -> Result<BigRational> {
    let pi = exact_stationary_distribution(g)?;
    let beta = BigRational::from_float(beta).ok_or_else(|| Error::InvalidInput(format!("beta = {beta}")))?;
    let cutoff = beta * g.average_degree();
    Ok(pi
        .into_iter()
        .enumerate()
        .filter(|&(v, _)| BigRational::from_integer(BigInt::from(g.degree(v))) < cutoff)
        .fold(BigRational::zero(), |acc, (_, p)| acc + p))
}

/// Cover check by counting vertex occurrences.
pub fn is_even_cover_by_counting(h: &Hypergraph, cover: &[usize]) -> bool {
    if cover.is_empty() {
        return false;
    }
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for &e in cover {
        for &v in h.edge(e) {
            *counts.entry(v).or_default() += 1;
        }
    }
    counts.values().all(|c| c % 2 == 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedWalkCheck {
    pub closed_walks: u64,
    pub nontrivial: u64,
    /// Start vertex index and color sequence of a failing walk.
    pub counterexample: Option<(usize, Vec<usize>)>,
}

impl ClosedWalkCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Walks explored per start vertex before giving up.
pub const EXHAUSTIVE_WALK_BUDGET: u64 = 1_000_000;
pub const EXHAUSTIVE_MAX_LEN: usize = 6;

/// Enumerates every closed walk of length `1..=max_len` from every vertex and
/// checks that its odd-multiplicity colors are empty or an even cover.
pub fn exhaustive_closed_walk_oddcolors_check(
    h: &Hypergraph,
    g: &MaterializedKikuchi,
    max_len: usize,
) -> Result<ClosedWalkCheck> {
    if max_len > EXHAUSTIVE_MAX_LEN {
        return Err(Error::Capacity(format!(
            "max_len {max_len} exceeds {EXHAUSTIVE_MAX_LEN}"
        )));
    }
    let mut out = ClosedWalkCheck {
        closed_walks: 0,
        nontrivial: 0,
        counterexample: None,
    };
    for start in 0..g.vertex_count() {
        let mut explored = 0u64;
        let mut colors = Vec::with_capacity(max_len);
        dfs(h, g, start, start, max_len, &mut colors, &mut explored, &mut out)?;
        if out.counterexample.is_some() {
            break;
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    h: &Hypergraph,
    g: &MaterializedKikuchi,
    start: usize,
    at: usize,
    left: usize,
    colors: &mut Vec<usize>,
    explored: &mut u64,
    out: &mut ClosedWalkCheck,
) -> Result<()> {
    if left == 0 || out.counterexample.is_some() {
        return Ok(());
    }
    for &(next, color) in &g.adjacency[at] {
        *explored += 1;
        if *explored > EXHAUSTIVE_WALK_BUDGET {
            return Err(Error::Capacity(format!(
                "more than {EXHAUSTIVE_WALK_BUDGET} walks from vertex {start}"
            )));
        }
        colors.push(color);
        if next == start {
            out.closed_walks += 1;
            let mut counts: HashMap<usize, usize> = HashMap::new();
            colors.iter().for_each(|&c| *counts.entry(c).or_default() += 1);
            let mut odd: Vec<usize> = counts
                .into_iter()
                .filter(|&(_, n)| n % 2 == 1)
                .map(|(c, _)| c)
                .collect();
            odd.sort_unstable();
            if !odd.is_empty() {
                out.nontrivial += 1;
                if !is_even_cover_by_counting(h, &odd) {
                    out.counterexample = Some((start, colors.clone()));
                    return Ok(());
                }
            }
        }
        dfs(h, g, start, next, left - 1, colors, explored, out)?;
        colors.pop();
    }
    Ok(())
}

/// Pearson χ² goodness-of-fit p-value of `observed` against probabilities
/// `expected`.
pub fn chi_square_uniformity(observed: &[u64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return invalid("need at least two bins with matching lengths");
    }
    if expected.iter().any(|&p| p.is_nan() || p <= 0.0) {
        return invalid("expected probabilities must be positive");
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return invalid("no observations");
    }
    let mass: f64 = expected.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = total as f64 * p / mass;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(dist.sf(stat))
}

/// Monte-Carlo estimate against an expected value with a 3σ gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTest {
    pub samples: u64,
    pub statistic: f64,
    pub expected: f64,
    pub sigma: f64,
    pub pass: bool,
}

impl EmpiricalTest {
    pub fn new(samples: u64, statistic: f64, expected: f64, sigma: f64) -> Self {
        Self {
            samples,
            statistic,
            expected,
            sigma,
            pass: (statistic - expected).abs() <= 3.0 * sigma,
        }
    }

    /// Sample mean with the standard error from the sample variance.
    pub fn mean_of(values: &[f64], expected: f64) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self::new(values.len() as u64, mean, expected, (var / n).sqrt())
    }

    /// One-sided: passes iff `statistic ≥ expected − 3σ`.
    pub fn at_least(samples: u64, statistic: f64, expected: f64, sigma: f64) -> Self {
        Self {
            pass: statistic >= expected - 3.0 * sigma,
            ..Self::new(samples, statistic, expected, sigma)
        }
    }
}

/// `½ Σ |p − q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Empirical frequencies of sample indices in `0..bins`.
pub fn histogram(samples: impl IntoIterator<Item = usize>, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    samples.into_iter().for_each(|s| counts[s] += 1);
    counts
}

/// Exact one-sided Clopper–Pearson lower bound on a binomial proportion.
pub fn clopper_pearson_lower(successes: u64, trials: u64, confidence: f64) -> f64 {
    if successes == 0 || trials == 0 {
        return 0.0;
    }
    let beta = Beta::new(successes as f64, (trials - successes + 1) as f64).expect("positive shape parameters");
    beta.inverse_cdf(1.0 - confidence)
}

/// Probability that `draws` uniform samples from `support` items collide.
pub fn uniform_birthday_collision(support: u64, draws: u64) -> f64 {
    if draws > support {
        return 1.0;
    }
    let ln_none: f64 = (1..draws).map(|i| (1.0 - i as f64 / support as f64).ln()).sum();
    1.0 - ln_none.exp()
}

/// Exact shatter probability `T!/T^T` of a `T`-set under a uniform
/// bijection into `T` parts.
pub fn bijection_shatter_probability(t: u32) -> f64 {
    (1..=t).map(|i| i as f64 / t as f64).product()
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kikuchi::materialize;
    use num_traits::One;

    fn single_edge() -> Hypergraph {
        Hypergraph::new(5, 4, vec![vec![0, 1, 2, 3]]).unwrap()
    }

    #[test]
    fn stationary_of_a_matching_plus_isolated() {
        let g = materialize(&single_edge(), 2).unwrap();
        let pi = exact_stationary_distribution(&g).unwrap();
        let half = BigRational::new(1.into(), 6.into());
        assert_eq!(pi.iter().fold(BigRational::zero(), |a, b| a + b), BigRational::one());
        for (v, p) in pi.iter().enumerate() {
            if g.degree(v) == 0 {
                assert!(p.is_zero());
            } else {
                assert_eq!(p, &half);
            }
        }
    }

    #[test]
    fn empty_graph_has_no_stationary_law() {
        let h = Hypergraph::new(5, 4, vec![]).unwrap();
        let g = materialize(&h, 2).unwrap();
        assert!(matches!(
            exact_stationary_distribution(&g),
            Err(Error::UndefinedDistribution(_))
        ));
    }

    #[test]
    fn low_degree_mass_is_exact() {
        let g = materialize(&single_edge(), 2).unwrap();
        // d̄ = 6/10; every nonisolated vertex has degree 1.
        assert!(low_degree_mass(&g, 1.0).unwrap().is_zero());
        assert!(low_degree_mass(&g, 0.05).unwrap().is_zero());
    }

    #[test]
    fn gadget_walks_pass() {
        let h = Hypergraph::new(7, 4, vec![vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]).unwrap();
        let g = materialize(&h, 2).unwrap();
        let check = exhaustive_closed_walk_oddcolors_check(&h, &g, 6).unwrap();
        assert!(check.passed());
        assert!(check.closed_walks > 0);
        assert!(check.nontrivial > 0);
        assert!(exhaustive_closed_walk_oddcolors_check(&h, &g, 7).is_err());
    }

    #[test]
    fn counting_cover_check() {
        let h = Hypergraph::new(7, 4, vec![vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]).unwrap();
        assert!(is_even_cover_by_counting(&h, &[0, 1, 2]));
        assert!(!is_even_cover_by_counting(&h, &[0, 1]));
        assert!(!is_even_cover_by_counting(&h, &[]));
    }

    #[test]
    fn chi_square_examples() {
        let p = chi_square_uniformity(&[100, 200, 300], &[1.0, 2.0, 3.0]).unwrap();
        assert!(p > 0.999_999, "{p}");
        let mut lopsided = vec![0u64; 10];
        lopsided[0] = 1000;
        assert!(chi_square_uniformity(&lopsided, &[0.1; 10]).unwrap() < 1e-6);
        assert!(chi_square_uniformity(&[1, 2], &[0.5, 0.0]).is_err());
        assert!(chi_square_uniformity(&[0, 0], &[0.5, 0.5]).is_err());
        assert!(chi_square_uniformity(&[1], &[1.0]).is_err());
    }

    #[test]
    fn empirical_gate() {
        assert!(EmpiricalTest::new(10, 1.0, 0.0, 0.4).pass);
        assert!(!EmpiricalTest::new(10, 1.3, 0.0, 0.4).pass);
        assert!(EmpiricalTest::at_least(10, 5.0, 0.0, 0.1).pass);
        let t = EmpiricalTest::mean_of(&[1.0, -1.0, 1.0, -1.0], 0.0);
        assert_eq!(t.statistic, 0.0);
        assert!((t.sigma - (4.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn clopper_pearson_values() {
        assert_eq!(clopper_pearson_lower(0, 10, 0.95), 0.0);
        // All successes: lower bound is (1 − conf)^{1/n}.
        let lb = clopper_pearson_lower(50, 50, 0.95);
        assert!((lb - 0.05f64.powf(1.0 / 50.0)).abs() < 1e-9, "{lb}");
        // 45/50 at 95% is about 0.8.
        let lb = clopper_pearson_lower(45, 50, 0.95);
        assert!(lb > 0.79 && lb < 0.82, "{lb}");
    }

    #[test]
    fn birthday_values() {
        assert_eq!(uniform_birthday_collision(10, 11), 1.0);
        assert_eq!(uniform_birthday_collision(10, 1), 0.0);
        assert!((uniform_birthday_collision(365, 23) - 0.507_297).abs() < 1e-6);
        assert!((bijection_shatter_probability(3) - 6.0 / 27.0).abs() < 1e-15);
        assert!((total_variation(&[0.5, 0.5], &[1.0, 0.0]) - 0.5).abs() < 1e-15);
    }
}
