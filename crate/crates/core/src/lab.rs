//! Oracle checks over small instances, shared by the `oracle` CLI verb and
//! the acceptance suite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gf2::{enumerate_even_covers, Gf2Span};
use crate::hypergraph::{verify_even_cover, Hypergraph};
use crate::instance::sample_uniform_hypergraph;
use crate::kikuchi::{compute_params, materialize, KikuchiGraph, KikuchiVertex};
use crate::oracle::{
    chi_square_uniformity, exact_stationary_distribution, exhaustive_closed_walk_oddcolors_check, histogram,
    low_degree_mass, rational_to_f64, total_variation,
};
use crate::rng::RngStream;

/// A random hypergraph named by its sizes and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabInstance {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub ell: usize,
    pub seed: u64,
}

impl LabInstance {
    pub fn hypergraph(&self) -> Result<Hypergraph> {
        sample_uniform_hypergraph(self.n, self.k, self.m, &RngStream::root(self.seed))
    }

    pub fn name(&self) -> String {
        format!(
            "n={} k={} m={} ell={} seed={}",
            self.n, self.k, self.m, self.ell, self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl LabCheck {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

pub fn default_instances() -> Vec<LabInstance> {
    let spec = [
        (8, 4, 30, 2),
        (8, 4, 40, 3),
        (9, 4, 50, 4),
        (10, 4, 60, 2),
        (10, 4, 80, 3),
        (12, 4, 100, 2),
        (12, 4, 120, 4),
        (9, 6, 30, 3),
        (10, 6, 40, 3),
        (10, 6, 50, 4),
        (11, 6, 60, 4),
    ];
    spec.iter()
        .enumerate()
        .map(|(i, &(n, k, m, ell))| LabInstance {
            n,
            k,
            m,
            ell,
            seed: 100 + i as u64,
        })
        .collect()
}

/// Degrees, colored neighbor sets and `d̄` of the implicit graph against the
/// materialized one, plus the closed-form average degree.
pub fn kikuchi_equivalence(inst: &LabInstance) -> Result<LabCheck> {
    let h = inst.hypergraph()?;
    let g = KikuchiGraph::new(&h, inst.ell)?;
    let mat = materialize(&h, inst.ell)?;
    let mut mismatches = 0usize;
    for (v, set) in mat.vertices.iter().enumerate() {
        let w = KikuchiVertex::new(set.clone(), h.n(), inst.ell)?;
        let mut implicit: Vec<(Vec<u32>, usize)> = g
            .neighbors(&w)
            .into_iter()
            .map(|(u, c)| (u.as_slice().to_vec(), c))
            .collect();
        let mut explicit: Vec<(Vec<u32>, usize)> = mat.adjacency[v]
            .iter()
            .map(|&(u, c)| (mat.vertices[u].clone(), c))
            .collect();
        implicit.sort();
        explicit.sort();
        if g.degree(&w) != mat.degree(v) || implicit != explicit {
            mismatches += 1;
        }
    }
    let formula = compute_params(&h, inst.ell)?.average_degree;
    let measured = mat.average_degree();
    let pass = mismatches == 0 && formula == measured;
    Ok(LabCheck::new(
        format!("kikuchi equivalence [{}]", inst.name()),
        pass,
        format!(
            "{} vertices, {mismatches} mismatches, d̄ formula {formula} vs materialized {measured}",
            mat.vertex_count()
        ),
    ))
}

/// TV distance between `samples` stationary draws and the exact `π`.
pub fn stationary_tv(inst: &LabInstance, samples: usize, seed: u64) -> Result<f64> {
    let h = inst.hypergraph()?;
    let g = KikuchiGraph::new(&h, inst.ell)?;
    let mat = materialize(&h, inst.ell)?;
    let pi: Vec<f64> = exact_stationary_distribution(&mat)?
        .iter()
        .map(rational_to_f64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let w = g.sample_stationary(&mut rng)?;
        draws.push(mat.index_of(w.as_slice()).expect("sampled vertex is in the graph"));
    }
    let counts = histogram(draws, mat.vertex_count());
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    Ok(total_variation(&freq, &pi))
}

/// TV distance between sampled neighbors of a maximum-degree vertex
/// and the uniform law over its neighbors, with the χ² p-value.
pub fn neighbor_tv(inst: &LabInstance, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let h = inst.hypergraph()?;
    let g = KikuchiGraph::new(&h, inst.ell)?;
    let mat = materialize(&h, inst.ell)?;
    let Some(v) = (0..mat.vertex_count()).max_by_key(|&v| (mat.degree(v), std::cmp::Reverse(v))) else {
        return Ok((0.0, 1.0));
    };
    let d = mat.degree(v);
    if d < 2 {
        return Ok((0.0, 1.0));
    }
    let w = KikuchiVertex::new(mat.vertices[v].clone(), h.n(), inst.ell)?;
    let colors: Vec<usize> = mat.adjacency[v].iter().map(|&(_, c)| c).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (_, c) = g.sample_neighbor(&w, &mut rng)?;
        draws.push(colors.iter().position(|&x| x == c).expect("sampled color is incident"));
    }
    let counts = histogram(draws, d);
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    let uniform = vec![1.0 / d as f64; d];
    Ok((
        total_variation(&freq, &uniform),
        chi_square_uniformity(&counts, &uniform)?,
    ))
}

/// `Pr_{v∼π}[deg(v) < β·d̄] < β` for each β, evaluated exactly.
pub fn min_degree_fact(inst: &LabInstance, betas: &[f64]) -> Result<LabCheck> {
    let h = inst.hypergraph()?;
    let mat = materialize(&h, inst.ell)?;
    let mut pass = true;
    let mut detail = Vec::new();
    for &beta in betas {
        let mass = low_degree_mass(&mat, beta)?;
        let ok = mass < num_rational::BigRational::from_float(beta).expect("finite beta");
        pass &= ok;
        detail.push(format!("β={beta}: mass {mass}"));
    }
    Ok(LabCheck::new(
        format!("min-degree fact [{}]", inst.name()),
        pass,
        detail.join(", "),
    ))
}

/// Every closed walk up to `max_len` yields an empty set or an even cover.
pub fn closed_walk_enumeration(inst: &LabInstance, max_len: usize) -> Result<LabCheck> {
    let h = inst.hypergraph()?;
    let mat = materialize(&h, inst.ell)?;
    let check = exhaustive_closed_walk_oddcolors_check(&h, &mat, max_len)?;
    Ok(LabCheck::new(
        format!("closed walks up to length {max_len} [{}]", inst.name()),
        check.passed(),
        format!(
            "{} closed walks, {} nontrivial, counterexample {:?}",
            check.closed_walks, check.nontrivial, check.counterexample
        ),
    ))
}

/// Enumerated even covers agree with membership in the nullspace span.
pub fn gf2_agreement(inst: &LabInstance) -> Result<LabCheck> {
    let h = inst.hypergraph()?;
    let span = Gf2Span::of_nullspace(&h);
    let covers = enumerate_even_covers(&h, h.m())?;
    let mut pass = covers.len() + 1 == 1usize << span.dimension();
    for c in &covers {
        pass &= span.contains(c.indices()) && verify_even_cover(&h, c.indices())?;
    }
    Ok(LabCheck::new(
        format!("gf2 enumeration [{}]", inst.name()),
        pass,
        format!("{} covers, nullspace dimension {}", covers.len(), span.dimension()),
    ))
}

/// The full suite run by `kxor oracle`.
pub fn run_lab(seed: u64) -> Result<Vec<LabCheck>> {
    let mut out = Vec::new();
    for inst in default_instances() {
        out.push(kikuchi_equivalence(&inst)?);
        out.push(min_degree_fact(&inst, &[0.05, 0.5, 1.0])?);
        let tv = stationary_tv(&inst, 100_000, seed ^ inst.seed)?;
        out.push(LabCheck::new(
            format!("stationary sampler [{}]", inst.name()),
            tv <= 0.05,
            format!("TV {tv:.4} at 1e5 samples"),
        ));
        let (tv, p) = neighbor_tv(&inst, 100_000, seed ^ inst.seed ^ 1)?;
        out.push(LabCheck::new(
            format!("neighbor sampler [{}]", inst.name()),
            tv <= 0.05,
            format!("TV {tv:.4}, χ² p = {p:.3}"),
        ));
    }
    for inst in [
        LabInstance {
            n: 8,
            k: 4,
            m: 20,
            ell: 2,
            seed: seed.wrapping_add(1),
        },
        LabInstance {
            n: 9,
            k: 4,
            m: 24,
            ell: 3,
            seed: seed.wrapping_add(2),
        },
    ] {
        out.push(closed_walk_enumeration(&inst, 4)?);
        out.push(gf2_agreement(&inst)?);
    }
    Ok(out)
}
