//! End-to-end experiments: generate instances, harvest covers, distinguish,
//! and report.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::combin::{big_to_f64, binomial};
use crate::distinguisher::{
    distinguish, Decision, DecisionReport, DistinguisherConfig, ThresholdRule, DESK_MAX_ROUNDS,
};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::instance::{sample_assignment, sample_null_signs, sample_planted_signs, sample_uniform_hypergraph, Label};
use crate::kikuchi::{compute_params, KikuchiGraph, KikuchiParams};
use crate::params::{derive_theorem_params, DerivedParams, Profile, TheoremConfig};
use crate::rng::RngStream;
use crate::walk::{
    find_good_closed_walk, harvest_distinct_covers, odd_colors, walks_for_constant, ClosedWalkOutcome, Harvest,
    WalkSearchConfig, DEFAULT_BETA, PAPER_WALK_CONSTANT,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Desk-profile constants. `None` falls back to the paper-profile formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeskOverrides {
    pub walk_len: Option<usize>,
    /// `C₁` in `L = ⌈C₁·√N⌉`.
    pub walk_constant: f64,
    pub walks_per_attempt: Option<u64>,
    pub beta: f64,
    pub max_iterations: Option<u64>,
    pub target_covers: Option<usize>,
    pub shatter_floor: Option<f64>,
    pub threshold: Option<ThresholdRule>,
    pub max_rounds: u64,
    pub repetitions: usize,
}

impl Default for DeskOverrides {
    fn default() -> Self {
        Self {
            walk_len: None,
            walk_constant: PAPER_WALK_CONSTANT,
            walks_per_attempt: None,
            beta: DEFAULT_BETA,
            max_iterations: None,
            target_covers: None,
            shatter_floor: None,
            threshold: None,
            max_rounds: DESK_MAX_ROUNDS,
            repetitions: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    /// Edge count; when absent, `m = density·n^{k/2}·log₂ n`.
    pub m: Option<usize>,
    pub density: Option<f64>,
    pub ell: usize,
    pub rho: f64,
    pub profile: Profile,
    pub seed: u64,
    pub trials: usize,
    #[serde(default)]
    pub theorem: TheoremConfig,
    #[serde(default)]
    pub desk: DeskOverrides,
}

impl ExperimentConfig {
    /// The calibrated desk reference point used by the acceptance suite.
    pub fn desk_reference(seed: u64, trials: usize) -> Self {
        Self {
            n: DESK_REFERENCE.n,
            k: 4,
            m: Some(DESK_REFERENCE.m),
            density: None,
            ell: DESK_REFERENCE.ell,
            rho: 0.9,
            profile: Profile::Desk,
            seed,
            trials,
            theorem: TheoremConfig::default(),
            desk: DeskOverrides {
                walk_len: Some(DESK_REFERENCE.walk_len),
                walk_constant: DESK_REFERENCE.walk_constant,
                walks_per_attempt: None,
                beta: DEFAULT_BETA,
                max_iterations: Some(DESK_REFERENCE.max_iterations),
                target_covers: Some(DESK_REFERENCE.target_covers),
                shatter_floor: Some(DESK_REFERENCE.shatter_floor),
                threshold: Some(ThresholdRule::PlantedMeanFraction(DESK_REFERENCE.threshold_fraction)),
                max_rounds: DESK_MAX_ROUNDS,
                repetitions: 1,
            },
        }
    }

    pub fn edge_count(&self) -> Result<usize> {
        match (self.m, self.density) {
            (Some(m), _) => Ok(m),
            (None, Some(d)) if d > 0.0 && self.n >= 2 => {
                let m = d * (self.n as f64).powi(self.k as i32 / 2) * (self.n as f64).log2();
                Ok(m.round() as usize)
            }
            (None, Some(d)) => invalid(format!("density {d} needs to be positive with n ≥ 2")),
            (None, None) => invalid("either m or density is required"),
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if self.k < 4 || self.k % 2 == 1 {
            return invalid(format!("k = {} must be even and at least 4", self.k));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return invalid(format!("rho = {} outside (0, 1]", self.rho));
        }
        if self.ell < self.k / 2 || self.ell + self.k / 2 > self.n {
            return invalid(format!("ell = {} outside [k/2, n − k/2]", self.ell));
        }
        let m = self.edge_count()?;
        if big_to_f64(&binomial(self.n as u64, self.k as u64)) < m as f64 {
            return invalid(format!("m = {m} exceeds C(n, k)"));
        }
        if self.desk.repetitions == 0 {
            return invalid("repetitions must be at least 1");
        }
        if !(self.desk.beta > 0.0 && self.desk.beta <= 1.0) {
            return invalid(format!("beta = {} outside (0, 1]", self.desk.beta));
        }
        Ok(m)
    }
}

/// Frozen desk calibration point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeskReference {
    pub n: usize,
    pub ell: usize,
    pub m: usize,
    pub walk_len: usize,
    pub walk_constant: f64,
    pub max_iterations: u64,
    pub target_covers: usize,
    pub shatter_floor: f64,
    pub threshold_fraction: f64,
}

pub const DESK_REFERENCE: DeskReference = DeskReference {
    n: 20,
    ell: 2,
    m: 1211,
    walk_len: 2,
    walk_constant: 3.0,
    max_iterations: 40_000,
    target_covers: 2000,
    shatter_floor: 150.0,
    threshold_fraction: 0.5,
};

/// Walk and distinguisher settings for one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub walk: WalkSearchConfig,
    pub distinguisher: DistinguisherConfig,
}

pub fn resolve(cfg: &ExperimentConfig, kp: &KikuchiParams, derived: &DerivedParams) -> ResolvedConfig {
    let eps = derived.epsilon;
    match cfg.profile {
        Profile::Paper => ResolvedConfig {
            walk: WalkSearchConfig::paper(kp, derived.walk_len, eps, cfg.theorem.delta),
            distinguisher: DistinguisherConfig {
                c_anti: cfg.theorem.c_anti,
                ..DistinguisherConfig::paper(kp, derived.walk_len, eps, cfg.theorem.delta, cfg.rho)
            },
        },
        Profile::Desk => {
            let d = &cfg.desk;
            let t = d.walk_len.unwrap_or(derived.walk_len.max(1));
            let paper = WalkSearchConfig::paper(kp, t, eps, cfg.theorem.delta);
            let walk = WalkSearchConfig {
                walk_len: t,
                walks_per_attempt: d
                    .walks_per_attempt
                    .unwrap_or_else(|| walks_for_constant(kp, d.walk_constant)),
                beta: d.beta,
                max_iterations: d.max_iterations.unwrap_or(paper.max_iterations),
                target_covers: d.target_covers.unwrap_or(paper.target_covers),
                profile: Profile::Desk,
            };
            let mut dist = DistinguisherConfig::desk(kp, t, eps, cfg.rho, d.max_rounds);
            dist.delta = cfg.theorem.delta;
            dist.c_anti = cfg.theorem.c_anti;
            dist.repetitions = d.repetitions;
            if let Some(f) = d.shatter_floor {
                dist.shatter_floor = f;
            }
            if let Some(rule) = d.threshold {
                dist.threshold = rule;
            }
            ResolvedConfig {
                walk,
                distinguisher: dist,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KikuchiSummary {
    pub vertex_count: String,
    pub log2_vertex_count: f64,
    /// Exact rational `d̄`.
    pub average_degree: String,
    pub average_degree_f64: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelOutcome {
    pub label: Label,
    pub decision: Decision,
    pub correct: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub planted_mean: f64,
    pub kept: usize,
    pub rounds: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub stream: RngStream,
    pub covers_found: usize,
    pub harvest_iterations: u64,
    pub closed_walks: u64,
    pub harvest_error: Option<String>,
    pub outcomes: Vec<LabelOutcome>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub decisions: usize,
    pub correct: usize,
    pub null_correct: usize,
    pub planted_correct: usize,
    pub failures: usize,
    pub harvest_failures: usize,
    pub accuracy: f64,
}

/// Everything in the report except wall-clock measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub m: usize,
    pub derived: DerivedParams,
    pub kikuchi: KikuchiSummary,
    pub feasible: bool,
    pub resolved: Option<ResolvedConfig>,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub generate_seconds: f64,
    pub harvest_seconds: f64,
    pub distinguish_seconds: f64,
}

impl PhaseTiming {
    pub fn total(&self) -> f64 {
        self.generate_seconds + self.harvest_seconds + self.distinguish_seconds
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub phases: PhaseTiming,
    pub trials: Vec<PhaseTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// SHA-256 of the body's JSON encoding.
    pub digest: String,
    #[serde(flatten)]
    pub body: ReportBody,
    pub timing: Timing,
}

impl Report {
    pub fn any_harvest_failure(&self) -> bool {
        self.body.summary.harvest_failures > 0
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per trial and label.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "trial",
            "label",
            "decision",
            "statistic",
            "threshold",
            "covers_found",
            "harvest_iters",
            "seconds",
        ])?;
        for (rec, timing) in self.body.trials.iter().zip(&self.timing.trials) {
            for o in &rec.outcomes {
                w.write_record([
                    rec.trial.to_string(),
                    o.label.to_string(),
                    o.decision.to_string(),
                    o.statistic.to_string(),
                    o.threshold.to_string(),
                    rec.covers_found.to_string(),
                    rec.harvest_iterations.to_string(),
                    format!("{:.6}", timing.total()),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn body_digest(body: &ReportBody) -> Result<String> {
    Ok(sha256_hex(&serde_json::to_vec(body)?))
}

/// Streams used by trial `t`: the hypergraph, the harvest, `z`, the Null
/// signs, the planted noise, and one distinguisher stream shared by both
/// labels so they see the same partitions and the same `ξ`.
pub fn trial_stream(seed: u64, trial: usize) -> RngStream {
    RngStream::root(seed).derive(trial as u64)
}

fn outcome(label: Label, r: &DecisionReport) -> LabelOutcome {
    let correct = matches!(
        (label, r.decision),
        (Label::Null, Decision::Null) | (Label::Planted, Decision::Planted)
    );
    LabelOutcome {
        label,
        decision: r.decision,
        correct,
        statistic: r.statistic,
        threshold: r.threshold,
        planted_mean: r.planted_mean,
        kept: r.kept,
        rounds: r.rounds,
    }
}

fn failed(label: Label) -> LabelOutcome {
    LabelOutcome {
        label,
        decision: Decision::Fail,
        correct: false,
        statistic: f64::NAN,
        threshold: f64::NAN,
        planted_mean: f64::NAN,
        kept: 0,
        rounds: 0,
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    m: usize,
    ell: usize,
    resolved: &ResolvedConfig,
    fixed: Option<&Hypergraph>,
    trial: usize,
) -> Result<(TrialRecord, PhaseTiming)> {
    let stream = trial_stream(cfg.seed, trial);
    let mut timing = PhaseTiming::default();

    let clock = Instant::now();
    let h = match fixed {
        Some(h) => h.clone(),
        None => sample_uniform_hypergraph(cfg.n, cfg.k, m, &stream.derive_named("hypergraph"))?,
    };
    let z = sample_assignment(h.n(), &stream.derive_named("z"));
    let null = sample_null_signs(&h, &stream.derive_named("null"));
    let planted = sample_planted_signs(&h, &z, cfg.rho, &stream.derive_named("eta"))?;
    timing.generate_seconds = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let g = KikuchiGraph::new(&h, ell)?;
    let harvest = harvest_distinct_covers(&g, &resolved.walk, &stream.derive_named("harvest"));
    timing.harvest_seconds = clock.elapsed().as_secs_f64();
    let harvest: Harvest = match harvest {
        Ok(h) => h,
        Err(Error::InsufficientCovers { partial, found, target }) => {
            return Ok((
                TrialRecord {
                    trial,
                    stream,
                    covers_found: partial.covers.len(),
                    harvest_iterations: partial.iterations,
                    closed_walks: partial.closed_walks,
                    harvest_error: Some(format!("found {found} of {target} distinct even covers")),
                    outcomes: vec![failed(Label::Null), failed(Label::Planted)],
                },
                timing,
            ));
        }
        Err(e) => return Err(e),
    };

    let clock = Instant::now();
    let dstream = stream.derive_named("distinguish");
    let outcomes = vec![
        outcome(
            Label::Null,
            &distinguish(&harvest.covers, &null, &resolved.distinguisher, &dstream)?,
        ),
        outcome(
            Label::Planted,
            &distinguish(&harvest.covers, &planted, &resolved.distinguisher, &dstream)?,
        ),
    ];
    timing.distinguish_seconds = clock.elapsed().as_secs_f64();

    Ok((
        TrialRecord {
            trial,
            stream,
            covers_found: harvest.covers.len(),
            harvest_iterations: harvest.iterations,
            closed_walks: harvest.closed_walks,
            harvest_error: None,
            outcomes,
        },
        timing,
    ))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    run_experiment_with(cfg, None, &mut |_, _| {})
}

/// Runs `cfg`, optionally on a fixed hypergraph (whose `n`, `k`, `m` then
/// replace the configured sizes). `progress` sees each finished trial.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    fixed: Option<&Hypergraph>,
    progress: &mut dyn FnMut(&TrialRecord, &PhaseTiming),
) -> Result<Report> {
    let wall = Instant::now();
    let mut cfg = cfg.clone();
    if let Some(h) = fixed {
        cfg.n = h.n();
        cfg.k = h.k();
        cfg.m = Some(h.m());
        cfg.density = None;
    }
    let m = cfg.validate()?;
    let derived = derive_theorem_params(cfg.n, cfg.k, m, cfg.ell, cfg.rho, &cfg.theorem)?;
    let kp = crate::kikuchi::params_for(cfg.n, cfg.k, m, cfg.ell)?;
    let feasible = match cfg.profile {
        Profile::Paper => derived.feasible_paper,
        Profile::Desk => derived.feasible_desk,
    };
    let kikuchi = KikuchiSummary {
        vertex_count: kp.vertex_count.to_string(),
        log2_vertex_count: kp.ln_vertex_count() / std::f64::consts::LN_2,
        average_degree: kp.average_degree.to_string(),
        average_degree_f64: kp.average_degree_f64(),
    };
    let resolved = feasible.then(|| resolve(&cfg, &kp, &derived));
    if let Some(r) = &resolved {
        r.walk.validate()?;
        r.distinguisher.validate()?;
    }

    let mut trials = Vec::new();
    let mut timing = Timing::default();
    if let Some(r) = &resolved {
        for t in 0..cfg.trials {
            let (rec, phase) = run_trial(&cfg, m, cfg.ell, r, fixed, t)?;
            progress(&rec, &phase);
            timing.phases.generate_seconds += phase.generate_seconds;
            timing.phases.harvest_seconds += phase.harvest_seconds;
            timing.phases.distinguish_seconds += phase.distinguish_seconds;
            timing.trials.push(phase);
            trials.push(rec);
        }
    }

    let mut summary = Summary::default();
    for rec in &trials {
        if rec.harvest_error.is_some() {
            summary.harvest_failures += 1;
        }
        for o in &rec.outcomes {
            summary.decisions += 1;
            if o.decision == Decision::Fail {
                summary.failures += 1;
            }
            if o.correct {
                summary.correct += 1;
                match o.label {
                    Label::Null => summary.null_correct += 1,
                    Label::Planted => summary.planted_correct += 1,
                }
            }
        }
    }
    summary.accuracy = if summary.decisions == 0 {
        0.0
    } else {
        summary.correct as f64 / summary.decisions as f64
    };

    let body = ReportBody {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg,
        m,
        derived,
        kikuchi,
        feasible,
        resolved,
        trials,
        summary,
    };
    timing.wall_seconds = wall.elapsed().as_secs_f64();
    Ok(Report {
        digest: body_digest(&body)?,
        body,
        timing,
    })
}

/// Outcome counts of closed-walk searches from independent stationary starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirthdayCount {
    pub starts: u64,
    /// Searches that returned a closed walk.
    pub closed: u64,
    /// Closed walks with nonempty odd colors.
    pub nontrivial: u64,
}

/// Runs `starts` closed-walk searches, start `i` on sub-stream `i`.
pub fn birthday_trials(
    g: &KikuchiGraph<'_>,
    walk: &WalkSearchConfig,
    starts: u64,
    stream: &RngStream,
) -> Result<BirthdayCount> {
    let dbar = g.params().average_degree_f64();
    let mut out = BirthdayCount {
        starts,
        closed: 0,
        nontrivial: 0,
    };
    for i in 0..starts {
        let s = stream.derive(i);
        let v0 = g.sample_stationary(&mut s.derive_named("start").rng())?;
        if let ClosedWalkOutcome::Found { walk: w, .. } =
            find_good_closed_walk(g, &v0, walk, dbar, &s.derive_named("walks"))?
        {
            out.closed += 1;
            if !odd_colors(&w)?.is_empty() {
                out.nontrivial += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSweep {
    pub n_values: Vec<usize>,
    pub ells: Vec<usize>,
    pub k: usize,
    /// `m = round(fraction · C(n, k))`.
    pub edge_fraction: f64,
    pub walk_len: usize,
    pub walk_constant: f64,
    pub starts: u64,
    /// Minimum nontrivial-success rate to freeze a point.
    pub min_rate: f64,
    pub seed: u64,
}

impl Default for CalibrationSweep {
    fn default() -> Self {
        Self {
            n_values: (20..=40).collect(),
            ells: vec![2, 3],
            k: 4,
            edge_fraction: 0.25,
            walk_len: DESK_REFERENCE.walk_len,
            walk_constant: DESK_REFERENCE.walk_constant,
            starts: 200,
            min_rate: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub n: usize,
    pub ell: usize,
    pub m: usize,
    pub vertex_count: f64,
    pub average_degree: f64,
    pub walks_per_attempt: u64,
    pub count: BirthdayCount,
    pub rate: f64,
}

/// Hypergraph for calibration point `(n, ℓ)`.
pub fn calibration_hypergraph(sweep: &CalibrationSweep, n: usize, m: usize) -> Result<Hypergraph> {
    sample_uniform_hypergraph(
        n,
        sweep.k,
        m,
        &RngStream::root(sweep.seed).derive_named("calibration").derive(n as u64),
    )
}

pub fn calibration_edge_count(sweep: &CalibrationSweep, n: usize) -> usize {
    (sweep.edge_fraction * big_to_f64(&binomial(n as u64, sweep.k as u64))).round() as usize
}

/// Evaluates sweep points in order (n ascending, then ℓ) and stops at the
/// first whose nontrivial-success rate reaches `min_rate`. Returns every
/// evaluated point; the last one is the frozen point if it qualifies.
pub fn calibration_sweep(sweep: &CalibrationSweep) -> Result<Vec<CalibrationPoint>> {
    let mut out = Vec::new();
    for &n in &sweep.n_values {
        let m = calibration_edge_count(sweep, n);
        let h = calibration_hypergraph(sweep, n, m)?;
        for &ell in &sweep.ells {
            if ell < sweep.k / 2 || ell + sweep.k / 2 > n {
                continue;
            }
            let g = KikuchiGraph::new(&h, ell)?;
            let kp = compute_params(&h, ell)?;
            let walk = WalkSearchConfig::desk(sweep.walk_len, walks_for_constant(&kp, sweep.walk_constant), 1, 1);
            let stream = RngStream::root(sweep.seed)
                .derive_named("calibration-walks")
                .derive((n * 1000 + ell) as u64);
            let count = birthday_trials(&g, &walk, sweep.starts, &stream)?;
            let rate = count.nontrivial as f64 / count.starts as f64;
            out.push(CalibrationPoint {
                n,
                ell,
                m,
                vertex_count: kp.vertex_count_f64(),
                average_degree: kp.average_degree_f64(),
                walks_per_attempt: walk.walks_per_attempt,
                count,
                rate,
            });
            if rate >= sweep.min_rate {
                return Ok(out);
            }
        }
    }
    Ok(out)
}
