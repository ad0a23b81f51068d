use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kxor_core::distinguisher::{DecisionReport, DistinguisherConfig, ThresholdRule, DESK_MAX_ROUNDS};
use kxor_core::experiment::{run_experiment_with, sha256_hex, ExperimentConfig, TrialRecord};
use kxor_core::hypergraph::HypergraphJson;
use kxor_core::instance::{
    sample_assignment, sample_null_signs, sample_planted_signs, sample_uniform_hypergraph, InstanceJson,
};
use kxor_core::kikuchi::{compute_params, KikuchiParams};
use kxor_core::params::{check_feasibility, derive_theorem_params, theorem_epsilon, TheoremConfig};
use kxor_core::walk::{harvest_distinct_covers_with, walks_for_constant, CoversFile, WalkSearchConfig};
use kxor_core::{distinguish, Error, Hypergraph, Label, Profile, RngStream, SignedInstance};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_HARVEST: u8 = 3;
const EXIT_INVALID: u8 = 4;

#[derive(Parser)]
#[command(
    name = "kxor",
    version,
    about = "Null vs planted kXOR distinguisher via Kikuchi-graph even covers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a hypergraph with Null or Planted signs.
    Gen(GenArgs),
    /// Harvest distinct even covers by closed-walk search.
    Harvest(HarvestArgs),
    /// Decide Null vs Planted from an instance and its covers.
    Distinguish(DistinguishArgs),
    /// Run repeated paired trials and write a report.
    Run(RunArgs),
    /// Evaluate the parameter inequalities for a size.
    Feasibility(FeasibilityArgs),
    /// Run the small-instance oracle checks.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelArg {
    Null,
    Planted,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Paper,
    Desk,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Paper => Profile::Paper,
            ProfileArg::Desk => Profile::Desk,
        }
    }
}

#[derive(Args)]
struct SizeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Edge count.
    #[arg(long, conflicts_with = "density")]
    m: Option<usize>,
    /// Density δ' with m = δ'·n^{k/2}·log2 n.
    #[arg(long)]
    density: Option<f64>,
}

impl SizeArgs {
    fn edge_count(&self) -> anyhow::Result<usize> {
        let mut cfg = ExperimentConfig::desk_reference(0, 0);
        cfg.n = self.n;
        cfg.k = self.k;
        cfg.m = self.m;
        cfg.density = self.density;
        Ok(cfg.edge_count()?)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    size: SizeArgs,
    #[arg(long, value_enum, default_value = "planted")]
    label: LabelArg,
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    #[arg(long, env = "KXOR_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HarvestArgs {
    /// Instance or hypergraph JSON.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    ell: usize,
    /// Walk length T; derived from ρ when absent.
    #[arg(long = "walk-len", short = 'T')]
    walk_len: Option<usize>,
    /// ρ for parameter derivation; defaults to the instance's ground truth.
    #[arg(long)]
    rho: Option<f64>,
    /// Walks per attempt L.
    #[arg(long, conflicts_with = "walk_constant")]
    walks: Option<u64>,
    /// C₁ in L = ⌈C₁·√N⌉.
    #[arg(long)]
    walk_constant: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Iteration cap R.
    #[arg(long)]
    max_iterations: Option<u64>,
    /// Number of distinct covers to collect.
    #[arg(long)]
    target: Option<usize>,
    #[arg(long, value_enum, default_value = "desk")]
    profile: ProfileArg,
    #[arg(long, env = "KXOR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Suppress progress lines on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct DistinguishArgs {
    /// Instance JSON with signs.
    #[arg(long, short)]
    input: PathBuf,
    /// Covers JSON from `harvest`.
    #[arg(long, short)]
    covers: PathBuf,
    #[arg(long)]
    ell: usize,
    /// Defaults to the instance's ground truth when it is planted.
    #[arg(long)]
    rho: Option<f64>,
    /// ε; the theorem value 10·log2(1/ρ)/log2 k when absent.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Cover-length parameter T; defaults to the covers file.
    #[arg(long = "walk-len", short = 'T')]
    walk_len: Option<usize>,
    /// `power:C`, `fixed:X` or `planted-fraction:F`.
    #[arg(long, value_parser = parse_threshold)]
    threshold: Option<ThresholdRule>,
    #[arg(long)]
    shatter_floor: Option<f64>,
    #[arg(long)]
    max_rounds: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, value_enum, default_value = "desk")]
    profile: ProfileArg,
    #[arg(long, env = "KXOR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON or TOML config merged over the desk reference point.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fixed hypergraph (or instance) JSON used by every trial.
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Edge count.
    #[arg(long, conflicts_with = "density")]
    m: Option<usize>,
    /// Density δ' with m = δ'·n^{k/2}·log2 n.
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// ε; the theorem value when absent.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Failure probability δ.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    #[arg(long, env = "KXOR_SEED")]
    seed: Option<u64>,
    /// Paired Null/Planted trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Walk length T.
    #[arg(long = "walk-len", short = 'T')]
    walk_len: Option<usize>,
    /// Walks per attempt L.
    #[arg(long, conflicts_with = "walk_constant")]
    walks: Option<u64>,
    /// C₁ in L = ⌈C₁·√N⌉.
    #[arg(long)]
    walk_constant: Option<f64>,
    /// Harvest iteration cap R.
    #[arg(long)]
    max_iterations: Option<u64>,
    /// Distinct covers to harvest per trial.
    #[arg(long)]
    target: Option<usize>,
    /// `power:C`, `fixed:X` or `planted-fraction:F`.
    #[arg(long, value_parser = parse_threshold)]
    threshold: Option<ThresholdRule>,
    /// Minimum shattered covers to keep.
    #[arg(long)]
    shatter_floor: Option<f64>,
    /// Report JSON; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Per-decision CSV summary.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Suppress progress lines on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct FeasibilityArgs {
    #[command(flatten)]
    size: SizeArgs,
    #[arg(long)]
    ell: usize,
    #[arg(long)]
    rho: f64,
    #[arg(long, value_enum, default_value = "paper")]
    profile: ProfileArg,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c_anti: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, env = "KXOR_SEED", default_value_t = 0)]
    seed: u64,
}

fn parse_threshold(s: &str) -> Result<ThresholdRule, String> {
    let (kind, value) = s.split_once(':').ok_or("expected RULE:VALUE")?;
    let x: f64 = value
        .parse()
        .map_err(|e| format!("bad threshold value {value:?}: {e}"))?;
    match kind {
        "power" => Ok(ThresholdRule::PowerOfN(x)),
        "fixed" => Ok(ThresholdRule::Fixed(x)),
        "planted-fraction" => Ok(ThresholdRule::PlantedMeanFraction(x)),
        _ => Err(format!("unknown threshold rule {kind:?}")),
    }
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<(T, Vec<u8>)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let value = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    Ok((value, bytes))
}

fn load_hypergraph(path: &Path) -> anyhow::Result<Hypergraph> {
    let (raw, _): (HypergraphJson, _) = read_json(path)?;
    let (h, norm) = Hypergraph::from_json_normalized(raw)?;
    if !norm.was_canonical {
        eprintln!("note: {} reordered to canonical edge order", path.display());
    }
    Ok(h)
}

fn gen(args: GenArgs) -> anyhow::Result<u8> {
    let m = args.size.edge_count()?;
    let stream = RngStream::root(args.seed);
    let h = sample_uniform_hypergraph(args.size.n, args.size.k, m, &stream.derive_named("hypergraph"))?;
    let inst = match args.label {
        LabelArg::Null => sample_null_signs(&h, &stream.derive_named("null")),
        LabelArg::Planted => {
            let z = sample_assignment(h.n(), &stream.derive_named("z"));
            sample_planted_signs(&h, &z, args.rho, &stream.derive_named("eta"))?
        }
    };
    emit(args.out.as_deref(), &serde_json::to_string(&inst.to_json())?)?;
    Ok(0)
}

fn instance_rho(path: &Path) -> Option<f64> {
    let (raw, _): (InstanceJson, _) = read_json(path).ok()?;
    raw.ground_truth.filter(|g| g.label == Label::Planted).map(|g| g.rho)
}

fn harvest(args: HarvestArgs) -> anyhow::Result<u8> {
    let h = load_hypergraph(&args.input)?;
    let kp = compute_params(&h, args.ell)?;
    let rho = args.rho.or_else(|| instance_rho(&args.input));
    let derived = rho
        .map(|r| derive_theorem_params(h.n(), h.k(), h.m(), args.ell, r, &TheoremConfig::default()))
        .transpose()?;
    let walk_len = match (args.walk_len, &derived) {
        (Some(t), _) => t,
        (None, Some(d)) if d.walk_len >= 1 => d.walk_len,
        _ => bail!(Error::InvalidInput("no admissible T: pass --walk-len".into())),
    };
    let mut cfg = match &derived {
        Some(d) => WalkSearchConfig::paper(&kp, walk_len, d.epsilon, TheoremConfig::default().delta),
        None => WalkSearchConfig::desk(walk_len, walks_for_constant(&kp, 3.0), 40_000, 2000),
    };
    cfg.profile = args.profile.into();
    if let Some(l) = args.walks {
        cfg.walks_per_attempt = l;
    }
    if let Some(c) = args.walk_constant {
        cfg.walks_per_attempt = walks_for_constant(&kp, c);
    }
    if let Some(b) = args.beta {
        cfg.beta = b;
    }
    if let Some(r) = args.max_iterations {
        cfg.max_iterations = r;
    }
    if let Some(t) = args.target {
        cfg.target_covers = t;
    }
    cfg.validate()?;
    if !args.quiet {
        eprintln!(
            "harvest: N = {}, d̄ = {:.3}, T = {}, L = {}, R = {}, target {}",
            kp.vertex_count,
            kp.average_degree_f64(),
            cfg.walk_len,
            cfg.walks_per_attempt,
            cfg.max_iterations,
            cfg.target_covers
        );
    }
    let g = kxor_core::KikuchiGraph::new(&h, args.ell)?;
    let quiet = args.quiet;
    let result = harvest_distinct_covers_with(
        &g,
        &cfg,
        &RngStream::root(args.seed).derive_named("harvest"),
        &mut |hv| {
            if !quiet && hv.iterations % 100 == 0 {
                eprintln!(
                    "iter {:>8}  success rate {:.3}  distinct covers {}",
                    hv.iterations,
                    hv.success_rate(),
                    hv.covers.len()
                );
            }
        },
    );
    let (hv, code) = match result {
        Ok(hv) => (hv, 0),
        Err(Error::InsufficientCovers { found, target, partial }) => {
            eprintln!("error: found {found} of {target} distinct even covers; writing the partial set");
            (*partial, EXIT_HARVEST)
        }
        Err(e) => return Err(e.into()),
    };
    if !quiet {
        eprintln!(
            "done: {} iterations, success rate {:.3}, {} distinct covers, {} trivial, {} duplicates",
            hv.iterations,
            hv.success_rate(),
            hv.covers.len(),
            hv.trivial_walks,
            hv.duplicate_covers
        );
    }
    let file = CoversFile::new(&hv.covers, hv.walk_len, args.seed);
    emit(args.out.as_deref(), &serde_json::to_string(&file)?)?;
    Ok(code)
}

fn distinguisher_config(
    args: &DistinguishArgs,
    kp: &KikuchiParams,
    k: usize,
    rho: f64,
    walk_len: usize,
) -> anyhow::Result<DistinguisherConfig> {
    let eps = args.epsilon.unwrap_or_else(|| theorem_epsilon(rho, k));
    let mut cfg = match args.profile {
        ProfileArg::Paper => DistinguisherConfig::paper(kp, walk_len, eps, args.delta, rho),
        ProfileArg::Desk => {
            let mut c = DistinguisherConfig::desk(kp, walk_len, eps, rho, args.max_rounds.unwrap_or(DESK_MAX_ROUNDS));
            c.delta = args.delta;
            c
        }
    };
    if let Some(s) = args.max_rounds {
        cfg.max_rounds = s;
    }
    if let Some(f) = args.shatter_floor {
        cfg.shatter_floor = f;
    }
    if let Some(t) = args.threshold {
        cfg.threshold = t;
    }
    if let Some(r) = args.repetitions {
        cfg.repetitions = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn distinguish_cmd(args: DistinguishArgs) -> anyhow::Result<u8> {
    let clock = Instant::now();
    let (raw, inst_bytes): (InstanceJson, _) = read_json(&args.input)?;
    let (cover_file, cover_bytes): (CoversFile, _) = read_json(&args.covers)?;
    let planted_rho = raw
        .ground_truth
        .as_ref()
        .filter(|g| g.label == Label::Planted)
        .map(|g| g.rho);
    let (inst, norm) = SignedInstance::from_json_normalized(raw)?;
    if !norm.was_canonical {
        eprintln!("note: {} reordered to canonical edge order", args.input.display());
    }
    let Some(rho) = args.rho.or(planted_rho) else {
        bail!(Error::InvalidInput(
            "--rho is required for instances without planted ground truth".into()
        ));
    };
    let h = &inst.hypergraph;
    let covers = cover_file.to_covers(h)?;
    let walk_len = args.walk_len.unwrap_or(cover_file.walk_len);
    let kp = compute_params(h, args.ell)?;
    let cfg = distinguisher_config(&args, &kp, h.k(), rho, walk_len)?;
    let report: DecisionReport = distinguish(
        &covers,
        &inst,
        &cfg,
        &RngStream::root(args.seed).derive_named("distinguish"),
    )?;
    let mut digest_input = inst_bytes;
    digest_input.extend_from_slice(&cover_bytes);
    let out = json!({
        "inputs_digest": sha256_hex(&digest_input),
        "derived": {
            "epsilon": cfg.epsilon,
            "T": cfg.walk_len,
            "N": kp.vertex_count.to_string(),
            "average_degree": kp.average_degree_f64(),
            "parts": cfg.parts(),
            "shatter_floor": cfg.effective_floor(),
            "max_rounds": cfg.max_rounds,
        },
        "config": cfg,
        "covers_in": covers.len(),
        "report": report,
        "wall_seconds": clock.elapsed().as_secs_f64(),
    });
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&out)?)?;
    Ok(0)
}

/// Recursively overlays `patch` onto `base`.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<ExperimentConfig> {
    let mut base = serde_json::to_value(ExperimentConfig::desk_reference(0, 10))?;
    if let Some(p) = path {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let patch: Value = if p.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?
        } else {
            serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?
        };
        if patch.get("m").is_none() && patch.get("density").is_some() {
            base["m"] = Value::Null;
        }
        merge(&mut base, patch);
    }
    serde_json::from_value(base).map_err(|e| Error::InvalidInput(format!("config: {e}")).into())
}

fn run(args: RunArgs) -> anyhow::Result<u8> {
    let mut cfg = load_config(args.config.as_deref())?;
    macro_rules! set {
        ($($flag:ident => $($field:ident).+),* $(,)?) => {
            $(if let Some(v) = args.$flag { cfg.$($field).+ = v.into(); })*
        };
    }
    set!(n => n, k => k, ell => ell, rho => rho, seed => seed, trials => trials, delta => theorem.delta);
    set!(max_iterations => desk.max_iterations, target => desk.target_covers, walk_len => desk.walk_len);
    set!(walks => desk.walks_per_attempt, walk_constant => desk.walk_constant, threshold => desk.threshold);
    set!(shatter_floor => desk.shatter_floor, epsilon => theorem.epsilon);
    if let Some(p) = args.profile {
        cfg.profile = p.into();
    }
    if let Some(m) = args.m {
        cfg.m = Some(m);
        cfg.density = None;
    }
    if let Some(d) = args.density {
        cfg.density = Some(d);
        cfg.m = None;
    }
    if args.walks.is_none() && args.walk_constant.is_some() {
        cfg.desk.walks_per_attempt = None;
    }
    let fixed = args.input.as_deref().map(load_hypergraph).transpose()?;
    let quiet = args.quiet;
    let report = run_experiment_with(&cfg, fixed.as_ref(), &mut |rec: &TrialRecord, phase| {
        if quiet {
            return;
        }
        let decisions: Vec<String> = rec
            .outcomes
            .iter()
            .map(|o| format!("{}→{:?}", o.label, o.decision))
            .collect();
        eprintln!(
            "trial {:>4}: {} covers in {} iterations, {} [{:.2}s]",
            rec.trial,
            rec.covers_found,
            rec.harvest_iterations,
            decisions.join(" "),
            phase.total()
        );
    })?;
    emit(args.out.as_deref(), &report.to_json_pretty()?)?;
    if let Some(path) = &args.csv {
        let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        report.write_csv(file)?;
    }
    let s = &report.body.summary;
    if !quiet {
        eprintln!(
            "accuracy {:.3} ({} of {} decisions), {} harvest failures, digest {}",
            s.accuracy, s.correct, s.decisions, s.harvest_failures, report.digest
        );
    }
    if !report.body.feasible {
        eprintln!("infeasible: no trials were run");
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(if report.any_harvest_failure() { EXIT_HARVEST } else { 0 })
}

fn feasibility(args: FeasibilityArgs) -> anyhow::Result<u8> {
    let m = args.size.edge_count()?;
    let mut theorem = TheoremConfig::default();
    theorem.epsilon = args.epsilon.or(theorem.epsilon);
    theorem.delta = args.delta.unwrap_or(theorem.delta);
    theorem.c_anti = args.c_anti.unwrap_or(theorem.c_anti);
    let f = check_feasibility(
        args.size.n,
        args.size.k,
        m,
        args.ell,
        args.rho,
        args.profile.into(),
        &theorem,
    )?;
    emit(None, &serde_json::to_string_pretty(&f)?)?;
    Ok(if f.feasible { 0 } else { EXIT_INFEASIBLE })
}

fn oracle(args: OracleArgs) -> anyhow::Result<u8> {
    let checks = kxor_core::lab::run_lab(args.seed)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{} checks, {failed} failed", checks.len());
    Ok(u8::from(failed > 0))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InsufficientCovers { .. }) => EXIT_HARVEST,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Harvest(a) => harvest(a),
        Command::Distinguish(a) => distinguish_cmd(a),
        Command::Run(a) => run(a),
        Command::Feasibility(a) => feasibility(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_rules_parse() {
        assert_eq!(parse_threshold("power:0.6"), Ok(ThresholdRule::PowerOfN(0.6)));
        assert_eq!(parse_threshold("fixed:3"), Ok(ThresholdRule::Fixed(3.0)));
        assert_eq!(
            parse_threshold("planted-fraction:0.5"),
            Ok(ThresholdRule::PlantedMeanFraction(0.5))
        );
        assert!(parse_threshold("power").is_err());
        assert!(parse_threshold("median:1").is_err());
        assert!(parse_threshold("fixed:x").is_err());
    }

    #[test]
    fn merge_overlays_nested_fields() {
        let mut base = json!({"n": 20, "desk": {"beta": 0.05, "max_rounds": 10}});
        merge(&mut base, json!({"n": 30, "desk": {"beta": 0.1}, "extra": true}));
        assert_eq!(
            base,
            json!({"n": 30, "desk": {"beta": 0.1, "max_rounds": 10}, "extra": true})
        );
    }

    #[test]
    fn default_config_is_reference_point() {
        assert_eq!(load_config(None).unwrap(), ExperimentConfig::desk_reference(0, 10));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
