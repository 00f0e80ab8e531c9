use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use attrition_core::policy::BordaScores;
use attrition_core::{static_dpf, CombatModel, CombatState, DpfTable, ModelKind, TargetSelectionPolicy, UnitCatalog};
use attrition_data::synth::{generate_dataset, generate_trace, planted_dpf, random_state, SynthConfig};
use attrition_data::{
    benchmark_models, cross_validate, dataset_stats, detect_combats, evaluate, filter_for_training, write_report_csv, CombatDataset, CvConfig,
    DetectConfig, DpfSource, FilterConfig, LearnConfig, ModelFile, ModelProvenance, PolicySource, ReportRow, Trace, MODEL_FORMAT_VERSION,
};
use attrition_tactics::{play_match, summarize, write_log, Agent, Game, MapFile, MatchConfig, MctsConfig, RegionGraph, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::{CliError, OrInvalid};

/// Version of the JSON envelope around report outputs.
const REPORT_FORMAT_VERSION: u32 = 1;

type CliResult<T = ()> = Result<T, CliError>;

struct Ctx {
    catalog: UnitCatalog,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
    invocation: Vec<String>,
}

impl Ctx {
    fn writer(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).or_invalid(format!("cannot create {}", p.display()))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    /// Report outputs: JSON wrapped with the format version and invocation, or plain CSV rows.
    fn report<R: Serialize>(&self, command: &str, result: Value, rows: &[R]) -> CliResult {
        let mut w = self.writer()?;
        match self.format {
            Format::Json => {
                let doc = json!({
                    "format_version": REPORT_FORMAT_VERSION,
                    "command": command,
                    "invocation": self.invocation,
                    "result": result,
                });
                serde_json::to_writer_pretty(&mut w, &doc)?;
                writeln!(w)?;
            }
            Format::Csv => {
                let mut out = csv::Writer::from_writer(&mut w);
                for r in rows {
                    out.serialize(r)?;
                }
                out.flush()?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Data-file outputs (datasets, traces, model files) are JSON only.
    fn json_only(&self, command: &str) -> CliResult {
        if self.format == Format::Csv {
            return Err(CliError::Validation(format!("{command} writes JSON files; --format csv is not available")));
        }
        Ok(())
    }

    fn invocation_string(&self) -> String {
        self.invocation.join(" ")
    }
}

pub fn run(cli: Cli) -> CliResult {
    let catalog = match &cli.catalog {
        Some(p) => UnitCatalog::load(p).or_invalid(format!("catalog {}", p.display()))?,
        None => UnitCatalog::starcraft(),
    };
    let mut invocation = vec!["attrition".to_string()];
    invocation.extend(std::env::args().skip(1));
    let ctx = Ctx { catalog, seed: cli.seed, out: cli.out, format: cli.format, invocation };
    match cli.command {
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Detect(a) => detect(&ctx, a),
        Command::Learn(a) => learn(&ctx, a),
        Command::Evaluate(a) => evaluate_cmd(&ctx, a),
        Command::Bench(a) => bench(&ctx, a),
        Command::Play(a) => play(&ctx, a),
        Command::Stats(a) => stats(&ctx, a),
        Command::GenSynthetic(a) => gen_synthetic(&ctx, a),
    }
}

fn parse_kind(s: &str) -> CliResult<ModelKind> {
    s.parse::<ModelKind>().or_invalid("--model")
}

fn load_dataset(path: &Path, catalog: &UnitCatalog) -> CliResult<CombatDataset> {
    let ds = CombatDataset::load(path).or_invalid(format!("dataset {}", path.display()))?;
    ds.validate(catalog).or_invalid(format!("dataset {}", path.display()))?;
    Ok(ds)
}

fn load_model_file(path: &Path, catalog: &UnitCatalog) -> CliResult<ModelFile> {
    let mf = ModelFile::load(path).or_invalid(format!("model file {}", path.display()))?;
    mf.check(catalog).or_invalid(format!("model file {}", path.display()))?;
    Ok(mf)
}

/// DPF table, target selection policy and a label for the DPF source.
fn parameters(ctx: &Ctx, p: &ParamArgs) -> CliResult<(DpfTable, TargetSelectionPolicy, &'static str)> {
    let mf = p.model_file.as_deref().map(|path| load_model_file(path, &ctx.catalog)).transpose()?;
    let policy_arg = p.policy.unwrap_or(if mf.is_some() { PolicyArg::Borda } else { PolicyArg::DestroyScore });
    let policy = match (policy_arg, &mf) {
        (PolicyArg::DestroyScore, _) => TargetSelectionPolicy::DestroyScore,
        (PolicyArg::Random, _) => TargetSelectionPolicy::Random { seed: ctx.seed },
        (PolicyArg::Borda, Some(mf)) => mf.policy()?,
        (PolicyArg::Borda, None) => return Err(CliError::Validation("--policy borda needs --model-file".into())),
    };
    Ok(match mf {
        Some(mf) => (mf.dpf_matrix, policy, "learned"),
        None => (static_dpf(&ctx.catalog), policy, "static"),
    })
}

#[derive(Serialize)]
struct SimulateRow {
    model: String,
    policy: String,
    winner: String,
    duration_frames: f64,
    survivors_a: usize,
    survivors_b: usize,
}

fn simulate(ctx: &Ctx, a: SimulateArgs) -> CliResult {
    let kind = parse_kind(&a.model)?;
    let text = fs::read_to_string(&a.state).or_invalid(format!("state {}", a.state.display()))?;
    let raw: CombatState = serde_json::from_str(&text).or_invalid(format!("state {}", a.state.display()))?;
    let state = CombatState::new(raw.army_a, raw.army_b).or_invalid("state")?;
    state.validate(&ctx.catalog).or_invalid("state")?;
    let (table, policy, _) = parameters(ctx, &a.params)?;
    let model = CombatModel::new(kind, table, policy);
    let out = model.simulate(&ctx.catalog, &state);
    let row = SimulateRow {
        model: kind.name().into(),
        policy: model.policy.name().into(),
        winner: serde_json::to_value(out.winner)?.as_str().unwrap_or_default().to_string(),
        duration_frames: out.duration_frames,
        survivors_a: out.survivors_a.len(),
        survivors_b: out.survivors_b.len(),
    };
    ctx.report("simulate", serde_json::to_value(&out)?, &[row])
}

fn detect(ctx: &Ctx, a: DetectArgs) -> CliResult {
    ctx.json_only("detect")?;
    let cfg = DetectConfig { peace_window: a.peace_window };
    let mut records = Vec::new();
    for path in &a.traces {
        let file = File::open(path).or_invalid(format!("trace {}", path.display()))?;
        let trace = Trace::read(BufReader::new(file)).or_invalid(format!("trace {}", path.display()))?;
        records.extend(detect_combats(&trace.events, &ctx.catalog, &cfg).or_invalid(format!("trace {}", path.display()))?);
    }
    let ds = CombatDataset::new(ctx.catalog.catalog_id.clone(), ctx.invocation_string(), records);
    let mut w = ctx.writer()?;
    w.write_all(ds.to_json().as_bytes())?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn learn(ctx: &Ctx, a: LearnArgs) -> CliResult {
    ctx.json_only("learn")?;
    let mut ds = load_dataset(&a.dataset, &ctx.catalog)?;
    if !a.no_filter {
        ds = filter_for_training(&ds, &FilterConfig::for_catalog(&ctx.catalog));
    }
    let mf = ModelFile::learn(&ds, &ctx.catalog, &LearnConfig { include_passive: a.include_passive })?;
    let mut w = ctx.writer()?;
    w.write_all(mf.to_json().as_bytes())?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn evaluate_cmd(ctx: &Ctx, a: EvaluateArgs) -> CliResult {
    let kinds = a.models.iter().map(|m| parse_kind(m)).collect::<CliResult<Vec<_>>>()?;
    let mut ds = load_dataset(&a.dataset, &ctx.catalog)?;
    if !a.no_filter {
        ds = filter_for_training(&ds, &FilterConfig::for_catalog(&ctx.catalog));
    }
    if ds.is_empty() {
        return Err(CliError::Validation("dataset has no records left to evaluate".into()));
    }
    match a.cv {
        Some(folds) => {
            if folds < 2 || folds > ds.len() {
                return Err(CliError::Validation(format!("--cv {folds}: need 2..={} folds", ds.len())));
            }
            let (table, policy, _) = parameters(ctx, &a.params)?;
            let cfg = CvConfig {
                folds,
                seed: ctx.seed,
                learn: LearnConfig::default(),
                dpf: if a.static_dpf || a.params.model_file.is_some() { DpfSource::Fixed(table) } else { DpfSource::Learned },
                policy: if a.params.policy.is_some() || a.params.model_file.is_some() { PolicySource::Fixed(policy) } else { PolicySource::Learned },
            };
            let rows = cross_validate(&ds, &ctx.catalog, &kinds, &cfg)?;
            let report: Vec<ReportRow> = rows.iter().map(ReportRow::from).collect();
            csv_or_json(ctx, "evaluate", json!({ "cross_validation": rows, "rows": report }), &report)
        }
        None => {
            let (table, policy, label) = parameters(ctx, &a.params)?;
            let mut reports = Vec::new();
            for kind in kinds {
                reports.push(evaluate(&CombatModel::new(kind, table.clone(), policy.clone()), &ds, &ctx.catalog, label)?);
            }
            let report: Vec<ReportRow> = reports.iter().map(ReportRow::from).collect();
            csv_or_json(ctx, "evaluate", json!({ "reports": reports, "rows": report }), &report)
        }
    }
}

fn csv_or_json(ctx: &Ctx, command: &str, result: Value, rows: &[ReportRow]) -> CliResult {
    if ctx.format == Format::Csv {
        let mut w = ctx.writer()?;
        write_report_csv(rows, &mut w)?;
        w.flush()?;
        return Ok(());
    }
    ctx.report(command, result, rows)
}

#[derive(Serialize)]
struct BenchCsvRow {
    model: String,
    combats: usize,
    median_s: f64,
    ratio_vs_slowest: f64,
    reps: usize,
}

fn bench(ctx: &Ctx, a: BenchArgs) -> CliResult {
    let kinds = a.models.iter().map(|m| parse_kind(m)).collect::<CliResult<Vec<_>>>()?;
    if a.reps < 3 {
        return Err(CliError::Validation(format!("--reps {}: at least 3 are needed", a.reps)));
    }
    let states: Vec<CombatState> = match &a.dataset {
        Some(p) => load_dataset(p, &ctx.catalog)?.records.iter().map(|r| r.initial_state()).collect::<Result<_, _>>()?,
        None => {
            let cfg = SynthConfig::new(&ctx.catalog, a.combats, ctx.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            (0..a.combats).map(|_| random_state(&mut rng, &ctx.catalog, &cfg, 1, 0.0)).collect()
        }
    };
    let (table, policy, _) = parameters(ctx, &a.params)?;
    let models: Vec<(String, CombatModel)> = kinds.iter().map(|&k| (k.name().to_string(), CombatModel::new(k, table.clone(), policy.clone()))).collect();
    let rows = benchmark_models(&models, &states, &ctx.catalog, a.reps)?;
    let csv_rows: Vec<BenchCsvRow> = rows
        .iter()
        .map(|r| BenchCsvRow { model: r.name.clone(), combats: states.len(), median_s: r.median_s, ratio_vs_slowest: r.ratio_vs_slowest, reps: r.reps.len() })
        .collect();
    ctx.report("bench", json!({ "combats": states.len(), "rows": rows }), &csv_rows)
}

fn play(ctx: &Ctx, a: PlayArgs) -> CliResult {
    let kind = parse_kind(&a.model)?;
    let map = match &a.map {
        Some(p) => MapFile::load(p).or_invalid(format!("map {}", p.display()))?,
        None => MapFile::ring6(),
    };
    let scenario = match &a.scenario {
        Some(p) => Scenario::load(p).or_invalid(format!("scenario {}", p.display()))?,
        None => Scenario::ring6_skirmish(),
    };
    let graph = RegionGraph::build(&map, scenario.abstraction.with_chokepoints()).or_invalid("map")?;
    let initial = scenario.initial_state(&graph, &ctx.catalog).or_invalid("scenario")?;
    for w in &initial.warnings {
        eprintln!("warning: {w}");
    }
    let mcts = MctsConfig {
        epsilon: a.epsilon,
        max_tree_depth: a.depth,
        playout_length: a.playout_length,
        playout_budget: a.budget,
        plan_interval: a.plan_interval,
        ..MctsConfig::default()
    };
    mcts.validate().or_invalid("search settings")?;
    if a.games == 0 || a.plan_interval == 0 {
        return Err(CliError::Validation("--games and --plan-interval must be positive".into()));
    }
    let agent_a = Agent::parse(&a.a, &mcts).or_invalid("--a")?;
    let agent_b = Agent::parse(&a.b, &mcts).or_invalid("--b")?;
    let (table, policy, _) = parameters(ctx, &a.params)?;
    let game = Game::new(ctx.catalog.clone(), graph, CombatModel::new(kind, table, policy));
    let cfg = MatchConfig { max_frames: a.max_frames, plan_interval: a.plan_interval };
    let mut log = match &a.log {
        Some(p) => Some(BufWriter::new(File::create(p).or_invalid(format!("cannot create {}", p.display()))?)),
        None => None,
    };
    let mut results = Vec::with_capacity(a.games);
    for g in 0..a.games {
        let r = play_match(&game, &initial.state, &agent_a, &agent_b, &cfg, ctx.seed.wrapping_add(g as u64))?;
        if let Some(w) = log.as_mut() {
            writeln!(w, "{}", json!({ "game": g, "seed": r.seed, "winner": r.winner, "length": r.length, "final_eval": r.final_eval }))?;
            write_log(&r.log, &mut *w)?;
        }
        results.push(r);
    }
    if let Some(mut w) = log {
        w.flush()?;
    }
    let summary = summarize(agent_a.name(), agent_b.name(), kind.name(), &results);
    ctx.report("play", json!({ "summary": summary, "games": results }), &[summary.clone()])
}

#[derive(Serialize)]
struct StatsCsvRow {
    records: usize,
    length_mean: f64,
    length_min: f64,
    length_max: f64,
    units_mean: f64,
    units_min: f64,
    units_max: f64,
    types_mean: f64,
    types_min: f64,
    types_max: f64,
}

fn stats(ctx: &Ctx, a: StatsArgs) -> CliResult {
    let ds = load_dataset(&a.dataset, &ctx.catalog)?;
    let s = dataset_stats(&ds);
    let row = StatsCsvRow {
        records: s.records,
        length_mean: s.length.mean,
        length_min: s.length.min,
        length_max: s.length.max,
        units_mean: s.units.mean,
        units_min: s.units.min,
        units_max: s.units.max,
        types_mean: s.types.mean,
        types_min: s.types.min,
        types_max: s.types.max,
    };
    ctx.report("stats", serde_json::to_value(&s)?, &[row])
}

fn gen_synthetic(ctx: &Ctx, a: GenArgs) -> CliResult {
    ctx.json_only("gen-synthetic")?;
    if a.max_types == 0 || a.max_units == 0 {
        return Err(CliError::Validation("--max-types and --max-units must be positive".into()));
    }
    if !(0.0 < a.dpf_lo && a.dpf_lo < a.dpf_hi) {
        return Err(CliError::Validation(format!("need 0 < --dpf-lo < --dpf-hi, got {} and {}", a.dpf_lo, a.dpf_hi)));
    }
    let policy = match a.policy {
        PolicyArg::DestroyScore => TargetSelectionPolicy::DestroyScore,
        PolicyArg::Random => TargetSelectionPolicy::Random { seed: ctx.seed },
        PolicyArg::Borda => return Err(CliError::Validation("gen-synthetic supports destroy-score and random targeting".into())),
    };
    let rates = if a.static_dpf { static_dpf(&ctx.catalog) } else { planted_dpf(&ctx.catalog, ctx.seed, a.dpf_lo, a.dpf_hi) };
    let cfg = SynthConfig { max_types_per_army: a.max_types, max_units_per_army: a.max_units, ..SynthConfig::new(&ctx.catalog, a.records, ctx.seed) };
    let source = ctx.invocation_string();
    let mut w = ctx.writer()?;
    match a.kind {
        GenKind::Dataset => {
            let ds = generate_dataset(&ctx.catalog, &rates, &policy, &cfg, &source);
            w.write_all(ds.to_json().as_bytes())?;
            writeln!(w)?;
        }
        GenKind::Trace => generate_trace(&ctx.catalog, &rates, &policy, &cfg, a.gap).0.write(&mut w)?,
    }
    w.flush()?;
    if let Some(path) = &a.truth_out {
        let truth = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            catalog_ref: ctx.catalog.catalog_id.clone(),
            dpf_matrix: rates,
            borda_scores: BordaScores::uniform(vec![0.0; ctx.catalog.len()]),
            provenance: ModelProvenance { dataset_source: source, records: a.records, include_passive: false, unobserved_pairs: Vec::new() },
        };
        truth.save(path).or_invalid(format!("cannot write {}", path.display()))?;
    }
    Ok(())
}
