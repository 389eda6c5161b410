//! `typecyk`: induce grammars from typed treebanks, parse with or without
//! type pruning, and run the cast-recovery and informal baselines.
//!
//! Exit codes: 0 success, 1 domain failure, 2 usage or configuration error.

pub mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{existing, RunConfig};
use typecyk_core::baselines::{
    parse_wsd_tsv, pattern_stats, wsd_evaluate, wsd_train, Fallback, NormalizeConfig, Normalizer,
};
use typecyk_core::chart::{parse, OovPolicy, ParseConfig, PruningHook, TypedPruningHook};
use typecyk_core::experiment::{
    ambiguate_corpus, run_experiment, AmbiguationSpec, ExperimentConfig, ExperimentError, HookMode,
};
use typecyk_core::json::to_canonical_string;
use typecyk_core::pcfg::{binarize_tree, induce_with, DEFAULT_MAX_UNARY_CHAIN};
use typecyk_core::treebank::{load_treebank, render_treebank, TreebankEntry};
use typecyk_core::{Grammar, RawTree, Signature};

/// Failed runs whose parse failures exceed this share exit with 1.
pub const MAX_FAILURE_RATE: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(name = "typecyk", version, about = "Typed probabilistic parsing of formal mathematics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Induce a PCFG from a labeled treebank and write its rule dump.
    Induce(InduceArgs),
    /// Parse token sequences with a grammar dump.
    Parse(ParseArgs),
    /// Erase casts and merge symbols in a treebank.
    Ambiguate(AmbiguateArgs),
    /// Run the cast-recovery experiment and write report.json.
    Evaluate(EvaluateArgs),
    /// Train and score the most-frequent-sense baseline.
    Wsd(WsdArgs),
    /// Count normalized proof-sentence patterns.
    Patterns(PatternsArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: all processors).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ParserFlags {
    #[arg(long)]
    k: Option<usize>,
    /// none | typed
    #[arg(long)]
    hook: Option<String>,
    #[arg(long)]
    max_unary_chain: Option<usize>,
    /// fail | open_class
    #[arg(long)]
    oov_policy: Option<String>,
    /// Keep only this many labels per chart cell (approximate).
    #[arg(long)]
    beam: Option<usize>,
}

#[derive(Debug, Args)]
struct SpecFlags {
    /// Comma-separated casts to erase, e.g. `&,Cx`.
    #[arg(long)]
    casts: Option<String>,
    /// Comma-separated merges `name=surface`, e.g. `plus_r=+,plus_c=+`.
    #[arg(long)]
    merge: Option<String>,
}

#[derive(Debug, Args)]
struct InduceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    treebank: Option<PathBuf>,
    #[arg(long)]
    signature: Option<PathBuf>,
    #[arg(long)]
    max_unary_chain: Option<usize>,
    /// Grammar dump path (default: <output_dir>/grammar.txt).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParseArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    grammar: Option<PathBuf>,
    /// Required by the typed hook.
    #[arg(long)]
    signature: Option<PathBuf>,
    #[command(flatten)]
    parser: ParserFlags,
    #[command(flatten)]
    spec: SpecFlags,
    /// Only accept parses rooted at this label.
    #[arg(long)]
    root: Option<String>,
    /// One whitespace-tokenized sentence per line.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tokens of a single sentence.
    tokens: Vec<String>,
}

#[derive(Debug, Args)]
struct AmbiguateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    treebank: Option<PathBuf>,
    #[arg(long)]
    signature: Option<PathBuf>,
    #[command(flatten)]
    spec: SpecFlags,
    /// Output treebank (default: <output_dir>/ambiguated.treebank).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    treebank: Option<PathBuf>,
    #[arg(long)]
    signature: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[command(flatten)]
    parser: ParserFlags,
    #[command(flatten)]
    spec: SpecFlags,
    #[arg(long)]
    require_gold_root: Option<bool>,
    /// 0 evaluates on the training data.
    #[arg(long)]
    test_ratio: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct WsdArgs {
    #[command(flatten)]
    common: Common,
    /// Training TSV `token<TAB>sense`.
    #[arg(long)]
    train: PathBuf,
    /// Test TSV; defaults to the training file.
    #[arg(long)]
    test: Option<PathBuf>,
    /// global | abstain
    #[arg(long)]
    fallback: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PatternsArgs {
    #[command(flatten)]
    common: Common,
    /// One sentence per line.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Comma-separated reference keywords.
    #[arg(long)]
    ref_keywords: Option<String>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn usage<E: ToString>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain<E: ToString>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Induce(a) => induce(a, out),
        Command::Parse(a) => parse_cmd(a, out),
        Command::Ambiguate(a) => ambiguate_cmd(a, out),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Wsd(a) => wsd(a, out),
        Command::Patterns(a) => patterns(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let (Failure::Usage(m) | Failure::Domain(m)) = &f;
            let _ = writeln!(err, "error: {m}");
            f.code()
        }
    }
}

fn base_config(common: &Common) -> Result<RunConfig, Failure> {
    let cfg = match &common.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    Ok(cfg.overlay(RunConfig {
        jobs: common.jobs,
        ..Default::default()
    }))
}

fn parser_overrides(p: &ParserFlags) -> RunConfig {
    RunConfig {
        k: p.k,
        hook: p.hook.clone(),
        max_unary_chain: p.max_unary_chain,
        oov_policy: p.oov_policy.clone(),
        beam: p.beam,
        ..Default::default()
    }
}

fn spec_overrides(s: &SpecFlags) -> Result<RunConfig, Failure> {
    let cast_set = s
        .casts
        .as_ref()
        .map(|c| c.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect());
    let merge_map = match &s.merge {
        None => None,
        Some(m) => {
            let mut map = BTreeMap::new();
            for pair in m.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                let (a, b) = pair
                    .split_once('=')
                    .ok_or_else(|| usage(format!("bad merge `{pair}`, expected name=surface")))?;
                map.insert(a.trim().to_string(), b.trim().to_string());
            }
            Some(map)
        }
    };
    Ok(RunConfig {
        cast_set,
        merge_map,
        ..Default::default()
    })
}

fn hook_mode(cfg: &RunConfig) -> Result<HookMode, Failure> {
    match cfg.hook.as_deref().unwrap_or("typed") {
        "typed" => Ok(HookMode::Typed),
        "none" => Ok(HookMode::None),
        other => Err(usage(format!("hook must be `none` or `typed`, got `{other}`"))),
    }
}

fn oov_policy(cfg: &RunConfig) -> Result<OovPolicy, Failure> {
    match cfg.oov_policy.as_deref().unwrap_or("fail") {
        "fail" => Ok(OovPolicy::Fail),
        "open_class" => Ok(OovPolicy::OpenClass),
        other => Err(usage(format!("oov_policy must be `fail` or `open_class`, got `{other}`"))),
    }
}

fn ambiguation_spec(cfg: &RunConfig) -> AmbiguationSpec {
    AmbiguationSpec {
        cast_set: cfg.cast_set.clone().unwrap_or_default().into_iter().collect(),
        merge_map: cfg.merge_map.clone().unwrap_or_default(),
    }
}

fn load_signature(cfg: &RunConfig, required: bool) -> Result<Signature, Failure> {
    if cfg.signature.is_none() && !required {
        return Ok(Signature::new());
    }
    let path = existing(&cfg.signature, "signature").map_err(Failure::Usage)?;
    Signature::load(&path).map_err(domain)
}

fn load_entries(cfg: &RunConfig, sig: &Signature) -> Result<Vec<TreebankEntry>, Failure> {
    let path = existing(&cfg.treebank, "treebank").map_err(Failure::Usage)?;
    load_treebank(&path, sig).map_err(|e| match e {
        typecyk_core::treebank::TreebankError::Parse(lines) => Failure::Domain(
            lines
                .iter()
                .map(|l| format!("{}:{}: {}", path.display(), l.line, l.message))
                .collect::<Vec<_>>()
                .join("\n"),
        ),
        other => domain(other),
    })
}

fn output_path(explicit: &Option<PathBuf>, cfg: &RunConfig, default_name: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| {
        cfg.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("."))
            .join(default_name)
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    write_atomic(path, contents).map_err(|e| domain(format!("cannot write {}: {e}", path.display())))
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(domain)?;
    Ok(pool.install(f))
}

fn induce(a: InduceArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = base_config(&a.common)?.overlay(RunConfig {
        treebank: a.treebank,
        signature: a.signature,
        max_unary_chain: a.max_unary_chain,
        output_dir: a.output_dir,
        ..Default::default()
    });
    let sig = load_signature(&cfg, false)?;
    let entries = load_entries(&cfg, &sig)?;
    let trees: Vec<RawTree> = entries.iter().map(|e| binarize_tree(&e.gold_tree)).collect();
    let g = induce_with(&trees, cfg.max_unary_chain.unwrap_or(DEFAULT_MAX_UNARY_CHAIN)).map_err(domain)?;
    let path = output_path(&a.out, &cfg, "grammar.txt");
    write_file(&path, &g.dump())?;
    let _ = writeln!(
        out,
        "{} rules, {} nonterminals, {} terminals -> {}",
        g.rules().len(),
        g.nonterminals().len(),
        g.terminals().len(),
        path.display()
    );
    Ok(())
}

fn parse_cmd(a: ParseArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = base_config(&a.common)?
        .overlay(spec_overrides(&a.spec)?)
        .overlay(parser_overrides(&a.parser))
        .overlay(RunConfig {
            grammar: a.grammar,
            signature: a.signature,
            ..Default::default()
        });
    let gpath = existing(&cfg.grammar, "grammar").map_err(Failure::Usage)?;
    let text = std::fs::read_to_string(&gpath).map_err(domain)?;
    let g = Grammar::load_dump(&text, cfg.max_unary_chain.unwrap_or(DEFAULT_MAX_UNARY_CHAIN)).map_err(domain)?;
    let sentences: Vec<Vec<String>> = match &a.input {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?
            .lines()
            .map(|l| l.split_whitespace().map(String::from).collect::<Vec<_>>())
            .filter(|t| !t.is_empty())
            .collect(),
        None if !a.tokens.is_empty() => vec![a.tokens.clone()],
        None => return Err(usage("no input: pass tokens or --input")),
    };
    let hook = match hook_mode(&cfg)? {
        HookMode::Typed if cfg.signature.is_some() => {
            let sig = load_signature(&cfg, true)?;
            let merged = ambiguation_spec(&cfg).merged_signature(&sig).map_err(usage)?;
            Some(TypedPruningHook::new(merged))
        }
        HookMode::Typed if a.parser.hook.is_some() => {
            return Err(usage("the typed hook needs --signature"));
        }
        _ => None,
    };
    let pc = ParseConfig {
        k: cfg.k.unwrap_or(1),
        oov_policy: oov_policy(&cfg)?,
        root: a.root.clone(),
        beam: cfg.beam,
        cell_width: None,
    };
    let hook_ref = hook.as_ref().map(|h| h as &dyn PruningHook);
    let results = with_pool(cfg.jobs, || {
        use rayon::prelude::*;
        sentences
            .par_iter()
            .map(|s| parse(&g, s, &pc, hook_ref))
            .collect::<Vec<_>>()
    })?;
    let mut text = String::new();
    let mut failed = 0;
    for (s, r) in sentences.iter().zip(results) {
        let r = r.map_err(usage)?;
        text.push_str(&format!("# {}\n", s.join(" ")));
        if r.trees.is_empty() {
            failed += 1;
            text.push_str(&format!("{}\n", r.status.as_str()));
        }
        for (i, (t, lp)) in r.trees.iter().enumerate() {
            text.push_str(&format!("{}\t{lp:.6}\t{t}\n", i + 1));
        }
    }
    match &a.out {
        Some(p) => write_file(p, &text)?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if failed * 2 > sentences.len() {
        return Err(domain(format!("{failed} of {} sentences failed to parse", sentences.len())));
    }
    Ok(())
}

fn ambiguate_cmd(a: AmbiguateArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = base_config(&a.common)?
        .overlay(spec_overrides(&a.spec)?)
        .overlay(RunConfig {
            treebank: a.treebank,
            signature: a.signature,
            output_dir: a.output_dir,
            ..Default::default()
        });
    let sig = load_signature(&cfg, true)?;
    let spec = ambiguation_spec(&cfg);
    spec.merged_signature(&sig).map_err(usage)?;
    let entries = load_entries(&cfg, &sig)?;
    let (amb, invalid) = ambiguate_corpus(&entries, &sig, &spec).map_err(experiment_failure)?;
    let path = output_path(&a.out, &cfg, "ambiguated.treebank");
    write_file(&path, &render_treebank(amb.iter().map(|e| (e.id.as_str(), &e.tree))))?;
    let _ = writeln!(out, "{} entries ({} skipped) -> {}", amb.len(), invalid.len(), path.display());
    Ok(())
}

fn experiment_failure(e: ExperimentError) -> Failure {
    match e {
        ExperimentError::TooManyInvalid { total, invalid } => {
            let mut msg = format!("{} of {total} entries failed validation:", invalid.len());
            for (id, reason) in invalid {
                msg.push_str(&format!("\n  {id}: {reason}"));
            }
            Failure::Domain(msg)
        }
        ExperimentError::InvalidK(_) | ExperimentError::BadRatio(_) | ExperimentError::Spec(_) => usage(e),
        ExperimentError::Split(_) => usage(e),
        other => domain(other),
    }
}

fn evaluate(a: EvaluateArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = base_config(&a.common)?
        .overlay(spec_overrides(&a.spec)?)
        .overlay(parser_overrides(&a.parser))
        .overlay(RunConfig {
            treebank: a.treebank,
            signature: a.signature,
            output_dir: a.output_dir,
            require_gold_root: a.require_gold_root,
            test_ratio: a.test_ratio,
            seed: a.seed,
            ..Default::default()
        });
    let sig = load_signature(&cfg, true)?;
    let entries = load_entries(&cfg, &sig)?;
    let defaults = ExperimentConfig::default();
    let ec = ExperimentConfig {
        k: cfg.k.unwrap_or(defaults.k),
        seed: cfg.seed.unwrap_or(defaults.seed),
        test_ratio: cfg.test_ratio.unwrap_or(defaults.test_ratio),
        hook: hook_mode(&cfg)?,
        require_gold_root: cfg.require_gold_root.unwrap_or(defaults.require_gold_root),
        max_unary_chain: cfg.max_unary_chain.unwrap_or(defaults.max_unary_chain),
        oov_policy: oov_policy(&cfg)?,
        beam: cfg.beam,
        jobs: cfg.jobs,
    };
    let report = run_experiment(&entries, &ambiguation_spec(&cfg), &sig, &ec).map_err(experiment_failure)?;
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    write_file(&dir.join("report.json"), &report.to_canonical_json())?;
    let table = report.render_table();
    write_file(&dir.join("report.txt"), &table)?;
    let _ = out.write_all(table.as_bytes());
    if report.failure_rate() > MAX_FAILURE_RATE {
        return Err(domain(format!(
            "{:.0}% of test sentences had no parse",
            100.0 * report.failure_rate()
        )));
    }
    Ok(())
}

fn read_tsv(path: &Path) -> Result<Vec<(String, String)>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_wsd_tsv(&text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn wsd(a: WsdArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = base_config(&a.common)?.overlay(RunConfig {
        fallback: a.fallback,
        ..Default::default()
    });
    let fallback = match cfg.fallback.as_deref().unwrap_or("global") {
        "global" => Fallback::Global,
        "abstain" => Fallback::Abstain,
        other => return Err(usage(format!("fallback must be `global` or `abstain`, got `{other}`"))),
    };
    let train = read_tsv(&a.train)?;
    let test = match &a.test {
        Some(p) => read_tsv(p)?,
        None => train.clone(),
    };
    let table = wsd_train(&train).map_err(domain)?;
    let score = wsd_evaluate(&table, &test, fallback).map_err(domain)?;
    let v = json!({
        "fallback": if fallback == Fallback::Global { "global" } else { "abstain" },
        "total": score.total,
        "attempted": score.attempted,
        "correct": score.correct,
        "accuracy": score.accuracy,
        "coverage": score.coverage,
        "global_sense": table.global_sense(),
    });
    let text = to_canonical_string(&v);
    match &a.out {
        Some(p) => write_file(p, &text),
        None => {
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn patterns(a: PatternsArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = base_config(&a.common)?.overlay(RunConfig {
        output_dir: a.output_dir,
        ref_keywords: a
            .ref_keywords
            .map(|k| k.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()),
        ..Default::default()
    });
    let defaults = NormalizeConfig::default();
    let normalizer = Normalizer::new(NormalizeConfig {
        math_delims: cfg.math_delims.clone().unwrap_or(defaults.math_delims),
        ref_keywords: cfg.ref_keywords.clone().unwrap_or(defaults.ref_keywords),
    })
    .map_err(usage)?;
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.input.display())))?;
    let sentences: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let stats = with_pool(cfg.jobs, || pattern_stats(&sentences, &normalizer))?;
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    write_file(&dir.join("patterns.tsv"), &stats.to_tsv())?;
    write_file(&dir.join("patterns.json"), &stats.to_canonical_json())?;
    let _ = writeln!(
        out,
        "{} sentences, {} patterns, {} unterminated math spans",
        stats.total_sentences,
        stats.patterns.len(),
        stats.unterminated_math
    );
    Ok(())
}
