//! Command-line front end.
//!
//! Every subcommand prints one JSON run report on standard output and
//! writes its artifacts to files. Exit status: 0 on success, 1 for invalid
//! configuration or an unscorable evaluation, 2 when the input cannot be
//! read or parsed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classes::{create_classes, TypeClassMap};
use crate::error::Error;
use crate::eval::{extract_gold, remap_gold, score_classes};
use crate::export;
use crate::graph::{parse_ntriples_str, Graph, ParseOptions, RDF_TYPE};
use crate::naming::name_classes;
use crate::similarity::{run_sim_measure, IterationParams, MatchingMode, PairNormalization, SimilarityRun};
use crate::summary::{
    build_summary_graph, find_optimum_epsilon, FavorabilityReport, ThresholdSearch, ThresholdSearchParams,
};

pub const LOG_ENV: &str = "RDF_SUMMARIZE_LOG";

#[derive(Debug, Parser)]
#[command(name = "rdf-summarize", version, about = "Discover entity type classes and summary graphs in RDF data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the summary graph and write it in the requested format.
    Summarize(RunArgs),
    /// Search the class dissimilarity threshold and write the favorability trace.
    FindThreshold(RunArgs),
    /// Score the generated classes against gold type assertions.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// N-Triples file holding gold type assertions (default: the input).
    #[arg(long)]
    pub gold: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Dot,
    Nt,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Dot => "dot",
            OutputFormat::Nt => "nt",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatchingArg {
    Exact,
    Greedy,
    Auto,
}

impl From<MatchingArg> for MatchingMode {
    fn from(m: MatchingArg) -> Self {
        match m {
            MatchingArg::Exact => MatchingMode::Exact,
            MatchingArg::Greedy => MatchingMode::Greedy,
            MatchingArg::Auto => MatchingMode::Auto,
        }
    }
}

/// Flags shared by all subcommands. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// N-Triples input (`.gz` is decompressed).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Optional key=value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Artifact path (summary, trace CSV or evaluation report).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub ict: Option<f64>,
    /// Fixed class dissimilarity threshold.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Pick the threshold by favorability search (default when no --epsilon).
    #[arg(long)]
    pub auto_epsilon: bool,
    #[arg(long)]
    pub min_eps: Option<f64>,
    #[arg(long)]
    pub max_eps: Option<f64>,
    #[arg(long)]
    pub tries: Option<usize>,
    #[arg(long)]
    pub ect: Option<f64>,
    #[arg(long, value_enum)]
    pub matching: Option<MatchingArg>,
    #[arg(long)]
    pub noise_fraction: Option<f64>,
    #[arg(long)]
    pub type_predicate: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Final similarity matrix as CSV (gzip when the path ends in .gz).
    #[arg(long)]
    pub dump_similarity: Option<PathBuf>,
    /// Per-pair descriptor weights as CSV.
    #[arg(long)]
    pub dump_weights: Option<PathBuf>,
    /// Favorability trace of the threshold search as CSV.
    #[arg(long)]
    pub dump_trace: Option<PathBuf>,
    /// Drop type-predicate triples before computing similarities.
    #[arg(long)]
    pub exclude_type_predicate: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Fail on malformed input lines instead of skipping them.
    #[arg(long)]
    pub strict: bool,
    /// Scale neighborhood sums by 1/|L(u) ∪ L(v)| instead of the Jaccard ratio.
    #[arg(long)]
    pub union_normalization: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub iteration: IterationParams,
    pub epsilon: Option<f64>,
    pub search: ThresholdSearchParams,
    pub type_predicate: String,
    pub format: OutputFormat,
    pub dump_similarity: Option<PathBuf>,
    pub dump_weights: Option<PathBuf>,
    pub dump_trace: Option<PathBuf>,
    pub exclude_type_predicate: bool,
    pub threads: Option<usize>,
    pub strict: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            output: None,
            iteration: IterationParams::default(),
            epsilon: None,
            search: ThresholdSearchParams::default(),
            type_predicate: RDF_TYPE.to_owned(),
            format: OutputFormat::Json,
            dump_similarity: None,
            dump_weights: None,
            dump_trace: None,
            exclude_type_predicate: false,
            threads: None,
            strict: false,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.iteration.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.search.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(eps) = self.epsilon {
            if !(0.0..=1.0).contains(&eps) {
                return Err(CliError::Config(format!("epsilon must lie in [0, 1], got {eps}")));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be positive".into()));
        }
        Ok(())
    }

    fn output_or_default(&self, suffix: &str) -> PathBuf {
        self.output.clone().unwrap_or_else(|| {
            let stem = self
                .input
                .file_stem()
                .map(|s| s.to_string_lossy().trim_end_matches(".nt").to_owned())
                .unwrap_or_else(|| "summary".into());
            PathBuf::from(format!("{stem}.{suffix}"))
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Input(Error),
    #[error("{0}")]
    Run(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Run(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => CliError::Config(msg),
            e => CliError::Run(e),
        }
    }
}

/// Key=value pairs; blank lines and `#` comments are ignored.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    const KEYS: &[&str] = &[
        "input", "output", "beta", "max-iter", "ict", "epsilon", "auto-epsilon", "min-eps",
        "max-eps", "tries", "ect", "matching", "noise-fraction", "type-predicate", "format",
        "dump-similarity", "dump-weights", "dump-trace", "exclude-type-predicate", "threads",
        "strict", "union-normalization",
    ];
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        out.insert(key, value.trim().to_owned());
    }
    Ok(out)
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Config(format!("{key}: cannot parse {v:?}: {e}")))
        })
        .transpose()
}

fn pick_flag(flag: bool, file: &BTreeMap<String, String>, key: &str) -> Result<bool, CliError> {
    Ok(flag || pick::<bool>(None, file, key)?.unwrap_or(false))
}

impl RunArgs {
    /// Merges flags over the config file and built-in defaults.
    ///
    /// `auto_required` forces the threshold search (and rejects a fixed
    /// epsilon), as for `find-threshold`.
    pub fn resolve(&self, auto_required: bool) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let input: PathBuf = pick(self.input.clone(), &file, "input")?
            .ok_or_else(|| CliError::Config("--input is required".into()))?;
        let mut cfg = RunConfig::new(input);
        cfg.output = pick(self.output.clone(), &file, "output")?;

        let it = &mut cfg.iteration;
        if let Some(v) = pick(self.beta, &file, "beta")? {
            it.beta = v;
        }
        if let Some(v) = pick(self.max_iter, &file, "max-iter")? {
            it.max_iter = v;
        }
        if let Some(v) = pick(self.ict, &file, "ict")? {
            it.ict = v;
        }
        let matching = match self.matching {
            Some(m) => Some(MatchingMode::from(m)),
            None => pick::<MatchingMode>(None, &file, "matching")?,
        };
        if let Some(m) = matching {
            it.matching = m;
        }
        if let Some(v) = pick(self.noise_fraction, &file, "noise-fraction")? {
            it.noise_fraction = v;
        }
        if pick_flag(self.union_normalization, &file, "union-normalization")? {
            it.normalization = PairNormalization::UnionReciprocal;
        }

        let epsilon = pick(self.epsilon, &file, "epsilon")?;
        let auto = pick_flag(self.auto_epsilon, &file, "auto-epsilon")?;
        if epsilon.is_some() && (auto || auto_required) {
            return Err(CliError::Config(
                "--epsilon and automatic threshold search are mutually exclusive".into(),
            ));
        }
        cfg.epsilon = epsilon;

        let s = &mut cfg.search;
        if let Some(v) = pick(self.min_eps, &file, "min-eps")? {
            s.min_eps = v;
        }
        if let Some(v) = pick(self.max_eps, &file, "max-eps")? {
            s.max_eps = v;
        }
        if let Some(v) = pick(self.tries, &file, "tries")? {
            s.tries = v;
        }
        if let Some(v) = pick(self.ect, &file, "ect")? {
            s.ect = v;
        }

        if let Some(v) = pick(self.type_predicate.clone(), &file, "type-predicate")? {
            cfg.type_predicate = v;
        }
        if let Some(v) = pick(self.format, &file, "format")? {
            cfg.format = v;
        }
        cfg.dump_similarity = pick(self.dump_similarity.clone(), &file, "dump-similarity")?;
        cfg.dump_weights = pick(self.dump_weights.clone(), &file, "dump-weights")?;
        cfg.dump_trace = pick(self.dump_trace.clone(), &file, "dump-trace")?;
        cfg.exclude_type_predicate = pick_flag(self.exclude_type_predicate, &file, "exclude-type-predicate")?;
        cfg.threads = pick(self.threads, &file, "threads")?;
        cfg.strict = pick_flag(self.strict, &file, "strict")?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_graph(path: &Path, strict: bool) -> Result<Graph, CliError> {
    let text = export::read_to_string(path).map_err(|source| {
        CliError::Input(Error::Input {
            path: path.to_owned(),
            source,
        })
    })?;
    parse_ntriples_str(&text, ParseOptions { strict }).map_err(CliError::Input)
}

/// Parsed input plus the converged similarity run.
pub struct Prepared {
    /// The graph as read.
    pub full: Graph,
    /// `full` minus type triples, when they are excluded from similarity.
    pub filtered: Option<Graph>,
    pub run: SimilarityRun,
}

impl Prepared {
    pub fn load(cfg: &RunConfig) -> Result<Self, CliError> {
        let full = load_graph(&cfg.input, cfg.strict)?;
        let filtered = cfg
            .exclude_type_predicate
            .then(|| full.without_predicate(&cfg.type_predicate));
        let graph = filtered.as_ref().unwrap_or(&full);
        let run = run_sim_measure(graph, &cfg.iteration)?;
        if !run.converged {
            log::warn!(
                "similarity did not converge within {} iterations (last delta {:.6})",
                run.iterations,
                run.deltas.last().copied().unwrap_or(0.0)
            );
        }
        Ok(Self { full, filtered, run })
    }

    /// The graph similarities were computed on.
    pub fn graph(&self) -> &Graph {
        self.filtered.as_ref().unwrap_or(&self.full)
    }

    pub fn search(&self, cfg: &RunConfig) -> Result<ThresholdSearch, CliError> {
        Ok(find_optimum_epsilon(
            self.graph(),
            &self.run.matrix,
            &self.run.pairs,
            &cfg.search,
        )?)
    }

    pub fn classes(&self, epsilon: f64) -> Result<TypeClassMap, CliError> {
        Ok(create_classes(
            self.graph().subjects(),
            &self.run.matrix,
            &self.run.pairs,
            epsilon,
        )?)
    }

    fn write_dumps(&self, cfg: &RunConfig, search: Option<&ThresholdSearch>) -> Result<(), CliError> {
        let g = self.graph();
        if let Some(path) = &cfg.dump_similarity {
            export::write_maybe_gz(path, |w| export::write_similarity_csv(w, g, &self.run.matrix))?;
        }
        if let Some(path) = &cfg.dump_weights {
            export::write_maybe_gz(path, |w| {
                export::write_weights_csv(w, g, &self.run.pairs, &self.run.weights)
            })?;
        }
        if let (Some(path), Some(search)) = (&cfg.dump_trace, search) {
            export::write_maybe_gz(path, |w| export::write_trace_csv(w, &search.trace))?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub input: String,
    pub triples: usize,
    pub subjects: usize,
    pub pairs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub final_delta: f64,
    pub epsilon: f64,
    pub epsilon_source: &'static str,
    pub classes: usize,
    pub typed_classes: usize,
    pub stability: f64,
    pub rmsd: f64,
    pub typification_rate: f64,
    pub favorability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_evaluations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<export::EvalDocument>,
}

fn base_report(
    command: &'static str,
    cfg: &RunConfig,
    prepared: &Prepared,
    classes: &TypeClassMap,
    metrics: &FavorabilityReport,
    search: Option<&ThresholdSearch>,
) -> RunReport {
    let g = prepared.graph();
    RunReport {
        command,
        input: cfg.input.display().to_string(),
        triples: g.triples().len(),
        subjects: g.subject_count(),
        pairs: prepared.run.pairs.len(),
        iterations: prepared.run.iterations,
        converged: prepared.run.converged,
        final_delta: prepared.run.deltas.last().copied().unwrap_or(0.0),
        epsilon: metrics.epsilon,
        epsilon_source: if search.is_some() { "auto" } else { "fixed" },
        classes: classes.len(),
        typed_classes: classes.classes().filter(|(_, m)| m.len() >= 2).count(),
        stability: metrics.stability,
        rmsd: metrics.rmsd,
        typification_rate: metrics.typification_rate,
        favorability: metrics.favorability,
        search_levels: search.map(|s| s.levels),
        search_evaluations: search.map(|s| s.trace.len()),
        output: None,
        evaluation: None,
    }
}

/// Threshold from the config, searching when none is fixed.
fn choose_epsilon(cfg: &RunConfig, prepared: &Prepared) -> Result<(f64, Option<ThresholdSearch>), CliError> {
    match cfg.epsilon {
        Some(eps) => Ok((eps, None)),
        None => {
            let search = prepared.search(cfg)?;
            Ok((search.epsilon, Some(search)))
        }
    }
}

pub fn cmd_summarize(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let prepared = Prepared::load(cfg)?;
    let g = prepared.graph();
    let (epsilon, search) = choose_epsilon(cfg, &prepared)?;
    let classes = prepared.classes(epsilon)?;
    let names = name_classes(g, &classes);
    let summary = build_summary_graph(g, classes.clone());
    let metrics = FavorabilityReport::of(g, &summary, epsilon);

    let output = cfg.output_or_default(&format!("summary.{}", cfg.format.extension()));
    let body = match cfg.format {
        OutputFormat::Json => export::summary_json(g, &summary, &names)?,
        OutputFormat::Dot => export::summary_dot(g, &summary, &names),
        OutputFormat::Nt => export::summary_ntriples(g, &summary, &names),
    };
    export::write_atomic(&output, |w| Ok(w.write_all(body.as_bytes())?))?;
    prepared.write_dumps(cfg, search.as_ref())?;

    let mut report = base_report("summarize", cfg, &prepared, &classes, &metrics, search.as_ref());
    report.output = Some(output.display().to_string());
    Ok(report)
}

pub fn cmd_find_threshold(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let prepared = Prepared::load(cfg)?;
    let search = prepared.search(cfg)?;
    let classes = prepared.classes(search.epsilon)?;
    let output = cfg.output_or_default("trace.csv");
    export::write_maybe_gz(&output, |w| export::write_trace_csv(w, &search.trace))?;
    prepared.write_dumps(cfg, Some(&search))?;
    let mut report = base_report(
        "find-threshold",
        cfg,
        &prepared,
        &classes,
        &search.best,
        Some(&search),
    );
    report.output = Some(output.display().to_string());
    Ok(report)
}

pub fn cmd_eval(cfg: &RunConfig, gold_path: Option<&Path>) -> Result<RunReport, CliError> {
    let prepared = Prepared::load(cfg)?;
    let g = prepared.graph();
    let gold = match gold_path {
        Some(path) => {
            let gold_graph = load_graph(path, cfg.strict)?;
            remap_gold(&gold_graph, &extract_gold(&gold_graph, &cfg.type_predicate), g)
        }
        None => remap_gold(&prepared.full, &extract_gold(&prepared.full, &cfg.type_predicate), g),
    };
    let (epsilon, search) = choose_epsilon(cfg, &prepared)?;
    let classes = prepared.classes(epsilon)?;
    let names = name_classes(g, &classes);
    let scored = score_classes(&classes, &gold)?;
    let doc = export::eval_document(&scored, &names);
    if let Some(path) = &cfg.output {
        let mut body = serde_json::to_string_pretty(&doc).map_err(Error::from)?;
        body.push('\n');
        export::write_atomic(path, |w| Ok(w.write_all(body.as_bytes())?))?;
    }
    prepared.write_dumps(cfg, search.as_ref())?;
    let metrics = crate::summary::favorability(g, &classes, epsilon);
    let mut report = base_report("eval", cfg, &prepared, &classes, &metrics, search.as_ref());
    report.output = cfg.output.as_ref().map(|p| p.display().to_string());
    report.evaluation = Some(doc);
    Ok(report)
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs the CLI on `args` and returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Summarize(args) => args
            .resolve(false)
            .and_then(|cfg| with_pool(cfg.threads, || cmd_summarize(&cfg))?),
        Command::FindThreshold(args) => args
            .resolve(true)
            .and_then(|cfg| with_pool(cfg.threads, || cmd_find_threshold(&cfg))?),
        Command::Eval(eval) => eval
            .run
            .resolve(false)
            .and_then(|cfg| with_pool(cfg.threads, || cmd_eval(&cfg, eval.gold.as_deref()))?),
    };
    match result {
        Ok(report) => match serde_json::to_string(&report) {
            Ok(line) => {
                let _ = writeln!(stdout, "{line}");
                0
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    run(std::env::args_os(), &mut io::stdout(), &mut io::stderr())
}
