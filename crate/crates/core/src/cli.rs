//! Command-line interface.
//!
//! Exit codes: 0 success, 1 runtime failure (I/O, training), 2 usage error,
//! 3 invalid input (graph, config, catalog or dataset files).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::baselines::{self, checkpoint, BaselineError, CauseHyper, ModelKind};
use crate::catalog::{write_catalog, Catalog, CatalogError};
use crate::eval::{self, report, EvalError, ExperimentConfig};
use crate::generator::{self, GenConfig, GenError, ObservedDataset, Parallelism};
use crate::mgraph::{self, Fixture, GraphError, MGraph};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Graph(_) | CliError::Catalog(_) => EXIT_INVALID_INPUT,
            CliError::Gen(e) | CliError::Eval(EvalError::Dataset(e)) => match e {
                GenError::Io(_) => EXIT_FAILURE,
                _ => EXIT_INVALID_INPUT,
            },
            CliError::Baseline(
                BaselineError::Checkpoint { .. }
                | BaselineError::TagNotInMovie { .. }
                | BaselineError::UnknownMovie { .. },
            ) => EXIT_INVALID_INPUT,
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ctar",
    version,
    about = "Causal tag and rating dataset generator with baseline evaluation"
)]
#[command(
    after_help = "Log verbosity is read from CTAR_LOG (error, warn, info, debug, trace).\n\
Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 invalid input."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify missingness indicators and answer d-separation queries.
    CheckGraph(CheckGraphArgs),
    /// Generate a dataset directory and its manifest.
    Generate(GenerateArgs),
    /// Write descriptive statistics of a dataset.
    Stats(StatsArgs),
    /// Train one baseline and save its checkpoint.
    Train(TrainArgs),
    /// Evaluate a baseline over repeated runs, or a saved checkpoint.
    Evaluate(EvaluateArgs),
    /// Generate, then evaluate all three baselines.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct CheckGraphArgs {
    /// Fixture name (fig2, fig3, fig4) or path to a graph text file.
    pub graph: String,
    /// Print `<indicator> <MCAR|MAR|MNAR>` per missingness indicator.
    #[arg(long)]
    pub classify: bool,
    /// d-separation query `X|Y|Z` with comma-separated node lists; Z may be empty.
    #[arg(long = "dsep", value_name = "X|Y|Z")]
    pub dsep: Vec<String>,
    /// Print the graph in DOT format.
    #[arg(long)]
    pub dot: bool,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Named configuration preset.
    #[arg(long, default_value = "ctar-default")]
    pub preset: String,
    /// Configuration file (`key = value` lines) applied over the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Single `key=value` override, applied last; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Random seed (overrides config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Compute per-pair work on all cores. Output is identical.
    #[arg(long)]
    pub parallel: bool,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<GenConfig, CliError> {
        let mut cfg = GenConfig::preset(&self.preset)?;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            let table: toml::Table =
                toml::from_str(&text).map_err(|e| GenError::Config(format!("{}: {e}", path.display())))?;
            let overrides: Vec<String> = table.iter().map(|(k, v)| format!("{k}={v}")).collect();
            cfg = cfg.with_overrides(&overrides)?;
        }
        cfg = cfg.with_overrides(&self.set)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn parallelism(&self) -> Parallelism {
        if self.parallel {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    /// Directory for histogram.csv, labels.csv, counts.csv and stats.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    #[arg(long, default_value_t = CauseHyper::default().base.dim)]
    pub dim: usize,
    #[arg(long, default_value_t = CauseHyper::default().base.lr)]
    pub lr: f64,
    #[arg(long, default_value_t = CauseHyper::default().base.reg)]
    pub reg: f64,
    #[arg(long, default_value_t = CauseHyper::default().base.epochs)]
    pub epochs: usize,
    #[arg(long, default_value_t = CauseHyper::default().base.init_std)]
    pub init_std: f64,
    /// CausE tag-embedding tie strength.
    #[arg(long, default_value_t = CauseHyper::default().tie_reg)]
    pub tie_reg: f64,
    /// Keep separate CausE user rows for the two models.
    #[arg(long)]
    pub separate_users: bool,
    /// Training shards; 1 is deterministic.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

impl HyperArgs {
    fn to_hyper(&self, seed: u64) -> CauseHyper {
        let mut h = CauseHyper::default();
        h.base.dim = self.dim;
        h.base.lr = self.lr;
        h.base.reg = self.reg;
        h.base.epochs = self.epochs;
        h.base.init_std = self.init_std;
        h.base.seed = seed;
        h.base.threads = self.threads.max(1);
        h.tie_reg = self.tie_reg;
        h.share_users = !self.separate_users;
        h
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Mf,
    MfIps,
    Cause,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Mf => ModelKind::Mf,
            ModelArg::MfIps => ModelKind::MfIps,
            ModelArg::Cause => ModelKind::Cause,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Checkpoint file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Model to train and evaluate; repeatable. Defaults to all three.
    #[arg(long, value_enum, conflicts_with = "checkpoint")]
    pub model: Vec<ModelArg>,
    /// Evaluate a saved checkpoint instead of training.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for report.txt, report.csv and report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format printed to stdout.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output directory; the dataset goes to `<out>/data`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Everything needed to re-derive a generated dataset byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: GenConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(dir: &Path, name: &str) -> Result<FileDigest, std::io::Error> {
    let bytes = std::fs::read(dir.join(name))?;
    Ok(FileDigest {
        name: name.to_string(),
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    })
}

fn catalog_digest(cfg: &GenConfig, cat: &Catalog) -> Result<FileDigest, CliError> {
    let mut buf = Vec::new();
    write_catalog(cat, &mut buf)?;
    let name = match &cfg.catalog_path {
        Some(p) => p.clone(),
        None => "synthetic catalog".to_string(),
    };
    let bytes = match &cfg.catalog_path {
        Some(p) => std::fs::read(p)?,
        None => buf,
    };
    Ok(FileDigest {
        name,
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    })
}

/// Generates into `out` and writes `manifest.json` there.
pub fn generate_to(cfg: &GenConfig, out: &Path, par: Parallelism, command: &str) -> Result<RunManifest, CliError> {
    let cat = generator::resolve_catalog(cfg)?;
    let output = generator::generate(cfg, &cat, par)?;
    let names = output.write_dir(out)?;
    let manifest = RunManifest {
        tool: "ctar".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        seed: cfg.seed,
        config: cfg.clone(),
        inputs: vec![catalog_digest(cfg, &cat)?],
        outputs: names.iter().map(|n| digest_file(out, n)).collect::<Result<_, _>>()?,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(out.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}

fn load_graph(spec: &str) -> Result<MGraph, CliError> {
    if let Ok(fx) = spec.parse::<Fixture>() {
        return Ok(mgraph::fixture(fx));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| {
        CliError::Usage(format!(
            "`{spec}` is neither a fixture (fig2, fig3, fig4) nor a readable file: {e}"
        ))
    })?;
    Ok(MGraph::parse_text(&text)?)
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn check_graph(args: &CheckGraphArgs, out: &mut String) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    if args.dot {
        out.push_str(&g.to_dot());
    }
    if args.classify {
        for (r, class) in g.classify_all() {
            out.push_str(&format!("{r} {class}\n"));
        }
    }
    for q in &args.dsep {
        let parts: Vec<&str> = q.split('|').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!("d-separation query `{q}` is not X|Y|Z")));
        }
        let set = |s: &str| -> Vec<String> {
            s.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(String::from)
                .collect()
        };
        let (x, y, z) = (set(parts[0]), set(parts[1]), set(parts[2]));
        let sep = g.d_separated(&refs(&x), &refs(&y), &refs(&z))?;
        out.push_str(&format!(
            "{{{}}} {} {{{}}} | {{{}}}\n",
            x.join(","),
            if sep { "_||_" } else { "not _||_" },
            y.join(","),
            z.join(",")
        ));
    }
    if !args.classify && !args.dot && args.dsep.is_empty() {
        out.push_str(&format!(
            "{} nodes, {} edges, {} indicators\n",
            g.len(),
            g.edge_count(),
            g.indicators().count()
        ));
    }
    Ok(())
}

fn stats(args: &StatsArgs, out: &mut String) -> Result<(), CliError> {
    let ds = ObservedDataset::read_dir(&args.data)?;
    let s = eval::describe(&ds)?;
    out.push_str(&format!(
        "ratings {}  obstag rows {}  rcttag rows {}  test rows {}\n",
        ds.ratings.len(),
        ds.obstag.len(),
        ds.rcttag.len(),
        ds.splits.all().len()
    ));
    out.push_str(&s.labels_csv());
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("histogram.csv"), s.histogram_csv())?;
        std::fs::write(dir.join("labels.csv"), s.labels_csv())?;
        std::fs::write(dir.join("counts.csv"), s.counts_csv())?;
        std::fs::write(
            dir.join("stats.json"),
            serde_json::to_string_pretty(&s).expect("stats serialize") + "\n",
        )?;
    }
    Ok(())
}

fn train(args: &TrainArgs, out: &mut String) -> Result<(), CliError> {
    let ds = ObservedDataset::read_dir(&args.data)?;
    let (biased, unbiased) = baselines::derive_training_labels(&ds.obstag, &ds.rcttag, &ds.movies)?;
    let hyper = args.hyper.to_hyper(args.seed);
    let kind = ModelKind::from(args.model);
    let model = baselines::train_model(kind, &biased, &unbiased, eval::experiment::candidate_slots(&ds), &hyper)?;
    checkpoint::save_model(&model, &args.out)?;
    out.push_str(&format!(
        "trained {kind} on {} biased / {} unbiased interactions; checkpoint {}\n",
        biased.len(),
        unbiased.len(),
        args.out.display()
    ));
    Ok(())
}

fn write_reports(dir: &Path, reports: &[eval::EvalReport]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.txt"), report::to_text(reports))?;
    std::fs::write(dir.join("report.csv"), report::to_csv(reports))?;
    std::fs::write(dir.join("report.json"), report::to_json(reports) + "\n")?;
    Ok(())
}

fn render(reports: &[eval::EvalReport], format: Format) -> String {
    match format {
        Format::Text => report::to_text(reports),
        Format::Csv => report::to_csv(reports),
        Format::Json => report::to_json(reports) + "\n",
    }
}

fn evaluate_models(
    ds: &ObservedDataset,
    models: &[ModelKind],
    runs: usize,
    seed: u64,
    hyper: &HyperArgs,
) -> Result<Vec<eval::EvalReport>, CliError> {
    models
        .iter()
        .map(|&m| {
            let cfg = ExperimentConfig {
                hyper: hyper.to_hyper(seed),
                ..ExperimentConfig::new(m, runs, seed)
            };
            log::info!("evaluating {m} over {runs} runs");
            Ok(eval::evaluate_dataset(ds, &cfg)?)
        })
        .collect()
}

fn evaluate(args: &EvaluateArgs, out: &mut String) -> Result<(), CliError> {
    let ds = ObservedDataset::read_dir(&args.data)?;
    if let Some(path) = &args.checkpoint {
        let model = checkpoint::load_model(path)?;
        out.push_str("split,rows,mse,auc\n");
        for (name, rows) in eval::experiment::SPLIT_NAMES
            .iter()
            .zip(eval::experiment::test_sets(&ds))
        {
            if let Some(s) = eval::experiment::score_split(&model, &rows)? {
                let auc = s.auc.map_or(String::new(), |a| a.to_string());
                out.push_str(&format!("{name},{},{},{auc}\n", rows.len(), s.mse));
            }
        }
        return Ok(());
    }
    let models: Vec<ModelKind> = if args.model.is_empty() {
        ModelKind::ALL.to_vec()
    } else {
        args.model.iter().map(|&m| m.into()).collect()
    };
    let reports = evaluate_models(&ds, &models, args.runs, args.seed, &args.hyper)?;
    if let Some(dir) = &args.out {
        write_reports(dir, &reports)?;
    }
    out.push_str(&render(&reports, args.format));
    Ok(())
}

fn reproduce(args: &ReproduceArgs, out: &mut String) -> Result<(), CliError> {
    let cfg = args.config.resolve()?;
    let data = args.out.join("data");
    let manifest = generate_to(&cfg, &data, args.config.parallelism(), "reproduce")?;
    let ds = ObservedDataset::read_dir(&data)?;
    let reports = evaluate_models(&ds, &ModelKind::ALL, args.runs, cfg.seed, &args.hyper)?;
    write_reports(&args.out, &reports)?;
    out.push_str(&format!(
        "dataset: {} files in {}\n",
        manifest.outputs.len(),
        data.display()
    ));
    out.push_str(&report::to_text(&reports));
    Ok(())
}

/// Runs a parsed command, appending its standard output to `out`.
pub fn execute(cli: &Cli, out: &mut String) -> Result<(), CliError> {
    match &cli.command {
        Command::CheckGraph(a) => check_graph(a, out),
        Command::Generate(a) => {
            let cfg = a.config.resolve()?;
            let m = generate_to(&cfg, &a.out, a.config.parallelism(), "generate")?;
            for f in &m.outputs {
                out.push_str(&format!("{}  {}\n", f.sha256, f.name));
            }
            Ok(())
        }
        Command::Stats(a) => stats(a, out),
        Command::Train(a) => train(a, out),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Reproduce(a) => reproduce(a, out),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut out = String::new();
    let result = execute(&cli, &mut out);
    print!("{out}");
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
