//! Command-line front end: map validation, submap export, log ingestion,
//! log simulation, and end-to-end strategy pattern mining.

pub mod config;
pub mod error;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use stratmap::km::{load_km, parse_document, validate_document};
use stratmap::log::parse_log;
use stratmap::metrics::TrackedSubmap;
use stratmap::pipeline::{ingest, mine, question_submaps, PipelineConfig, Report};
use stratmap::rate::parse_rate;
use stratmap::sim::{parse_mix, simulate, SimConfig};
use stratmap::{KnowledgeMap, LearningEvent, LogFormat, Rate};

use crate::config::FileConfig;
pub use crate::error::{CliError, ErrorClass};

#[derive(Debug, Parser)]
#[command(name = "stratmap", version, about = "Mine metacognitive strategy patterns from learning logs")]
pub struct Cli {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a knowledge map and list every violation.
    Validate(MapArgs),
    /// Search the candidate submaps of a question and print their sizes.
    Submaps(SubmapArgs),
    /// Filter a log and build per-learner activity sequences.
    Ingest(IngestArgs),
    /// Generate a synthetic log from planted strategy archetypes.
    Simulate(SimulateArgs),
    /// Run the whole pipeline and write the report, curves and submaps.
    Mine(MineArgs),
    /// Print the summary table of an existing report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub km: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuestionArgs {
    /// Core item of the question; give it twice for a comparison.
    #[arg(long = "core")]
    pub core: Vec<String>,
    #[arg(long)]
    pub k_depth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LogArgs {
    #[arg(long = "logs", num_args = 1..)]
    pub logs: Vec<PathBuf>,
    /// csv or jsonl; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<String>,
    /// Question to analyse when the log holds several.
    #[arg(long)]
    pub question: Option<String>,
}

#[derive(Debug, Args)]
pub struct SubmapArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub question: QuestionArgs,
    /// Directory for DOT and JSON submap files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub log: LogArgs,
    /// File for the activity sequences, one JSON object per line.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long = "core")]
    pub core: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub learners: Option<usize>,
    /// Archetype shares, e.g. `DCD=0.5,CDD=0.3,NOISE=0.2`.
    #[arg(long)]
    pub mix: Option<String>,
    /// Chance of a stray visit before each planned visit.
    #[arg(long)]
    pub interleave: Option<f64>,
    #[arg(long)]
    pub question: Option<String>,
    #[arg(long)]
    pub format: Option<String>,
    /// Log file to write; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub log: LogArgs,
    #[command(flatten)]
    pub question: QuestionArgs,
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub minsup: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report file, or a directory holding `report.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_LEARNERS: usize = 300;
pub const DEFAULT_MIX: &str = "DCD=0.313,CDD=0.31,DDC=0.316,NOISE=0.061";
pub const DEFAULT_INTERLEAVE: f64 = 0.05;
const REPORT_MINED_ROWS: usize = 20;

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Validate(args) => cmd_validate(&args, &file, out),
        Command::Submaps(args) => cmd_submaps(&args, &file, out),
        Command::Ingest(args) => cmd_ingest(&args, &file, out, err),
        Command::Simulate(args) => cmd_simulate(&args, &file, out),
        Command::Mine(args) => cmd_mine(&args, &file, out, err),
        Command::Report(args) => cmd_report(&args, &file, out),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::new(ErrorClass::Internal, format!("writing output: {e}")))
}

fn km_path(args: &MapArgs, file: &FileConfig) -> Result<PathBuf, CliError> {
    args.km
        .clone()
        .or_else(|| file.km.clone())
        .ok_or_else(|| CliError::config("no knowledge map given (--km)"))
}

fn open(path: &Path) -> Result<fs::File, CliError> {
    fs::File::open(path).map_err(|e| io_err(path, e))
}

fn read_km(args: &MapArgs, file: &FileConfig) -> Result<KnowledgeMap, CliError> {
    let path = km_path(args, file)?;
    load_km(open(&path)?).map_err(|e| CliError::new(ErrorClass::Input, format!("{}: {e}", path.display())))
}

fn rate_flag(flag: Option<&str>, file: Option<&config::RateValue>, default: Rate) -> Result<Rate, CliError> {
    match (flag, file) {
        (Some(text), _) => parse_rate(text).map_err(|e| CliError::config(e.to_string())),
        (None, Some(v)) => v.to_rate(),
        (None, None) => Ok(default),
    }
}

fn core_items(flag: &[String], file: &FileConfig) -> Vec<String> {
    if flag.is_empty() {
        file.core.clone()
    } else {
        flag.to_vec()
    }
}

pub fn log_format(explicit: Option<&str>, path: &Path) -> Result<LogFormat, CliError> {
    match explicit {
        Some(f) => f.parse().map_err(|e: String| CliError::config(e)),
        None => match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => Ok(LogFormat::Jsonl),
            _ => Ok(LogFormat::Csv),
        },
    }
}

fn read_events(args: &LogArgs, file: &FileConfig, err: &mut dyn Write) -> Result<Vec<LearningEvent>, CliError> {
    let paths = if args.logs.is_empty() { file.logs.clone() } else { args.logs.clone() };
    if paths.is_empty() {
        return Err(CliError::config("no learning logs given (--logs)"));
    }
    let explicit = args.format.as_deref().or(file.format.as_deref());
    let mut events = Vec::new();
    for path in &paths {
        let format = log_format(explicit, path)?;
        let parsed = parse_log(open(path)?, format).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        for bad in &parsed.errors {
            emit(err, &format!("warning: {}: skipped {bad}\n", path.display()))?;
        }
        events.extend(parsed.events);
    }
    Ok(events)
}

fn pipeline_config(
    question: &QuestionArgs,
    threshold: Option<&str>,
    minsup: Option<&str>,
    question_id: Option<&str>,
    file: &FileConfig,
) -> Result<PipelineConfig, CliError> {
    let mut config = PipelineConfig::new(core_items(&question.core, file));
    if let Some(k) = question.k_depth.or(file.k_depth) {
        config.k_depth = k;
    }
    config.threshold = rate_flag(threshold, file.threshold.as_ref(), config.threshold)?;
    config.minsup = rate_flag(minsup, file.minsup.as_ref(), config.minsup)?;
    config.question_id = question_id.map(str::to_string).or_else(|| file.question.clone());
    config.validate()?;
    Ok(config)
}

fn cmd_validate(args: &MapArgs, file: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let path = km_path(args, file)?;
    let doc = parse_document(open(&path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let violations = validate_document(&doc);
    let mut text = String::new();
    for v in &violations {
        text.push_str(&format!("{v}\n"));
    }
    text.push_str(&format!("{} violations\n", violations.len()));
    emit(out, &text)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "{} has {} violation(s)",
            path.display(),
            violations.len()
        )))
    }
}

/// Relative path and contents of one output file.
type OutputFile = (PathBuf, String);

fn write_outputs(dir: &Path, files: &[OutputFile]) -> Result<(), CliError> {
    for (rel, contents) in files {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn submap_files(km: &KnowledgeMap, tracked: &[TrackedSubmap]) -> Vec<OutputFile> {
    let mut files = Vec::new();
    for t in tracked {
        files.push((PathBuf::from("submaps").join(format!("{}.dot", t.name)), t.submap.to_dot(km, &t.name)));
        let json = serde_json::to_string_pretty(&t.submap.to_document(km)).expect("submap serializes");
        files.push((PathBuf::from("submaps").join(format!("{}.json", t.name)), json + "\n"));
    }
    files
}

fn cmd_submaps(args: &SubmapArgs, file: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let config = pipeline_config(&args.question, None, None, None, file)?;
    let km = read_km(&args.map, file)?;
    let (_, set) = question_submaps(&km, &config)?;
    let sizes: Vec<String> = set.members().iter().map(|t| format!("{}={}", t.name, t.submap.len())).collect();
    emit(out, &format!("{}\n", sizes.join(" ")))?;
    if let Some(dir) = args.out.clone().or_else(|| file.out.clone()) {
        write_outputs(&dir, &submap_files(&km, set.members()))?;
    }
    Ok(())
}

fn cmd_ingest(args: &IngestArgs, file: &FileConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let km = read_km(&args.map, file)?;
    let events = read_events(&args.log, file, err)?;
    let total = events.len();
    let question = args.log.question.as_deref().or(file.question.as_deref());
    let ingested = ingest(&km, events, question)?;
    for u in &ingested.las.unresolved {
        emit(err, &format!("warning: {u}\n"))?;
    }
    emit(
        out,
        &format!(
            "question={} events={} removed={} learners={} unresolved={}\n",
            ingested.question_id,
            total,
            ingested.removed,
            ingested.las.sequences.len(),
            ingested.las.unresolved.len()
        ),
    )?;
    if let Some(path) = &args.out {
        let mut text = String::new();
        for las in &ingested.las.sequences {
            text.push_str(&serde_json::to_string(las).expect("sequence serializes"));
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, file: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mix_text = args.mix.as_deref().or(file.mix.as_deref()).unwrap_or(DEFAULT_MIX);
    let mix = parse_mix(mix_text)?;
    let mut config = SimConfig::new(
        core_items(&args.core, file),
        args.learners.or(file.learners).unwrap_or(DEFAULT_LEARNERS),
        mix,
        args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    );
    config.interleave_prob = args.interleave.or(file.interleave).unwrap_or(DEFAULT_INTERLEAVE);
    config.question_id = args.question.clone().or_else(|| file.question.clone());
    let km = read_km(&args.map, file)?;
    let events = simulate(&km, &config)?;
    let target = args.out.clone();
    let format = match &target {
        Some(path) => log_format(args.format.as_deref().or(file.format.as_deref()), path)?,
        None => log_format(args.format.as_deref().or(file.format.as_deref()), Path::new("-"))?,
    };
    let mut buf = Vec::new();
    stratmap::log::write_log(&mut buf, &events, format).map_err(|e| CliError::new(ErrorClass::Internal, e.to_string()))?;
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
            }
            fs::write(&path, buf).map_err(|e| io_err(&path, e))
        }
        None => out
            .write_all(&buf)
            .map_err(|e| CliError::new(ErrorClass::Internal, e.to_string())),
    }
}

fn cmd_mine(args: &MineArgs, file: &FileConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let question = args.log.question.as_deref();
    let config = pipeline_config(&args.question, args.threshold.as_deref(), args.minsup.as_deref(), question, file)?;
    let km = read_km(&args.map, file)?;
    let events = read_events(&args.log, file, err)?;
    let outcome = mine(&km, events, &config)?;
    for w in &outcome.warnings {
        emit(err, &format!("warning: {w}\n"))?;
    }

    if let Some(dir) = args.out.clone().or_else(|| file.out.clone()) {
        let mut files: Vec<OutputFile> = vec![
            (PathBuf::from("report.json"), outcome.report.to_json()),
            (PathBuf::from("table.txt"), outcome.report.render_table()),
        ];
        for (name, csv) in outcome.curve_files() {
            files.push((PathBuf::from("curves").join(name), csv));
        }
        files.extend(submap_files(&km, &outcome.submaps));
        write_outputs(&dir, &files)?;
    }
    emit(out, &outcome.report.render_table())
}

fn cmd_report(args: &ReportArgs, file: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let path = args
        .out
        .clone()
        .or_else(|| file.out.clone())
        .ok_or_else(|| CliError::config("no report given (--out)"))?;
    let path = if path.is_dir() { path.join("report.json") } else { path };
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let report: Report =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut body = report.render_table();
    if !report.mined_raw.is_empty() {
        body.push_str("\nmined patterns (support, codewords, strategy):\n");
        for m in report.mined_raw.iter().take(REPORT_MINED_ROWS) {
            let codes: Vec<String> = m.pattern.iter().map(u32::to_string).collect();
            body.push_str(&format!("  {:>4}  {}  {}\n", m.support_count, codes.join(" "), m.strategy));
        }
        if report.mined_raw.len() > REPORT_MINED_ROWS {
            body.push_str(&format!("  ... {} more in {}\n", report.mined_raw.len() - REPORT_MINED_ROWS, path.display()));
        }
    }
    emit(out, &body)
}
