//! `voxdrone`: interpret one hypothesis, evaluate or sweep a labelled
//! corpus, run the teleoperation service, or check a lexicon file.
//!
//! Exit codes: 0 success, 1 input or environment error, 2 when `interpret`
//! finds no class.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use voxdrone_core::audio::{load_fixture, ChannelModel, Hypothesis, ReplayProvider, Waveform};
use voxdrone_core::controller::{interpret, write_session_log, ControllerConfig};
use voxdrone_core::eval::{
    corpus_from_records, degradation_sweep, emit_report, evaluate, format_accuracy_table, parse_levels,
    DegradationLevel, LabeledUtterance, Payload, ReportFormat, SweepPoint,
};
use voxdrone_core::sim::{reset, Pose, SimConfig};
use voxdrone_core::{levenshtein, Language, Lexicon, MatchMode};

#[derive(Parser)]
#[command(
    name = "voxdrone",
    version,
    about = "Voice command interpretation for a simulated quadrotor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one hypothesis and print the outcome as JSON.
    Interpret(InterpretArgs),
    /// Score a labelled corpus in one or both matching modes.
    Evaluate(EvaluateArgs),
    /// Score a labelled corpus at several degradation levels.
    Sweep(SweepArgs),
    /// Run the websocket teleoperation service until interrupted.
    Serve(ServeArgs),
    /// Validate a lexicon file; fails if surfaces of two classes are one edit apart.
    LexiconCheck(LexiconArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Fuzzy,
}

impl From<ModeArg> for MatchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => MatchMode::Exact,
            ModeArg::Fuzzy => MatchMode::Fuzzy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LanguageArg {
    Es,
    En,
    Both,
}

impl LanguageArg {
    fn filter(self) -> Option<Language> {
        match self {
            LanguageArg::Es => Some(Language::Spanish),
            LanguageArg::En => Some(Language::English),
            LanguageArg::Both => None,
        }
    }
}

#[derive(Args)]
struct LexiconArgs {
    /// Lexicon file; the built-in lexicon when omitted.
    #[arg(long, value_name = "PATH")]
    lexicon: Option<PathBuf>,
}

impl LexiconArgs {
    fn load(&self) -> Result<Lexicon> {
        match &self.lexicon {
            Some(path) => Lexicon::load(path).with_context(|| format!("loading lexicon {}", path.display())),
            None => Ok(Lexicon::builtin()),
        }
    }
}

#[derive(Args)]
struct MatchArgs {
    #[command(flatten)]
    lexicon: LexiconArgs,
    /// Restrict candidate surfaces to one language.
    #[arg(long, value_enum, default_value = "both")]
    language: LanguageArg,
    /// Fuzzy matches farther than N edits become "no class".
    #[arg(long, value_name = "N")]
    reject_above: Option<usize>,
    /// Compare surfaces with accents removed.
    #[arg(long)]
    strip_diacritics: bool,
}

impl MatchArgs {
    fn config(&self, mode: MatchMode) -> ControllerConfig {
        let mut config = ControllerConfig::with_mode(mode);
        config.language_filter = self.language.filter();
        config.reject_above = self.reject_above;
        config.strip_diacritics = self.strip_diacritics;
        config
    }
}

#[derive(Args)]
struct InterpretArgs {
    #[arg(long)]
    text: String,
    #[arg(long, value_enum, default_value = "fuzzy")]
    mode: ModeArg,
    #[command(flatten)]
    matching: MatchArgs,
}

#[derive(Args)]
struct CorpusArgs {
    /// Tab-separated corpus: utterance_id, language, true_class, transcript.
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    /// Directory of `<utterance_id>.wav` files; switches to the acoustic channel.
    #[arg(long, value_name = "DIR")]
    waveforms: Option<PathBuf>,
    /// One mode only; both when omitted.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[command(flatten)]
    matching: MatchArgs,
    /// Report destination; `.csv` selects CSV, anything else JSON.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl CorpusArgs {
    fn modes(&self) -> Vec<MatchMode> {
        match self.mode {
            Some(m) => vec![m.into()],
            None => MatchMode::ALL.to_vec(),
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Edit counts for text corpora, noise amplitudes for waveform corpora.
    #[arg(long, value_name = "CSV")]
    levels: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    address: String,
    #[arg(long, value_enum, default_value = "fuzzy")]
    mode: ModeArg,
    #[command(flatten)]
    matching: MatchArgs,
    /// Metres per second for horizontal moves.
    #[arg(long, default_value_t = SimConfig::default().linear_speed)]
    linear_speed: f64,
    /// Metres per second for climb and descent.
    #[arg(long, default_value_t = SimConfig::default().vertical_speed)]
    vertical_speed: f64,
    #[arg(long, default_value_t = 50)]
    tick_ms: u64,
    /// Session log written on shutdown, one JSON outcome per line.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Interpret(args) => cmd_interpret(&args),
        Command::Evaluate(args) => cmd_evaluate(&args).map(|_| ExitCode::SUCCESS),
        Command::Sweep(args) => cmd_sweep(&args).map(|_| ExitCode::SUCCESS),
        Command::Serve(args) => cmd_serve(&args).map(|_| ExitCode::SUCCESS),
        Command::LexiconCheck(args) => cmd_lexicon_check(&args).map(|_| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct InterpretLine<'a> {
    hypothesis: &'a str,
    matched_surface: Option<&'a str>,
    action_class: Option<&'a str>,
    distance: Option<usize>,
    mode: &'a str,
    no_class: bool,
    exit: bool,
}

fn cmd_interpret(args: &InterpretArgs) -> Result<ExitCode> {
    let lexicon = args.matching.lexicon.load()?;
    let config = args.matching.config(args.mode.into());
    config.validate(&lexicon)?;
    let outcome = interpret(&Hypothesis::new(&args.text, "cli", "cli-0"), &lexicon, &config);
    let r = outcome.result.as_ref();
    let line = InterpretLine {
        hypothesis: &args.text,
        matched_surface: r.map(|r| r.matched_entry.surface.as_str()),
        action_class: r.map(|r| r.action_class.label()),
        distance: r.map(|r| r.distance),
        mode: outcome.mode.label(),
        no_class: outcome.is_no_class(),
        exit: outcome.is_exit,
    };
    println!("{}", serde_json::to_string(&line)?);
    Ok(if outcome.is_no_class() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn load_corpus(args: &CorpusArgs) -> Result<Vec<LabeledUtterance>> {
    let records = load_fixture(&args.corpus).with_context(|| format!("loading corpus {}", args.corpus.display()))?;
    let corpus = corpus_from_records(records);
    let Some(dir) = &args.waveforms else {
        return Ok(corpus);
    };
    corpus
        .into_iter()
        .map(|u| {
            let path = dir.join(format!("{}.wav", u.utterance_id));
            let waveform = Waveform::read_wav(&path).with_context(|| format!("reading {}", path.display()))?;
            let transcript = u.transcript().to_string();
            Ok(LabeledUtterance {
                payload: Payload::Audio {
                    waveform: Arc::new(waveform),
                    transcript,
                },
                ..u
            })
        })
        .collect()
}

fn print_points(points: &[SweepPoint]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    write!(out, "{}", format_accuracy_table(points))?;
    for p in points {
        let failures: u64 = p.report.provider_failures.values().sum();
        if failures > 0 {
            eprintln!("{}: {failures} provider failures", p.level);
        }
    }
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let args = &args.corpus;
    let lexicon = args.matching.lexicon.load()?;
    let corpus = load_corpus(args)?;
    let config = args.matching.config(MatchMode::Fuzzy);
    config.validate(&lexicon)?;
    let point = if args.waveforms.is_some() {
        let level = [DegradationLevel::Noise(0.0)];
        degradation_sweep(
            &corpus,
            &lexicon,
            &config,
            &args.modes(),
            &level,
            0,
            ChannelModel::default(),
        )?
        .remove(0)
    } else {
        let records = load_fixture(&args.corpus)?;
        let provider = ReplayProvider::from_records(&records);
        SweepPoint {
            level: DegradationLevel::Edits(0),
            report: evaluate(&corpus, &lexicon, &provider, &config, &args.modes())?,
        }
    };
    if let Some(out) = &args.out {
        emit_report(&point.report, ReportFormat::from_path(out), out)
            .with_context(|| format!("writing {}", out.display()))?;
    }
    print_points(std::slice::from_ref(&point))
}

/// `reports/run.json` at level "2 edits" becomes `reports/run.edits-2.json`.
fn level_path(out: &Path, level: DegradationLevel) -> PathBuf {
    let slug = match level {
        DegradationLevel::Edits(k) => format!("edits-{k}"),
        DegradationLevel::Noise(n) => format!("noise-{n}"),
    };
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.{slug}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{slug}"),
    };
    out.with_file_name(name)
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let corpus_args = &args.corpus;
    let lexicon = corpus_args.matching.lexicon.load()?;
    let levels = parse_levels(&args.levels, corpus_args.waveforms.is_some())?;
    let corpus = load_corpus(corpus_args)?;
    let config = corpus_args.matching.config(MatchMode::Fuzzy);
    config.validate(&lexicon)?;
    let points = degradation_sweep(
        &corpus,
        &lexicon,
        &config,
        &corpus_args.modes(),
        &levels,
        args.seed,
        ChannelModel::default(),
    )?;
    if let Some(out) = &corpus_args.out {
        for p in &points {
            let path = level_path(out, p.level);
            emit_report(&p.report, ReportFormat::from_path(out), &path)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    print_points(&points)
}

fn cmd_serve(args: &ServeArgs) -> Result<()> {
    let lexicon = args.matching.lexicon.load()?;
    let config = args.matching.config(args.mode.into());
    let sim_config = SimConfig {
        linear_speed: args.linear_speed,
        vertical_speed: args.vertical_speed,
        tick: args.tick_ms as f64 / 1000.0,
        ..SimConfig::default()
    };
    let sim = reset(sim_config, Pose::default())?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let handle = voxdrone_server::serve(&args.address, sim, lexicon, config).await?;
        eprintln!("listening on {}", handle.local_addr());
        let mut outcomes = handle.subscribe();
        let interrupt = tokio::signal::ctrl_c();
        tokio::pin!(interrupt);
        loop {
            tokio::select! {
                outcome = outcomes.recv() => match outcome {
                    Ok(o) => {
                        let mut stdout = std::io::stdout().lock();
                        writeln!(stdout, "{}", serde_json::to_string(&o)?)?;
                        stdout.flush()?;
                    }
                    Err(tokio::sync::broadcast::error::RecvError::Lagged(n)) => eprintln!("dropped {n} log lines"),
                    Err(_) => break,
                },
                _ = &mut interrupt => break,
            }
        }
        let session = handle.shutdown().await?;
        if let Some(out) = &args.out {
            let file = std::fs::File::create(out).with_context(|| format!("writing {}", out.display()))?;
            write_session_log(&session.log, std::io::BufWriter::new(file))?;
        }
        eprintln!(
            "stopped after {} ticks, {} interpretations",
            session.ticks,
            session.log.len()
        );
        Ok(())
    })
}

fn cmd_lexicon_check(args: &LexiconArgs) -> Result<()> {
    let lexicon = args.load()?;
    ControllerConfig::default().validate(&lexicon)?;
    let entries = lexicon.entries();
    let mut closest: Option<(usize, usize, usize)> = None;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if entries[i].action_class == entries[j].action_class {
                continue;
            }
            let d = levenshtein(entries[i].surface.as_str(), entries[j].surface.as_str());
            if closest.is_none_or(|(best, _, _)| d < best) {
                closest = Some((d, i, j));
            }
        }
    }
    println!(
        "lexicon {} version {}: {} entries",
        lexicon.name(),
        lexicon.version(),
        lexicon.len()
    );
    for language in Language::ALL {
        println!("  {}: {}", language.code(), lexicon.entries_for(Some(language)).len());
    }
    if let Some((d, i, j)) = closest {
        println!(
            "closest cross-class pair: \"{}\" ({}) / \"{}\" ({}) at distance {d}",
            entries[i].surface.as_str(),
            entries[i].action_class.label(),
            entries[j].surface.as_str(),
            entries[j].action_class.label()
        );
        if d < 2 {
            bail!("surfaces of different classes are only {d} edit apart");
        }
    }
    Ok(())
}
