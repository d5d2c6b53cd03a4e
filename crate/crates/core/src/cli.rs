//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 when an analysis or
//! output step fails. Data goes to files or stdout; diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use log::{error, info, warn};

use crate::analysis::{analyze_snapshot, AnalysisOptions, SnapshotAnalysis};
use crate::arisa::arisa_report;
use crate::config::{parse_variant, Config};
use crate::evolution::{
    analyze_series, class_model_columns, correlation_report, coverage_set, cross_model_class_correlation, key_versions,
    read_manifest, VersionSeries, MODELS,
};
use crate::frontend::{
    facts_to_string, load_facts, parse_tree, Encoding, ParseOptions, Severity, FACTS_SCHEMA_VERSION,
};
use crate::metrics::compute_metrics;
use crate::model::Snapshot;
use crate::report;
use crate::sqale::{debt_by_package, sqale_report};

#[derive(Debug, Parser)]
#[command(
    name = "maintlens",
    about = "Maintainability analysis of Java source trees and their history"
)]
struct Cli {
    /// Worker threads (default: available processors).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    All,
    Mi,
    Arisa,
    Sqale,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Source directory or facts file (.json).
    source: PathBuf,
    /// Source file extension.
    #[arg(long, value_name = "EXT")]
    ext: Option<String>,
    /// Source encoding: utf-8 or latin-1.
    #[arg(long)]
    encoding: Option<String>,
    /// Glob of paths to skip, relative to the source root (repeatable).
    #[arg(long, value_name = "GLOB")]
    exclude: Vec<String>,
    /// Version label (default: directory name).
    #[arg(long)]
    label: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a source tree and emit its facts file.
    Parse {
        #[command(flatten)]
        src: SourceArgs,
        /// Output file (default: stdout).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Per-class metric table.
    Metrics {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Maintainability Index for the system, packages and classes.
    Mi {
        #[command(flatten)]
        src: SourceArgs,
        /// Size term: statements or lines.
        #[arg(long)]
        variant: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// ARiSA class and system scores.
    Arisa {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Rule issues, technical debt and grade.
    Sqale {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// All selected models on one snapshot.
    Analyze {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(long, value_enum, default_value = "all")]
        model: Model,
        /// Output directory (default: stdout).
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Analyze every version listed in a manifest.
    History {
        /// Lines of `label<TAB>path`, oldest first.
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory.
        #[arg(long, short)]
        out: PathBuf,
        /// Smallest TDR change that marks a key version (default 0.01).
        #[arg(long)]
        delta_tdr: Option<f64>,
        /// Smallest MI change that marks a key version (default 5.0).
        #[arg(long)]
        delta_mi: Option<f64>,
        /// Share of debt the coverage sets must reach.
        #[arg(long)]
        coverage: Option<f64>,
    },
    /// Rank correlations: size against models over a manifest, or the
    /// three models against each other over the classes of one snapshot.
    Correlate {
        /// Source directory or facts file, for the class-level matrix.
        #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
        source: Option<PathBuf>,
        /// Version manifest, for the size-against-model table.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output file (default: stdout).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

struct Session {
    config: Config,
    options: AnalysisOptions,
}

fn parse_options(config: &Config, src: &SourceArgs) -> Result<ParseOptions> {
    let mut options = ParseOptions::default();
    if let Some(ext) = src.ext.as_ref().or(config.parse.ext.as_ref()) {
        options.extension = ext.trim_start_matches('.').to_string();
    }
    if let Some(enc) = src.encoding.as_ref().or(config.parse.encoding.as_ref()) {
        options.encoding = enc.parse::<Encoding>()?;
    }
    options.exclude = config.parse.exclude.clone();
    options.exclude.extend(src.exclude.iter().cloned());
    options.label = src.label.clone();
    Ok(options)
}

fn is_facts_file(path: &Path) -> bool {
    path.is_file() && path.extension().is_some_and(|e| e == "json")
}

fn load_snapshot(ctx: &Session, src: &SourceArgs) -> Result<Snapshot> {
    if is_facts_file(&src.source) {
        let snapshot = load_facts(&src.source)?;
        return Ok(match &src.label {
            Some(label) => snapshot.relabeled(label),
            None => snapshot,
        });
    }
    let options = parse_options(&ctx.config, src)?;
    let (snapshot, diagnostics) = parse_tree(&src.source, &options)?;
    for d in &diagnostics {
        match d.severity {
            Severity::Error => error!("{d}"),
            Severity::Warning => warn!("{d}"),
        }
    }
    info!(
        "{}: {} classes, {} diagnostics",
        snapshot.version_label(),
        snapshot.classes().count(),
        diagnostics.len()
    );
    Ok(snapshot)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_in(dir: &Path, name: &str, text: &str) -> Result<()> {
    emit(Some(&dir.join(name)), text)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn selected(model: Model) -> Vec<&'static str> {
    match model {
        Model::All => MODELS.to_vec(),
        Model::Mi => vec!["mi"],
        Model::Arisa => vec!["arisa"],
        Model::Sqale => vec!["sqale"],
    }
}

fn arisa_summary(a: &SnapshotAnalysis) -> String {
    format!(
        "system,{}\n",
        a.arisa_system()
            .map_or_else(|| report::NOT_APPLICABLE.into(), report::fmt4)
    )
}

fn sqale_summary(a: &SnapshotAnalysis) -> String {
    match &a.debt {
        Some(d) => format!(
            "td_minutes,{}\ndev_time_minutes,{}\ntdr,{}\ngrade,{}\n",
            report::fmt4(d.td_minutes),
            report::fmt4(d.dev_time_minutes),
            report::fmt4(d.tdr),
            report::grade_line(d)
        ),
        None => format!("grade,{}\n", report::NOT_APPLICABLE),
    }
}

fn run_analyze(a: &SnapshotAnalysis, models: &[&str], out: Option<&Path>, format: Format, ctx: &Session) -> Result<()> {
    if format == Format::Json {
        let text = report::analysis_json(a, models);
        return match out {
            Some(dir) => {
                create_dir(dir)?;
                write_in(dir, "analysis.json", &text)
            }
            None => emit(None, &text),
        };
    }
    let variant = ctx.options.mi_variant;
    let mut sections: Vec<(&str, String)> = Vec::new();
    for model in models {
        match *model {
            "mi" => sections.push(("mi.csv", report::mi_csv(&a.matrix, variant))),
            "arisa" => {
                sections.push(("arisa.csv", report::arisa_csv(&a.arisa.clone().unwrap_or_default())));
                sections.push(("arisa_system.csv", arisa_summary(a)));
            }
            "sqale" => {
                let issues = a.debt.as_ref().map_or(&[][..], |d| &d.issues[..]);
                sections.push(("issues.csv", report::issues_csv(issues)));
                sections.push(("sqale_summary.csv", sqale_summary(a)));
            }
            _ => {}
        }
    }
    if models.len() == MODELS.len() {
        sections.push(("scorecards.csv", report::scorecards_csv(&a.scorecards)));
    }
    match out {
        Some(dir) => {
            create_dir(dir)?;
            for (name, text) in &sections {
                write_in(dir, name, text)?;
            }
            Ok(())
        }
        None => {
            let mut text = String::new();
            for (name, body) in &sections {
                text.push_str(&format!("# {}\n{body}\n", name.trim_end_matches(".csv")));
            }
            emit(None, &text)
        }
    }
}

fn warn_arisa_across_versions() {
    warn!(
        "ARiSA scores depend on each snapshot's own metric ranges; comparing them across versions is only indicative"
    );
}

fn run_history(ctx: &Session, manifest: &Path, out: &Path, delta_tdr: f64, delta_mi: f64, coverage: f64) -> Result<()> {
    let entries = read_manifest(manifest)?;
    let series = analyze_series(&entries, &parse_options(&ctx.config, &empty_source())?, &ctx.options)?;
    for e in &series.entries {
        if let Err(message) = &e.outcome {
            error!("version {}: {message}", e.label);
        }
    }
    warn_arisa_across_versions();
    create_dir(out)?;
    write_in(out, "scorecard.csv", &report::series_csv(&series))?;
    create_dir(&out.join("classes"))?;
    create_dir(&out.join("coverage"))?;
    for e in &series.entries {
        let Some(a) = e.analysis() else { continue };
        let stem = report::file_stem(&e.label);
        write_in(
            &out.join("classes"),
            &format!("{stem}.csv"),
            &report::scorecards_csv(&a.scorecards),
        )?;
        let issues = a.debt.as_ref().map_or(&[][..], |d| &d.issues[..]);
        match coverage_set(&debt_by_package(issues), coverage) {
            Ok(set) => write_in(
                &out.join("coverage"),
                &format!("{stem}.csv"),
                &report::coverage_csv(&set),
            )?,
            Err(err) => info!("version {}: no coverage set ({err})", e.label),
        }
    }
    write_in(
        out,
        "key_versions.csv",
        &report::key_versions_csv(&key_versions(&series, delta_tdr, delta_mi)),
    )?;
    match correlation_report(&series) {
        Ok(c) => write_in(out, "correlation.csv", &report::correlation_csv(&c))?,
        Err(err) => warn!("no correlation report: {err}"),
    }
    Ok(())
}

fn empty_source() -> SourceArgs {
    SourceArgs {
        source: PathBuf::new(),
        ext: None,
        encoding: None,
        exclude: Vec::new(),
        label: None,
    }
}

fn series_correlation(ctx: &Session, manifest: &Path) -> Result<String> {
    let entries = read_manifest(manifest)?;
    let series: VersionSeries = analyze_series(&entries, &parse_options(&ctx.config, &empty_source())?, &ctx.options)?;
    warn_arisa_across_versions();
    Ok(report::correlation_csv(&correlation_report(&series)?))
}

fn dispatch(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let options = config.analysis_options()?;
    let mut ctx = Session { config, options };
    match cli.command {
        Command::Parse { src, out } => {
            let snapshot = load_snapshot(&ctx, &src)?;
            emit(out.as_deref(), &facts_to_string(&snapshot))
        }
        Command::Metrics { src, out, format } => {
            let matrix = compute_metrics(&load_snapshot(&ctx, &src)?);
            let text = match format {
                Format::Csv => report::metrics_csv(&matrix),
                Format::Json => report::to_json(&matrix),
            };
            emit(out.as_deref(), &text)
        }
        Command::Mi {
            src,
            variant,
            out,
            format,
        } => {
            if let Some(v) = variant {
                ctx.options.mi_variant = parse_variant(&v)?;
            }
            let a = analyze_snapshot(&load_snapshot(&ctx, &src)?, &ctx.options);
            let text = match format {
                Format::Csv => report::mi_csv(&a.matrix, ctx.options.mi_variant),
                Format::Json => report::analysis_json(&a, &["mi"]),
            };
            emit(out.as_deref(), &text)
        }
        Command::Arisa { src, out, format } => {
            let matrix = compute_metrics(&load_snapshot(&ctx, &src)?);
            let r = arisa_report(&matrix)?;
            eprintln!("ARiSA system maintainability: {}", report::fmt4(r.system));
            let text = match format {
                Format::Csv => report::arisa_csv(&r),
                Format::Json => report::to_json(&r),
            };
            emit(out.as_deref(), &text)
        }
        Command::Sqale { src, out, format } => {
            let snapshot = load_snapshot(&ctx, &src)?;
            let matrix = compute_metrics(&snapshot);
            let debt = sqale_report(&snapshot, &matrix, &ctx.options.rules)?;
            eprintln!("SQALE rating: {}", report::grade_line(&debt));
            let text = match format {
                Format::Csv => report::issues_csv(&debt.issues),
                Format::Json => report::to_json(&debt),
            };
            emit(out.as_deref(), &text)
        }
        Command::Analyze {
            src,
            model,
            out,
            format,
        } => {
            let a = analyze_snapshot(&load_snapshot(&ctx, &src)?, &ctx.options);
            run_analyze(&a, &selected(model), out.as_deref(), format, &ctx)
        }
        Command::History {
            manifest,
            out,
            delta_tdr,
            delta_mi,
            coverage,
        } => run_history(
            &ctx,
            &manifest,
            &out,
            delta_tdr.unwrap_or(ctx.config.delta_tdr()),
            delta_mi.unwrap_or(ctx.config.delta_mi()),
            coverage.unwrap_or(ctx.config.coverage()),
        ),
        Command::Correlate { source, manifest, out } => {
            let text = match (source, manifest) {
                (_, Some(manifest)) => series_correlation(&ctx, &manifest)?,
                (Some(source), None) => {
                    let src = SourceArgs {
                        source,
                        ..empty_source()
                    };
                    let a = analyze_snapshot(&load_snapshot(&ctx, &src)?, &ctx.options);
                    let [mi, arisa, td] = class_model_columns(&a);
                    report::cross_model_csv(&cross_model_class_correlation(&a.matrix, &mi, &arisa, &td)?)
                }
                (None, None) => bail!("either a source or --manifest is required"),
            };
            eprintln!("{}", report::CORRELATION_LEGEND);
            emit(out.as_deref(), &text)
        }
    }
}

pub fn version_text() -> String {
    format!("{} (facts schema {FACTS_SCHEMA_VERSION})", env!("CARGO_PKG_VERSION"))
}

/// Runs the tool on the given arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let command = Cli::command().version(version_text());
    let cli = match command
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .try_init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 1;
        }
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            warn!("cannot size thread pool: {err}");
        }
    }
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}
