//! `guifusion`: rip app models, serve the reporter API, and work with reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use guifusion_core::reporting::CrawlOptions;
use guifusion_core::{
    crawl_for_crashes, parse_app_model, replay_report, to_canonical_json, triage_report, AppDatabase, BugReport,
    CrawlStrategy, OwnershipMap, ReportFormat, RipConfig, SimilarityConfig,
};
use guifusion_service::Store;

const DB_ENV: &str = "GUIFUSION_DB";

#[derive(Parser)]
#[command(name = "guifusion", version, about = "Structured bug reporting over ripped app models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Store directory. GUIFUSION_DB, when set, takes precedence.
#[derive(Args)]
struct DbArg {
    #[arg(long, value_name = "DIR")]
    db: Option<PathBuf>,
}

impl DbArg {
    fn resolve(&self) -> Option<PathBuf> {
        std::env::var_os(DB_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| self.db.clone())
    }

    fn require(&self) -> Result<PathBuf> {
        self.resolve()
            .ok_or_else(|| anyhow!("no store directory: pass --db or set {DB_ENV}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rip an app model and write its analysis database into a store.
    Rip {
        model: PathBuf,
        /// Store directory to write into.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, default_value_t = RipConfig::default().max_events)]
        max_events: usize,
        #[arg(long, default_value_t = RipConfig::default().max_depth)]
        max_depth: usize,
        /// Text tried for `type` events, in order (repeatable).
        #[arg(long = "type-input", value_name = "TEXT")]
        type_inputs: Vec<String>,
        #[arg(long, default_value_t = guifusion_core::database::DEFAULT_NGRAM_ORDER)]
        ngram_order: usize,
        #[arg(long, default_value_t = guifusion_core::database::DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Serve the HTTP API over a store.
    Serve {
        #[command(flatten)]
        db: DbArg,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
    /// Report documents.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
    /// Replay a report (file or stored id) on an app model.
    Replay {
        report: String,
        model: PathBuf,
        #[command(flatten)]
        db: DbArg,
    },
    /// Crawl an app model for crashes and emit one report per crash.
    Crashes {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::Dfs)]
        strategy: Strategy,
        /// Event budget for the random strategies.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Store the reports in this store instead of printing them.
        #[command(flatten)]
        db: DbArg,
    },
    /// Detect duplicate reports in a store and write duplicates.json.
    Dedup {
        #[command(flatten)]
        db: DbArg,
        #[arg(long, default_value_t = SimilarityConfig::default().tau)]
        tau: f64,
    },
    /// Rank developers for a report (file or stored id).
    Triage {
        report: String,
        #[arg(long, value_name = "FILE")]
        owners: PathBuf,
        #[command(flatten)]
        db: DbArg,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Render a report (file or stored id) to stdout.
    Render {
        report: String,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        #[command(flatten)]
        db: DbArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Dfs,
    Random,
    Ngram,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Html,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Md => ReportFormat::Markdown,
            Format::Html => ReportFormat::Html,
            Format::Json => ReportFormat::Json,
        }
    }
}

fn read_model(path: &Path) -> Result<guifusion_core::AppModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_app_model(&text).with_context(|| format!("in {}", path.display()))
}

/// A report argument is a JSON file path or, failing that, an id in the store.
fn load_report(arg: &str, db: &DbArg) -> Result<BugReport> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return serde_json::from_str(&text).with_context(|| format!("{arg} is not a report"));
    }
    let Some(root) = db.resolve() else {
        bail!("{arg}: no such file (pass --db or set {DB_ENV} to look up report ids)");
    };
    let store = Store::open(root)?;
    Ok((*store.report(arg)?).clone())
}

fn print_json<T: serde::Serialize + ?Sized>(value: &T) {
    print!("{}", to_canonical_json(value));
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rip {
            model,
            out,
            max_events,
            max_depth,
            type_inputs,
            ngram_order,
            alpha,
        } => {
            let model = read_model(&model)?;
            let mut config = RipConfig {
                max_events,
                max_depth,
                ..RipConfig::default()
            };
            if !type_inputs.is_empty() {
                config.type_inputs = type_inputs;
            }
            let db = AppDatabase::analyze_with(model, &config, ngram_order, alpha)?;
            let dir = db.write(&out)?;
            let crashes = db.graph.edges.iter().filter(|e| e.to.is_crash()).count();
            println!(
                "{} {}: {} states, {} edges ({} crashing){} -> {}",
                db.model.app_id,
                db.model.version,
                db.graph.states.len(),
                db.graph.edges.len(),
                crashes,
                if db.graph.truncated { ", truncated" } else { "" },
                dir.display()
            );
        }
        Command::Serve { db, port, host } => {
            let store = std::sync::Arc::new(Store::open(db.require()?)?);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime
                .block_on(guifusion_service::serve(store, (host, port).into()))
                .with_context(|| format!("serving on {host}:{port}"))?;
        }
        Command::Report {
            command: ReportCommand::Render { report, format, db },
        } => {
            let report = load_report(&report, &db)?;
            print!("{}", guifusion_core::render_report(&report, format.into()));
        }
        Command::Replay { report, model, db } => {
            let report = load_report(&report, &db)?;
            let model = read_model(&model)?;
            if model.app_id != report.app_id {
                bail!("report is for `{}`, model is `{}`", report.app_id, model.app_id);
            }
            print_json(&replay_report(&report, &model));
        }
        Command::Crashes {
            model,
            strategy,
            budget,
            seed,
            db,
        } => {
            let analyzed = AppDatabase::analyze(read_model(&model)?, &RipConfig::default())?;
            let strategy = match strategy {
                Strategy::Dfs => CrawlStrategy::DfsComplete,
                Strategy::Random => CrawlStrategy::UniformRandom { seed, budget },
                Strategy::Ngram => CrawlStrategy::NgramWeighted { seed, budget },
            };
            let reports = crawl_for_crashes(&analyzed, &strategy, &CrawlOptions::default());
            match db.resolve() {
                Some(root) => {
                    let store = Store::open(root)?;
                    for report in reports {
                        let stored = store.import_report(report)?;
                        println!("{}\t{}", stored.report_id, stored.title);
                    }
                }
                None => print_json(&reports),
            }
        }
        Command::Dedup { db, tau } => {
            let store = Store::open(db.require()?)?;
            let cfg = SimilarityConfig {
                tau,
                ..SimilarityConfig::default()
            };
            print_json(&store.write_duplicates(&cfg)?);
        }
        Command::Triage { report, owners, db } => {
            let report = load_report(&report, &db)?;
            let text = std::fs::read_to_string(&owners).with_context(|| format!("reading {}", owners.display()))?;
            let owners: OwnershipMap =
                serde_json::from_str(&text).with_context(|| format!("{} is not an ownership map", owners.display()))?;
            print_json(&triage_report(&report, &owners)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_target(false).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
