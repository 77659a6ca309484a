//! Structured, replayable bug reporting for GUI applications.
//!
//! The pipeline runs in two phases. Analysis parses a declarative
//! [`app_model`], extracts its component universe and rips the app into an
//! [`ripper::EventFlowGraph`]. Report generation infers the reporter's GUI
//! state from their step history, offers ranked `{action, component}`
//! completions ([`flow`]), and assembles three-section reports that can be
//! rendered, replayed on other versions and crawled for automatically
//! ([`reporting`]). [`maintenance`] applies finished reports to duplicate
//! detection and developer triage.

pub mod app_model;
pub mod canonical;
pub mod database;
pub mod fixtures;
pub mod flow;
pub mod maintenance;
pub mod reporting;
pub mod ripper;

pub use app_model::{
    extract_component_universe, parse_app_model, Action, AppModel, ComponentId, ComponentKind,
    ComponentRecord, ComponentUniverse, ParseError, RelativeLocation, ScreenId,
};
pub use canonical::to_canonical_json;
pub use database::{AppDatabase, DatabaseError};
pub use flow::{
    infer_gui_state, ngram_score, suggest_next, train_ngram, FlowError, NGramModel, Step,
    Suggestion,
};
pub use maintenance::{
    detect_duplicates, report_similarity, triage_report, MaintenanceError, OwnershipMap,
    SimilarityConfig,
};
pub use reporting::{
    assemble_report, crawl_for_crashes, generate_step_sentence, render_report, replay_report,
    BugReport, CrawlStrategy, ReplayResult, ReportError, ReportFormat,
};
pub use ripper::{
    cold_start, execute_event, rip, EventFlowGraph, EventOutcome, EventToken, Fingerprint,
    GuiState, RipConfig,
};
