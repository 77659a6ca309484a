use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use chrono::{DateTime, Utc};
use guifusion_core::flow::Suggestion;
use guifusion_core::maintenance::{DuplicatePair, Duplicates, TriageEntry};
use guifusion_core::reporting::{ReplayResult, ReportFormat, ReportMeta};
use guifusion_core::{
    assemble_report, detect_duplicates, render_report, replay_report, suggest_next, to_canonical_json, Action,
    AppDatabase, BugReport, DatabaseError, EventToken, FlowError, OwnershipMap, SimilarityConfig, Step,
};
use guifusion_core::app_model::ComponentId;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

const SESSIONS: &str = "sessions";
const REPORTS: &str = "reports";
const OWNERS: &str = "owners.json";
const DUPLICATES: &str = "duplicates.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Open,
    Finalized,
    Abandoned,
}

impl SessionStatus {
    fn as_str(self) -> &'static str {
        match self {
            SessionStatus::Open => "open",
            SessionStatus::Finalized => "finalized",
            SessionStatus::Abandoned => "abandoned",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReporterSession {
    pub session_id: String,
    pub app_id: String,
    pub version: String,
    pub status: SessionStatus,
    pub history: Vec<Step>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRequest {
    pub action: Action,
    pub component_id: ComponentId,
    #[serde(default)]
    pub input_text: Option<String>,
    #[serde(default)]
    pub note: Option<String>,
    /// Record the step even if it is not among the suggestions.
    #[serde(default)]
    pub manual: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalizeRequest {
    pub title: String,
    pub device: String,
    #[serde(default)]
    pub description: String,
    /// Defaults to the current time.
    #[serde(default)]
    pub created_at: Option<DateTime<Utc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuggestionView {
    pub session_id: String,
    pub steps: usize,
    /// Exception raised by the last step; nothing further is suggested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crashed: Option<String>,
    pub suggestion: Suggestion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub report_id: String,
    pub title: String,
    pub app_id: String,
    pub app_version: String,
    pub created_at: DateTime<Utc>,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crash: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuplicatesView {
    pub report_id: String,
    pub tau: f64,
    pub pairs: Vec<DuplicatePair>,
    pub cluster: Option<Vec<String>>,
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> ServiceError + '_ {
    move |e| ServiceError::Internal(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), ServiceError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_error(parent))?;
    }
    fs::write(path, contents).map_err(io_error(path))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ServiceError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    serde_json::from_str(&text).map_err(|e| ServiceError::Internal(format!("{}: {e}", path.display())))
}

/// `prefix-000042` → 42.
fn parse_counter(id: &str, prefix: &str) -> Option<u64> {
    id.strip_prefix(prefix)?.strip_prefix('-')?.parse().ok()
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, ServiceError> {
    let mut out = Vec::new();
    match fs::read_dir(dir) {
        Ok(entries) => {
            for entry in entries.flatten() {
                let path = entry.path();
                if path.extension().is_some_and(|e| e == "json") {
                    out.push(path);
                }
            }
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(io_error(dir)(e)),
    }
    out.sort();
    Ok(out)
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(PoisonError::into_inner)
}

/// File-backed state shared by all requests.
///
/// Every mutation is written through to disk before it is acknowledged, so
/// reopening a store yields the same sessions and reports.
pub struct Store {
    root: PathBuf,
    databases: RwLock<BTreeMap<(String, String), Arc<AppDatabase>>>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<ReporterSession>>>>,
    reports: RwLock<BTreeMap<String, Arc<BugReport>>>,
    next_session: Mutex<u64>,
    next_report: Mutex<u64>,
    screenshots: RwLock<BTreeMap<String, PathBuf>>,
}

impl Store {
    /// Opens (or initializes) the store rooted at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(io_error(&root))?;

        let mut sessions = BTreeMap::new();
        let mut max_session = 0;
        for path in json_files(&root.join(SESSIONS))? {
            let s: ReporterSession = read_json(&path)?;
            max_session = max_session.max(parse_counter(&s.session_id, "s").unwrap_or(0));
            sessions.insert(s.session_id.clone(), Arc::new(Mutex::new(s)));
        }
        let mut reports = BTreeMap::new();
        let mut max_report = 0;
        for path in json_files(&root.join(REPORTS))? {
            let r: BugReport = read_json(&path)?;
            max_report = max_report.max(parse_counter(&r.report_id, "r").unwrap_or(0));
            reports.insert(r.report_id.clone(), Arc::new(r));
        }

        let store = Self {
            root,
            databases: RwLock::default(),
            sessions: RwLock::new(sessions),
            reports: RwLock::new(reports),
            next_session: Mutex::new(max_session + 1),
            next_report: Mutex::new(max_report + 1),
            screenshots: RwLock::default(),
        };
        store.index_screenshots();
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn index_screenshots(&self) {
        let mut index = BTreeMap::new();
        for (app, version) in AppDatabase::list(&self.root) {
            let dir = AppDatabase::dir(&self.root, &app, &version).join(guifusion_core::reporting::SCREENSHOT_DIR);
            for entry in fs::read_dir(&dir).into_iter().flatten().flatten() {
                let path = entry.path();
                if let Some(id) = path.file_stem().and_then(|s| s.to_str()) {
                    index.insert(id.to_owned(), path.clone());
                }
            }
        }
        *self.screenshots.write().unwrap_or_else(PoisonError::into_inner) = index;
    }

    /// Loads (and caches) the analysis database for an app version.
    pub fn database(&self, app_id: &str, version: &str) -> Result<Arc<AppDatabase>, ServiceError> {
        let key = (app_id.to_owned(), version.to_owned());
        if let Some(db) = self.databases.read().unwrap_or_else(PoisonError::into_inner).get(&key) {
            return Ok(db.clone());
        }
        let db = match AppDatabase::load(&self.root, app_id, version) {
            Ok(db) => Arc::new(db),
            Err(DatabaseError::Missing { .. }) => {
                return Err(ServiceError::UnknownApp {
                    app_id: app_id.to_owned(),
                    version: version.to_owned(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        let mut cache = self.databases.write().unwrap_or_else(PoisonError::into_inner);
        Ok(cache.entry(key).or_insert(db).clone())
    }

    /// Writes a freshly analyzed database into the store.
    pub fn install_database(&self, db: AppDatabase) -> Result<(), ServiceError> {
        db.write(&self.root)?;
        let key = (db.model.app_id.clone(), db.model.version.clone());
        self.databases
            .write()
            .unwrap_or_else(PoisonError::into_inner)
            .insert(key, Arc::new(db));
        self.index_screenshots();
        Ok(())
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<ReporterSession>>, ServiceError> {
        self.sessions
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_owned()))
    }

    fn persist_session(&self, s: &ReporterSession) -> Result<(), ServiceError> {
        write_file(
            &self.root.join(SESSIONS).join(format!("{}.json", s.session_id)),
            &to_canonical_json(s),
        )
    }

    pub fn create_session(&self, app_id: &str, version: &str) -> Result<ReporterSession, ServiceError> {
        self.database(app_id, version)?;
        let id = {
            let mut next = lock(&self.next_session);
            let id = format!("s-{:06}", *next);
            *next += 1;
            id
        };
        let session = ReporterSession {
            session_id: id.clone(),
            app_id: app_id.to_owned(),
            version: version.to_owned(),
            status: SessionStatus::Open,
            history: Vec::new(),
            report_id: None,
        };
        self.persist_session(&session)?;
        self.sessions
            .write()
            .unwrap_or_else(PoisonError::into_inner)
            .insert(id, Arc::new(Mutex::new(session.clone())));
        Ok(session)
    }

    pub fn get_session(&self, id: &str) -> Result<ReporterSession, ServiceError> {
        let session = self.session(id)?;
        let s = lock(&session).clone();
        Ok(s)
    }

    fn view(&self, session: &ReporterSession) -> Result<SuggestionView, ServiceError> {
        let db = self.database(&session.app_id, &session.version)?;
        let (suggestion, crashed) = suggestions_for(&db, &session.history)?;
        Ok(SuggestionView {
            session_id: session.session_id.clone(),
            steps: session.history.len(),
            crashed,
            suggestion,
        })
    }

    pub fn get_suggestions(&self, id: &str) -> Result<SuggestionView, ServiceError> {
        let session = self.session(id)?;
        let s = lock(&session);
        self.view(&s)
    }

    fn open_session<'a>(
        &self,
        guard: &'a mut std::sync::MutexGuard<'_, ReporterSession>,
    ) -> Result<&'a mut ReporterSession, ServiceError> {
        if guard.status != SessionStatus::Open {
            return Err(ServiceError::SessionClosed(guard.session_id.clone(), guard.status.as_str()));
        }
        Ok(&mut **guard)
    }

    pub fn submit_step(&self, id: &str, req: StepRequest) -> Result<SuggestionView, ServiceError> {
        let session = self.session(id)?;
        let mut guard = lock(&session);
        let s = self.open_session(&mut guard)?;
        let db = self.database(&s.app_id, &s.version)?;

        let (current, crashed) = suggestions_for(&db, &s.history)?;
        if let Some(exception) = crashed {
            return Err(ServiceError::InvalidStep(format!(
                "the app crashed with {exception} at step {}; undo or finalize",
                s.history.len()
            )));
        }
        let Some(record) = db.universe.get(&req.component_id) else {
            return Err(ServiceError::InvalidStep(format!(
                "unknown component `{}` in {} {}",
                req.component_id, s.app_id, s.version
            )));
        };
        let (_, component) = db
            .model
            .component(&req.component_id)
            .expect("universe and model agree");
        if !component.permits(req.action) {
            return Err(ServiceError::InvalidStep(format!(
                "{} `{}` does not accept {}",
                record.kind.as_str(),
                req.component_id,
                req.action
            )));
        }
        if req.action != Action::Type && req.input_text.is_some() {
            return Err(ServiceError::InvalidStep(format!("input text is only allowed for type, not {}", req.action)));
        }

        let event = EventToken::new(req.action, req.component_id.clone());
        let offered = current.offers(&event);
        if !offered && !req.manual {
            return Err(ServiceError::InvalidStep(format!(
                "{event} is not suggested after step {}; mark the step manual to record it anyway",
                s.history.len()
            )));
        }
        let mut step = Step::new(s.history.len() as u32 + 1, event);
        if let Some(text) = req.input_text {
            step = step.with_input(text);
        }
        if let Some(note) = req.note {
            step = step.with_note(note);
        }
        step.overridden = !offered;

        let mut updated = s.clone();
        updated.history.push(step);
        let view = self.view(&updated)?;
        self.persist_session(&updated)?;
        *s = updated;
        Ok(view)
    }

    pub fn undo_last_step(&self, id: &str) -> Result<SuggestionView, ServiceError> {
        let session = self.session(id)?;
        let mut guard = lock(&session);
        let s = self.open_session(&mut guard)?;
        if s.history.is_empty() {
            return Err(ServiceError::EmptyHistory(s.session_id.clone()));
        }
        let mut updated = s.clone();
        updated.history.pop();
        self.persist_session(&updated)?;
        *s = updated;
        self.view(s)
    }

    /// Marks an open session abandoned; its history is kept.
    pub fn abandon(&self, id: &str) -> Result<ReporterSession, ServiceError> {
        let session = self.session(id)?;
        let mut guard = lock(&session);
        let s = self.open_session(&mut guard)?;
        let mut updated = s.clone();
        updated.status = SessionStatus::Abandoned;
        self.persist_session(&updated)?;
        *s = updated;
        Ok(s.clone())
    }

    fn allocate_report_id(&self) -> String {
        let mut next = lock(&self.next_report);
        let id = format!("r-{:06}", *next);
        *next += 1;
        id
    }

    fn persist_report(&self, report: BugReport) -> Result<Arc<BugReport>, ServiceError> {
        let base = self.root.join(REPORTS);
        for format in [ReportFormat::Markdown, ReportFormat::Html] {
            write_file(
                &base.join(format!("{}.{}", report.report_id, format.extension())),
                &render_report(&report, format),
            )?;
        }
        // the JSON file is written last: its presence marks the report as complete
        write_file(&base.join(format!("{}.json", report.report_id)), &to_canonical_json(&report))?;
        let report = Arc::new(report);
        self.reports
            .write()
            .unwrap_or_else(PoisonError::into_inner)
            .insert(report.report_id.clone(), report.clone());
        Ok(report)
    }

    pub fn finalize(&self, id: &str, req: FinalizeRequest) -> Result<BugReport, ServiceError> {
        let session = self.session(id)?;
        let mut guard = lock(&session);
        let s = self.open_session(&mut guard)?;
        if s.history.is_empty() {
            return Err(ServiceError::EmptyHistory(s.session_id.clone()));
        }
        let db = self.database(&s.app_id, &s.version)?;
        let meta = ReportMeta {
            report_id: String::new(),
            title: req.title,
            device: req.device,
            description: req.description,
            created_at: req.created_at.unwrap_or_else(Utc::now),
        };
        // assemble before allocating so a rejected history does not burn an id
        let mut report = assemble_report(meta, s.history.clone(), &db.graph, &db.universe)?;
        report.report_id = self.allocate_report_id();
        let report = self.persist_report(report)?;

        let mut updated = s.clone();
        updated.status = SessionStatus::Finalized;
        updated.report_id = Some(report.report_id.clone());
        self.persist_session(&updated)?;
        *s = updated;
        Ok((*report).clone())
    }

    /// Stores an externally produced report under a fresh id.
    pub fn import_report(&self, mut report: BugReport) -> Result<BugReport, ServiceError> {
        report.report_id = self.allocate_report_id();
        Ok((*self.persist_report(report)?).clone())
    }

    pub fn report(&self, id: &str) -> Result<Arc<BugReport>, ServiceError> {
        self.reports
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownReport(id.to_owned()))
    }

    pub fn reports(&self) -> Vec<Arc<BugReport>> {
        self.reports
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .values()
            .cloned()
            .collect()
    }

    pub fn list_reports(&self) -> Vec<ReportSummary> {
        self.reports()
            .iter()
            .map(|r| ReportSummary {
                report_id: r.report_id.clone(),
                title: r.title.clone(),
                app_id: r.app_id.clone(),
                app_version: r.app_version.clone(),
                created_at: r.created_at,
                steps: r.steps.len(),
                crash: r.crash.clone(),
            })
            .collect()
    }

    pub fn render(&self, id: &str, format: ReportFormat) -> Result<String, ServiceError> {
        let report = self.report(id)?;
        Ok(match format {
            ReportFormat::Json => to_canonical_json(&*report),
            other => render_report(&report, other),
        })
    }

    pub fn replay(&self, id: &str, version: &str) -> Result<ReplayResult, ServiceError> {
        let report = self.report(id)?;
        let db = self.database(&report.app_id, version)?;
        Ok(replay_report(&report, &db.model))
    }

    /// Duplicate detection over every stored report.
    pub fn detect_duplicates(&self, cfg: &SimilarityConfig) -> Result<Duplicates, ServiceError> {
        let corpus: Vec<BugReport> = self.reports().iter().map(|r| (**r).clone()).collect();
        Ok(detect_duplicates(&corpus, cfg)?)
    }

    /// Runs duplicate detection and writes `duplicates.json`.
    pub fn write_duplicates(&self, cfg: &SimilarityConfig) -> Result<Duplicates, ServiceError> {
        let d = self.detect_duplicates(cfg)?;
        write_file(&self.root.join(DUPLICATES), &to_canonical_json(&d))?;
        Ok(d)
    }

    pub fn duplicates_of(&self, id: &str, cfg: &SimilarityConfig) -> Result<DuplicatesView, ServiceError> {
        self.report(id)?;
        let d = self.detect_duplicates(cfg)?;
        Ok(DuplicatesView {
            report_id: id.to_owned(),
            tau: d.tau,
            pairs: d.involving(id).cloned().collect(),
            cluster: d.cluster_of(id).cloned(),
        })
    }

    /// The ownership map in `owners.json`; empty when the file is absent.
    pub fn owners(&self) -> Result<OwnershipMap, ServiceError> {
        let path = self.root.join(OWNERS);
        if !path.is_file() {
            return Ok(OwnershipMap::default());
        }
        read_json(&path)
    }

    pub fn set_owners(&self, owners: &OwnershipMap) -> Result<(), ServiceError> {
        write_file(&self.root.join(OWNERS), &to_canonical_json(owners))
    }

    pub fn triage(&self, id: &str) -> Result<Vec<TriageEntry>, ServiceError> {
        let report = self.report(id)?;
        Ok(guifusion_core::triage_report(&report, &self.owners()?)?)
    }

    pub fn screenshot(&self, id: &str) -> Result<String, ServiceError> {
        let lookup = || {
            self.screenshots
                .read()
                .unwrap_or_else(PoisonError::into_inner)
                .get(id)
                .cloned()
        };
        let path = match lookup() {
            Some(p) => p,
            None => {
                // a database may have been ripped into the store since startup
                self.index_screenshots();
                lookup().ok_or_else(|| ServiceError::UnknownScreenshot(id.to_owned()))?
            }
        };
        fs::read_to_string(&path).map_err(io_error(&path))
    }

    /// Rewrites every session and report file from memory.
    pub fn flush(&self) -> Result<(), ServiceError> {
        let sessions: Vec<_> = self
            .sessions
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .values()
            .cloned()
            .collect();
        for s in sessions {
            self.persist_session(&lock(&s))?;
        }
        for r in self.reports() {
            self.persist_report((*r).clone())?;
        }
        Ok(())
    }
}

/// Suggestions after `history`. A history whose last step crashes has none;
/// the exception is returned alongside.
fn suggestions_for(db: &AppDatabase, history: &[Step]) -> Result<(Suggestion, Option<String>), ServiceError> {
    match suggest_next(history, &db.graph, &db.universe, &db.ngram) {
        Ok(s) => Ok((s, None)),
        Err(FlowError::HistoryHitsCrash { ordinal }) if ordinal as usize == history.len() => {
            let prefix = guifusion_core::infer_gui_state(&history[..history.len() - 1], &db.graph)?;
            let last = &history[history.len() - 1].event;
            let exception = prefix
                .iter()
                .find_map(|fp| db.graph.edge(fp, last))
                .and_then(|e| match &e.to {
                    guifusion_core::ripper::EdgeTarget::Crash(exc) => Some(exc.clone()),
                    _ => None,
                })
                .unwrap_or_default();
            let empty = Suggestion {
                inferred_states: Vec::new(),
                actions: Vec::new(),
                components_by_action: BTreeMap::new(),
            };
            Ok((empty, Some(exception)))
        }
        Err(e) => Err(e.into()),
    }
}
