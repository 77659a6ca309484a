//! The analysis database: everything the analysis phase produces for one app
//! version, and its on-disk layout.
//!
//! ```text
//! <root>/db/<app_id>/<version>/
//!     model.json  efg.json  trace.json  ngram.json  rip.json
//!     states/<fingerprint>.json
//!     screens/<screenshot-id>.svg
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::app_model::{parse_app_model, AppModel, ComponentUniverse, ParseError};
use crate::canonical::to_canonical_json;
use crate::flow::{train_ngram, FlowError, NGramModel};
use crate::reporting::SCREENSHOT_DIR;
use crate::ripper::{
    rip, Edge, EventFlowGraph, EventToken, Fingerprint, GuiState, RipConfig, StateScreenshots,
};

pub const DEFAULT_NGRAM_ORDER: usize = 3;
pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, thiserror::Error)]
pub enum DatabaseError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Model(#[from] ParseError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("no analysis database for {app_id} {version}")]
    Missing { app_id: String, version: String },
    #[error("{path}: state file is missing")]
    MissingState { path: PathBuf },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DatabaseError + '_ {
    move |source| DatabaseError::Io {
        path: path.to_owned(),
        source,
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), DatabaseError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, DatabaseError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| DatabaseError::Json {
        path: path.to_owned(),
        source,
    })
}

/// On-disk form of the graph; states live in their own files.
#[derive(Serialize, Deserialize)]
struct EfgDocument {
    app_id: String,
    version: String,
    cold_start: Fingerprint,
    truncated: bool,
    states: Vec<Fingerprint>,
    edges: Vec<Edge>,
    screenshots: BTreeMap<Fingerprint, StateScreenshots>,
}

#[derive(Clone, Debug)]
pub struct AppDatabase {
    pub model: AppModel,
    pub universe: ComponentUniverse,
    pub graph: EventFlowGraph,
    pub ngram: NGramModel,
    pub trace: Vec<EventToken>,
    pub rip_config: RipConfig,
    /// SVG documents keyed by screenshot id.
    pub screenshots: BTreeMap<String, String>,
}

impl AppDatabase {
    /// Runs the analysis phase with the default n-gram settings.
    pub fn analyze(model: AppModel, config: &RipConfig) -> Result<Self, DatabaseError> {
        Self::analyze_with(model, config, DEFAULT_NGRAM_ORDER, DEFAULT_ALPHA)
    }

    pub fn analyze_with(
        model: AppModel,
        config: &RipConfig,
        order: usize,
        alpha: f64,
    ) -> Result<Self, DatabaseError> {
        let out = rip(&model, config);
        let ngram = match train_ngram(&out.trace, out.graph.tokens(), order, alpha) {
            Ok(m) => m,
            // nothing was fireable from cold start
            Err(FlowError::EmptyTrace) => NGramModel {
                order,
                alpha,
                vocabulary: out.graph.tokens().into_iter().collect(),
                counts: BTreeMap::new(),
            },
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            universe: ComponentUniverse::from_model(&model),
            model,
            graph: out.graph,
            ngram,
            trace: out.trace,
            rip_config: config.clone(),
            screenshots: out.screenshots,
        })
    }

    pub fn from_source(source: &str, config: &RipConfig) -> Result<Self, DatabaseError> {
        Self::analyze(parse_app_model(source)?, config)
    }

    /// Analyzes a bundled fixture with default settings.
    ///
    /// Panics if the source does not parse; meant for tests and benchmarks.
    pub fn from_fixture(source: &str) -> Self {
        Self::from_source(source, &RipConfig::default()).expect("fixture analyzes")
    }

    pub fn dir(root: &Path, app_id: &str, version: &str) -> PathBuf {
        root.join("db").join(app_id).join(version)
    }

    /// (app_id, version) pairs present under `root`, sorted.
    pub fn list(root: &Path) -> Vec<(String, String)> {
        let mut found = Vec::new();
        let Ok(apps) = fs::read_dir(root.join("db")) else {
            return found;
        };
        for app in apps.flatten() {
            let Ok(versions) = fs::read_dir(app.path()) else {
                continue;
            };
            for version in versions.flatten() {
                if version.path().join("efg.json").is_file() {
                    found.push((
                        app.file_name().to_string_lossy().into_owned(),
                        version.file_name().to_string_lossy().into_owned(),
                    ));
                }
            }
        }
        found.sort();
        found
    }

    /// Writes the database under `root`, replacing any previous rip of the
    /// same app version. Returns the version directory.
    pub fn write(&self, root: &Path) -> Result<PathBuf, DatabaseError> {
        let dir = Self::dir(root, &self.model.app_id, &self.model.version);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
        }
        write_file(&dir.join("model.json"), &to_canonical_json(&self.model))?;
        let g = &self.graph;
        let doc = EfgDocument {
            app_id: g.app_id.clone(),
            version: g.version.clone(),
            cold_start: g.cold_start.clone(),
            truncated: g.truncated,
            states: g.states.keys().cloned().collect(),
            edges: g.edges.clone(),
            screenshots: g.screenshots.clone(),
        };
        write_file(&dir.join("efg.json"), &to_canonical_json(&doc))?;
        for (fp, state) in &g.states {
            write_file(&dir.join("states").join(format!("{fp}.json")), &to_canonical_json(state))?;
        }
        for (id, svg) in &self.screenshots {
            write_file(&dir.join(SCREENSHOT_DIR).join(format!("{id}.svg")), svg)?;
        }
        write_file(&dir.join("trace.json"), &to_canonical_json(&self.trace))?;
        write_file(&dir.join("ngram.json"), &to_canonical_json(&self.ngram))?;
        write_file(&dir.join("rip.json"), &to_canonical_json(&self.rip_config))?;
        Ok(dir)
    }

    pub fn load(root: &Path, app_id: &str, version: &str) -> Result<Self, DatabaseError> {
        let dir = Self::dir(root, app_id, version);
        if !dir.join("efg.json").is_file() {
            return Err(DatabaseError::Missing {
                app_id: app_id.to_owned(),
                version: version.to_owned(),
            });
        }
        let model_path = dir.join("model.json");
        let model_text = fs::read_to_string(&model_path).map_err(io_err(&model_path))?;
        let model = parse_app_model(&model_text)?;
        let doc: EfgDocument = read_json(&dir.join("efg.json"))?;
        let mut states = BTreeMap::new();
        for fp in doc.states {
            let path = dir.join("states").join(format!("{fp}.json"));
            if !path.is_file() {
                return Err(DatabaseError::MissingState { path });
            }
            let state: GuiState = read_json(&path)?;
            states.insert(fp, state);
        }
        let mut screenshots = BTreeMap::new();
        let shots_dir = dir.join(SCREENSHOT_DIR);
        if let Ok(entries) = fs::read_dir(&shots_dir) {
            for entry in entries.flatten() {
                let path = entry.path();
                if let Some(id) = path.file_stem().and_then(|s| s.to_str()) {
                    let svg = fs::read_to_string(&path).map_err(io_err(&path))?;
                    screenshots.insert(id.to_owned(), svg);
                }
            }
        }
        Ok(Self {
            universe: ComponentUniverse::from_model(&model),
            model,
            graph: EventFlowGraph {
                app_id: doc.app_id,
                version: doc.version,
                cold_start: doc.cold_start,
                truncated: doc.truncated,
                states,
                edges: doc.edges,
                screenshots: doc.screenshots,
            },
            ngram: read_json(&dir.join("ngram.json"))?,
            trace: read_json(&dir.join("trace.json"))?,
            rip_config: read_json(&dir.join("rip.json"))?,
            screenshots,
        })
    }
}
