//! Automated crash discovery and crash-report generation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chrono::{DateTime, Utc};
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{assemble_report, BugReport, ReportMeta};
use super::sentence::generate_step_sentence;
use crate::app_model::Action;
use crate::database::AppDatabase;
use crate::flow::{ngram_score, Step};
use crate::ripper::{cold_start, execute_event, EdgeTarget, EventOutcome, EventToken, Fingerprint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum CrawlStrategy {
    /// Every crash edge of the full rip, each reported along a shortest path.
    DfsComplete,
    /// Seeded random walks restarting at cold start; `budget` bounds fired events.
    UniformRandom { seed: u64, budget: usize },
    /// Random walks sampling events in proportion to their n-gram score.
    NgramWeighted { seed: u64, budget: usize },
}

impl CrawlStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            CrawlStrategy::DfsComplete => "dfs-complete",
            CrawlStrategy::UniformRandom { .. } => "uniform-random",
            CrawlStrategy::NgramWeighted { .. } => "ngram-weighted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrawlOptions {
    pub device: String,
    pub created_at: DateTime<Utc>,
    /// Reports are numbered `<prefix>-001`, `<prefix>-002`, ...
    pub id_prefix: String,
    /// Walks longer than this restart from cold start.
    pub max_walk_length: usize,
}

impl Default for CrawlOptions {
    fn default() -> Self {
        Self {
            device: "app-model interpreter".to_owned(),
            created_at: DateTime::UNIX_EPOCH,
            id_prefix: "crash".to_owned(),
            max_walk_length: 50,
        }
    }
}

/// A path from cold start whose last event crashes.
#[derive(Clone, Debug, PartialEq, Eq)]
struct CrashPath {
    events: Vec<(EventToken, Option<String>)>,
    exception: String,
}

/// Explores the app according to `strategy` and emits one finalized report
/// per distinct crash edge, in discovery order.
pub fn crawl_for_crashes(
    db: &AppDatabase,
    strategy: &CrawlStrategy,
    options: &CrawlOptions,
) -> Vec<BugReport> {
    let paths = match strategy {
        CrawlStrategy::DfsComplete => shortest_crash_paths(db),
        CrawlStrategy::UniformRandom { seed, budget } => random_walks(db, *seed, *budget, options, false),
        CrawlStrategy::NgramWeighted { seed, budget } => random_walks(db, *seed, *budget, options, true),
    };
    paths
        .into_iter()
        .enumerate()
        .filter_map(|(i, path)| crash_report(db, strategy, options, i + 1, path))
        .collect()
}

/// BFS over non-crash edges from cold start, then one path per crash edge.
fn shortest_crash_paths(db: &AppDatabase) -> Vec<CrashPath> {
    let graph = &db.graph;
    let mut parent: BTreeMap<Fingerprint, Option<(Fingerprint, EventToken, Option<String>)>> =
        BTreeMap::from([(graph.cold_start.clone(), None)]);
    let mut order = vec![graph.cold_start.clone()];
    let mut queue = VecDeque::from([graph.cold_start.clone()]);
    while let Some(fp) = queue.pop_front() {
        for edge in graph.outgoing(&fp) {
            if let EdgeTarget::State(to) = &edge.to {
                if !parent.contains_key(to) {
                    parent.insert(to.clone(), Some((fp.clone(), edge.event.clone(), edge.input_text.clone())));
                    order.push(to.clone());
                    queue.push_back(to.clone());
                }
            }
        }
    }
    let path_to = |fp: &Fingerprint| {
        let mut events = Vec::new();
        let mut cur = fp.clone();
        while let Some(Some((prev, event, input))) = parent.get(&cur) {
            events.push((event.clone(), input.clone()));
            cur = prev.clone();
        }
        events.reverse();
        events
    };

    // crash edges grouped by BFS order of their source so shorter paths come first
    let mut found = Vec::new();
    for fp in &order {
        for edge in graph.outgoing(fp) {
            if let EdgeTarget::Crash(exception) = &edge.to {
                let mut events = path_to(fp);
                events.push((edge.event.clone(), edge.input_text.clone()));
                found.push(CrashPath {
                    events,
                    exception: exception.clone(),
                });
            }
        }
    }
    found.sort_by_key(|p| p.events.len());
    found
}

fn random_walks(
    db: &AppDatabase,
    seed: u64,
    budget: usize,
    options: &CrawlOptions,
    weighted: bool,
) -> Vec<CrashPath> {
    let model = &db.model;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeSet<(Fingerprint, EventToken)> = BTreeSet::new();
    let mut found = Vec::new();
    let mut fired = 0;

    'walks: while fired < budget {
        let mut state = cold_start(model);
        let mut path: Vec<(EventToken, Option<String>)> = Vec::new();
        while path.len() < options.max_walk_length && fired < budget {
            let mut candidates = state.actionable_events();
            if weighted {
                candidates.retain(|t| db.ngram.vocabulary.contains(t));
            }
            if candidates.is_empty() {
                if path.is_empty() {
                    break 'walks;
                }
                continue 'walks;
            }
            let pick = if weighted {
                let history: Vec<EventToken> = path.iter().map(|(t, _)| t.clone()).collect();
                let weights: Vec<f64> = candidates
                    .iter()
                    .map(|t| ngram_score(&db.ngram, &history, t).expect("filtered to vocabulary"))
                    .collect();
                WeightedIndex::new(&weights).expect("scores are positive").sample(&mut rng)
            } else {
                rng.gen_range(0..candidates.len())
            };
            let event = candidates.swap_remove(pick);
            let input = (event.action == Action::Type).then(|| {
                db.graph
                    .edge(&state.fingerprint, &event)
                    .and_then(|e| e.input_text.clone())
                    .or_else(|| db.rip_config.type_inputs.first().cloned())
                    .unwrap_or_default()
            });
            fired += 1;
            match execute_event(model, &state, &event, input.as_deref()).expect("visible") {
                EventOutcome::NoOp => {}
                EventOutcome::Crash(crash) => {
                    if seen.insert((state.fingerprint.clone(), event.clone())) {
                        path.push((event, input));
                        found.push(CrashPath {
                            events: path,
                            exception: crash.exception,
                        });
                    }
                    continue 'walks;
                }
                EventOutcome::State(next) => {
                    path.push((event, input));
                    state = next;
                }
            }
        }
    }
    found
}

fn crash_report(
    db: &AppDatabase,
    strategy: &CrawlStrategy,
    options: &CrawlOptions,
    index: usize,
    path: CrashPath,
) -> Option<BugReport> {
    let steps: Vec<Step> = path
        .events
        .iter()
        .enumerate()
        .map(|(i, (event, input))| {
            let mut step = Step::new(i as u32 + 1, event.clone());
            step.input_text = input.clone().or(step.input_text);
            step
        })
        .collect();
    let last = steps.last()?;
    let record = db.universe.get(&last.event.component)?;
    let description = format!(
        "The app crashes with {} after {} step(s) from a cold start (found by {} crawling). Final step: {}",
        path.exception,
        steps.len(),
        strategy.name(),
        generate_step_sentence(last, record)
    );
    let meta = ReportMeta {
        report_id: format!("{}-{index:03}", options.id_prefix),
        title: format!("Crash: {} in {}", path.exception, record.activity),
        device: options.device.clone(),
        description,
        created_at: options.created_at,
    };
    let mut report = assemble_report(meta, steps, &db.graph, &db.universe).ok()?;
    report.crash = Some(path.exception);
    Some(report)
}
