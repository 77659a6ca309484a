//! Systematic depth-first exploration (GUI ripping).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::interpreter::{cold_start, execute_event, EventOutcome};
use super::screenshot::{crop_screenshot, render_screenshot};
use super::state::{EventToken, Fingerprint, GuiState};
use crate::app_model::{Action, AppModel, ComponentId};
use crate::canonical::digest_hex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RipConfig {
    /// Events fired to discover edges; replaying a path back to a pending
    /// state is not charged.
    pub max_events: usize,
    /// Longest event path from cold start that is still expanded.
    pub max_depth: usize,
    /// Texts tried, in order, for `type` events.
    pub type_inputs: Vec<String>,
    /// Only used by randomized crawl strategies.
    pub seed: u64,
}

impl Default for RipConfig {
    fn default() -> Self {
        Self {
            max_events: 10_000,
            max_depth: 50,
            type_inputs: vec![String::new(), "test".to_owned()],
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTarget {
    State(Fingerprint),
    Crash(String),
}

impl EdgeTarget {
    pub fn state(&self) -> Option<&Fingerprint> {
        match self {
            EdgeTarget::State(fp) => Some(fp),
            EdgeTarget::Crash(_) => None,
        }
    }

    pub fn is_crash(&self) -> bool {
        matches!(self, EdgeTarget::Crash(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: Fingerprint,
    pub event: EventToken,
    /// Text that produced the transition for `type` events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_text: Option<String>,
    pub to: EdgeTarget,
}

/// Screenshot ids recorded for one state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateScreenshots {
    pub full: String,
    /// Full-size rendering with the component outlined.
    pub highlighted: BTreeMap<ComponentId, String>,
    pub cropped: BTreeMap<ComponentId, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventFlowGraph {
    pub app_id: String,
    pub version: String,
    pub cold_start: Fingerprint,
    pub truncated: bool,
    pub states: BTreeMap<Fingerprint, GuiState>,
    /// Sorted by (from, event); at most one edge per pair.
    pub edges: Vec<Edge>,
    pub screenshots: BTreeMap<Fingerprint, StateScreenshots>,
}

impl EventFlowGraph {
    pub fn state(&self, fp: &Fingerprint) -> Option<&GuiState> {
        self.states.get(fp)
    }

    pub fn edge(&self, from: &Fingerprint, event: &EventToken) -> Option<&Edge> {
        self.edges
            .binary_search_by(|e| (&e.from, &e.event).cmp(&(from, event)))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn outgoing<'a>(&'a self, from: &'a Fingerprint) -> impl Iterator<Item = &'a Edge> + 'a {
        let start = self.edges.partition_point(|e| &e.from < from);
        self.edges[start..].iter().take_while(move |e| &e.from == from)
    }

    /// Distinct edge tokens, sorted.
    pub fn tokens(&self) -> Vec<EventToken> {
        let mut tokens: Vec<EventToken> = self.edges.iter().map(|e| e.event.clone()).collect();
        tokens.sort();
        tokens.dedup();
        tokens
    }

    /// Screenshot ids for `component` in `state`: (cropped, highlighted full).
    pub fn component_shots(&self, state: &Fingerprint, component: &ComponentId) -> Option<(&str, &str)> {
        let shots = self.screenshots.get(state)?;
        Some((
            shots.cropped.get(component)?.as_str(),
            shots.highlighted.get(component)?.as_str(),
        ))
    }
}

/// Everything a rip session produces.
#[derive(Clone, Debug)]
pub struct RipOutput {
    pub graph: EventFlowGraph,
    /// Every executed event in chronological order, replays included.
    pub trace: Vec<EventToken>,
    /// SVG documents keyed by screenshot id.
    pub screenshots: BTreeMap<String, String>,
    pub events_fired: usize,
}

struct Ripper<'a> {
    model: &'a AppModel,
    config: &'a RipConfig,
    states: BTreeMap<Fingerprint, GuiState>,
    edges: BTreeMap<(Fingerprint, EventToken), Edge>,
    current: Option<GuiState>,
    trace: Vec<EventToken>,
    events_fired: usize,
    truncated: bool,
}

type Path = Vec<(EventToken, Option<String>)>;

enum Flow {
    Continue,
    Stop,
}

impl Ripper<'_> {
    /// Brings the interpreter to `target`, restarting from cold start and
    /// replaying `path` when it is somewhere else.
    fn go_to(&mut self, target: &GuiState, path: &Path) {
        if self.current.as_ref().map(|s| &s.fingerprint) == Some(&target.fingerprint) {
            return;
        }
        let mut state = cold_start(self.model);
        for (event, input) in path {
            self.trace.push(event.clone());
            match execute_event(self.model, &state, event, input.as_deref()) {
                Ok(EventOutcome::State(next)) => state = next,
                other => unreachable!("replay of a recorded path diverged: {other:?}"),
            }
        }
        debug_assert_eq!(state.fingerprint, target.fingerprint);
        self.current = Some(state);
    }

    fn inputs(&self, action: Action) -> Vec<Option<String>> {
        if action != Action::Type {
            return vec![None];
        }
        if self.config.type_inputs.is_empty() {
            return vec![Some(String::new())];
        }
        self.config.type_inputs.iter().cloned().map(Some).collect()
    }

    fn dfs(&mut self, state: &GuiState, path: &mut Path) -> Flow {
        let events = state.actionable_events();
        if path.len() >= self.config.max_depth {
            if !events.is_empty() {
                self.truncated = true;
            }
            return Flow::Continue;
        }
        for event in events {
            for input in self.inputs(event.action) {
                if self.events_fired >= self.config.max_events {
                    self.truncated = true;
                    return Flow::Stop;
                }
                self.go_to(state, path);
                let current = self.current.take().expect("positioned at state");
                let outcome = execute_event(self.model, &current, &event, input.as_deref())
                    .expect("actionable events name visible components");
                self.events_fired += 1;
                self.trace.push(event.clone());
                let key = (state.fingerprint.clone(), event.clone());
                match outcome {
                    EventOutcome::NoOp => {
                        self.current = Some(current);
                        continue;
                    }
                    EventOutcome::Crash(crash) => {
                        self.edges.insert(
                            key,
                            Edge {
                                from: state.fingerprint.clone(),
                                event: event.clone(),
                                input_text: input.clone(),
                                to: EdgeTarget::Crash(crash.exception),
                            },
                        );
                    }
                    EventOutcome::State(next) => {
                        self.edges.insert(
                            key,
                            Edge {
                                from: state.fingerprint.clone(),
                                event: event.clone(),
                                input_text: input.clone(),
                                to: EdgeTarget::State(next.fingerprint.clone()),
                            },
                        );
                        let unseen = !self.states.contains_key(&next.fingerprint);
                        self.current = Some(next.clone());
                        if unseen {
                            self.states.insert(next.fingerprint.clone(), next.without_text());
                            path.push((event.clone(), input.clone()));
                            let flow = self.dfs(&next, path);
                            path.pop();
                            if let Flow::Stop = flow {
                                return Flow::Stop;
                            }
                        }
                    }
                }
                break;
            }
        }
        Flow::Continue
    }
}

/// Rips `model` depth-first from cold start.
///
/// Exhausting the event budget or the depth limit is not an error: the
/// partial graph comes back with `truncated` set.
pub fn rip(model: &AppModel, config: &RipConfig) -> RipOutput {
    let root = cold_start(model);
    let mut ripper = Ripper {
        model,
        config,
        states: BTreeMap::new(),
        edges: BTreeMap::new(),
        current: Some(root.clone()),
        trace: Vec::new(),
        events_fired: 0,
        truncated: false,
    };
    ripper.states.insert(root.fingerprint.clone(), root.clone());
    let _ = ripper.dfs(&root, &mut Vec::new());

    let mut svgs = BTreeMap::new();
    let mut shots = BTreeMap::new();
    for (fp, state) in &ripper.states {
        let mut store = |svg: String| {
            let id = digest_hex(svg.as_bytes());
            svgs.insert(id.clone(), svg);
            id
        };
        let full = store(render_screenshot(state, &model.canvas, None).expect("no highlight"));
        let mut entry = StateScreenshots {
            full,
            ..Default::default()
        };
        for c in &state.visible_components {
            let hl = render_screenshot(state, &model.canvas, Some(&c.id)).expect("visible");
            entry.highlighted.insert(c.id.clone(), store(hl));
            let crop = crop_screenshot(state, &model.canvas, &c.id).expect("visible");
            entry.cropped.insert(c.id.clone(), store(crop));
        }
        shots.insert(fp.clone(), entry);
    }

    RipOutput {
        graph: EventFlowGraph {
            app_id: model.app_id.clone(),
            version: model.version.clone(),
            cold_start: root.fingerprint,
            truncated: ripper.truncated,
            states: ripper.states,
            edges: ripper.edges.into_values().collect(),
            screenshots: shots,
        },
        trace: ripper.trace,
        screenshots: svgs,
        events_fired: ripper.events_fired,
    }
}
