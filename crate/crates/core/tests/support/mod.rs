//! Brute-force oracles computed straight from an app model's transition
//! table. Nothing here goes through the ripper.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use guifusion_core::app_model::{AppModel, Target};
use guifusion_core::{EventFlowGraph, EventToken};

/// Target rendered as the screen id or `CRASH:<exception>`.
fn target_name(t: &Target) -> String {
    match t {
        Target::Screen(s) => s.to_string(),
        Target::Crash { exception } => format!("CRASH:{exception}"),
    }
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Reachable {
    pub screens: BTreeSet<String>,
    /// (from screen, event token, target)
    pub edges: BTreeSet<(String, String, String)>,
}

impl Reachable {
    pub fn outgoing(&self, screen: &str) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter(|(from, _, _)| from == screen)
            .map(|(_, ev, _)| ev.clone())
            .collect()
    }

    pub fn step(&self, screen: &str, event: &str) -> Option<&str> {
        self.edges
            .iter()
            .find(|(from, ev, _)| from == screen && ev == event)
            .map(|(_, _, to)| to.as_str())
    }
}

pub fn bfs(model: &AppModel) -> Reachable {
    let mut table: BTreeMap<&str, Vec<(String, String)>> = BTreeMap::new();
    for t in &model.transitions {
        table
            .entry(t.from.as_str())
            .or_default()
            .push((format!("{}@{}", t.action.as_str(), t.component), target_name(&t.to)));
    }
    let mut out = Reachable::default();
    let start = model.initial_screen.to_string();
    out.screens.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(screen) = queue.pop_front() {
        for (event, to) in table.get(screen.as_str()).into_iter().flatten() {
            out.edges.insert((screen.clone(), event.clone(), to.clone()));
            if !to.starts_with("CRASH:") && out.screens.insert(to.clone()) {
                queue.push_back(to.clone());
            }
        }
    }
    out
}

/// The ripped graph projected onto screen names, for comparison with [`bfs`].
pub fn project(graph: &EventFlowGraph) -> Reachable {
    use guifusion_core::ripper::EdgeTarget;
    let screen = |fp| graph.states[fp].screen.to_string();
    Reachable {
        screens: graph.states.values().map(|s| s.screen.to_string()).collect(),
        edges: graph
            .edges
            .iter()
            .map(|e| {
                let to = match &e.to {
                    EdgeTarget::State(fp) => screen(fp),
                    EdgeTarget::Crash(exc) => format!("CRASH:{exc}"),
                };
                (screen(&e.from), e.event.to_string(), to)
            })
            .collect(),
    }
}

/// Every event path from the initial screen with 1..=max_len events. Only the
/// last event of a path may crash.
pub fn paths(model: &AppModel, reach: &Reachable, max_len: usize) -> Vec<Vec<EventToken>> {
    let mut out = Vec::new();
    let mut frontier: Vec<(String, Vec<String>)> = vec![(model.initial_screen.to_string(), Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (screen, path) in &frontier {
            for ev in reach.outgoing(screen) {
                let to = reach.step(screen, &ev).unwrap().to_owned();
                let mut p = path.clone();
                p.push(ev);
                out.push(p.clone());
                if !to.starts_with("CRASH:") {
                    next.push((to, p));
                }
            }
        }
        frontier = next;
    }
    out.into_iter()
        .map(|p| p.iter().map(|s| s.parse().unwrap()).collect())
        .collect()
}

/// Non-crashing histories of length 0..=max_len with the screen each ends on.
pub fn histories(model: &AppModel, reach: &Reachable, max_len: usize) -> Vec<(Vec<EventToken>, String)> {
    let start = model.initial_screen.to_string();
    let mut out = vec![(Vec::new(), start.clone())];
    let mut frontier = vec![(Vec::<EventToken>::new(), start)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (path, screen) in &frontier {
            for ev in reach.outgoing(screen) {
                let to = reach.step(screen, &ev).unwrap();
                if to.starts_with("CRASH:") {
                    continue;
                }
                let mut p = path.clone();
                p.push(ev.parse().unwrap());
                next.push((p, to.to_owned()));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Length of the shortest event path from the initial screen ending in a crash.
pub fn shortest_crash(model: &AppModel, reach: &Reachable) -> Option<usize> {
    let mut dist = BTreeMap::from([(model.initial_screen.to_string(), 0usize)]);
    let mut queue = VecDeque::from([model.initial_screen.to_string()]);
    let mut best: Option<usize> = None;
    while let Some(screen) = queue.pop_front() {
        let d = dist[&screen];
        for ev in reach.outgoing(&screen) {
            let to = reach.step(&screen, &ev).unwrap().to_owned();
            if to.starts_with("CRASH:") {
                best = Some(best.map_or(d + 1, |b| b.min(d + 1)));
            } else if !dist.contains_key(&to) {
                dist.insert(to.clone(), d + 1);
                queue.push_back(to);
            }
        }
    }
    best
}

/// Assembles a report whose steps are exactly `events`.
pub fn report_for(
    db: &guifusion_core::AppDatabase,
    id: &str,
    events: &[EventToken],
) -> guifusion_core::BugReport {
    use guifusion_core::reporting::ReportMeta;
    let meta = ReportMeta {
        report_id: id.to_owned(),
        title: format!("path {id}"),
        device: "emulator".to_owned(),
        description: String::new(),
        created_at: chrono::DateTime::UNIX_EPOCH,
    };
    guifusion_core::assemble_report(
        meta,
        guifusion_core::flow::steps_from_events(events),
        &db.graph,
        &db.universe,
    )
    .expect("oracle paths assemble")
}

pub fn unbounded() -> guifusion_core::RipConfig {
    guifusion_core::RipConfig {
        max_events: usize::MAX,
        max_depth: usize::MAX,
        ..Default::default()
    }
}

/// Relative path → file bytes for everything under `root`.
pub fn snapshot(root: &std::path::Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &std::path::Path, dir: &std::path::Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap().flatten() {
            let path = entry.path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path.strip_prefix(base).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    if root.exists() {
        walk(root, root, &mut out);
    }
    out
}
