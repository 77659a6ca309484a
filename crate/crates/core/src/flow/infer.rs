use std::collections::BTreeSet;

use super::{FlowError, Step};
use crate::ripper::{EdgeTarget, EventFlowGraph, EventToken, Fingerprint};

/// Infers the GUI states the reporter may be in after `history`.
///
/// Exact tracking from cold start is used while every step matches an edge.
/// At a divergence the candidates become the states showing the component of
/// the last matched step (the divergent step's own component when nothing has
/// matched yet), or every state if no state shows it; tracking then resumes
/// from that set. The result is sorted and never empty.
pub fn infer_gui_state(history: &[Step], efg: &EventFlowGraph) -> Result<Vec<Fingerprint>, FlowError> {
    let events: Vec<&EventToken> = history.iter().map(|s| &s.event).collect();
    infer_from_events(&events, efg)
}

pub(crate) fn infer_from_events(
    events: &[&EventToken],
    efg: &EventFlowGraph,
) -> Result<Vec<Fingerprint>, FlowError> {
    let mut current: BTreeSet<Fingerprint> = BTreeSet::from([efg.cold_start.clone()]);
    let mut last_matched: Option<&EventToken> = None;

    for (i, event) in events.iter().enumerate() {
        let mut next = BTreeSet::new();
        let mut crashed = false;
        for state in &current {
            match efg.edge(state, event).map(|e| &e.to) {
                Some(EdgeTarget::State(fp)) => {
                    next.insert(fp.clone());
                }
                Some(EdgeTarget::Crash(_)) => crashed = true,
                None => {}
            }
        }
        if !next.is_empty() {
            current = next;
            last_matched = Some(event);
        } else if crashed {
            return Err(FlowError::HistoryHitsCrash {
                ordinal: i as u32 + 1,
            });
        } else {
            let anchor = &last_matched.unwrap_or(event).component;
            current = efg
                .states
                .values()
                .filter(|s| s.component(anchor).is_some())
                .map(|s| s.fingerprint.clone())
                .collect();
            if current.is_empty() {
                current = efg.states.keys().cloned().collect();
            }
            last_matched = None;
        }
    }
    Ok(current.into_iter().collect())
}
