use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::infer::infer_gui_state;
use super::ngram::{ngram_score, NGramModel};
use super::{FlowError, Step};
use crate::app_model::{Action, ComponentId, ComponentRecord, ComponentUniverse};
use crate::ripper::{EventFlowGraph, EventToken, Fingerprint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuggestedComponent {
    pub record: ComponentRecord,
    pub cropped_screenshot: Option<String>,
    /// Full-size contextual screenshot with the component outlined.
    pub full_screenshot: Option<String>,
    /// The inferred state the screenshots were taken in.
    pub state: Fingerprint,
    pub score: f64,
}

/// Contents of the two drop-down lists offered for the next step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub inferred_states: Vec<Fingerprint>,
    /// Canonical order: tap, long-touch, swipe, type.
    pub actions: Vec<Action>,
    /// Ranked by descending score, ties by ascending component id.
    pub components_by_action: BTreeMap<Action, Vec<SuggestedComponent>>,
}

impl Suggestion {
    /// Every offered `(action, component)` pair.
    pub fn pairs(&self) -> impl Iterator<Item = EventToken> + '_ {
        self.components_by_action.iter().flat_map(|(action, entries)| {
            entries
                .iter()
                .map(move |e| EventToken::new(*action, e.record.component_id.clone()))
        })
    }

    pub fn offers(&self, event: &EventToken) -> bool {
        self.components_by_action
            .get(&event.action)
            .is_some_and(|entries| entries.iter().any(|e| e.record.component_id == event.component))
    }
}

/// Suggests the next step from the outgoing edges of the inferred states.
pub fn suggest_next(
    history: &[Step],
    efg: &EventFlowGraph,
    universe: &ComponentUniverse,
    ngram: &NGramModel,
) -> Result<Suggestion, FlowError> {
    let inferred = infer_gui_state(history, efg)?;
    let context: Vec<EventToken> = history.iter().map(|s| s.event.clone()).collect();

    // first inferred state (in fingerprint order) offering the pair wins
    let mut offered: BTreeMap<Action, BTreeMap<ComponentId, &Fingerprint>> = BTreeMap::new();
    for fp in &inferred {
        for edge in efg.outgoing(fp) {
            offered
                .entry(edge.event.action)
                .or_default()
                .entry(edge.event.component.clone())
                .or_insert(fp);
        }
    }

    let mut components_by_action = BTreeMap::new();
    for (action, components) in offered {
        let mut entries = Vec::with_capacity(components.len());
        for (component, fp) in components {
            let record = universe
                .get(&component)
                .ok_or_else(|| FlowError::UnknownComponent(component.clone()))?
                .clone();
            let shots = efg.component_shots(fp, &component);
            let token = EventToken::new(action, component);
            entries.push(SuggestedComponent {
                record,
                cropped_screenshot: shots.map(|(c, _)| c.to_owned()),
                full_screenshot: shots.map(|(_, f)| f.to_owned()),
                state: fp.clone(),
                score: ngram_score(ngram, &context, &token)?,
            });
        }
        entries.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.record.component_id.cmp(&b.record.component_id))
        });
        components_by_action.insert(action, entries);
    }

    Ok(Suggestion {
        inferred_states: inferred,
        actions: components_by_action.keys().copied().collect(),
        components_by_action,
    })
}
