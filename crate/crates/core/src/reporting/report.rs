use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::sentence::generate_step_sentence;
use super::ReportError;
use crate::app_model::ComponentUniverse;
use crate::flow::{infer_from_events, Step, StepScreenshots};
use crate::ripper::{EdgeTarget, EventFlowGraph, EventToken};

/// A structured bug report: preliminary information plus enriched steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub report_id: String,
    pub title: String,
    /// Free-form device/configuration label.
    pub device: String,
    pub description: String,
    pub app_id: String,
    pub app_version: String,
    /// Ordinals are contiguous from 1.
    pub steps: Vec<Step>,
    pub created_at: DateTime<Utc>,
    /// Exception the final step is expected to raise, for crash reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crash: Option<String>,
}

impl BugReport {
    pub fn tokens(&self) -> Vec<EventToken> {
        self.steps.iter().map(|s| s.event.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportMeta {
    pub report_id: String,
    pub title: String,
    pub device: String,
    pub description: String,
    pub created_at: DateTime<Utc>,
}

/// Builds a finalized report, enriching each step with its action, component
/// type, relative location, source activity and screenshots.
///
/// Steps are renumbered from 1. The GUI state before each step is the first
/// inferred state (given the preceding steps) that shows the step's component.
pub fn assemble_report(
    meta: ReportMeta,
    steps: Vec<Step>,
    efg: &EventFlowGraph,
    universe: &ComponentUniverse,
) -> Result<BugReport, ReportError> {
    if steps.is_empty() {
        return Err(ReportError::EmptySteps);
    }
    let tokens: Vec<EventToken> = steps.iter().map(|s| s.event.clone()).collect();
    let events: Vec<&EventToken> = tokens.iter().collect();
    let mut enriched = Vec::with_capacity(steps.len());
    let mut crash = None;
    let last = steps.len() - 1;

    for (i, mut step) in steps.into_iter().enumerate() {
        step.ordinal = i as u32 + 1;
        if !step.input_matches_action() {
            return Err(ReportError::InvalidStep {
                ordinal: step.ordinal,
                reason: "typed text must be present exactly for type actions".to_owned(),
            });
        }
        let record = universe
            .get(&step.event.component)
            .ok_or_else(|| ReportError::UnresolvedComponent {
                ordinal: step.ordinal,
                component: step.event.component.clone(),
            })?
            .clone();

        let before = infer_from_events(&events[..i], efg).ok().and_then(|candidates| {
            candidates.into_iter().find(|fp| {
                efg.state(fp)
                    .is_some_and(|s| s.component(&step.event.component).is_some())
            })
        });
        step.state_after = None;
        if let Some(fp) = &before {
            match efg.edge(fp, &step.event).map(|e| &e.to) {
                Some(EdgeTarget::State(next)) => step.state_after = Some(next.clone()),
                Some(EdgeTarget::Crash(exception)) if i == last => crash = Some(exception.clone()),
                _ => {}
            }
            let shots = efg.component_shots(fp, &step.event.component);
            step.screenshots = StepScreenshots {
                full: shots.map(|(_, f)| f.to_owned()),
                cropped: shots.map(|(c, _)| c.to_owned()),
            };
        } else {
            step.screenshots = StepScreenshots::default();
        }
        step.state_before = before;
        step.sentence = Some(generate_step_sentence(&step, &record));
        step.component = Some(record);
        enriched.push(step);
    }

    Ok(BugReport {
        report_id: meta.report_id,
        title: meta.title,
        device: meta.device,
        description: meta.description,
        app_id: efg.app_id.clone(),
        app_version: efg.version.clone(),
        steps: enriched,
        created_at: meta.created_at,
        crash,
    })
}
