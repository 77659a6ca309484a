//! Replaying reports on (possibly different) app versions.

use serde::{Deserialize, Serialize};

use super::report::BugReport;
use crate::app_model::{AppModel, ComponentId, RelativeLocation};
use crate::ripper::{cold_start, execute_event, EventOutcome, EventToken, Fingerprint, GuiState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatchLevel {
    #[serde(rename = "exact-id")]
    ExactId,
    #[serde(rename = "kind+label")]
    KindLabel,
    #[serde(rename = "kind+location")]
    KindLocation,
    #[serde(rename = "none")]
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplayOutcome {
    Reproduced,
    Diverged,
    CrashReproduced,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepResult {
    State(Fingerprint),
    Crash(String),
    /// The resolved component accepted no transition for the action.
    NoOp,
    /// No component could be resolved.
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReplay {
    pub ordinal: u32,
    pub match_level: MatchLevel,
    pub resolved_component: Option<ComponentId>,
    pub result: StepResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayResult {
    pub outcome: ReplayOutcome,
    pub app_version: String,
    /// One record per executed step; replay stops at the divergence.
    pub steps: Vec<StepReplay>,
    pub divergence_ordinal: Option<u32>,
}

/// Finds the component a step refers to on the current screen: exact id,
/// then a unique component of the same kind and label, then a unique one of
/// the same kind and relative location.
fn resolve(
    state: &GuiState,
    model: &AppModel,
    step: &crate::flow::Step,
) -> (MatchLevel, Option<ComponentId>) {
    if state.component(&step.event.component).is_some() {
        return (MatchLevel::ExactId, Some(step.event.component.clone()));
    }
    let Some(record) = &step.component else {
        return (MatchLevel::None, None);
    };
    let unique = |matches: Vec<&ComponentId>| match matches[..] {
        [only] => Some(only.clone()),
        _ => None,
    };
    let by_label = unique(
        state
            .visible_components
            .iter()
            .filter(|c| c.kind == record.kind && c.label == record.label)
            .map(|c| &c.id)
            .collect(),
    );
    if let Some(id) = by_label {
        return (MatchLevel::KindLabel, Some(id));
    }
    let by_location = unique(
        state
            .visible_components
            .iter()
            .filter(|c| {
                c.kind == record.kind
                    && RelativeLocation::of(&c.bounds, &model.canvas) == record.relative_location
            })
            .map(|c| &c.id)
            .collect(),
    );
    match by_location {
        Some(id) => (MatchLevel::KindLocation, Some(id)),
        None => (MatchLevel::None, None),
    }
}

/// Executes the report's steps from cold start on `target`.
///
/// A crash on the final step is a crash reproduction (when the report names
/// an exception it must match). Unresolvable components, no-op events, early
/// crashes and a missing expected crash all end the replay as diverged.
pub fn replay_report(report: &BugReport, target: &AppModel) -> ReplayResult {
    let mut state = cold_start(target);
    let mut records = Vec::with_capacity(report.steps.len());
    let last = report.steps.len().saturating_sub(1);
    let diverged = |records: Vec<StepReplay>, ordinal: u32| ReplayResult {
        outcome: ReplayOutcome::Diverged,
        app_version: target.version.clone(),
        steps: records,
        divergence_ordinal: Some(ordinal),
    };

    for (i, step) in report.steps.iter().enumerate() {
        let (level, resolved) = resolve(&state, target, step);
        let Some(component) = resolved else {
            records.push(StepReplay {
                ordinal: step.ordinal,
                match_level: MatchLevel::None,
                resolved_component: None,
                result: StepResult::Unresolved,
            });
            return diverged(records, step.ordinal);
        };
        let event = EventToken::new(step.event.action, component.clone());
        let outcome = execute_event(target, &state, &event, step.input_text.as_deref())
            .expect("resolved components are visible");
        let mut record = StepReplay {
            ordinal: step.ordinal,
            match_level: level,
            resolved_component: Some(component),
            result: StepResult::NoOp,
        };
        match outcome {
            EventOutcome::NoOp => {
                records.push(record);
                return diverged(records, step.ordinal);
            }
            EventOutcome::Crash(crash) => {
                let expected = report.crash.as_ref().is_none_or(|e| *e == crash.exception);
                record.result = StepResult::Crash(crash.exception);
                records.push(record);
                if i == last && expected {
                    return ReplayResult {
                        outcome: ReplayOutcome::CrashReproduced,
                        app_version: target.version.clone(),
                        steps: records,
                        divergence_ordinal: None,
                    };
                }
                return diverged(records, step.ordinal);
            }
            EventOutcome::State(next) => {
                record.result = StepResult::State(next.fingerprint.clone());
                records.push(record);
                state = next;
            }
        }
    }

    if report.crash.is_some() {
        let ordinal = report.steps.last().map_or(0, |s| s.ordinal);
        return diverged(records, ordinal);
    }
    ReplayResult {
        outcome: ReplayOutcome::Reproduced,
        app_version: target.version.clone(),
        steps: records,
        divergence_ordinal: None,
    }
}
