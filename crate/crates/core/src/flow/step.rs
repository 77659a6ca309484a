use serde::{Deserialize, Serialize};

use crate::app_model::{Action, ComponentRecord};
use crate::ripper::{EventToken, Fingerprint};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepScreenshots {
    /// Full-size contextual screenshot with the component outlined.
    pub full: Option<String>,
    /// Component-specific crop.
    pub cropped: Option<String>,
}

/// One reproduction step: an `{action, component}` tuple plus what the
/// reporter and the analysis attach to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    /// 1-based position in the report.
    pub ordinal: u32,
    pub event: EventToken,
    /// Present exactly when the action is `type`.
    pub input_text: Option<String>,
    pub note: Option<String>,
    pub state_before: Option<Fingerprint>,
    pub state_after: Option<Fingerprint>,
    pub screenshots: StepScreenshots,
    /// The step was entered manually rather than picked from the suggestions.
    #[serde(default)]
    pub overridden: bool,
    /// Traceability record, filled when the report is assembled.
    #[serde(default)]
    pub component: Option<ComponentRecord>,
    #[serde(default)]
    pub sentence: Option<String>,
}

impl Step {
    pub fn new(ordinal: u32, event: EventToken) -> Self {
        let input_text = (event.action == Action::Type).then(String::new);
        Self {
            ordinal,
            event,
            input_text,
            note: None,
            state_before: None,
            state_after: None,
            screenshots: StepScreenshots::default(),
            overridden: false,
            component: None,
            sentence: None,
        }
    }

    /// Sets the typed text; ignored for actions other than `type`.
    pub fn with_input(mut self, text: impl Into<String>) -> Self {
        if self.event.action == Action::Type {
            self.input_text = Some(text.into());
        }
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Whether `input_text` is present iff the action is `type`.
    pub fn input_matches_action(&self) -> bool {
        self.input_text.is_some() == (self.event.action == Action::Type)
    }
}

/// Builds a step list with contiguous ordinals from bare events.
pub fn steps_from_events<'a>(events: impl IntoIterator<Item = &'a EventToken>) -> Vec<Step> {
    events
        .into_iter()
        .enumerate()
        .map(|(i, e)| Step::new(i as u32 + 1, e.clone()))
        .collect()
}
