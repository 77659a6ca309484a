use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::app_model::{Action, AppModel, ComponentId, GuiComponent, Screen, ScreenId};
use crate::canonical::{digest_hex, to_canonical_json};

/// Stable digest identifying a GUI state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fingerprint(pub String);

impl Fingerprint {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An `{action, component}` pair; textual form `action@component`.
///
/// Ordered by component first, then action, which is the canonical firing
/// order during exploration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EventToken {
    pub component: ComponentId,
    pub action: Action,
}

impl EventToken {
    pub fn new(action: Action, component: impl Into<ComponentId>) -> Self {
        Self {
            action,
            component: component.into(),
        }
    }
}

impl fmt::Display for EventToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.action, self.component)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed event token `{0}` (expected action@component)")]
pub struct BadEventToken(pub String);

impl FromStr for EventToken {
    type Err = BadEventToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (action, component) = s.split_once('@').ok_or_else(|| BadEventToken(s.to_owned()))?;
        let action = action.parse().map_err(|_| BadEventToken(s.to_owned()))?;
        if component.is_empty() {
            return Err(BadEventToken(s.to_owned()));
        }
        Ok(Self::new(action, component))
    }
}

impl TryFrom<String> for EventToken {
    type Error = BadEventToken;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<EventToken> for String {
    fn from(t: EventToken) -> Self {
        t.to_string()
    }
}

/// A run-time GUI state: the enclosing screen and its visible components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuiState {
    pub fingerprint: Fingerprint,
    pub screen: ScreenId,
    pub overlay: bool,
    /// Sorted by component id.
    pub visible_components: Vec<GuiComponent>,
    /// Text typed into edit fields. Never part of the fingerprint.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub entered_text: BTreeMap<ComponentId, String>,
}

#[derive(Serialize)]
struct FingerprintInput<'a> {
    screen: &'a ScreenId,
    components: &'a [GuiComponent],
}

impl GuiState {
    pub fn for_screen(screen: &Screen) -> Self {
        let mut visible = screen.components.clone();
        visible.sort_by(|a, b| a.id.cmp(&b.id));
        let fingerprint = Fingerprint(digest_hex(
            to_canonical_json(&FingerprintInput {
                screen: &screen.id,
                components: &visible,
            })
            .as_bytes(),
        ));
        Self {
            fingerprint,
            screen: screen.id.clone(),
            overlay: screen.overlay,
            visible_components: visible,
            entered_text: BTreeMap::new(),
        }
    }

    pub fn component(&self, id: &ComponentId) -> Option<&GuiComponent> {
        self.visible_components
            .binary_search_by(|c| c.id.cmp(id))
            .ok()
            .map(|i| &self.visible_components[i])
    }

    /// Capability-permitted events in canonical order (component id, then action).
    pub fn actionable_events(&self) -> Vec<EventToken> {
        self.visible_components
            .iter()
            .flat_map(|c| c.actions().map(|a| EventToken::new(a, c.id.clone())))
            .collect()
    }

    /// The state with typed text dropped.
    pub fn without_text(&self) -> Self {
        Self {
            entered_text: BTreeMap::new(),
            ..self.clone()
        }
    }
}

/// Computes the state a model presents for one of its screens.
pub fn state_for_screen(model: &AppModel, screen: &ScreenId) -> Option<GuiState> {
    model.screen(screen).map(GuiState::for_screen)
}
