//! Deterministic interpreter over an app model's transition table.

use serde::{Deserialize, Serialize};

use super::state::{EventToken, GuiState};
use super::RipError;
use crate::app_model::{Action, AppModel, Target};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CrashOutcome {
    pub exception: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventOutcome {
    State(GuiState),
    Crash(CrashOutcome),
    /// The component exists but no transition matches; the state is unchanged.
    NoOp,
}

/// The state of the initial screen after a fresh launch.
pub fn cold_start(model: &AppModel) -> GuiState {
    let screen = model
        .screen(&model.initial_screen)
        .expect("validated model has its initial screen");
    GuiState::for_screen(screen)
}

/// Fires `event` in `state`.
///
/// Typed text is remembered on the successor when the transition stays on the
/// same screen; it never changes the fingerprint.
pub fn execute_event(
    model: &AppModel,
    state: &GuiState,
    event: &EventToken,
    input_text: Option<&str>,
) -> Result<EventOutcome, RipError> {
    if state.component(&event.component).is_none() {
        return Err(RipError::UnknownComponent {
            component: event.component.clone(),
            screen: state.screen.clone(),
        });
    }
    let Some(transition) = model.transition(&state.screen, &event.component, event.action) else {
        return Ok(EventOutcome::NoOp);
    };
    match &transition.to {
        Target::Crash { exception } => Ok(EventOutcome::Crash(CrashOutcome {
            exception: exception.clone(),
        })),
        Target::Screen(to) => {
            let screen = model.screen(to).expect("validated transition target");
            let mut next = GuiState::for_screen(screen);
            if *to == state.screen {
                next.entered_text = state.entered_text.clone();
            }
            if event.action == Action::Type {
                if let (Some(text), true) = (input_text, *to == state.screen) {
                    next.entered_text.insert(event.component.clone(), text.to_owned());
                }
            }
            Ok(EventOutcome::State(next))
        }
    }
}
