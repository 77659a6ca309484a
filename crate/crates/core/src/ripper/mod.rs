//! The dynamic engine: interprets an app model, explores it depth-first and
//! records GUI states, transitions and screenshots.

mod explore;
mod interpreter;
mod screenshot;
mod state;

use crate::app_model::{ComponentId, ScreenId};

pub use explore::{rip, Edge, EdgeTarget, EventFlowGraph, RipConfig, RipOutput, StateScreenshots};
pub use interpreter::{cold_start, execute_event, CrashOutcome, EventOutcome};
pub use screenshot::{crop_screenshot, render_screenshot, svg_viewbox};
pub use state::{state_for_screen, BadEventToken, EventToken, Fingerprint, GuiState};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RipError {
    #[error("component `{component}` is not visible on screen `{screen}`")]
    UnknownComponent {
        component: ComponentId,
        screen: ScreenId,
    },
}
