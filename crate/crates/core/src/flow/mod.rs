//! Step-history state inference, auto-completion suggestions and the n-gram
//! model that ranks them.

mod infer;
mod ngram;
mod step;
mod suggest;

use crate::app_model::ComponentId;
use crate::ripper::EventToken;

pub use infer::infer_gui_state;
pub(crate) use infer::infer_from_events;
pub use ngram::{ngram_score, train_ngram, NGramModel, START};
pub use step::{steps_from_events, Step, StepScreenshots};
pub use suggest::{suggest_next, SuggestedComponent, Suggestion};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("step {ordinal} leads into a crash; no GUI state follows it")]
    HistoryHitsCrash { ordinal: u32 },
    #[error("cannot train an n-gram model on an empty trace")]
    EmptyTrace,
    #[error("n-gram order must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("smoothing constant must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("token `{0}` is outside the n-gram vocabulary")]
    UnknownToken(EventToken),
    #[error("component `{0}` is not in the component universe")]
    UnknownComponent(ComponentId),
}
