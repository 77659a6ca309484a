//! Bug report assembly, rendering, cross-version replay and automated crash
//! reporting.

mod crawl;
mod render;
mod replay;
mod report;
mod sentence;

use crate::app_model::ComponentId;

pub use crawl::{crawl_for_crashes, CrawlOptions, CrawlStrategy};
pub use render::{render_report, ReportFormat, SCREENSHOT_DIR, SECTION_TITLES};
pub use replay::{replay_report, MatchLevel, ReplayOutcome, ReplayResult, StepReplay, StepResult};
pub use report::{assemble_report, BugReport, ReportMeta};
pub use sentence::generate_step_sentence;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("a finalized report needs at least one step")]
    EmptySteps,
    #[error("step {ordinal}: component `{component}` is not in the component universe")]
    UnresolvedComponent { ordinal: u32, component: ComponentId },
    #[error("step {ordinal}: {reason}")]
    InvalidStep { ordinal: u32, reason: String },
}
