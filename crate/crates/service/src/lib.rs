//! Reporter sessions, report storage and the HTTP API over an analysis store.
//!
//! A store is a directory:
//!
//! ```text
//! <root>/db/<app_id>/<version>/...   analysis databases written by `rip`
//! <root>/sessions/s-000001.json      one file per reporter session
//! <root>/reports/r-000001.{json,md,html}
//! <root>/owners.json                 developer -> activity -> count (optional)
//! <root>/duplicates.json             written by `dedup`
//! ```

mod api;
mod error;
mod store;

pub use api::{router, serve};
pub use error::ServiceError;
pub use store::{
    DuplicatesView, FinalizeRequest, ReportSummary, ReporterSession, SessionStatus, Store,
    StepRequest, SuggestionView,
};
