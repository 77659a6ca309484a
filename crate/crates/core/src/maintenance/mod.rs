//! Applications of structured reports: duplicate detection over step
//! sequences and developer triage over traceability links.

mod similarity;
mod triage;

pub use similarity::{
    bigram_cosine, detect_duplicates, lcs_len, report_similarity, sequence_similarity, DuplicatePair,
    Duplicates, SimilarityConfig,
};
pub use triage::{report_activities, triage_report, OwnershipMap, TriageEntry};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MaintenanceError {
    #[error("reports belong to different apps (`{left}` vs `{right}`)")]
    AppMismatch { left: String, right: String },
    #[error("ownership map is empty")]
    EmptyOwnershipMap,
    #[error("invalid similarity config {0:?}: weights must be non-negative and sum to 1, tau in [0, 1]")]
    InvalidConfig(SimilarityConfig),
}
