use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::MaintenanceError;
use crate::reporting::BugReport;

/// Developer → activity → touch count, as stored in `owners.json`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OwnershipMap(pub BTreeMap<String, BTreeMap<String, u64>>);

impl OwnershipMap {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriageEntry {
    pub developer: String,
    pub score: u64,
}

/// Distinct activities touched by the report's steps.
pub fn report_activities(report: &BugReport) -> BTreeSet<&str> {
    report
        .steps
        .iter()
        .filter_map(|s| s.component.as_ref().map(|c| c.activity.as_str()))
        .collect()
}

/// Ranks every developer by ownership of the activities the report touches.
pub fn triage_report(report: &BugReport, owners: &OwnershipMap) -> Result<Vec<TriageEntry>, MaintenanceError> {
    if owners.is_empty() {
        return Err(MaintenanceError::EmptyOwnershipMap);
    }
    let activities = report_activities(report);
    let mut ranked: Vec<TriageEntry> = owners
        .0
        .iter()
        .map(|(dev, touches)| TriageEntry {
            developer: dev.clone(),
            score: activities.iter().filter_map(|a| touches.get(*a)).sum(),
        })
        .collect();
    ranked.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.developer.cmp(&b.developer)));
    Ok(ranked)
}
