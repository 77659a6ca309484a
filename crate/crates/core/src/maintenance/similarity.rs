use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MaintenanceError;
use crate::reporting::BugReport;
use crate::ripper::EventToken;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    pub w_lcs: f64,
    pub w_ngram: f64,
    /// Pairs scoring at least this are duplicates.
    pub tau: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            w_lcs: 0.5,
            w_ngram: 0.5,
            tau: 0.8,
        }
    }
}

impl SimilarityConfig {
    pub fn validate(&self) -> Result<(), MaintenanceError> {
        let ok = self.w_lcs >= 0.0
            && self.w_ngram >= 0.0
            && (self.w_lcs + self.w_ngram - 1.0).abs() < 1e-9
            && (0.0..=1.0).contains(&self.tau);
        if ok {
            Ok(())
        } else {
            Err(MaintenanceError::InvalidConfig(*self))
        }
    }
}

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn bigram_bag(tokens: &[EventToken]) -> BTreeMap<(&EventToken, &EventToken), u32> {
    let mut bag = BTreeMap::new();
    for w in tokens.windows(2) {
        *bag.entry((&w[0], &w[1])).or_insert(0) += 1;
    }
    bag
}

/// Cosine similarity of the bigram bags. Sequences too short to have bigrams
/// count as fully similar only when they are equal.
pub fn bigram_cosine(a: &[EventToken], b: &[EventToken]) -> f64 {
    let (ba, bb) = (bigram_bag(a), bigram_bag(b));
    if ba.is_empty() || bb.is_empty() {
        return if ba.is_empty() && bb.is_empty() && a == b { 1.0 } else { 0.0 };
    }
    let dot: f64 = ba
        .iter()
        .filter_map(|(k, &x)| bb.get(k).map(|&y| f64::from(x) * f64::from(y)))
        .sum();
    // squared norms are exact integers, so identical bags give exactly 1
    let sq = |bag: &BTreeMap<_, u32>| bag.values().map(|&v| f64::from(v).powi(2)).sum::<f64>();
    dot / (sq(&ba) * sq(&bb)).sqrt()
}

/// Weighted blend of normalized LCS and bigram cosine over the step tokens.
pub fn sequence_similarity(a: &[EventToken], b: &[EventToken], cfg: &SimilarityConfig) -> f64 {
    let lcs = if a.is_empty() && b.is_empty() {
        1.0
    } else {
        2.0 * lcs_len(a, b) as f64 / (a.len() + b.len()) as f64
    };
    (cfg.w_lcs * lcs + cfg.w_ngram * bigram_cosine(a, b)).clamp(0.0, 1.0)
}

pub fn report_similarity(a: &BugReport, b: &BugReport, cfg: &SimilarityConfig) -> Result<f64, MaintenanceError> {
    cfg.validate()?;
    if a.app_id != b.app_id {
        return Err(MaintenanceError::AppMismatch {
            left: a.app_id.clone(),
            right: b.app_id.clone(),
        });
    }
    Ok(sequence_similarity(&a.tokens(), &b.tokens(), cfg))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuplicatePair {
    pub a: String,
    pub b: String,
    pub score: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Duplicates {
    pub tau: f64,
    /// Sorted by descending score, then ids.
    pub pairs: Vec<DuplicatePair>,
    /// Connected components of the flagged pairs, each sorted, two or more members.
    pub clusters: Vec<Vec<String>>,
}

impl Duplicates {
    pub fn involving<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a DuplicatePair> + 'a {
        self.pairs.iter().filter(move |p| p.a == id || p.b == id)
    }

    pub fn cluster_of(&self, id: &str) -> Option<&Vec<String>> {
        self.clusters.iter().find(|c| c.iter().any(|m| m == id))
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Scores every same-app pair and clusters the ones at or above `tau`.
pub fn detect_duplicates(corpus: &[BugReport], cfg: &SimilarityConfig) -> Result<Duplicates, MaintenanceError> {
    cfg.validate()?;
    let mut reports: Vec<&BugReport> = corpus.iter().collect();
    reports.sort_by(|x, y| x.report_id.cmp(&y.report_id));
    let tokens: Vec<Vec<EventToken>> = reports.iter().map(|r| r.tokens()).collect();

    let mut parent: Vec<usize> = (0..reports.len()).collect();
    let mut pairs = Vec::new();
    for i in 0..reports.len() {
        for j in i + 1..reports.len() {
            if reports[i].app_id != reports[j].app_id {
                continue;
            }
            let score = sequence_similarity(&tokens[i], &tokens[j], cfg);
            if score >= cfg.tau {
                pairs.push(DuplicatePair {
                    a: reports[i].report_id.clone(),
                    b: reports[j].report_id.clone(),
                    score,
                });
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    pairs.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then_with(|| (&x.a, &x.b).cmp(&(&y.a, &y.b)))
    });

    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, report) in reports.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(report.report_id.clone());
    }
    let clusters = groups.into_values().filter(|g| g.len() > 1).collect();

    Ok(Duplicates {
        tau: cfg.tau,
        pairs,
        clusters,
    })
}
