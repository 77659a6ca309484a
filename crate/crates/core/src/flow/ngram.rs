//! Laplace-smoothed n-gram model over event tokens.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::FlowError;
use crate::ripper::EventToken;

/// Padding symbol for contexts that reach before the first event.
pub const START: &str = "<START>";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NGramModel {
    pub order: usize,
    pub alpha: f64,
    /// Predictable tokens; `START` is only ever a context symbol.
    pub vocabulary: BTreeSet<EventToken>,
    /// Context (n−1 symbols joined by spaces) → next token → count.
    pub counts: BTreeMap<String, BTreeMap<EventToken, u64>>,
}

impl NGramModel {
    /// Key for the context that precedes the next event after `history`.
    pub fn context_key(&self, history: &[EventToken]) -> String {
        let width = self.order - 1;
        let tail = &history[history.len().saturating_sub(width)..];
        let mut symbols: Vec<String> = vec![START.to_owned(); width - tail.len()];
        symbols.extend(tail.iter().map(ToString::to_string));
        symbols.join(" ")
    }

    pub fn count(&self, context: &str, token: &EventToken) -> u64 {
        self.counts
            .get(context)
            .and_then(|next| next.get(token))
            .copied()
            .unwrap_or(0)
    }

    pub fn context_total(&self, context: &str) -> u64 {
        self.counts.get(context).map_or(0, |next| next.values().sum())
    }

    /// Smoothed probability of `token` following the context key.
    pub fn probability(&self, context: &str, token: &EventToken) -> Result<f64, FlowError> {
        if !self.vocabulary.contains(token) {
            return Err(FlowError::UnknownToken(token.clone()));
        }
        let v = self.vocabulary.len() as f64;
        Ok((self.count(context, token) as f64 + self.alpha)
            / (self.context_total(context) as f64 + self.alpha * v))
    }
}

/// Counts every n-gram window of `trace` padded on the left with n−1 `START`s.
///
/// The vocabulary is `vocabulary` plus any token in the trace; pass the
/// event-flow graph's edge tokens so unseen-but-possible events get mass.
pub fn train_ngram(
    trace: &[EventToken],
    vocabulary: impl IntoIterator<Item = EventToken>,
    order: usize,
    alpha: f64,
) -> Result<NGramModel, FlowError> {
    if order < 2 {
        return Err(FlowError::InvalidOrder(order));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(FlowError::InvalidAlpha(alpha));
    }
    if trace.is_empty() {
        return Err(FlowError::EmptyTrace);
    }
    let mut model = NGramModel {
        order,
        alpha,
        vocabulary: vocabulary.into_iter().chain(trace.iter().cloned()).collect(),
        counts: BTreeMap::new(),
    };
    for i in 0..trace.len() {
        let key = model.context_key(&trace[..i]);
        *model
            .counts
            .entry(key)
            .or_default()
            .entry(trace[i].clone())
            .or_insert(0) += 1;
    }
    Ok(model)
}

/// P(candidate | last n−1 events of `history`), Laplace smoothed.
pub fn ngram_score(
    model: &NGramModel,
    history: &[EventToken],
    candidate: &EventToken,
) -> Result<f64, FlowError> {
    model.probability(&model.context_key(history), candidate)
}
