//! Term counts, normalized term frequency and feature selection.
//!
//! TF is only used to rank terms. Distances are computed over the raw
//! occurrence counts of the selected features (see [`count_vector`]).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::textprep::TokenList;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("document has no terms")]
    EmptyDocument,
}

/// Occurrence count per term, plus the total number of occurrences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TermCounts {
    counts: BTreeMap<String, u32>,
    total: u32,
}

impl TermCounts {
    pub fn get(&self, term: &str) -> u32 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(t, &c)| (t.as_str(), c))
    }
}

/// Normalized term frequency: count / total.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TfMap {
    tf: BTreeMap<String, f64>,
}

impl TfMap {
    pub fn get(&self, term: &str) -> Option<f64> {
        self.tf.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.tf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tf.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.tf.iter().map(|(t, &v)| (t.as_str(), v))
    }
}

impl FromIterator<(String, f64)> for TfMap {
    fn from_iter<T: IntoIterator<Item = (String, f64)>>(iter: T) -> Self {
        Self {
            tf: iter.into_iter().collect(),
        }
    }
}

/// The selected vocabulary, ordered by descending TF then ascending term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureSet {
    terms: Vec<String>,
}

impl FeatureSet {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for FeatureSet {
    /// Builds a feature set in the given order, dropping repeated terms.
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        let mut terms: Vec<String> = Vec::new();
        for t in iter {
            let t = t.into();
            if !terms.contains(&t) {
                terms.push(t);
            }
        }
        Self { terms }
    }
}

pub fn term_counts(tokens: &TokenList) -> TermCounts {
    let mut counts = BTreeMap::new();
    for t in tokens.iter() {
        *counts.entry(t.to_owned()).or_insert(0u32) += 1;
    }
    TermCounts {
        counts,
        total: tokens.len() as u32,
    }
}

pub fn term_frequency(counts: &TermCounts) -> Result<TfMap, FeatureError> {
    if counts.total == 0 {
        return Err(FeatureError::EmptyDocument);
    }
    let total = f64::from(counts.total);
    Ok(counts
        .iter()
        .map(|(t, c)| (t.to_owned(), f64::from(c) / total))
        .collect())
}

/// Keeps the `n` highest-TF terms. Equal TF values are ordered by term.
pub fn select_features(tf: &TfMap, n: usize) -> Result<FeatureSet, FeatureError> {
    if tf.is_empty() {
        return Err(FeatureError::EmptyDocument);
    }
    let mut ranked: Vec<(&str, f64)> = tf.iter().collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });
    Ok(FeatureSet {
        terms: ranked
            .into_iter()
            .take(n)
            .map(|(t, _)| t.to_owned())
            .collect(),
    })
}

/// Raw occurrence count of each feature, in feature order.
pub fn count_vector(features: &FeatureSet, counts: &TermCounts) -> Vec<u32> {
    features.terms.iter().map(|t| counts.get(t)).collect()
}
