//! Distance matrix against the pre-classified sample corpus and k-nearest
//! neighbor voting.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{
    count_vector, select_features, term_counts, term_frequency, FeatureSet, TermCounts,
};
use crate::textprep::{preprocess, StopwordList, TokenList};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnnError {
    #[error("vector length mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("distance needs at least one dimension")]
    ZeroDimension,
    #[error("sample corpus is empty")]
    EmptyCorpus,
    #[error("k must satisfy 1 <= k <= {corpus_size}, got {k}")]
    InvalidK { k: usize, corpus_size: usize },
    #[error("sample corpus line {line}: {message}")]
    CorpusRecord { line: usize, message: String },
    #[error("sample document {doc_id}: {message}")]
    InvalidSample { doc_id: String, message: String },
    #[error("cannot read sample corpus: {0}")]
    Io(String),
}

/// Personality class levels, plus the sentinel for texts with no terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ClassLabel {
    Aggressive,
    Honest,
    Romantic,
    Sincere,
    Dishonest,
    Friendly,
    EagerToLearn,
    Conservative,
    Emotional,
    Lazy,
    Unclassifiable,
}

impl ClassLabel {
    /// The ten labels a sample document may carry.
    pub const KNOWN: [ClassLabel; 10] = [
        ClassLabel::Aggressive,
        ClassLabel::Honest,
        ClassLabel::Romantic,
        ClassLabel::Sincere,
        ClassLabel::Dishonest,
        ClassLabel::Friendly,
        ClassLabel::EagerToLearn,
        ClassLabel::Conservative,
        ClassLabel::Emotional,
        ClassLabel::Lazy,
    ];

    pub const ALL: [ClassLabel; 11] = [
        ClassLabel::Aggressive,
        ClassLabel::Honest,
        ClassLabel::Romantic,
        ClassLabel::Sincere,
        ClassLabel::Dishonest,
        ClassLabel::Friendly,
        ClassLabel::EagerToLearn,
        ClassLabel::Conservative,
        ClassLabel::Emotional,
        ClassLabel::Lazy,
        ClassLabel::Unclassifiable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Aggressive => "Aggressive",
            ClassLabel::Honest => "Honest",
            ClassLabel::Romantic => "Romantic",
            ClassLabel::Sincere => "Sincere",
            ClassLabel::Dishonest => "Dishonest",
            ClassLabel::Friendly => "Friendly",
            ClassLabel::EagerToLearn => "Eager_to_Learn",
            ClassLabel::Conservative => "Conservative",
            ClassLabel::Emotional => "Emotional",
            ClassLabel::Lazy => "Lazy",
            ClassLabel::Unclassifiable => "Unclassifiable",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown class label '{s}'"))
    }
}

impl TryFrom<String> for ClassLabel {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ClassLabel> for String {
    fn from(l: ClassLabel) -> Self {
        l.as_str().to_owned()
    }
}

/// A pre-classified known text with its preprocessed terms cached.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDocument {
    pub doc_id: String,
    pub text: String,
    pub label: ClassLabel,
    tokens: TokenList,
    counts: TermCounts,
}

impl SampleDocument {
    pub fn new(
        doc_id: impl Into<String>,
        text: impl Into<String>,
        label: ClassLabel,
        stops: &StopwordList,
    ) -> Result<Self, KnnError> {
        let doc_id = doc_id.into();
        let text = text.into();
        if label == ClassLabel::Unclassifiable {
            return Err(KnnError::InvalidSample {
                doc_id,
                message: "sample label cannot be Unclassifiable".into(),
            });
        }
        if text.trim().is_empty() {
            return Err(KnnError::InvalidSample {
                doc_id,
                message: "sample text is empty".into(),
            });
        }
        let tokens = preprocess(&text, stops);
        let counts = term_counts(&tokens);
        Ok(Self {
            doc_id,
            text,
            label,
            tokens,
            counts,
        })
    }

    pub fn tokens(&self) -> &TokenList {
        &self.tokens
    }

    pub fn counts(&self) -> &TermCounts {
        &self.counts
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleRecord {
    id: String,
    label: String,
    text: String,
}

/// Reads the line-delimited sample corpus: one `{"id","label","text"}`
/// object per line. Blank lines are skipped; ids must be unique.
pub fn load_sample_corpus(
    source: impl BufRead,
    stops: &StopwordList,
) -> Result<Vec<SampleDocument>, KnnError> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| KnnError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| KnnError::CorpusRecord {
            line: line_no,
            message,
        };
        let rec: SampleRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let label: ClassLabel = rec.label.parse().map_err(bad)?;
        if rec.id.is_empty() {
            return Err(bad("empty id".into()));
        }
        if !seen.insert(rec.id.clone()) {
            return Err(bad(format!("duplicate id '{}'", rec.id)));
        }
        docs.push(SampleDocument::new(rec.id, rec.text, label, stops)?);
    }
    Ok(docs)
}

/// Element-wise squared differences: one row of the square matrix.
pub fn squared_diff_row(target: &[u32], sample: &[u32]) -> Result<Vec<f64>, KnnError> {
    if target.len() != sample.len() {
        return Err(KnnError::DimensionMismatch {
            left: target.len(),
            right: sample.len(),
        });
    }
    Ok(target
        .iter()
        .zip(sample)
        .map(|(&a, &b)| {
            let d = f64::from(a) - f64::from(b);
            d * d
        })
        .collect())
}

pub fn euclidean_distance(a: &[u32], b: &[u32]) -> Result<f64, KnnError> {
    if a.is_empty() && b.is_empty() {
        return Err(KnnError::ZeroDimension);
    }
    Ok(squared_diff_row(a, b)?.iter().sum::<f64>().sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub doc_id: String,
    pub label: ClassLabel,
    pub distance: f64,
}

/// Distance from one target to every sample document, in corpus order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DistanceMatrix {
    pub rows: Vec<DistanceRow>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn distance_matrix(
    target: &[u32],
    samples: &[SampleDocument],
    features: &FeatureSet,
) -> Result<DistanceMatrix, KnnError> {
    if samples.is_empty() {
        return Err(KnnError::EmptyCorpus);
    }
    if features.is_empty() {
        return Err(KnnError::ZeroDimension);
    }
    let rows = samples
        .iter()
        .map(|s| {
            let v = count_vector(features, s.counts());
            Ok(DistanceRow {
                doc_id: s.doc_id.clone(),
                label: s.label,
                distance: euclidean_distance(target, &v)?,
            })
        })
        .collect::<Result<_, KnnError>>()?;
    Ok(DistanceMatrix { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: ClassLabel,
    /// The k nearest rows, ascending by distance. Empty for Unclassifiable.
    pub neighbors: Vec<DistanceRow>,
}

impl Classification {
    pub fn unclassifiable() -> Self {
        Self {
            label: ClassLabel::Unclassifiable,
            neighbors: Vec::new(),
        }
    }
}

/// Majority vote among the `k` nearest rows.
///
/// Rows are ordered by distance, then doc_id. A vote tie goes to the label
/// with the smallest summed neighbor distance, then to the smaller label name.
pub fn knn_classify(dm: &DistanceMatrix, k: usize) -> Result<Classification, KnnError> {
    if dm.is_empty() {
        return Err(KnnError::EmptyCorpus);
    }
    check_k(k, dm.len())?;

    let mut sorted: Vec<&DistanceRow> = dm.rows.iter().collect();
    sorted.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    let neighbors: Vec<DistanceRow> = sorted.into_iter().take(k).cloned().collect();

    let mut tally: BTreeMap<&'static str, (usize, f64, ClassLabel)> = BTreeMap::new();
    for row in &neighbors {
        let e = tally
            .entry(row.label.as_str())
            .or_insert((0, 0.0, row.label));
        e.0 += 1;
        e.1 += row.distance;
    }
    // BTreeMap iterates by label name, so the first strictly-better entry wins
    // the final lexicographic tie-break.
    let mut best: Option<(usize, f64, ClassLabel)> = None;
    for &(count, sum, label) in tally.values() {
        let better = match best {
            None => true,
            Some((bc, bs, _)) => count > bc || (count == bc && sum < bs),
        };
        if better {
            best = Some((count, sum, label));
        }
    }
    let label = best.map(|b| b.2).ok_or(KnnError::EmptyCorpus)?;
    Ok(Classification { label, neighbors })
}

fn check_k(k: usize, corpus_size: usize) -> Result<(), KnnError> {
    if k == 0 || k > corpus_size {
        return Err(KnnError::InvalidK { k, corpus_size });
    }
    Ok(())
}

/// Runs the whole chain for one text: preprocessing, TF ranking of the
/// text's own terms, count vectors, distance matrix and vote.
pub fn classify_text(
    text: &str,
    corpus: &[SampleDocument],
    stops: &StopwordList,
    n_features: usize,
    k: usize,
) -> Result<Classification, KnnError> {
    if corpus.is_empty() {
        return Err(KnnError::EmptyCorpus);
    }
    check_k(k, corpus.len())?;
    let tokens = preprocess(text, stops);
    let counts = term_counts(&tokens);
    let tf = match term_frequency(&counts) {
        Ok(tf) => tf,
        Err(_) => return Ok(Classification::unclassifiable()),
    };
    let features = match select_features(&tf, n_features) {
        Ok(f) if !f.is_empty() => f,
        _ => return Ok(Classification::unclassifiable()),
    };
    let target = count_vector(&features, &counts);
    let dm = distance_matrix(&target, corpus, &features)?;
    knn_classify(&dm, k)
}

/// A loaded corpus plus the knobs used to classify against it.
#[derive(Debug, Clone)]
pub struct Classifier {
    corpus: Vec<SampleDocument>,
    stops: StopwordList,
    n_features: usize,
    k: usize,
}

impl Classifier {
    pub fn new(
        corpus: Vec<SampleDocument>,
        stops: StopwordList,
        n_features: usize,
        k: usize,
    ) -> Result<Self, KnnError> {
        if corpus.is_empty() {
            return Err(KnnError::EmptyCorpus);
        }
        check_k(k, corpus.len())?;
        if n_features == 0 {
            return Err(KnnError::ZeroDimension);
        }
        Ok(Self {
            corpus,
            stops,
            n_features,
            k,
        })
    }

    pub fn classify(&self, text: &str) -> Result<Classification, KnnError> {
        classify_text(text, &self.corpus, &self.stops, self.n_features, self.k)
    }

    pub fn corpus(&self) -> &[SampleDocument] {
        &self.corpus
    }
}
