//! Stage orchestration: ingest → classify → bin → arff → report.
//!
//! Every stage persists its output under the run's output directory so it
//! can be reloaded and rerun on its own:
//!
//! ```text
//! <out>/corpus.jsonl       accepted profiles
//! <out>/rejections.json    rejection report
//! <out>/classified.jsonl   profiles + about_me_class
//! <out>/binned.jsonl       profiles + class + age + bins
//! <out>/profiles.arff
//! <out>/reports/<run-id>/{tables,charts,manifest.json}
//! <out>/summary.json
//! ```
//!
//! A failed run leaves its partial outputs and a `FAILED` marker file.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arff::{build_dataset, emit_arff, ArffError};
use crate::binning::{BinningError, GapPolicy};
use crate::ingest::{
    load_profiles, persist_corpus, read_json_lines, to_json_lines, validate_and_filter,
    write_atomic, IngestError, Profile, RejectionReport,
};
use crate::knn::{load_sample_corpus, ClassLabel, Classifier, KnnError};
use crate::record::{BinnedProfile, ClassifiedProfile};
use crate::report::{write_reports, Manifest, ReportError};
use crate::textprep::{StopwordError, StopwordList};

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const REJECTIONS_FILE: &str = "rejections.json";
pub const CLASSIFIED_FILE: &str = "classified.jsonl";
pub const BINNED_FILE: &str = "binned.jsonl";
pub const ARFF_FILE: &str = "profiles.arff";
pub const SUMMARY_FILE: &str = "summary.json";
pub const FAILED_MARKER: &str = "FAILED";

pub const DEFAULT_FEATURES: usize = 50;
pub const DEFAULT_K: usize = 5;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot open {path}: {source}")]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Stopwords(#[from] StopwordError),
    #[error("classification failed: {0}")]
    Knn(#[from] KnnError),
    #[error("profile {id}: {source}")]
    Binning {
        id: String,
        #[source]
        source: BinningError,
    },
    #[error(transparent)]
    Arff(#[from] ArffError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub corpus_path: PathBuf,
    pub stopword_path: Option<PathBuf>,
    pub n_features: usize,
    pub k: usize,
    pub reference_date: NaiveDate,
    pub output_dir: PathBuf,
    pub gap_policy: GapPolicy,
    pub run_id: String,
}

impl RunConfig {
    pub fn new(
        input_path: impl Into<PathBuf>,
        corpus_path: impl Into<PathBuf>,
        reference_date: NaiveDate,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            input_path: input_path.into(),
            corpus_path: corpus_path.into(),
            stopword_path: None,
            n_features: DEFAULT_FEATURES,
            k: DEFAULT_K,
            reference_date,
            output_dir: output_dir.into(),
            gap_policy: GapPolicy::default(),
            run_id: "run".to_owned(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.k == 0 {
            return Err(PipelineError::Config("k must be at least 1".into()));
        }
        if self.n_features == 0 {
            return Err(PipelineError::Config("feature count must be at least 1".into()));
        }
        let empty = |p: &Path| p.as_os_str().is_empty();
        if empty(&self.input_path) || empty(&self.corpus_path) || empty(&self.output_dir) {
            return Err(PipelineError::Config("paths must be non-empty".into()));
        }
        if self.stopword_path.as_deref().is_some_and(empty) {
            return Err(PipelineError::Config("stopword path is empty".into()));
        }
        if self.run_id.is_empty() || self.run_id.contains(['/', '\\']) || self.run_id == ".." {
            return Err(PipelineError::Config(format!("bad run id '{}'", self.run_id)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub ingested: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub classified: usize,
    pub unclassifiable: usize,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
}

fn open(path: &Path) -> Result<BufReader<fs::File>, PipelineError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|source| PipelineError::Open {
            path: path.to_path_buf(),
            source,
        })
}

pub fn load_stopwords(path: Option<&Path>) -> Result<StopwordList, PipelineError> {
    Ok(match path {
        Some(p) => StopwordList::from_file(p)?,
        None => StopwordList::english(),
    })
}

pub fn load_classifier(
    corpus_path: &Path,
    stops: StopwordList,
    n_features: usize,
    k: usize,
) -> Result<Classifier, PipelineError> {
    let docs = load_sample_corpus(open(corpus_path)?, &stops)?;
    Ok(Classifier::new(docs, stops, n_features, k)?)
}

pub struct IngestOutcome {
    pub ingested: usize,
    pub profiles: Vec<Profile>,
    pub report: RejectionReport,
}

/// Loads, validates and persists the accepted corpus plus rejection report.
pub fn stage_ingest(
    input: &Path,
    reference: Option<NaiveDate>,
    out_dir: &Path,
) -> Result<IngestOutcome, PipelineError> {
    let loaded = load_profiles(open(input)?)?;
    let (profiles, mut report) = validate_and_filter(&loaded.profiles, reference);
    report.add_parse_errors(&loaded.errors);
    persist_corpus(&profiles, &out_dir.join(CORPUS_FILE))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_atomic(&out_dir.join(REJECTIONS_FILE), json.as_bytes())?;
    Ok(IngestOutcome {
        ingested: loaded.record_count(),
        profiles,
        report,
    })
}

/// Classifies about_me texts in parallel, keeping input order.
pub fn classify_profiles(
    profiles: Vec<Profile>,
    classifier: &Classifier,
) -> Result<Vec<ClassifiedProfile>, PipelineError> {
    let labels = profiles
        .par_iter()
        .map(|p| classifier.classify(&p.about_me).map(|c| c.label))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(profiles
        .into_iter()
        .zip(labels)
        .map(|(profile, about_me_class)| ClassifiedProfile {
            profile,
            about_me_class,
        })
        .collect())
}

pub fn stage_classify(
    profiles: Vec<Profile>,
    classifier: &Classifier,
    out_dir: &Path,
) -> Result<Vec<ClassifiedProfile>, PipelineError> {
    let classified = classify_profiles(profiles, classifier)?;
    write_atomic(
        &out_dir.join(CLASSIFIED_FILE),
        to_json_lines(&classified).as_bytes(),
    )?;
    Ok(classified)
}

pub fn bin_profiles(
    classified: Vec<ClassifiedProfile>,
    reference: NaiveDate,
    gap: GapPolicy,
) -> Result<Vec<BinnedProfile>, PipelineError> {
    classified
        .into_iter()
        .map(|c| {
            let id = c.profile.record_id.clone();
            BinnedProfile::from_classified(c, reference, gap)
                .map_err(|source| PipelineError::Binning { id, source })
        })
        .collect()
}

pub fn stage_bin(
    classified: Vec<ClassifiedProfile>,
    reference: NaiveDate,
    gap: GapPolicy,
    out_dir: &Path,
) -> Result<Vec<BinnedProfile>, PipelineError> {
    let binned = bin_profiles(classified, reference, gap)?;
    write_atomic(&out_dir.join(BINNED_FILE), to_json_lines(&binned).as_bytes())?;
    Ok(binned)
}

pub fn stage_arff(binned: &[BinnedProfile], path: &Path) -> Result<(), PipelineError> {
    let text = emit_arff(&build_dataset(binned))?;
    write_atomic(path, text.as_bytes())?;
    Ok(())
}

pub fn stage_report(
    binned: &[BinnedProfile],
    out_dir: &Path,
    run_id: &str,
) -> Result<Manifest, PipelineError> {
    Ok(write_reports(binned, &report_dir(out_dir, run_id), run_id)?)
}

pub fn report_dir(out_dir: &Path, run_id: &str) -> PathBuf {
    out_dir.join("reports").join(run_id)
}

pub fn load_classified(path: &Path) -> Result<Vec<ClassifiedProfile>, PipelineError> {
    Ok(read_json_lines(path)?)
}

pub fn load_binned(path: &Path) -> Result<Vec<BinnedProfile>, PipelineError> {
    Ok(read_json_lines(path)?)
}

fn run_stages(config: &RunConfig) -> Result<RunSummary, PipelineError> {
    let out = &config.output_dir;
    let stops = load_stopwords(config.stopword_path.as_deref())?;
    let classifier = load_classifier(&config.corpus_path, stops, config.n_features, config.k)?;

    let ingest = stage_ingest(&config.input_path, Some(config.reference_date), out)?;
    let accepted = ingest.profiles.len();
    let classified = stage_classify(ingest.profiles, &classifier, out)?;
    let unclassifiable = classified
        .iter()
        .filter(|c| c.about_me_class == ClassLabel::Unclassifiable)
        .count();
    let binned = stage_bin(classified, config.reference_date, config.gap_policy, out)?;
    stage_arff(&binned, &out.join(ARFF_FILE))?;
    let manifest = stage_report(&binned, out, &config.run_id)?;

    let report_prefix = format!("reports/{}", config.run_id);
    let mut artifacts: Vec<String> = [CORPUS_FILE, REJECTIONS_FILE, CLASSIFIED_FILE, BINNED_FILE, ARFF_FILE]
        .iter()
        .map(|s| (*s).to_owned())
        .collect();
    artifacts.push(format!("{report_prefix}/manifest.json"));
    artifacts.extend(
        manifest
            .artifacts
            .iter()
            .map(|a| format!("{report_prefix}/{}", a.path)),
    );

    let summary = RunSummary {
        run_id: config.run_id.clone(),
        ingested: ingest.ingested,
        accepted,
        rejected: ingest.report.rejected_count,
        classified: accepted - unclassifiable,
        unclassifiable,
        artifacts,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    write_atomic(&out.join(SUMMARY_FILE), json.as_bytes())?;
    Ok(summary)
}

/// Runs every stage. On failure the error is also written to `<out>/FAILED`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary, PipelineError> {
    config.validate()?;
    let out = &config.output_dir;
    fs::create_dir_all(out).map_err(|e| IngestError::Storage {
        path: out.clone(),
        message: e.to_string(),
    })?;
    let marker = out.join(FAILED_MARKER);
    if marker.exists() {
        let _ = fs::remove_file(&marker);
    }
    let result = run_stages(config);
    if let Err(e) = &result {
        let _ = fs::write(&marker, format!("{e}\n"));
    }
    result
}
