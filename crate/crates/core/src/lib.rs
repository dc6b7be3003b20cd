//! Personality classification of free-text profile attributes with
//! term-frequency feature selection and k-nearest neighbors, binning of
//! numeric profile attributes, ARFF export and demographic distribution
//! reports.
//!
//! Stages, in pipeline order:
//!
//! - [`ingest`]: line-delimited records → validated [`ingest::Profile`]s
//! - [`textprep`]: normalization, tokens, common-word removal
//! - [`features`]: term counts, TF, feature selection, count vectors
//! - [`knn`]: distance matrix against a labeled sample corpus and voting
//! - [`binning`]: wall/music/activity classes and age ranges
//! - [`arff`]: dataset emission and parsing
//! - [`report`]: distributions, comparisons, CSV tables, SVG charts
//! - [`pipeline`]: runs all of the above with persisted stage outputs

pub mod arff;
pub mod binning;
pub mod features;
pub mod ingest;
pub mod knn;
pub mod pipeline;
pub mod record;
pub mod report;
pub mod synth;
pub mod textprep;
