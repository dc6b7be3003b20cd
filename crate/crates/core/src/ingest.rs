//! Line-delimited profile ingestion, validation and corpus persistence.
//!
//! Input records are one JSON object per line with the keys `id`,
//! `birthday`, `about_me`, `activities`, `gender`, `interests`,
//! `wall_count`, `political` and `music_count`. Absent keys (or `null`)
//! mean missing.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read input: {0}")]
    Input(#[source] std::io::Error),
    #[error("duplicate record id '{id}' (line {line})")]
    DuplicateId { id: String, line: usize },
    #[error("storage error at {path}: {message}")]
    Storage { path: PathBuf, message: String },
}

/// A line that could not be turned into a [`RawProfile`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProfile {
    #[serde(rename = "id")]
    pub record_id: String,
    #[serde(default)]
    pub birthday: Option<String>,
    #[serde(default)]
    pub about_me: Option<String>,
    #[serde(default)]
    pub activities: Option<String>,
    #[serde(default)]
    pub gender: Option<String>,
    #[serde(default)]
    pub interests: Option<String>,
    #[serde(default)]
    pub wall_count: Option<i64>,
    #[serde(default)]
    pub political: Option<String>,
    #[serde(default)]
    pub music_count: Option<i64>,
}

#[derive(Debug, Default)]
pub struct LoadedProfiles {
    pub profiles: Vec<RawProfile>,
    pub errors: Vec<ParseError>,
}

impl LoadedProfiles {
    /// Number of non-blank input lines seen.
    pub fn record_count(&self) -> usize {
        self.profiles.len() + self.errors.len()
    }
}

/// Parses one record per non-blank line, keeping input order.
///
/// Malformed lines are collected with their line number. A repeated id is a
/// hard error.
pub fn load_profiles(source: impl BufRead) -> Result<LoadedProfiles, IngestError> {
    let mut out = LoadedProfiles::default();
    let mut seen = HashSet::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(IngestError::Input)?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawProfile>(&line) {
            Ok(raw) if raw.record_id.trim().is_empty() => out.errors.push(ParseError {
                line: line_no,
                message: "empty record id".into(),
            }),
            Ok(raw) => {
                if !seen.insert(raw.record_id.clone()) {
                    return Err(IngestError::DuplicateId {
                        id: raw.record_id,
                        line: line_no,
                    });
                }
                out.profiles.push(raw);
            }
            Err(e) => out.errors.push(ParseError {
                line: line_no,
                message: e.to_string(),
            }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gender {
    Male,
    Female,
    Unspecified,
}

impl Gender {
    pub const ALL: [Gender; 3] = [Gender::Male, Gender::Female, Gender::Unspecified];

    /// Case-insensitive; anything other than male/female is Unspecified.
    pub fn normalize(raw: Option<&str>) -> Self {
        match raw.map(|g| g.trim().to_lowercase()).as_deref() {
            Some("male") => Gender::Male,
            Some("female") => Gender::Female,
            _ => Gender::Unspecified,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "Male",
            Gender::Female => "Female",
            Gender::Unspecified => "Unspecified",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An accepted profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    #[serde(rename = "id")]
    pub record_id: String,
    pub birthday: Option<NaiveDate>,
    pub about_me: String,
    pub activities: Option<String>,
    pub gender: Gender,
    pub interests: Option<String>,
    pub wall_count: u32,
    pub political: Option<String>,
    pub music_count: u32,
    pub activity_interest_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RejectReason {
    /// about_me absent or blank.
    MissingText,
    /// wall_count or music_count absent.
    MissingNumeric,
    NegativeNumeric,
    /// birthday present but not a valid YYYY-MM-DD date, or after the
    /// reference date.
    BadDate,
    /// line could not be parsed as a record.
    Malformed,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::MissingText => "MISSING_TEXT",
            RejectReason::MissingNumeric => "MISSING_NUMERIC",
            RejectReason::NegativeNumeric => "NEGATIVE_NUMERIC",
            RejectReason::BadDate => "BAD_DATE",
            RejectReason::Malformed => "MALFORMED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub record_id: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RejectionReport {
    pub rejected: Vec<Rejection>,
    pub accepted_count: usize,
    pub rejected_count: usize,
}

impl RejectionReport {
    /// Records malformed input lines as rejections keyed `line:<n>`.
    pub fn add_parse_errors(&mut self, errors: &[ParseError]) {
        for e in errors {
            self.rejected.push(Rejection {
                record_id: format!("line:{}", e.line),
                reason: RejectReason::Malformed,
            });
        }
        self.rejected_count += errors.len();
    }
}

/// Number of comma-separated non-empty items.
fn count_items(text: Option<&str>) -> u32 {
    text.map_or(0, |t| {
        t.split(',').filter(|item| !item.trim().is_empty()).count() as u32
    })
}

fn check(raw: &RawProfile, reference: Option<NaiveDate>) -> Result<Profile, RejectReason> {
    let about_me = match raw.about_me.as_deref().map(str::trim) {
        Some(t) if !t.is_empty() => raw.about_me.clone().unwrap_or_default(),
        _ => return Err(RejectReason::MissingText),
    };
    let (Some(wall), Some(music)) = (raw.wall_count, raw.music_count) else {
        return Err(RejectReason::MissingNumeric);
    };
    let wall_count = u32::try_from(wall).map_err(|_| RejectReason::NegativeNumeric)?;
    let music_count = u32::try_from(music).map_err(|_| RejectReason::NegativeNumeric)?;
    let birthday = match raw.birthday.as_deref() {
        None => None,
        Some(s) => {
            let d = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
                .map_err(|_| RejectReason::BadDate)?;
            if reference.is_some_and(|r| d > r) {
                return Err(RejectReason::BadDate);
            }
            Some(d)
        }
    };
    Ok(Profile {
        record_id: raw.record_id.clone(),
        birthday,
        about_me,
        activities: raw.activities.clone(),
        gender: Gender::normalize(raw.gender.as_deref()),
        interests: raw.interests.clone(),
        wall_count,
        political: raw.political.clone(),
        music_count,
        activity_interest_count: count_items(raw.activities.as_deref())
            + count_items(raw.interests.as_deref()),
    })
}

/// Splits records into accepted profiles and a rejection report.
///
/// When `reference` is given, birthdays after it are rejected as `BAD_DATE`
/// so that the later age computation is total.
pub fn validate_and_filter(
    raws: &[RawProfile],
    reference: Option<NaiveDate>,
) -> (Vec<Profile>, RejectionReport) {
    let mut accepted = Vec::new();
    let mut report = RejectionReport::default();
    for raw in raws {
        match check(raw, reference) {
            Ok(p) => accepted.push(p),
            Err(reason) => report.rejected.push(Rejection {
                record_id: raw.record_id.clone(),
                reason,
            }),
        }
    }
    report.accepted_count = accepted.len();
    report.rejected_count = report.rejected.len();
    (accepted, report)
}

/// Writes `contents` to `path` through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IngestError> {
    let storage = |e: std::io::Error| IngestError::Storage {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(storage)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(storage)?;
    fs::rename(&tmp, path).map_err(storage)
}

/// Serializes records as JSON lines.
pub fn to_json_lines<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        // Serialization of these plain structs cannot fail.
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Reads JSON lines written by [`to_json_lines`].
pub fn read_json_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, IngestError> {
    let storage = |message: String| IngestError::Storage {
        path: path.to_path_buf(),
        message,
    };
    let file = fs::File::open(path).map_err(|e| storage(e.to_string()))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| storage(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| storage(format!("line {}: {e}", idx + 1)))?,
        );
    }
    Ok(out)
}

pub fn persist_corpus(profiles: &[Profile], path: &Path) -> Result<(), IngestError> {
    write_atomic(path, to_json_lines(profiles).as_bytes())
}

pub fn load_corpus(path: &Path) -> Result<Vec<Profile>, IngestError> {
    read_json_lines(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{"id":"u1","birthday":"1990-06-15","about_me":"I am honest","activities":"chess, running","gender":"MALE","interests":"books","wall_count":12,"political":"none","music_count":3}"#;

    fn raw(id: &str) -> RawProfile {
        RawProfile {
            record_id: id.into(),
            about_me: Some("kind and honest".into()),
            wall_count: Some(1),
            music_count: Some(1),
            ..Default::default()
        }
    }

    #[test]
    fn load_empty() {
        let loaded = load_profiles("".as_bytes()).unwrap();
        assert!(loaded.profiles.is_empty() && loaded.errors.is_empty());
    }

    #[test]
    fn load_keeps_order() {
        let src = "{\"id\":\"c\"}\n{\"id\":\"a\"}\n\n{\"id\":\"b\"}\n";
        let loaded = load_profiles(src.as_bytes()).unwrap();
        let ids: Vec<_> = loaded.profiles.iter().map(|p| p.record_id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
    }

    #[test]
    fn load_collects_malformed_lines() {
        let src = format!("{FULL}\nnot json\n{{\"id\":\"u2\",\"wall_count\":1}}\n");
        let loaded = load_profiles(src.as_bytes()).unwrap();
        assert_eq!(loaded.profiles.len(), 2);
        assert_eq!(loaded.errors.len(), 1);
        assert_eq!(loaded.errors[0].line, 2);
        assert_eq!(loaded.record_count(), 3);
    }

    #[test]
    fn load_rejects_unknown_keys_and_bad_types() {
        let src = "{\"id\":\"a\",\"colour\":\"red\"}\n{\"id\":\"b\",\"wall_count\":\"ten\"}\n{\"id\":\"\"}\n";
        let loaded = load_profiles(src.as_bytes()).unwrap();
        assert!(loaded.profiles.is_empty());
        assert_eq!(
            loaded.errors.iter().map(|e| e.line).collect::<Vec<_>>(),
            [1, 2, 3]
        );
    }

    #[test]
    fn load_duplicate_id_is_an_error() {
        let src = "{\"id\":\"a\"}\n{\"id\":\"a\"}\n";
        let err = load_profiles(src.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("'a'"));
    }

    #[test]
    fn accept_full_record() {
        let loaded = load_profiles(FULL.as_bytes()).unwrap();
        let (ok, report) = validate_and_filter(&loaded.profiles, None);
        assert_eq!(report.rejected_count, 0);
        let p = &ok[0];
        assert_eq!(p.gender, Gender::Male);
        assert_eq!(p.birthday, Some(NaiveDate::from_ymd_opt(1990, 6, 15).unwrap()));
        assert_eq!(p.activity_interest_count, 3);
        assert_eq!((p.wall_count, p.music_count), (12, 3));
    }

    #[test]
    fn rejection_reasons() {
        let mut no_text = raw("t");
        no_text.about_me = Some("   ".into());
        let mut no_wall = raw("w");
        no_wall.wall_count = None;
        let mut negative = raw("n");
        negative.music_count = Some(-2);
        let mut bad_date = raw("d");
        bad_date.birthday = Some("1990-02-30".into());
        let mut future = raw("f");
        future.birthday = Some("2030-01-01".into());
        let mut hidden = raw("h");
        hidden.birthday = None;

        let input = [no_text, no_wall, negative, bad_date, future, hidden];
        let reference = NaiveDate::from_ymd_opt(2012, 1, 1);
        let (ok, report) = validate_and_filter(&input, reference);
        assert_eq!(ok.len(), 1);
        assert_eq!(ok[0].record_id, "h");
        assert_eq!(ok[0].birthday, None);
        let reasons: Vec<_> = report.rejected.iter().map(|r| r.reason.code()).collect();
        assert_eq!(
            reasons,
            ["MISSING_TEXT", "MISSING_NUMERIC", "NEGATIVE_NUMERIC", "BAD_DATE", "BAD_DATE"]
        );
        assert_eq!(report.accepted_count + report.rejected_count, input.len());

        // without a reference date a future birthday is only checked for syntax
        let (ok, _) = validate_and_filter(&input[4..5], None);
        assert_eq!(ok.len(), 1);
    }

    #[test]
    fn gender_normalization() {
        assert_eq!(Gender::normalize(Some(" Female ")), Gender::Female);
        assert_eq!(Gender::normalize(Some("male")), Gender::Male);
        assert_eq!(Gender::normalize(Some("m")), Gender::Unspecified);
        assert_eq!(Gender::normalize(None), Gender::Unspecified);
    }

    #[test]
    fn item_counting() {
        assert_eq!(count_items(Some("a, b,,c , ")), 3);
        assert_eq!(count_items(Some("")), 0);
        assert_eq!(count_items(None), 0);
    }

    #[test]
    fn corpus_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");

        persist_corpus(&[], &path).unwrap();
        assert!(load_corpus(&path).unwrap().is_empty());

        let raws: Vec<RawProfile> = (0..5)
            .map(|i| {
                let mut r = raw(&format!("p{i}"));
                r.birthday = (i % 2 == 0).then(|| format!("19{}0-01-0{}", 5 + i, 1 + i));
                r.gender = Some(["male", "female", "x"][i % 3].into());
                r.activities = Some("a, b".into());
                r
            })
            .collect();
        let (profiles, _) = validate_and_filter(&raws, None);
        assert_eq!(profiles.len(), 5);
        persist_corpus(&profiles, &path).unwrap();
        assert_eq!(load_corpus(&path).unwrap(), profiles);
        assert!(!dir.path().join("corpus.jsonl.tmp").exists());
    }

    #[test]
    fn load_missing_corpus() {
        let err = load_corpus(Path::new("/nonexistent/corpus.jsonl")).unwrap_err();
        assert!(matches!(err, IngestError::Storage { .. }));
    }
}
