//! ARFF dataset model, emitter and a reader for the emitted subset.
//!
//! Emitted grammar:
//!
//! ```text
//! @relation <name>
//! @attribute <name> numeric | string | date <format> | {v1,v2,...}
//! @data
//! v1,v2,...
//! ```
//!
//! Missing values are `?`. Names and values that are empty, equal to `?`, or
//! contain whitespace, `,` `'` `"` `{` `}` `%` or `\` are single-quoted with
//! backslash escapes. Lines end in LF. The reader also skips `%` comments and
//! blank lines.

use std::fmt::Write as _;

use thiserror::Error;

use crate::binning::{AgeRange, ShareClass, WallCountClass};
use crate::ingest::Gender;
use crate::knn::ClassLabel;
use crate::record::BinnedProfile;

pub const RELATION: &str = "social_profiles";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArffError {
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("row {row}, column {column}: {message}")]
    Encode {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
    String,
    Date(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArffAttribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl ArffAttribute {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn nominal<I, S>(name: impl Into<String>, domain: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            name,
            AttributeKind::Nominal(domain.into_iter().map(Into::into).collect()),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArffValue {
    Numeric(f64),
    Nominal(String),
    String(String),
    Date(String),
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArffDataset {
    pub relation: String,
    pub attributes: Vec<ArffAttribute>,
    pub rows: Vec<Vec<ArffValue>>,
}

impl ArffDataset {
    pub fn validate(&self) -> Result<(), ArffError> {
        if self.relation.is_empty() {
            return Err(ArffError::Invalid("empty relation name".into()));
        }
        for a in &self.attributes {
            if a.name.is_empty() {
                return Err(ArffError::Invalid("empty attribute name".into()));
            }
            if let AttributeKind::Nominal(domain) = &a.kind {
                if domain.is_empty() {
                    return Err(ArffError::Invalid(format!("'{}' has an empty domain", a.name)));
                }
                for (i, v) in domain.iter().enumerate() {
                    if domain[..i].contains(v) {
                        return Err(ArffError::Invalid(format!(
                            "'{}' repeats domain value '{v}'",
                            a.name
                        )));
                    }
                }
            }
        }
        if self.attributes.is_empty() && !self.rows.is_empty() {
            return Err(ArffError::Invalid("rows without attributes".into()));
        }
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.attributes.len() {
                return Err(ArffError::Encode {
                    row: r,
                    column: row.len().min(self.attributes.len()),
                    message: format!(
                        "row has {} values for {} attributes",
                        row.len(),
                        self.attributes.len()
                    ),
                });
            }
            for (c, (value, attr)) in row.iter().zip(&self.attributes).enumerate() {
                check_value(value, &attr.kind).map_err(|message| ArffError::Encode {
                    row: r,
                    column: c,
                    message,
                })?;
            }
        }
        Ok(())
    }
}

fn check_value(value: &ArffValue, kind: &AttributeKind) -> Result<(), String> {
    match (value, kind) {
        (ArffValue::Missing, _) => Ok(()),
        (ArffValue::Numeric(x), AttributeKind::Numeric) if x.is_finite() => Ok(()),
        (ArffValue::Numeric(x), AttributeKind::Numeric) => Err(format!("non-finite number {x}")),
        (ArffValue::Nominal(v), AttributeKind::Nominal(domain)) => {
            if domain.contains(v) {
                Ok(())
            } else {
                Err(format!("'{v}' is not in the nominal domain"))
            }
        }
        (ArffValue::String(_), AttributeKind::String) => Ok(()),
        (ArffValue::Date(_), AttributeKind::Date(_)) => Ok(()),
        (v, k) => Err(format!("value {v:?} does not match attribute kind {k:?}")),
    }
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty()
        || s == "?"
        || s.chars().any(|c| {
            c.is_whitespace() || matches!(c, ',' | '\'' | '"' | '{' | '}' | '%' | '\\')
        })
}

fn quote(s: &str) -> String {
    if !needs_quotes(s) {
        return s.to_owned();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

pub fn emit_arff(ds: &ArffDataset) -> Result<String, ArffError> {
    ds.validate()?;
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", quote(&ds.relation));
    for a in &ds.attributes {
        let kind = match &a.kind {
            AttributeKind::Numeric => "numeric".to_owned(),
            AttributeKind::String => "string".to_owned(),
            AttributeKind::Date(fmt) => format!("date {}", quote(fmt)),
            AttributeKind::Nominal(domain) => {
                let vals: Vec<String> = domain.iter().map(|v| quote(v)).collect();
                format!("{{{}}}", vals.join(","))
            }
        };
        let _ = writeln!(out, "@attribute {} {kind}", quote(&a.name));
    }
    out.push_str("@data\n");
    for row in &ds.rows {
        let fields: Vec<String> = row
            .iter()
            .map(|v| match v {
                ArffValue::Missing => "?".to_owned(),
                ArffValue::Numeric(x) => x.to_string(),
                ArffValue::Nominal(s) | ArffValue::String(s) | ArffValue::Date(s) => quote(s),
            })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word { text: String, quoted: bool },
    Comma,
    Open,
    Close,
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Token>, ArffError> {
    let err = |message: &str| ArffError::Parse {
        line: line_no,
        message: message.to_owned(),
    };
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            ',' => {
                chars.next();
                tokens.push(Token::Comma);
            }
            '{' => {
                chars.next();
                tokens.push(Token::Open);
            }
            '}' => {
                chars.next();
                tokens.push(Token::Close);
            }
            '\'' | '"' => {
                let delim = c;
                chars.next();
                let mut text = String::new();
                loop {
                    match chars.next() {
                        None => return Err(err("unterminated quoted value")),
                        Some(ch) if ch == delim => break,
                        Some('\\') => match chars.next() {
                            Some('n') => text.push('\n'),
                            Some('r') => text.push('\r'),
                            Some('t') => text.push('\t'),
                            Some(other) => text.push(other),
                            None => return Err(err("dangling escape")),
                        },
                        Some(ch) => text.push(ch),
                    }
                }
                tokens.push(Token::Word { text, quoted: true });
            }
            _ => {
                let mut text = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || matches!(ch, ',' | '{' | '}' | '\'' | '"') {
                        break;
                    }
                    text.push(ch);
                    chars.next();
                }
                tokens.push(Token::Word {
                    text,
                    quoted: false,
                });
            }
        }
    }
    Ok(tokens)
}

fn parse_value(
    tokens: &[Token],
    kind: &AttributeKind,
    line_no: usize,
    column: usize,
) -> Result<ArffValue, ArffError> {
    let err = |message: String| ArffError::Parse {
        line: line_no,
        message: format!("column {column}: {message}"),
    };
    let (text, quoted) = match tokens {
        [Token::Word { text, quoted }] => (text.as_str(), *quoted),
        [] => return Err(err("empty value".into())),
        _ => return Err(err("unexpected tokens in value".into())),
    };
    if !quoted && text == "?" {
        return Ok(ArffValue::Missing);
    }
    Ok(match kind {
        AttributeKind::Numeric => {
            let x: f64 = text
                .parse()
                .map_err(|_| err(format!("'{text}' is not a number")))?;
            if !x.is_finite() {
                return Err(err(format!("'{text}' is not finite")));
            }
            ArffValue::Numeric(x)
        }
        AttributeKind::Nominal(domain) => {
            if !domain.iter().any(|v| v == text) {
                return Err(err(format!("'{text}' is not in the nominal domain")));
            }
            ArffValue::Nominal(text.to_owned())
        }
        AttributeKind::String => ArffValue::String(text.to_owned()),
        AttributeKind::Date(_) => ArffValue::Date(text.to_owned()),
    })
}

fn parse_attribute(rest: &[Token], line_no: usize) -> Result<ArffAttribute, ArffError> {
    let err = |message: String| ArffError::Parse {
        line: line_no,
        message,
    };
    let Some(Token::Word { text: name, .. }) = rest.first() else {
        return Err(err("attribute name expected".into()));
    };
    let kind = match &rest[1..] {
        [Token::Open, inner @ .., Token::Close] => {
            let mut domain = Vec::new();
            for group in inner.split(|t| *t == Token::Comma) {
                match group {
                    [Token::Word { text, .. }] => domain.push(text.clone()),
                    _ => return Err(err("malformed nominal domain".into())),
                }
            }
            AttributeKind::Nominal(domain)
        }
        [Token::Word { text, quoted: false }] => match text.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttributeKind::Numeric,
            "string" => AttributeKind::String,
            "date" => AttributeKind::Date("yyyy-MM-dd'T'HH:mm:ss".into()),
            other => return Err(err(format!("unknown attribute kind '{other}'"))),
        },
        [Token::Word { text, quoted: false }, Token::Word { text: fmt, .. }]
            if text.eq_ignore_ascii_case("date") =>
        {
            AttributeKind::Date(fmt.clone())
        }
        _ => return Err(err(format!("unknown attribute kind for '{name}'"))),
    };
    Ok(ArffAttribute {
        name: name.clone(),
        kind,
    })
}

/// Reads the subset written by [`emit_arff`].
pub fn parse_arff(text: &str) -> Result<ArffDataset, ArffError> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<ArffAttribute> = Vec::new();
    let mut rows = Vec::new();
    let mut in_data = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let err = |message: String| ArffError::Parse {
            line: line_no,
            message,
        };
        let tokens = lex(line, line_no)?;
        if in_data {
            let groups: Vec<&[Token]> = tokens.split(|t| *t == Token::Comma).collect();
            if groups.len() != attributes.len() {
                return Err(err(format!(
                    "row has {} values for {} attributes",
                    groups.len(),
                    attributes.len()
                )));
            }
            let row = groups
                .iter()
                .zip(&attributes)
                .enumerate()
                .map(|(c, (g, a))| parse_value(g, &a.kind, line_no, c))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
            continue;
        }
        let Some(Token::Word {
            text: keyword,
            quoted: false,
        }) = tokens.first()
        else {
            return Err(err("expected a header declaration".into()));
        };
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => match &tokens[1..] {
                [Token::Word { text, .. }] => relation = Some(text.clone()),
                _ => return Err(err("malformed @relation".into())),
            },
            "@attribute" => attributes.push(parse_attribute(&tokens[1..], line_no)?),
            "@data" if tokens.len() == 1 => in_data = true,
            other => return Err(err(format!("unexpected '{other}'"))),
        }
    }

    let relation = relation.ok_or_else(|| ArffError::Invalid("missing @relation".into()))?;
    if !in_data {
        return Err(ArffError::Invalid("missing @data".into()));
    }
    let ds = ArffDataset {
        relation,
        attributes,
        rows,
    };
    ds.validate()?;
    Ok(ds)
}

fn nominal_of<T: Copy>(name: &str, all: &[T], label: fn(T) -> &'static str) -> ArffAttribute {
    ArffAttribute::nominal(name, all.iter().map(|&v| label(v)))
}

/// The fixed nine-attribute schema for binned profiles.
pub fn profile_schema() -> Vec<ArffAttribute> {
    vec![
        nominal_of("age_range", AgeRange::ALL, AgeRange::as_str),
        nominal_of("gender", &Gender::ALL, Gender::as_str),
        nominal_of("about_me_class", &ClassLabel::ALL, ClassLabel::as_str),
        ArffAttribute::new("wall_count", AttributeKind::Numeric),
        nominal_of("wall_count_class", WallCountClass::ALL, WallCountClass::as_str),
        ArffAttribute::new("music_count", AttributeKind::Numeric),
        nominal_of("music_share_class", ShareClass::ALL, ShareClass::as_str),
        ArffAttribute::new("activity_interest_count", AttributeKind::Numeric),
        nominal_of("activity_interest_class", ShareClass::ALL, ShareClass::as_str),
    ]
}

pub fn build_dataset(profiles: &[BinnedProfile]) -> ArffDataset {
    let nominal = |s: &str| ArffValue::Nominal(s.to_owned());
    let rows = profiles
        .iter()
        .map(|p| {
            vec![
                nominal(p.age_range.as_str()),
                nominal(p.profile.gender.as_str()),
                nominal(p.about_me_class.as_str()),
                ArffValue::Numeric(p.profile.wall_count.into()),
                nominal(p.wall_count_class.as_str()),
                ArffValue::Numeric(p.profile.music_count.into()),
                nominal(p.music_share_class.as_str()),
                ArffValue::Numeric(p.profile.activity_interest_count.into()),
                nominal(p.activity_interest_class.as_str()),
            ]
        })
        .collect();
    ArffDataset {
        relation: RELATION.to_owned(),
        attributes: profile_schema(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ArffDataset {
        ArffDataset {
            relation: "t".into(),
            attributes: vec![
                ArffAttribute::new("n", AttributeKind::Numeric),
                ArffAttribute::nominal("c", ["Eager_to_Learn", "Lazy"]),
            ],
            rows: vec![],
        }
    }

    #[test]
    fn header_only() {
        let text = emit_arff(&small()).unwrap();
        assert!(text.ends_with("@data\n"));
        assert_eq!(parse_arff(&text).unwrap(), small());
    }

    #[test]
    fn missing_and_unquoted_nominal() {
        let mut ds = small();
        ds.rows.push(vec![ArffValue::Missing, ArffValue::Nominal("Eager_to_Learn".into())]);
        let text = emit_arff(&ds).unwrap();
        assert!(text.ends_with("@data\n?,Eager_to_Learn\n"));
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("plain"), "plain");
        assert_eq!(quote("two words"), "'two words'");
        assert_eq!(quote("it's"), "'it\\'s'");
        assert_eq!(quote("a,b"), "'a,b'");
        assert_eq!(quote(""), "''");
        assert_eq!(quote("?"), "'?'");
        assert_eq!(quote("back\\slash"), "'back\\\\slash'");
    }

    #[test]
    fn quoted_question_mark_is_not_missing() {
        let ds = ArffDataset {
            relation: "q".into(),
            attributes: vec![ArffAttribute::new("s", AttributeKind::String)],
            rows: vec![vec![ArffValue::String("?".into())], vec![ArffValue::Missing]],
        };
        assert_eq!(parse_arff(&emit_arff(&ds).unwrap()).unwrap(), ds);
    }

    #[test]
    fn encode_errors() {
        let mut ds = small();
        ds.rows.push(vec![ArffValue::Numeric(1.0), ArffValue::Nominal("Busy".into())]);
        assert!(matches!(
            emit_arff(&ds),
            Err(ArffError::Encode { row: 0, column: 1, .. })
        ));
        let mut ds = small();
        ds.rows.push(vec![ArffValue::Numeric(1.0)]);
        assert!(matches!(emit_arff(&ds), Err(ArffError::Encode { row: 0, .. })));
        let mut ds = small();
        ds.rows.push(vec![ArffValue::Numeric(f64::NAN), ArffValue::Missing]);
        assert!(emit_arff(&ds).is_err());
        let mut ds = small();
        ds.relation.clear();
        assert!(matches!(emit_arff(&ds), Err(ArffError::Invalid(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let arity = "@relation r\n@attribute a numeric\n@attribute b numeric\n@data\n1,2\n3\n";
        assert!(matches!(parse_arff(arity), Err(ArffError::Parse { line: 6, .. })));
        let domain = "@relation r\n@attribute a {x,y}\n@data\nz\n";
        assert!(matches!(parse_arff(domain), Err(ArffError::Parse { line: 4, .. })));
        let kind = "@relation r\n@attribute a relational\n@data\n";
        assert!(matches!(parse_arff(kind), Err(ArffError::Parse { line: 2, .. })));
    }

    #[test]
    fn parser_accepts_comments_and_case() {
        let text = "% comment\n@RELATION r\n\n@ATTRIBUTE a REAL\n@attribute d date \"yyyy-MM-dd\"\n@DATA\n% row comment\n1.5,2012-01-01\n";
        let ds = parse_arff(text).unwrap();
        assert_eq!(ds.attributes[0].kind, AttributeKind::Numeric);
        assert_eq!(ds.attributes[1].kind, AttributeKind::Date("yyyy-MM-dd".into()));
        assert_eq!(
            ds.rows,
            vec![vec![ArffValue::Numeric(1.5), ArffValue::Date("2012-01-01".into())]]
        );
    }

    #[test]
    fn empty_profile_list_gives_header_only_schema() {
        let ds = build_dataset(&[]);
        assert_eq!(ds.attributes.len(), 9);
        assert!(ds.rows.is_empty());
        assert_eq!(ds.relation, "social_profiles");
    }
}
