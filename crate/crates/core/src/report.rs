//! Aggregate distributions by age range and gender, rendered as CSV tables
//! and static SVG charts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binning::{AgeRange, ShareClass, WallCountClass};
use crate::ingest::Gender;
use crate::knn::ClassLabel;
use crate::record::BinnedProfile;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("chart error: {0}")]
    Chart(String),
    #[error("cannot compare distributions: {0}")]
    BucketMismatch(String),
    #[error("cannot write {path}: {message}")]
    Io { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    AgeRange,
    Gender,
}

impl GroupBy {
    pub const ALL: [GroupBy; 2] = [GroupBy::AgeRange, GroupBy::Gender];

    pub fn name(self) -> &'static str {
        match self {
            GroupBy::AgeRange => "age_range",
            GroupBy::Gender => "gender",
        }
    }

    pub fn groups(self) -> Vec<&'static str> {
        match self {
            GroupBy::AgeRange => AgeRange::ALL.iter().map(|a| a.as_str()).collect(),
            GroupBy::Gender => Gender::ALL.iter().map(|g| g.as_str()).collect(),
        }
    }

    fn key(self, p: &BinnedProfile) -> &'static str {
        match self {
            GroupBy::AgeRange => p.age_range.as_str(),
            GroupBy::Gender => p.profile.gender.as_str(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    AboutMeClass,
    WallCountClass,
    MusicShareClass,
    ActivityInterestClass,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::AboutMeClass,
        Measure::WallCountClass,
        Measure::MusicShareClass,
        Measure::ActivityInterestClass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::AboutMeClass => "about_me_class",
            Measure::WallCountClass => "wall_count_class",
            Measure::MusicShareClass => "music_share_class",
            Measure::ActivityInterestClass => "activity_interest_class",
        }
    }

    pub fn buckets(self) -> Vec<&'static str> {
        match self {
            Measure::AboutMeClass => ClassLabel::ALL.iter().map(|l| l.as_str()).collect(),
            Measure::WallCountClass => WallCountClass::ALL.iter().map(|c| c.as_str()).collect(),
            Measure::MusicShareClass | Measure::ActivityInterestClass => {
                ShareClass::ALL.iter().map(|c| c.as_str()).collect()
            }
        }
    }

    fn key(self, p: &BinnedProfile) -> &'static str {
        match self {
            Measure::AboutMeClass => p.about_me_class.as_str(),
            Measure::WallCountClass => p.wall_count_class.as_str(),
            Measure::MusicShareClass => p.music_share_class.as_str(),
            Measure::ActivityInterestClass => p.activity_interest_class.as_str(),
        }
    }
}

/// Counts per bucket for one population.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    pub dimension: String,
    pub population: String,
    pub buckets: Vec<(String, u64)>,
}

impl Distribution {
    pub fn total(&self) -> u64 {
        self.buckets.iter().map(|b| b.1).sum()
    }

    pub fn count(&self, bucket: &str) -> Option<u64> {
        self.buckets.iter().find(|b| b.0 == bucket).map(|b| b.1)
    }
}

/// One distribution per group value, including empty groups, with buckets
/// in enumeration order.
pub fn aggregate(profiles: &[BinnedProfile], group_by: GroupBy, measure: Measure) -> Vec<Distribution> {
    let buckets = measure.buckets();
    group_by
        .groups()
        .into_iter()
        .map(|group| {
            let mut counts = vec![0u64; buckets.len()];
            for p in profiles.iter().filter(|p| group_by.key(p) == group) {
                let key = measure.key(p);
                if let Some(i) = buckets.iter().position(|b| *b == key) {
                    counts[i] += 1;
                }
            }
            Distribution {
                dimension: measure.name().to_owned(),
                population: format!("{}={group}", group_by.name()),
                buckets: buckets
                    .iter()
                    .zip(counts)
                    .map(|(b, c)| ((*b).to_owned(), c))
                    .collect(),
            }
        })
        .collect()
}

/// Two populations over the same buckets, side by side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub left_name: String,
    pub right_name: String,
    pub left: Distribution,
    pub right: Distribution,
}

impl Comparison {
    /// `(bucket, left count, right count)` in bucket order.
    pub fn rows(&self) -> impl Iterator<Item = (&str, u64, u64)> {
        self.left
            .buckets
            .iter()
            .zip(&self.right.buckets)
            .map(|(l, r)| (l.0.as_str(), l.1, r.1))
    }
}

pub fn compare(
    left_name: &str,
    left: &Distribution,
    right_name: &str,
    right: &Distribution,
) -> Result<Comparison, ReportError> {
    if left.dimension != right.dimension {
        return Err(ReportError::BucketMismatch(format!(
            "measures differ: {} vs {}",
            left.dimension, right.dimension
        )));
    }
    let names = |d: &Distribution| d.buckets.iter().map(|b| b.0.clone()).collect::<Vec<_>>();
    if names(left) != names(right) {
        return Err(ReportError::BucketMismatch("bucket sets differ".into()));
    }
    Ok(Comparison {
        left_name: left_name.to_owned(),
        right_name: right_name.to_owned(),
        left: left.clone(),
        right: right.clone(),
    })
}

fn percent(count: u64, total: u64) -> String {
    if total == 0 {
        "0.00".to_owned()
    } else {
        format!("{:.2}", count as f64 * 100.0 / total as f64)
    }
}

/// `bucket,count,percent` rows.
pub fn emit_table(d: &Distribution) -> String {
    let total = d.total();
    let mut out = String::from("bucket,count,percent\n");
    for (bucket, count) in &d.buckets {
        let _ = writeln!(out, "{bucket},{count},{}", percent(*count, total));
    }
    out
}

/// `bucket,<left>,<right>` rows of raw counts.
pub fn emit_comparison_table(c: &Comparison) -> String {
    let mut out = format!("bucket,{},{}\n", c.left_name, c.right_name);
    for (bucket, l, r) in c.rows() {
        let _ = writeln!(out, "{bucket},{l},{r}");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Pie,
    Line,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PieSlice {
    pub bucket: String,
    pub count: u64,
    /// Degrees clockwise from twelve o'clock.
    pub start_deg: f64,
    pub sweep_deg: f64,
}

/// Slice angles proportional to counts; fails when every count is zero.
pub fn pie_slices(d: &Distribution) -> Result<Vec<PieSlice>, ReportError> {
    let total = d.total();
    if total == 0 {
        return Err(ReportError::Chart(format!(
            "pie chart of {} for {} has no data",
            d.dimension, d.population
        )));
    }
    let mut start = 0.0;
    Ok(d.buckets
        .iter()
        .map(|(bucket, count)| {
            let sweep = 360.0 * *count as f64 / total as f64;
            let slice = PieSlice {
                bucket: bucket.clone(),
                count: *count,
                start_deg: start,
                sweep_deg: sweep,
            };
            start += sweep;
            slice
        })
        .collect())
}

const PALETTE: [&str; 11] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac", "#6b6b6b",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg_open(title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        WIDTH / 2.0,
        xml_escape(title)
    );
    out
}

fn point_on_circle(cx: f64, cy: f64, r: f64, deg: f64) -> (f64, f64) {
    let rad = (deg - 90.0).to_radians();
    (cx + r * rad.cos(), cy + r * rad.sin())
}

fn pie_svg(d: &Distribution) -> Result<String, ReportError> {
    let slices = pie_slices(d)?;
    let total = d.total();
    let (cx, cy, r) = (230.0, 235.0, 170.0);
    let mut out = svg_open(&format!("{} ({})", d.dimension, d.population));
    for (i, s) in slices.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.count == 0 {
            continue;
        }
        if s.count == total {
            let _ = writeln!(
                out,
                "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{r:.2}\" fill=\"{color}\" stroke=\"white\"/>"
            );
            continue;
        }
        let (x0, y0) = point_on_circle(cx, cy, r, s.start_deg);
        let (x1, y1) = point_on_circle(cx, cy, r, s.start_deg + s.sweep_deg);
        let large = u8::from(s.sweep_deg > 180.0);
        let _ = writeln!(
            out,
            "<path d=\"M {cx:.2} {cy:.2} L {x0:.2} {y0:.2} A {r:.2} {r:.2} 0 {large} 1 {x1:.2} {y1:.2} Z\" fill=\"{color}\" stroke=\"white\"/>"
        );
    }
    for (i, s) in slices.iter().enumerate() {
        let y = 70.0 + 24.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            "<rect x=\"460\" y=\"{:.2}\" width=\"14\" height=\"14\" fill=\"{color}\"/>",
            y - 11.0
        );
        let _ = writeln!(
            out,
            "<text x=\"482\" y=\"{y:.2}\">{}: {} ({}%)</text>",
            xml_escape(&s.bucket),
            s.count,
            percent(s.count, total)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

struct Series<'a> {
    name: &'a str,
    counts: Vec<u64>,
}

fn line_svg(title: &str, buckets: &[&str], series: &[Series<'_>]) -> String {
    let (left, right, top, bottom) = (60.0, WIDTH - 30.0, 50.0, HEIGHT - 110.0);
    let max = series
        .iter()
        .flat_map(|s| s.counts.iter().copied())
        .max()
        .unwrap_or(0)
        .max(1);
    let step = if buckets.len() > 1 {
        (right - left) / (buckets.len() - 1) as f64
    } else {
        0.0
    };
    let x_at = |i: usize| {
        if buckets.len() > 1 {
            left + step * i as f64
        } else {
            (left + right) / 2.0
        }
    };
    let y_at = |c: u64| bottom - (bottom - top) * c as f64 / max as f64;

    let mut out = svg_open(title);
    let _ = writeln!(
        out,
        "<line x1=\"{left:.2}\" y1=\"{bottom:.2}\" x2=\"{right:.2}\" y2=\"{bottom:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        out,
        "<line x1=\"{left:.2}\" y1=\"{top:.2}\" x2=\"{left:.2}\" y2=\"{bottom:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{max}</text>",
        left - 6.0,
        top + 4.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">0</text>",
        left - 6.0,
        bottom + 4.0
    );
    for (i, b) in buckets.iter().enumerate() {
        let x = x_at(i);
        let y = bottom + 16.0;
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"end\" transform=\"rotate(-35 {x:.2} {y:.2})\">{}</text>",
            xml_escape(b)
        );
    }
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let points: Vec<String> = s
            .counts
            .iter()
            .enumerate()
            .map(|(i, &c)| format!("{:.2},{:.2}", x_at(i), y_at(c)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
            points.join(" ")
        );
        for (i, &c) in s.counts.iter().enumerate() {
            let (x, y) = (x_at(i), y_at(c));
            let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>");
            let _ = writeln!(
                out,
                "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"{color}\">{}: {c}</text>",
                y - 8.0 - 14.0 * si as f64,
                xml_escape(buckets[i])
            );
        }
        if series.len() > 1 {
            let ly = HEIGHT - 20.0;
            let lx = left + 140.0 * si as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{lx:.2}\" y=\"{:.2}\" width=\"14\" height=\"14\" fill=\"{color}\"/>",
                ly - 11.0
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{ly:.2}\">{}</text>",
                lx + 20.0,
                xml_escape(s.name)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_chart(d: &Distribution, kind: ChartKind) -> Result<String, ReportError> {
    match kind {
        ChartKind::Pie => pie_svg(d),
        ChartKind::Line => {
            let buckets: Vec<&str> = d.buckets.iter().map(|b| b.0.as_str()).collect();
            let series = [Series {
                name: &d.population,
                counts: d.buckets.iter().map(|b| b.1).collect(),
            }];
            Ok(line_svg(
                &format!("{} ({})", d.dimension, d.population),
                &buckets,
                &series,
            ))
        }
    }
}

/// Line chart with one series per side of the comparison.
pub fn emit_comparison_chart(c: &Comparison) -> String {
    let buckets: Vec<&str> = c.left.buckets.iter().map(|b| b.0.as_str()).collect();
    let series = [
        Series {
            name: &c.left_name,
            counts: c.left.buckets.iter().map(|b| b.1).collect(),
        },
        Series {
            name: &c.right_name,
            counts: c.right.buckets.iter().map(|b| b.1).collect(),
        },
    ];
    line_svg(
        &format!("{}: {} vs {}", c.left.dimension, c.left_name, c.right_name),
        &buckets,
        &series,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the report directory.
    pub path: String,
    pub kind: String,
    pub group_by: String,
    pub population: String,
    pub measure: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub run_id: String,
    pub profiles: usize,
    pub artifacts: Vec<ManifestEntry>,
}

fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    let io = |e: std::io::Error| ReportError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

/// Writes `tables/*.csv`, `charts/*.svg` and `manifest.json` under
/// `report_dir`.
///
/// About-me distributions per age range are pies; everything else is a line
/// chart. Male and female are compared for every measure. A pie for an
/// empty population is skipped (its table is still written).
pub fn write_reports(
    profiles: &[BinnedProfile],
    report_dir: &Path,
    run_id: &str,
) -> Result<Manifest, ReportError> {
    let mut manifest = Manifest {
        run_id: run_id.to_owned(),
        profiles: profiles.len(),
        artifacts: Vec::new(),
    };
    let mut emit = |rel: String, contents: &str, kind: &str, group_by: &str, population: &str, measure: &str| {
        write_file(&report_dir.join(&rel), contents)?;
        manifest.artifacts.push(ManifestEntry {
            path: rel,
            kind: kind.to_owned(),
            group_by: group_by.to_owned(),
            population: population.to_owned(),
            measure: measure.to_owned(),
        });
        Ok::<_, ReportError>(())
    };

    for group_by in GroupBy::ALL {
        for measure in Measure::ALL {
            for d in aggregate(profiles, group_by, measure) {
                let stem = format!("{}__{}", d.population.replace('=', "-"), measure.name());
                let g = group_by.name();
                emit(format!("tables/{stem}.csv"), &emit_table(&d), "table", g, &d.population, measure.name())?;
                let pie = group_by == GroupBy::AgeRange && measure == Measure::AboutMeClass;
                if pie && d.total() == 0 {
                    continue;
                }
                let (kind, label) = if pie {
                    (ChartKind::Pie, "pie_chart")
                } else {
                    (ChartKind::Line, "line_chart")
                };
                let svg = emit_chart(&d, kind)?;
                emit(format!("charts/{stem}.svg"), &svg, label, g, &d.population, measure.name())?;
            }
        }
    }

    for measure in Measure::ALL {
        let by_gender = aggregate(profiles, GroupBy::Gender, measure);
        let find = |g: Gender| {
            by_gender
                .iter()
                .find(|d| d.population == format!("gender={}", g.as_str()))
                .cloned()
                .expect("every gender group is aggregated")
        };
        let c = compare("Male", &find(Gender::Male), "Female", &find(Gender::Female))?;
        let stem = format!("gender-Male_vs_Female__{}", measure.name());
        let pop = "gender=Male|gender=Female";
        emit(format!("tables/{stem}.csv"), &emit_comparison_table(&c), "comparison_table", "gender", pop, measure.name())?;
        emit(format!("charts/{stem}.svg"), &emit_comparison_chart(&c), "comparison_line_chart", "gender", pop, measure.name())?;
    }

    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&report_dir.join("manifest.json"), &json)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(buckets: &[(&str, u64)]) -> Distribution {
        Distribution {
            dimension: "m".into(),
            population: "all".into(),
            buckets: buckets.iter().map(|&(b, c)| (b.to_owned(), c)).collect(),
        }
    }

    #[test]
    fn pie_angles() {
        let one = pie_slices(&dist(&[("A", 4)])).unwrap();
        assert_eq!(one[0].sweep_deg, 360.0);
        let two = pie_slices(&dist(&[("A", 2), ("B", 2)])).unwrap();
        assert_eq!((two[0].sweep_deg, two[1].sweep_deg), (180.0, 180.0));
        let s = pie_slices(&dist(&[("A", 1), ("B", 3)])).unwrap();
        assert_eq!((s[0].sweep_deg, s[1].sweep_deg), (90.0, 270.0));
        assert_eq!(s[1].start_deg, 90.0);
        assert!(pie_slices(&dist(&[("A", 0), ("B", 0)])).is_err());
        assert!(emit_chart(&dist(&[("A", 0)]), ChartKind::Pie).is_err());
    }

    #[test]
    fn pie_svg_shapes() {
        let svg = emit_chart(&dist(&[("A", 5), ("B", 0)]), ChartKind::Pie).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("A: 5 (100.00%)"));
        assert!(svg.contains("B: 0 (0.00%)"));
        let svg = emit_chart(&dist(&[("A", 1), ("B", 3)]), ChartKind::Pie).unwrap();
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains(" 0 1 1 "), "270 degree slice uses the large arc flag");
    }

    #[test]
    fn line_svg_labels_every_bucket() {
        let svg = emit_chart(&dist(&[("Low", 2), ("Medium", 0), ("High", 7)]), ChartKind::Line).unwrap();
        for label in ["Low: 2", "Medium: 0", "High: 7"] {
            assert!(svg.contains(label), "{label}");
        }
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn table_shape() {
        let t = emit_table(&dist(&[("A", 1), ("B", 3)]));
        assert_eq!(t, "bucket,count,percent\nA,1,25.00\nB,3,75.00\n");
        let t = emit_table(&dist(&[("A", 0)]));
        assert_eq!(t, "bucket,count,percent\nA,0,0.00\n");
    }

    #[test]
    fn comparisons() {
        let male = dist(&[("Honest", 2), ("Lazy", 0)]);
        let female = dist(&[("Honest", 5), ("Lazy", 1)]);
        let c = compare("Male", &male, "Female", &female).unwrap();
        assert_eq!(c.rows().next(), Some(("Honest", 2, 5)));
        assert_eq!(
            emit_comparison_table(&c),
            "bucket,Male,Female\nHonest,2,5\nLazy,0,1\n"
        );
        let same = compare("x", &male, "x", &male).unwrap();
        assert_eq!(same.left, same.right);
        assert!(compare("a", &male, "b", &dist(&[("Honest", 1)])).is_err());
        let mut other = male.clone();
        other.dimension = "n".into();
        assert!(compare("a", &male, "b", &other).is_err());

        let disjoint = compare("L", &dist(&[("A", 3), ("B", 0)]), "R", &dist(&[("A", 0), ("B", 4)])).unwrap();
        assert_eq!(disjoint.rows().collect::<Vec<_>>(), vec![("A", 3, 0), ("B", 0, 4)]);
    }

    #[test]
    fn empty_aggregate_lists_every_group() {
        let ds = aggregate(&[], GroupBy::AgeRange, Measure::AboutMeClass);
        assert_eq!(ds.len(), 5);
        assert!(ds.iter().all(|d| d.total() == 0 && d.buckets.len() == 11));
        assert_eq!(ds[4].population, "age_range=Hidden");
        let ds = aggregate(&[], GroupBy::Gender, Measure::WallCountClass);
        assert_eq!(ds.len(), 3);
        assert_eq!(ds[0].buckets.len(), 5);
    }
}
