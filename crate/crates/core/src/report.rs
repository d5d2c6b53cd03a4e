//! CSV and JSON renderings of analysis results.
//!
//! Reals are written with four decimals. Row order follows the sorted order
//! of the underlying maps, so identical inputs give identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::analysis::{ScoreCard, SnapshotAnalysis};
use crate::arisa::ArisaReport;
use crate::evolution::{CorrelationReport, CoverageSet, KeyVersion, VersionSeries, MODELS, SIZE_MEASURES};
use crate::metrics::{MetricMatrix, METRIC_NAMES};
use crate::mi::{mi_classify, mi_for_scope, package_of_class, MiVariant, Scope};
use crate::sqale::{DebtReport, Issue};

pub const NOT_APPLICABLE: &str = "n/a";
const REAL_METRICS: [&str; 4] = ["ld", "tcc", "len", "lod"];

pub const METRICS_HEADER: [&str; 2] = ["class", "package"];
pub const MI_HEADER: [&str; 7] = ["scope", "ave_v", "ave_g", "ave_stat", "raw", "normalized", "class"];
pub const ARISA_HEADER: [&str; 7] = [
    "class",
    "analyzability",
    "changeability",
    "stability",
    "testability",
    "maintainability",
    "flags",
];
pub const ISSUE_HEADER: [&str; 11] = [
    "rule_id",
    "type",
    "severity",
    "tags",
    "file",
    "package",
    "class",
    "method",
    "line",
    "measure",
    "remediation_minutes",
];
pub const SCORECARD_HEADER: [&str; 12] = [
    "class",
    "package",
    "loc",
    "mi_raw",
    "mi_normalized",
    "mi_class",
    "arisa",
    "arisa_flags",
    "issues",
    "td_minutes",
    "tdr",
    "grade",
];
pub const SERIES_HEADER: [&str; 14] = [
    "version",
    "status",
    "packages",
    "classes",
    "methods",
    "statements",
    "lines",
    "production_loc",
    "mi_raw",
    "mi_normalized",
    "mi_class",
    "arisa",
    "td_minutes",
    "tdr",
];
pub const COVERAGE_HEADER: [&str; 3] = ["package", "minutes", "cumulative_fraction"];
pub const KEY_VERSION_HEADER: [&str; 4] = ["version", "previous", "delta_tdr", "delta_mi"];

/// Fixed four-decimal rendering; negative zero prints as zero.
pub fn fmt4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn opt4(x: Option<f64>) -> String {
    x.map_or_else(|| NOT_APPLICABLE.to_string(), fmt4)
}

/// Grade with TDR as a percentage, e.g. `B (5.00%)`.
pub fn grade_line(debt: &DebtReport) -> String {
    format!("{} ({:.2}%)", debt.grade, debt.tdr * 100.0)
}

struct Table(csv::Writer<Vec<u8>>);

impl Table {
    fn new(header: &[&str]) -> Self {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(header).expect("writing to memory");
        Table(w)
    }

    fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.0.write_record(cells).expect("writing to memory");
    }

    fn finish(self) -> String {
        let bytes = self.0.into_inner().expect("flushing to memory");
        String::from_utf8(bytes).expect("csv output is utf-8")
    }
}

pub fn metrics_csv(matrix: &MetricMatrix) -> String {
    let header: Vec<&str> = METRICS_HEADER.iter().chain(&METRIC_NAMES).copied().collect();
    let mut t = Table::new(&header);
    for (class, row) in &matrix.rows {
        let mut cells = vec![class.clone(), package_of_class(class).to_string()];
        for name in METRIC_NAMES {
            let v = row.get(name).unwrap_or_default();
            cells.push(if REAL_METRICS.contains(&name) {
                fmt4(v)
            } else {
                format!("{v}")
            });
        }
        t.row(cells);
    }
    t.finish()
}

/// Index rows for the system, every package and every class.
pub fn mi_csv(matrix: &MetricMatrix, variant: MiVariant) -> String {
    let mut scopes = vec![Scope::System];
    let packages: std::collections::BTreeSet<&str> = matrix.rows.keys().map(|c| package_of_class(c)).collect();
    scopes.extend(packages.into_iter().map(|p| Scope::Package(p.to_string())));
    scopes.extend(matrix.rows.keys().map(|c| Scope::Class(c.clone())));
    let mut t = Table::new(&MI_HEADER);
    for scope in scopes {
        let label = scope.to_string();
        match mi_for_scope(&scope, matrix, variant) {
            Ok(r) => t.row([
                label,
                fmt4(r.ave_v),
                fmt4(r.ave_g),
                fmt4(r.ave_stat),
                fmt4(r.raw),
                fmt4(r.normalized),
                mi_classify(&r).to_string(),
            ]),
            Err(_) => t.row([label.as_str(), "", "", "", "", "", NOT_APPLICABLE]),
        }
    }
    t.finish()
}

pub fn arisa_csv(report: &ArisaReport) -> String {
    let mut t = Table::new(&ARISA_HEADER);
    for (class, c) in &report.classes {
        let mut cells = vec![class.clone()];
        cells.extend(c.score.criteria().map(fmt4));
        cells.push(fmt4(c.score.maintainability));
        cells.push(c.flags.join(";"));
        t.row(cells);
    }
    t.finish()
}

pub fn issues_csv(issues: &[Issue]) -> String {
    let mut t = Table::new(&ISSUE_HEADER);
    for i in issues {
        t.row([
            i.rule_id.clone(),
            i.rule_type.to_string(),
            i.severity.to_string(),
            i.tags.join(";"),
            i.file.clone(),
            i.package.clone(),
            i.class.clone(),
            i.method.clone().unwrap_or_default(),
            i.line.to_string(),
            fmt4(i.measure),
            fmt4(i.remediation_minutes),
        ]);
    }
    t.finish()
}

pub fn scorecards_csv(cards: &[ScoreCard]) -> String {
    let mut t = Table::new(&SCORECARD_HEADER);
    for c in cards {
        t.row([
            c.class.clone(),
            c.package.clone(),
            c.loc.to_string(),
            opt4(c.mi.map(|m| m.raw)),
            opt4(c.mi.map(|m| m.normalized)),
            c.mi_class.map_or_else(|| NOT_APPLICABLE.to_string(), |m| m.to_string()),
            fmt4(c.arisa),
            c.arisa_flags.join(";"),
            c.issues.to_string(),
            fmt4(c.td_minutes),
            fmt4(c.tdr),
            c.grade.to_string(),
        ]);
    }
    t.finish()
}

fn series_row(label: &str, a: &SnapshotAnalysis) -> Vec<String> {
    let s = a.size;
    vec![
        label.to_string(),
        "ok".to_string(),
        s.n_packages.to_string(),
        s.n_classes.to_string(),
        s.n_methods.to_string(),
        s.n_statements.to_string(),
        s.n_lines.to_string(),
        a.production_loc.to_string(),
        opt4(a.mi.map(|m| m.raw)),
        opt4(a.mi.map(|m| m.normalized)),
        a.mi.map_or_else(|| NOT_APPLICABLE.to_string(), |m| mi_classify(&m).to_string()),
        opt4(a.arisa_system()),
        opt4(a.debt.as_ref().map(|d| d.td_minutes)),
        opt4(a.tdr()),
    ]
}

/// One row per version, failed versions included with their status.
pub fn series_csv(series: &VersionSeries) -> String {
    let mut t = Table::new(&SERIES_HEADER);
    for e in &series.entries {
        match &e.outcome {
            Ok(a) => t.row(series_row(&e.label, a)),
            Err(_) => {
                let mut cells = vec![e.label.clone(), "failed".to_string()];
                cells.resize(SERIES_HEADER.len(), String::new());
                t.row(cells);
            }
        }
    }
    t.finish()
}

pub fn correlation_csv(report: &CorrelationReport) -> String {
    let mut header = vec!["size"];
    header.extend(MODELS);
    let mut t = Table::new(&header);
    for (size, row) in SIZE_MEASURES.iter().zip(&report.cells) {
        let mut cells = vec![size.to_string()];
        cells.extend(row.iter().map(|c| opt4(*c)));
        t.row(cells);
    }
    t.finish()
}

pub fn cross_model_csv(cells: &[[Option<f64>; 3]; 3]) -> String {
    let mut header = vec!["model"];
    header.extend(MODELS);
    let mut t = Table::new(&header);
    for (model, row) in MODELS.iter().zip(cells) {
        let mut out = vec![model.to_string()];
        out.extend(row.iter().map(|c| opt4(*c)));
        t.row(out);
    }
    t.finish()
}

pub fn key_versions_csv(keys: &[KeyVersion]) -> String {
    let mut t = Table::new(&KEY_VERSION_HEADER);
    for k in keys {
        t.row([k.label.clone(), k.previous.clone(), opt4(k.delta_tdr), opt4(k.delta_mi)]);
    }
    t.finish()
}

pub fn coverage_csv(set: &CoverageSet) -> String {
    let mut t = Table::new(&COVERAGE_HEADER);
    for e in &set.packages {
        t.row([e.package.clone(), fmt4(e.minutes), fmt4(e.cumulative_fraction)]);
    }
    t.finish()
}

pub const CORRELATION_LEGEND: &str =
    "rho is raw Spearman; higher MI means more maintainable, higher ARiSA and SQALE TDR mean less maintainable";

fn round_reals(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            let rounded = (x * 1e4).round() / 1e4;
            serde_json::Number::from_f64(if rounded == 0.0 { 0.0 } else { rounded }).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_reals).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_reals(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with reals rounded to four decimals and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let value = round_reals(serde_json::to_value(value).expect("report types serialize"));
    let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
    text.push('\n');
    text
}

/// Whole single-snapshot analysis as one JSON document.
pub fn analysis_json(a: &SnapshotAnalysis, models: &[&str]) -> String {
    let mut doc = BTreeMap::new();
    doc.insert("label", serde_json::json!(a.label));
    doc.insert("size", serde_json::to_value(a.size).expect("size serializes"));
    for model in models {
        let v = match *model {
            "mi" => serde_json::to_value(a.mi),
            "arisa" => serde_json::to_value(&a.arisa),
            "sqale" => serde_json::to_value(&a.debt),
            _ => continue,
        };
        doc.insert(model, v.expect("report types serialize"));
    }
    if models.len() == MODELS.len() {
        doc.insert(
            "scorecards",
            serde_json::to_value(&a.scorecards).expect("scorecards serialize"),
        );
    }
    to_json(&doc)
}

/// Keeps file names portable for arbitrary version labels.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze_snapshot, AnalysisOptions};
    use crate::model::{ClassKind, ClassNode, MethodNode, PackageNode, Snapshot};

    fn sample() -> SnapshotAnalysis {
        let mut a = ClassNode::new("p.A", ClassKind::Class);
        a.line_count = 12;
        let mut m = MethodNode::new("run");
        m.statements = 4;
        m.decision_points = 12;
        a.methods.push(m);
        let b = ClassNode::new("p.B", ClassKind::Class);
        let snap = Snapshot::new(
            "v1",
            "",
            vec![PackageNode {
                qualified_name: "p".into(),
                classes: vec![a, b],
            }],
        )
        .unwrap();
        analyze_snapshot(&snap, &AnalysisOptions::default())
    }

    #[test]
    fn fixed_precision() {
        assert_eq!(fmt4(1.0), "1.0000");
        assert_eq!(fmt4(-0.00001), "0.0000");
        assert_eq!(fmt4(2.0 / 3.0), "0.6667");
    }

    #[test]
    fn empty_issue_table_has_header() {
        assert_eq!(issues_csv(&[]), format!("{}\n", ISSUE_HEADER.join(",")));
    }

    #[test]
    fn metric_table_shape() {
        let a = sample();
        let text = metrics_csv(&a.matrix);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("class,package,cbo,dac,"));
        assert_eq!(lines[0].split(',').count(), 19);
        assert!(lines[1].starts_with("p.A,p,"));
    }

    #[test]
    fn mi_rows_cover_scopes() {
        let text = mi_csv(&sample().matrix, MiVariant::Statements);
        let scopes: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(scopes, ["system", "package:p", "class:p.A", "class:p.B"]);
        assert!(text.lines().last().unwrap().ends_with(",n/a"));
    }

    #[test]
    fn grade_text() {
        let a = sample();
        let debt = a.debt.as_ref().unwrap();
        assert_eq!(debt.td_minutes, 13.0);
        assert_eq!(grade_line(debt), "A (3.33%)");
    }

    #[test]
    fn json_is_rounded_and_stable() {
        let a = sample();
        let once = analysis_json(&a, &MODELS);
        assert_eq!(once, analysis_json(&a, &MODELS));
        assert!(once.ends_with("}\n"));
        let v: Value = serde_json::from_str(&once).unwrap();
        let tdr = v["sqale"]["tdr"].as_f64().unwrap();
        assert_eq!(tdr, 0.0333);
        assert_eq!(to_json(&(1.0f64 / 3.0)), "0.3333\n");
    }

    #[test]
    fn labels_become_safe_file_names() {
        assert_eq!(file_stem("0.8.0 beta/2"), "0.8.0_beta_2");
    }
}
