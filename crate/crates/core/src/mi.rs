//! Maintainability Index at method, class, package and system scope.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{cyclomatic_complexity, halstead_volume, MetricMatrix, MetricVector};
use crate::model::MethodNode;

/// Threshold below which a normalized index counts as poor.
pub const POOR_THRESHOLD: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiResult {
    pub ave_v: f64,
    pub ave_g: f64,
    pub ave_stat: f64,
    pub raw: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MiVariant {
    /// Average statements per method.
    #[default]
    Statements,
    /// Average physical lines per method in place of statements.
    Lines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    System,
    Package(String),
    Class(String),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::System => f.write_str("system"),
            Scope::Package(p) if p.is_empty() => f.write_str("package:(default)"),
            Scope::Package(p) => write!(f, "package:{p}"),
            Scope::Class(c) => write!(f, "class:{c}"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MiError {
    #[error("MI argument `{name}` must be non-negative, got {value}")]
    NegativeArgument { name: &'static str, value: f64 },
    #[error("{0} contains no methods with a body; MI not applicable")]
    NotApplicable(String),
    #[error("unknown scope {0}")]
    UnknownScope(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MiClass {
    Poor,
    Ok,
}

impl fmt::Display for MiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MiClass::Poor => "poor",
            MiClass::Ok => "ok",
        })
    }
}

fn guarded_ln(x: f64) -> f64 {
    x.max(1.0).ln()
}

pub fn mi_from_averages(ave_v: f64, ave_g: f64, ave_stat: f64) -> Result<MiResult, MiError> {
    for (name, value) in [("ave_v", ave_v), ("ave_g", ave_g), ("ave_stat", ave_stat)] {
        if value.is_nan() || value < 0.0 {
            return Err(MiError::NegativeArgument { name, value });
        }
    }
    let raw = 171.0 - 5.2 * guarded_ln(ave_v) - 0.23 * ave_g - 16.2 * guarded_ln(ave_stat);
    Ok(MiResult {
        ave_v,
        ave_g,
        ave_stat,
        raw,
        normalized: raw.clamp(0.0, 100.0),
    })
}

pub fn mi_classify(result: &MiResult) -> MiClass {
    if result.normalized < POOR_THRESHOLD {
        MiClass::Poor
    } else {
        MiClass::Ok
    }
}

/// Index of a single method, or `None` for a method without a body.
pub fn mi_for_method(method: &MethodNode, variant: MiVariant) -> Option<MiResult> {
    if !method.has_body {
        return None;
    }
    let size = match variant {
        MiVariant::Statements => method.statements,
        MiVariant::Lines => method.line_count,
    };
    mi_from_averages(
        halstead_volume(method),
        f64::from(cyclomatic_complexity(method)),
        f64::from(size),
    )
    .ok()
}

/// Package part of a class qualified name (`p.q.A$B` gives `p.q`).
pub fn package_of_class(qualified_name: &str) -> &str {
    let top = qualified_name.split('$').next().unwrap_or(qualified_name);
    top.rfind('.').map_or("", |i| &top[..i])
}

fn in_scope(scope: &Scope, class: &str) -> bool {
    match scope {
        Scope::System => true,
        Scope::Package(p) => package_of_class(class) == p,
        Scope::Class(c) => class == c,
    }
}

/// Index from per-method means over every bodied method of the given rows.
pub fn mi_for_rows<'a>(
    rows: impl IntoIterator<Item = &'a MetricVector>,
    variant: MiVariant,
    label: &str,
) -> Result<MiResult, MiError> {
    let (mut v, mut decisions, mut size, mut count) = (0.0, 0u64, 0u64, 0u64);
    for row in rows {
        v += row.halstead_volume_total;
        decisions += u64::from(row.decision_points_total);
        size += u64::from(match variant {
            MiVariant::Statements => row.statements_total,
            MiVariant::Lines => row.method_lines_total,
        });
        count += u64::from(row.method_count);
    }
    if count == 0 {
        return Err(MiError::NotApplicable(label.to_string()));
    }
    let n = count as f64;
    // cyclomatic complexity of each method is 1 + its decision points
    mi_from_averages(v / n, (decisions + count) as f64 / n, size as f64 / n)
}

pub fn mi_for_scope(scope: &Scope, matrix: &MetricMatrix, variant: MiVariant) -> Result<MiResult, MiError> {
    let rows: Vec<&MetricVector> = matrix
        .rows
        .iter()
        .filter(|(name, _)| in_scope(scope, name))
        .map(|(_, row)| row)
        .collect();
    if rows.is_empty() && *scope != Scope::System {
        return Err(MiError::UnknownScope(scope.to_string()));
    }
    mi_for_rows(rows, variant, &scope.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn row(triples: &[(f64, u32, u32)]) -> MetricVector {
        MetricVector {
            halstead_volume_total: triples.iter().map(|t| t.0).sum(),
            decision_points_total: triples.iter().map(|t| t.1).sum(),
            statements_total: triples.iter().map(|t| t.2).sum(),
            method_count: triples.len() as u32,
            ..MetricVector::default()
        }
    }

    fn matrix(rows: Vec<(&str, MetricVector)>) -> MetricMatrix {
        MetricMatrix {
            rows: rows.into_iter().map(|(n, r)| (n.to_string(), r)).collect(),
        }
    }

    #[test]
    fn formula_examples() {
        let r = mi_from_averages(1.0, 0.0, 1.0).unwrap();
        assert_eq!((r.raw, r.normalized), (171.0, 100.0));
        let r = mi_from_averages(E, 10.0, E).unwrap();
        assert!((r.raw - 147.3).abs() < 1e-9);
        let oracle = 171.0 - 5.2 * 100f64.ln() - 0.23 * 5.0 - 16.2 * 20f64.ln();
        let r = mi_from_averages(100.0, 5.0, 20.0).unwrap();
        assert!((r.raw - oracle).abs() < 1e-12);
        assert!((r.raw - 97.3723).abs() < 1e-4);
    }

    #[test]
    fn guards_and_errors() {
        assert_eq!(mi_from_averages(0.0, 0.0, 0.0).unwrap().raw, 171.0);
        assert!(matches!(
            mi_from_averages(-1.0, 0.0, 1.0),
            Err(MiError::NegativeArgument { name: "ave_v", .. })
        ));
        assert!(mi_from_averages(1.0, f64::NAN, 1.0).is_err());
        let r = mi_from_averages(1e9, 500.0, 1e6).unwrap();
        assert_eq!(r.normalized, 0.0);
    }

    #[test]
    fn classification_boundary() {
        let at = |normalized| MiResult {
            ave_v: 0.0,
            ave_g: 0.0,
            ave_stat: 0.0,
            raw: normalized,
            normalized,
        };
        assert_eq!(mi_classify(&at(19.9)), MiClass::Poor);
        assert_eq!(mi_classify(&at(20.0)), MiClass::Ok);
        assert_eq!(mi_classify(&at(100.0)), MiClass::Ok);
    }

    #[test]
    fn scopes() {
        let m = matrix(vec![
            ("a.A", row(&[(100.0, 4, 20)])),
            ("a.A$In", row(&[(10.0, 0, 2)])),
            ("b.B", row(&[])),
            ("C", row(&[(30.0, 1, 5)])),
        ]);
        let single = mi_for_scope(&Scope::Class("a.A".into()), &m, MiVariant::Statements).unwrap();
        assert_eq!(single, mi_from_averages(100.0, 5.0, 20.0).unwrap());
        let pkg = mi_for_scope(&Scope::Package("a".into()), &m, MiVariant::Statements).unwrap();
        assert_eq!((pkg.ave_v, pkg.ave_g, pkg.ave_stat), (55.0, 3.0, 11.0));
        let default_pkg = mi_for_scope(&Scope::Package(String::new()), &m, MiVariant::Statements).unwrap();
        assert_eq!(default_pkg.ave_v, 30.0);
        assert!(matches!(
            mi_for_scope(&Scope::Class("b.B".into()), &m, MiVariant::Statements),
            Err(MiError::NotApplicable(_))
        ));
        assert!(matches!(
            mi_for_scope(&Scope::Class("nope".into()), &m, MiVariant::Statements),
            Err(MiError::UnknownScope(_))
        ));
        let sys = mi_for_scope(&Scope::System, &m, MiVariant::Statements).unwrap();
        assert!((sys.ave_v - 140.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_methods_match_one() {
        let one = mi_for_rows([&row(&[(42.0, 2, 7)])], MiVariant::Statements, "x").unwrap();
        let two = mi_for_rows([&row(&[(42.0, 2, 7), (42.0, 2, 7)])], MiVariant::Statements, "x").unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn method_level_and_line_variant() {
        let mut m = MethodNode::new("m");
        m.statements = 3;
        m.line_count = 9;
        let by_stat = mi_for_method(&m, MiVariant::Statements).unwrap();
        let by_lines = mi_for_method(&m, MiVariant::Lines).unwrap();
        assert_eq!((by_stat.ave_stat, by_lines.ave_stat), (3.0, 9.0));
        m.has_body = false;
        assert!(mi_for_method(&m, MiVariant::Statements).is_none());
    }

    #[test]
    fn package_names() {
        assert_eq!(package_of_class("p.q.A$B"), "p.q");
        assert_eq!(package_of_class("A$1"), "");
    }

    proptest! {
        #[test]
        fn normalized_in_range(v in 0.0f64..1e7, g in 0.0f64..1e4, s in 0.0f64..1e5) {
            let r = mi_from_averages(v, g, s).unwrap();
            prop_assert!((0.0..=100.0).contains(&r.normalized));
            prop_assert!(r.raw <= 171.0);
        }

        #[test]
        fn strictly_decreasing(v in 1.0001f64..1e6, g in 0.0f64..1e3, s in 1.0001f64..1e4, d in 0.01f64..100.0) {
            let base = mi_from_averages(v, g, s).unwrap().raw;
            prop_assert!(mi_from_averages(v + d, g, s).unwrap().raw < base);
            prop_assert!(mi_from_averages(v, g + d, s).unwrap().raw < base);
            prop_assert!(mi_from_averages(v, g, s + d).unwrap().raw < base);
        }

        #[test]
        fn depends_only_on_method_multiset(
            triples in proptest::collection::vec((0.0f64..500.0, 0u32..10, 0u32..40), 1..12),
            split in 0usize..12,
        ) {
            let split = split.min(triples.len());
            let together = matrix(vec![("a.X", row(&triples))]);
            let apart = matrix(vec![("a.X", row(&triples[..split])), ("b.Y", row(&triples[split..]))]);
            let x = mi_for_scope(&Scope::System, &together, MiVariant::Statements).unwrap();
            let y = mi_for_scope(&Scope::System, &apart, MiVariant::Statements).unwrap();
            prop_assert!((x.raw - y.raw).abs() < 1e-9);
        }
    }
}
