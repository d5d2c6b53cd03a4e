//! Rule engine and technical-debt aggregation.
//!
//! Each rule compares one measure against a threshold. An issue costs
//! `constant_minutes + per_unit_minutes * (measure - threshold)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{cyclomatic_complexity, MetricMatrix};
use crate::mi::package_of_class;
use crate::model::{ClassNode, CommentKind, MethodNode, Snapshot};

/// Minutes needed to develop one line of production code.
pub const MINUTES_PER_LINE: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleType {
    Maintainability,
    Reliability,
    Security,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IssueSeverity {
    Info,
    Minor,
    Major,
    Critical,
    Blocker,
}

macro_rules! lowercase_display {
    ($ty:ty) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let text = serde_json::to_value(self).ok();
                f.write_str(text.as_ref().and_then(|v| v.as_str()).unwrap_or("?"))
            }
        }
    };
}
lowercase_display!(RuleType);
lowercase_display!(IssueSeverity);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule {
    pub id: String,
    pub rule_type: RuleType,
    pub severity: IssueSeverity,
    pub tags: BTreeSet<String>,
    pub enabled: bool,
    pub threshold: f64,
    pub constant_minutes: f64,
    pub per_unit_minutes: f64,
    /// Extra rule-specific parameters.
    pub params: BTreeMap<String, f64>,
}

impl Rule {
    fn new(
        id: &str,
        rule_type: RuleType,
        severity: IssueSeverity,
        tag: &str,
        threshold: f64,
        constant: f64,
        per_unit: f64,
    ) -> Self {
        Rule {
            id: id.to_string(),
            rule_type,
            severity,
            tags: BTreeSet::from([tag.to_string()]),
            enabled: true,
            threshold,
            constant_minutes: constant,
            per_unit_minutes: per_unit,
            params: BTreeMap::new(),
        }
    }

    fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    fn param(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or(0.0)
    }

    /// Minutes to fix one occurrence with the given measure.
    pub fn remediation(&self, measure: f64) -> f64 {
        self.constant_minutes + self.per_unit_minutes * (measure - self.threshold).max(0.0)
    }

    fn fires(&self, measure: f64) -> bool {
        measure > self.threshold
    }
}

pub const RULE_IDS: [&str; 10] = [
    "expression-complexity",
    "method-cyclomatic-complexity",
    "method-length",
    "parameter-count",
    "nesting-depth",
    "class-length",
    "god-class",
    "duplicated-string-literal",
    "empty-catch-block",
    "commented-out-code",
];

pub fn builtin_rules() -> Vec<Rule> {
    use IssueSeverity::{Critical, Major};
    use RuleType::{Maintainability as M, Reliability as R};
    vec![
        Rule::new("expression-complexity", M, Critical, "brain-overload", 3.0, 5.0, 1.0),
        Rule::new(
            "method-cyclomatic-complexity",
            M,
            Critical,
            "brain-overload",
            10.0,
            10.0,
            1.0,
        ),
        Rule::new("method-length", M, Major, "brain-overload", 30.0, 20.0, 0.0),
        Rule::new("parameter-count", M, Major, "brain-overload", 7.0, 15.0, 0.0),
        Rule::new("nesting-depth", M, Critical, "brain-overload", 3.0, 10.0, 0.0),
        Rule::new("class-length", M, Major, "brain-overload", 1000.0, 60.0, 0.0),
        Rule::new("god-class", M, Critical, "design", 47.0, 120.0, 1.0).with_param("max_tcc", 0.33),
        Rule::new("duplicated-string-literal", M, Critical, "design", 2.0, 2.0, 2.0).with_param("min_length", 5.0),
        Rule::new("empty-catch-block", R, Major, "error-handling", 0.0, 5.0, 0.0),
        Rule::new("commented-out-code", M, Major, "unused", 0.0, 5.0, 0.0),
    ]
}

/// Partial rule settings read from configuration; absent fields keep the
/// built-in value.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleOverride {
    pub id: String,
    pub enabled: Option<bool>,
    pub threshold: Option<f64>,
    pub constant_minutes: Option<f64>,
    pub per_unit_minutes: Option<f64>,
    pub severity: Option<IssueSeverity>,
    #[serde(rename = "type")]
    pub rule_type: Option<RuleType>,
    pub tags: Option<BTreeSet<String>>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SqaleError {
    #[error("production LOC is 0; technical debt ratio is undefined")]
    NoProductionCode,
    #[error("unknown rule id `{0}`")]
    UnknownRule(String),
    #[error("rule `{id}`: {field} must be non-negative, got {value}")]
    NegativeMinutes {
        id: String,
        field: &'static str,
        value: f64,
    },
}

pub fn apply_overrides(rules: &mut [Rule], overrides: &[RuleOverride]) -> Result<(), SqaleError> {
    for o in overrides {
        let rule = rules
            .iter_mut()
            .find(|r| r.id == o.id)
            .ok_or_else(|| SqaleError::UnknownRule(o.id.clone()))?;
        if let Some(v) = o.enabled {
            rule.enabled = v;
        }
        if let Some(v) = o.threshold {
            rule.threshold = v;
        }
        if let Some(v) = o.constant_minutes {
            rule.constant_minutes = v;
        }
        if let Some(v) = o.per_unit_minutes {
            rule.per_unit_minutes = v;
        }
        if let Some(v) = o.severity {
            rule.severity = v;
        }
        if let Some(v) = o.rule_type {
            rule.rule_type = v;
        }
        if let Some(v) = &o.tags {
            rule.tags = v.clone();
        }
        rule.params.extend(o.params.iter().map(|(k, v)| (k.clone(), *v)));
        for (field, value) in [
            ("constant_minutes", rule.constant_minutes),
            ("per_unit_minutes", rule.per_unit_minutes),
        ] {
            if value.is_nan() || value < 0.0 {
                return Err(SqaleError::NegativeMinutes {
                    id: rule.id.clone(),
                    field,
                    value,
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub rule_id: String,
    pub rule_type: RuleType,
    pub severity: IssueSeverity,
    pub tags: Vec<String>,
    pub file: String,
    pub package: String,
    pub class: String,
    pub method: Option<String>,
    pub line: u32,
    /// Value of the measured quantity that broke the rule.
    pub measure: f64,
    pub remediation_minutes: f64,
}

struct Emitter<'a> {
    class: &'a ClassNode,
    issues: Vec<Issue>,
}

impl Emitter<'_> {
    fn check(&mut self, rule: &Rule, method: Option<&MethodNode>, line: u32, measure: f64) {
        if !rule.fires(measure) {
            return;
        }
        self.issues.push(Issue {
            rule_id: rule.id.clone(),
            rule_type: rule.rule_type,
            severity: rule.severity,
            tags: rule.tags.iter().cloned().collect(),
            file: self.class.source_file.clone(),
            package: package_of_class(&self.class.qualified_name).to_string(),
            class: self.class.qualified_name.clone(),
            method: method.map(|m| m.name.clone()),
            line,
            measure,
            remediation_minutes: rule.remediation(measure),
        });
    }
}

fn looks_like_code(line: &str) -> bool {
    let line = line.trim().trim_start_matches('*').trim();
    if line.is_empty() {
        return false;
    }
    if line.ends_with(';') || line.ends_with('{') || line.ends_with('}') {
        return true;
    }
    ["if", "for", "while", "switch", "return", "else"].iter().any(|kw| {
        line.strip_prefix(kw)
            .is_some_and(|rest| rest.is_empty() || rest.starts_with([' ', '(', '{']))
    })
}

/// First lines of comment groups that look like disabled code. Consecutive
/// line comments form one group; a block comment is a group on its own.
fn commented_out_code(class: &ClassNode) -> Vec<u32> {
    let mut groups: Vec<(u32, u32, bool)> = Vec::new();
    let mut comments: Vec<_> = class.comments.iter().collect();
    comments.sort_by_key(|c| c.line);
    for c in comments {
        match c.kind {
            CommentKind::Doc => continue,
            CommentKind::Line => {
                let code = looks_like_code(&c.text);
                match groups.last_mut() {
                    Some((_, last, any)) if *last + 1 == c.line && *last != 0 => {
                        *last = c.line;
                        *any |= code;
                    }
                    _ => groups.push((c.line, c.line, code)),
                }
            }
            CommentKind::Block => {
                // line 0 marks the group closed so a following line comment starts afresh
                groups.push((c.line, 0, c.text.lines().any(looks_like_code)));
            }
        }
    }
    groups.into_iter().filter(|g| g.2).map(|g| g.0).collect()
}

fn class_issues(class: &ClassNode, matrix: &MetricMatrix, rules: &[&Rule]) -> Vec<Issue> {
    let mut out = Emitter {
        class,
        issues: Vec::new(),
    };
    let metrics = matrix.get(&class.qualified_name);
    for rule in rules {
        match rule.id.as_str() {
            "expression-complexity" => {
                for m in &class.methods {
                    for e in &m.expressions {
                        out.check(rule, Some(m), e.line, f64::from(e.conditional_operators));
                    }
                }
            }
            "method-cyclomatic-complexity" => {
                for m in class.methods.iter().filter(|m| m.has_body) {
                    out.check(rule, Some(m), m.line, f64::from(cyclomatic_complexity(m)));
                }
            }
            "method-length" => {
                for m in &class.methods {
                    out.check(rule, Some(m), m.line, f64::from(m.statements));
                }
            }
            "parameter-count" => {
                for m in &class.methods {
                    out.check(rule, Some(m), m.line, m.parameter_type_names.len() as f64);
                }
            }
            "nesting-depth" => {
                for m in &class.methods {
                    out.check(rule, Some(m), m.line, f64::from(m.max_nesting_depth));
                }
            }
            "class-length" => out.check(rule, None, class.line, f64::from(class.line_count)),
            "god-class" => {
                if let Some(v) = metrics {
                    if v.tcc < rule.param("max_tcc") {
                        out.check(rule, None, class.line, f64::from(v.wmc));
                    }
                }
            }
            "duplicated-string-literal" => {
                for lit in &class.string_literals {
                    if lit.value.chars().count() as f64 >= rule.param("min_length") {
                        out.check(rule, None, lit.first_line, f64::from(lit.count));
                    }
                }
            }
            "empty-catch-block" => {
                for m in &class.methods {
                    for &line in &m.empty_catch_lines {
                        out.check(rule, Some(m), line, 1.0);
                    }
                }
            }
            "commented-out-code" => {
                for line in commented_out_code(class) {
                    out.check(rule, None, line, 1.0);
                }
            }
            _ => {}
        }
    }
    out.issues
}

/// Evaluates every enabled rule. Issues are ordered by file, line and rule id.
pub fn run_rules(snapshot: &Snapshot, matrix: &MetricMatrix, rules: &[Rule]) -> Vec<Issue> {
    let enabled: Vec<&Rule> = rules.iter().filter(|r| r.enabled).collect();
    let classes: Vec<&ClassNode> = snapshot.classes().collect();
    let mut issues: Vec<Issue> = classes
        .par_iter()
        .flat_map_iter(|c| class_issues(c, matrix, &enabled))
        .collect();
    issues.sort_by(|a, b| {
        (&a.file, a.line, &a.rule_id, &a.class, &a.method)
            .cmp(&(&b.file, b.line, &b.rule_id, &b.class, &b.method))
            .then(a.measure.total_cmp(&b.measure))
    });
    issues
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Grade {
    A,
    B,
    C,
    D,
    E,
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Rating grid: A below 5 %, B below 10 %, C below 20 %, D below 50 %.
pub fn grade_for(tdr: f64) -> Grade {
    if tdr < 0.05 {
        Grade::A
    } else if tdr < 0.10 {
        Grade::B
    } else if tdr < 0.20 {
        Grade::C
    } else if tdr < 0.50 {
        Grade::D
    } else {
        Grade::E
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DebtReport {
    pub issues: Vec<Issue>,
    pub td_minutes: f64,
    pub dev_time_minutes: f64,
    pub tdr: f64,
    pub grade: Grade,
}

pub fn debt_report(issues: Vec<Issue>, production_loc: u64) -> Result<DebtReport, SqaleError> {
    if production_loc == 0 {
        return Err(SqaleError::NoProductionCode);
    }
    // a fold from +0.0, since an empty float sum is -0.0
    let td_minutes = issues.iter().fold(0.0, |acc, i| acc + i.remediation_minutes);
    let dev_time_minutes = MINUTES_PER_LINE * production_loc as f64;
    let tdr = td_minutes / dev_time_minutes;
    Ok(DebtReport {
        issues,
        td_minutes,
        dev_time_minutes,
        tdr,
        grade: grade_for(tdr),
    })
}

/// Lines of production code: physical lines of top-level classes, so nested
/// classes are not counted twice.
pub fn production_loc(snapshot: &Snapshot) -> u64 {
    snapshot
        .classes()
        .filter(|c| !c.is_nested())
        .map(|c| u64::from(c.line_count))
        .sum()
}

pub fn debt_by_package(issues: &[Issue]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for issue in issues {
        *out.entry(issue.package.clone()).or_insert(0.0) += issue.remediation_minutes;
    }
    out
}

pub fn debt_by_class(issues: &[Issue]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for issue in issues {
        *out.entry(issue.class.clone()).or_insert(0.0) += issue.remediation_minutes;
    }
    out
}

/// Rules, issues and the debt report for one snapshot.
pub fn sqale_report(snapshot: &Snapshot, matrix: &MetricMatrix, rules: &[Rule]) -> Result<DebtReport, SqaleError> {
    debt_report(run_rules(snapshot, matrix, rules), production_loc(snapshot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::compute_metrics;
    use crate::model::{ClassKind, Comment, ExpressionFact, PackageNode, StringLiteralUse};
    use proptest::prelude::*;

    fn snapshot_of(classes: Vec<ClassNode>) -> Snapshot {
        Snapshot::new(
            "v",
            "",
            vec![PackageNode {
                qualified_name: "p".into(),
                classes,
            }],
        )
        .unwrap()
    }

    fn class_with(method: MethodNode) -> ClassNode {
        let mut c = ClassNode::new("p.A", ClassKind::Class);
        c.source_file = "p/A.java".into();
        c.methods.push(method);
        c
    }

    fn issues_for(snap: &Snapshot, rules: &[Rule]) -> Vec<Issue> {
        run_rules(snap, &compute_metrics(snap), rules)
    }

    fn only(id: &str) -> Vec<Rule> {
        builtin_rules().into_iter().filter(|r| r.id == id).collect()
    }

    fn issue(package: &str, minutes: f64) -> Issue {
        Issue {
            rule_id: "r".into(),
            rule_type: RuleType::Maintainability,
            severity: IssueSeverity::Major,
            tags: vec![],
            file: String::new(),
            package: package.into(),
            class: format!("{package}.C"),
            method: None,
            line: 1,
            measure: 1.0,
            remediation_minutes: minutes,
        }
    }

    #[test]
    fn empty_snapshot_has_no_issues() {
        assert!(issues_for(&Snapshot::empty("v"), &builtin_rules()).is_empty());
    }

    #[test]
    fn expression_with_five_operators_costs_seven_minutes() {
        let mut m = MethodNode::new("m");
        m.expressions.push(ExpressionFact {
            line: 4,
            conditional_operators: 5,
        });
        m.expressions.push(ExpressionFact {
            line: 5,
            conditional_operators: 3,
        });
        let issues = issues_for(&snapshot_of(vec![class_with(m)]), &only("expression-complexity"));
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].remediation_minutes, 7.0);
        assert_eq!((issues[0].line, issues[0].method.as_deref()), (4, Some("m")));
    }

    #[test]
    fn complexity_fifteen_over_ten() {
        let mut m = MethodNode::new("m");
        m.decision_points = 14;
        let issues = issues_for(&snapshot_of(vec![class_with(m)]), &only("method-cyclomatic-complexity"));
        assert_eq!(issues.len(), 1);
        assert_eq!((issues[0].measure, issues[0].remediation_minutes), (15.0, 15.0));
    }

    #[test]
    fn class_level_rules() {
        let mut c = class_with(MethodNode::new("m"));
        c.string_literals = vec![
            StringLiteralUse {
                value: "hello".into(),
                count: 3,
                first_line: 2,
            },
            StringLiteralUse {
                value: "hi".into(),
                count: 9,
                first_line: 3,
            },
            StringLiteralUse {
                value: "world".into(),
                count: 2,
                first_line: 4,
            },
        ];
        c.comments = vec![
            Comment {
                line: 5,
                kind: CommentKind::Line,
                text: " plain words".into(),
            },
            Comment {
                line: 6,
                kind: CommentKind::Line,
                text: " x = compute();".into(),
            },
            Comment {
                line: 9,
                kind: CommentKind::Line,
                text: " just prose".into(),
            },
            Comment {
                line: 12,
                kind: CommentKind::Block,
                text: " if (a) {\n b(); } ".into(),
            },
        ];
        c.methods[0].empty_catch_lines = vec![7];
        let snap = snapshot_of(vec![c]);
        let issues = issues_for(&snap, &builtin_rules());
        let summary: Vec<(&str, u32, f64)> = issues
            .iter()
            .map(|i| (i.rule_id.as_str(), i.line, i.remediation_minutes))
            .collect();
        assert_eq!(
            summary,
            [
                ("duplicated-string-literal", 2, 4.0),
                ("commented-out-code", 5, 5.0),
                ("empty-catch-block", 7, 5.0),
                ("commented-out-code", 12, 5.0),
            ]
        );
    }

    #[test]
    fn god_class_needs_low_cohesion() {
        let mut m = MethodNode::new("big");
        m.decision_points = 59;
        let snap = snapshot_of(vec![class_with(m)]);
        let issues = issues_for(&snap, &only("god-class"));
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].remediation_minutes, 120.0 + 13.0);
    }

    #[test]
    fn grade_examples() {
        let r = debt_report(vec![], 1000).unwrap();
        assert_eq!((r.td_minutes, r.tdr, r.grade), (0.0, 0.0, Grade::A));
        let r = debt_report(vec![issue("a", 1500.0)], 1000).unwrap();
        assert_eq!(r.dev_time_minutes, 30000.0);
        assert_eq!(r.grade, Grade::B);
        let r = debt_report(vec![issue("a", 15000.0)], 1000).unwrap();
        assert_eq!((r.tdr, r.grade), (0.5, Grade::E));
        assert_eq!(debt_report(vec![], 0), Err(SqaleError::NoProductionCode));
        assert_eq!(
            [0.099, 0.1, 0.199, 0.2, 0.499].map(grade_for),
            [Grade::B, Grade::C, Grade::C, Grade::D, Grade::D]
        );
    }

    #[test]
    fn package_split() {
        let issues = vec![issue("a", 50.0), issue("b", 30.0), issue("c", 20.0)];
        let by = debt_by_package(&issues);
        assert_eq!(by.values().copied().collect::<Vec<_>>(), [50.0, 30.0, 20.0]);
        assert!(debt_by_package(&[]).is_empty());
        assert_eq!(debt_by_package(&[issue("a", 1.0), issue("a", 2.0)])["a"], 3.0);
    }

    #[test]
    fn overrides() {
        let mut rules = builtin_rules();
        let text = r#"
            [[rule]]
            id = "method-length"
            threshold = 5
            severity = "minor"
            [[rule]]
            id = "god-class"
            enabled = false
            params = { max_tcc = 0.5 }
        "#;
        #[derive(Deserialize)]
        struct Doc {
            rule: Vec<RuleOverride>,
        }
        let doc: Doc = toml::from_str(text).unwrap();
        apply_overrides(&mut rules, &doc.rule).unwrap();
        let ml = rules.iter().find(|r| r.id == "method-length").unwrap();
        assert_eq!(
            (ml.threshold, ml.severity, ml.constant_minutes),
            (5.0, IssueSeverity::Minor, 20.0)
        );
        let god = rules.iter().find(|r| r.id == "god-class").unwrap();
        assert!(!god.enabled);
        assert_eq!(god.param("max_tcc"), 0.5);
        let bad = RuleOverride {
            id: "nope".into(),
            ..RuleOverride::default()
        };
        assert_eq!(
            apply_overrides(&mut rules, &[bad]),
            Err(SqaleError::UnknownRule("nope".into()))
        );
        let negative = RuleOverride {
            id: "method-length".into(),
            constant_minutes: Some(-1.0),
            ..RuleOverride::default()
        };
        assert!(apply_overrides(&mut rules, &[negative]).is_err());
    }

    #[test]
    fn production_loc_counts_top_level_classes() {
        let mut outer = ClassNode::new("p.A", ClassKind::Class);
        outer.line_count = 40;
        let mut inner = ClassNode::new("p.A$In", ClassKind::Class);
        inner.line_count = 10;
        let mut other = ClassNode::new("p.B", ClassKind::Class);
        other.line_count = 5;
        assert_eq!(production_loc(&snapshot_of(vec![outer, inner, other])), 45);
    }

    #[test]
    fn ordering_is_by_file_line_rule() {
        let mut a = class_with(MethodNode::new("m"));
        a.methods[0].empty_catch_lines = vec![9, 3];
        a.methods[0].expressions = vec![ExpressionFact {
            line: 3,
            conditional_operators: 4,
        }];
        let mut b = ClassNode::new("p.B", ClassKind::Class);
        b.source_file = "p/B.java".into();
        b.comments = vec![Comment {
            line: 1,
            kind: CommentKind::Line,
            text: "return x;".into(),
        }];
        let issues = issues_for(&snapshot_of(vec![b, a]), &builtin_rules());
        let keys: Vec<(&str, u32, &str)> = issues
            .iter()
            .map(|i| (i.file.as_str(), i.line, i.rule_id.as_str()))
            .collect();
        assert_eq!(
            keys,
            [
                ("p/A.java", 3, "empty-catch-block"),
                ("p/A.java", 3, "expression-complexity"),
                ("p/A.java", 9, "empty-catch-block"),
                ("p/B.java", 1, "commented-out-code"),
            ]
        );
    }

    proptest! {
        #[test]
        fn remediation_follows_rule_formula(
            decisions in 0u32..60,
            threshold in 0u32..40,
            constant in 0u32..100,
            per_unit in 0u32..10,
        ) {
            let mut rule = only("method-cyclomatic-complexity").remove(0);
            rule.threshold = f64::from(threshold);
            rule.constant_minutes = f64::from(constant);
            rule.per_unit_minutes = f64::from(per_unit);
            let mut m = MethodNode::new("m");
            m.decision_points = decisions;
            let issues = issues_for(&snapshot_of(vec![class_with(m)]), &[rule]);
            let cc = decisions + 1;
            if cc > threshold {
                prop_assert_eq!(issues.len(), 1);
                prop_assert_eq!(issues[0].remediation_minutes, f64::from(constant + per_unit * (cc - threshold)));
            } else {
                prop_assert!(issues.is_empty());
            }
        }

        #[test]
        fn debt_is_additive_and_scale_free(
            a in proptest::collection::vec(0.5f64..200.0, 0..10),
            b in proptest::collection::vec(0.5f64..200.0, 0..10),
            loc in 1u64..5000,
        ) {
            let list = |v: &[f64]| v.iter().map(|&m| issue("p", m)).collect::<Vec<_>>();
            let ra = debt_report(list(&a), loc).unwrap();
            prop_assume!([0.05, 0.10, 0.20, 0.50].iter().all(|g| (ra.tdr - g).abs() > 1e-9));
            let rb = debt_report(list(&b), loc).unwrap();
            let both: Vec<f64> = a.iter().chain(&b).copied().collect();
            let rab = debt_report(list(&both), loc).unwrap();
            prop_assert!((rab.td_minutes - ra.td_minutes - rb.td_minutes).abs() < 1e-9);
            let doubled: Vec<f64> = a.iter().chain(&a).copied().collect();
            let r2 = debt_report(list(&doubled), 2 * loc).unwrap();
            prop_assert!((r2.tdr - ra.tdr).abs() < 1e-12);
            prop_assert_eq!(grade_for(r2.tdr), grade_for(ra.tdr));
        }

        #[test]
        fn grade_never_improves_with_more_debt(x in 0.0f64..2.0, y in 0.0f64..2.0) {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            prop_assert!(grade_for(lo) <= grade_for(hi));
        }
    }

    #[test]
    fn no_issues_is_positive_zero_debt() {
        let report = debt_report(Vec::new(), 10).unwrap();
        assert!(report.td_minutes == 0.0 && report.td_minutes.is_sign_positive());
        assert_eq!(report.grade, Grade::A);
    }
}
