//! All three models applied to one snapshot, with per-class scorecards.

use serde::Serialize;

use crate::arisa::{arisa_report, ArisaReport};
use crate::metrics::{compute_metrics, MetricMatrix};
use crate::mi::{mi_classify, mi_for_scope, MiClass, MiResult, MiVariant, Scope};
use crate::model::{SizeVector, Snapshot};
use crate::sqale::{
    builtin_rules, debt_by_class, grade_for, production_loc, run_rules, DebtReport, Grade, Rule, MINUTES_PER_LINE,
};

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub rules: Vec<Rule>,
    pub mi_variant: MiVariant,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            rules: builtin_rules(),
            mi_variant: MiVariant::Statements,
        }
    }
}

/// Maintainability results of one class under every model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreCard {
    pub class: String,
    pub package: String,
    pub loc: u32,
    /// Absent for classes without bodied methods.
    pub mi: Option<MiResult>,
    pub mi_class: Option<MiClass>,
    pub arisa: f64,
    pub arisa_flags: Vec<&'static str>,
    pub issues: usize,
    pub td_minutes: f64,
    pub tdr: f64,
    pub grade: Grade,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotAnalysis {
    pub label: String,
    pub size: SizeVector,
    pub production_loc: u64,
    #[serde(skip)]
    pub matrix: MetricMatrix,
    /// System-level index; absent when no class has a bodied method.
    pub mi: Option<MiResult>,
    /// Absent for a snapshot without classes.
    pub arisa: Option<ArisaReport>,
    /// Absent when there are no production lines.
    pub debt: Option<DebtReport>,
    pub scorecards: Vec<ScoreCard>,
}

impl SnapshotAnalysis {
    pub fn arisa_system(&self) -> Option<f64> {
        self.arisa.as_ref().map(|a| a.system)
    }

    pub fn tdr(&self) -> Option<f64> {
        self.debt.as_ref().map(|d| d.tdr)
    }
}

pub fn analyze_snapshot(snapshot: &Snapshot, options: &AnalysisOptions) -> SnapshotAnalysis {
    let matrix = compute_metrics(snapshot);
    let mi = mi_for_scope(&Scope::System, &matrix, options.mi_variant).ok();
    let arisa = arisa_report(&matrix).ok();
    let issues = run_rules(snapshot, &matrix, &options.rules);
    let by_class = debt_by_class(&issues);
    let issue_counts = issues.iter().fold(std::collections::BTreeMap::new(), |mut acc, i| {
        *acc.entry(i.class.clone()).or_insert(0usize) += 1;
        acc
    });
    let loc = production_loc(snapshot);
    let debt = crate::sqale::debt_report(issues, loc).ok();

    let scorecards = snapshot
        .classes_with_package()
        .map(|(package, class)| {
            let name = &class.qualified_name;
            let class_mi = mi_for_scope(&Scope::Class(name.clone()), &matrix, options.mi_variant).ok();
            let td = by_class.get(name).copied().unwrap_or(0.0);
            let tdr = td / (MINUTES_PER_LINE * f64::from(class.line_count.max(1)));
            let class_arisa = arisa.as_ref().and_then(|a| a.classes.get(name));
            ScoreCard {
                class: name.clone(),
                package: package.to_string(),
                loc: class.line_count,
                mi: class_mi,
                mi_class: class_mi.as_ref().map(mi_classify),
                arisa: class_arisa.map_or(0.0, |a| a.score.maintainability),
                arisa_flags: class_arisa.map(|a| a.flags.clone()).unwrap_or_default(),
                issues: issue_counts.get(name).copied().unwrap_or(0),
                td_minutes: td,
                tdr,
                grade: grade_for(tdr),
            }
        })
        .collect();

    SnapshotAnalysis {
        label: snapshot.version_label().to_string(),
        size: snapshot.size_vector(),
        production_loc: loc,
        matrix,
        mi,
        arisa,
        debt,
        scorecards,
    }
}
