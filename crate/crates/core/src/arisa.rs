//! Weighted extreme-value maintainability model.
//!
//! A class is penalized for every metric whose value lies in the worst
//! 15 % of that metric's observed range; each penalty is weighted per
//! quality criterion.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{MetricMatrix, METRIC_NAMES};

/// Fraction of the observed range treated as extreme.
pub const EXTREME_FRACTION: f64 = 0.15;
/// Offset that keeps a zero class score from annihilating the geometric mean.
pub const GEOMETRIC_GUARD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Higher values hurt maintainability.
    Inverse,
    /// Higher values help maintainability.
    Direct,
}

pub const CRITERIA: [&str; 4] = ["analyzability", "changeability", "stability", "testability"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfluenceTable {
    /// `weights[criterion][metric]`, metrics in `METRIC_NAMES` order.
    weights: [[u32; 17]; 4],
    directions: [Direction; 17],
}

impl InfluenceTable {
    pub fn new(weights: [[u32; 17]; 4], directions: [Direction; 17]) -> Self {
        InfluenceTable { weights, directions }
    }

    /// The published weights: strong influence 2, weak influence 1.
    pub fn standard() -> Self {
        use Direction::{Direct as U, Inverse as D};
        #[rustfmt::skip]
        let weights = [
            // cbo dac dit ld lcom ilcom mpc noc tcc loc nam nom rfc wmc cyc len lod
            [2, 2, 2, 2, 2, 2, 2, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2],
            [2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2],
            [2, 2, 1, 2, 2, 2, 2, 1, 2, 1, 1, 1, 1, 1, 2, 2, 1],
            [2, 2, 2, 2, 2, 2, 2, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2],
        ];
        let directions = [D, D, D, U, D, D, D, D, U, D, D, D, D, D, D, D, D];
        let table = InfluenceTable::new(weights, directions);
        assert_eq!(table.criterion_sums(), [33, 34, 26, 33], "influence table weight sums");
        table
    }

    pub fn weight(&self, criterion: usize, metric: usize) -> u32 {
        self.weights[criterion][metric]
    }

    pub fn direction(&self, metric: usize) -> Direction {
        self.directions[metric]
    }

    pub fn criterion_sums(&self) -> [u32; 4] {
        self.weights.map(|row| row.iter().sum())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ArisaError {
    #[error("no classes to score")]
    NoClasses,
    #[error("class score {0} outside [0,1]")]
    ScoreOutOfRange(f64),
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
}

/// Flagged metric names per class, in metric column order.
pub type ExtremeFlags = BTreeMap<String, Vec<&'static str>>;

pub fn extreme_flags(matrix: &MetricMatrix, table: &InfluenceTable) -> Result<ExtremeFlags, ArisaError> {
    if matrix.rows.is_empty() {
        return Err(ArisaError::NoClasses);
    }
    let columns: Vec<[f64; 17]> = matrix.rows.values().map(|r| r.values()).collect();
    let mut flagged: Vec<Vec<&'static str>> = vec![Vec::new(); columns.len()];
    for (m, name) in METRIC_NAMES.iter().enumerate() {
        let (min, max) = columns
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), row| {
                (lo.min(row[m]), hi.max(row[m]))
            });
        if max == min {
            continue;
        }
        let range = max - min;
        // ties on the threshold are flagged, up to rounding of the threshold itself
        let slack = 1e-12 * range.max(1.0);
        for (row, flags) in columns.iter().zip(&mut flagged) {
            let extreme = match table.direction(m) {
                Direction::Inverse => row[m] >= min + (1.0 - EXTREME_FRACTION) * range - slack,
                Direction::Direct => row[m] <= min + EXTREME_FRACTION * range + slack,
            };
            if extreme {
                flags.push(name);
            }
        }
    }
    Ok(matrix.rows.keys().cloned().zip(flagged).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArisaScore {
    pub analyzability: f64,
    pub changeability: f64,
    pub stability: f64,
    pub testability: f64,
    pub maintainability: f64,
}

impl ArisaScore {
    pub fn criteria(&self) -> [f64; 4] {
        [self.analyzability, self.changeability, self.stability, self.testability]
    }
}

pub fn arisa_class_score(flags: &[&str], table: &InfluenceTable) -> Result<ArisaScore, ArisaError> {
    let mut indices = Vec::with_capacity(flags.len());
    for flag in flags {
        let i = METRIC_NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(flag))
            .ok_or_else(|| ArisaError::UnknownMetric(flag.to_string()))?;
        if !indices.contains(&i) {
            indices.push(i);
        }
    }
    let sums = table.criterion_sums();
    let scores: [f64; 4] = std::array::from_fn(|c| {
        let hit: u32 = indices.iter().map(|&m| table.weight(c, m)).sum();
        f64::from(hit) / f64::from(sums[c])
    });
    Ok(ArisaScore {
        analyzability: scores[0],
        changeability: scores[1],
        stability: scores[2],
        testability: scores[3],
        maintainability: scores.iter().sum::<f64>() / 4.0,
    })
}

/// Guarded geometric mean of class scores.
pub fn arisa_system_score(class_scores: &[f64]) -> Result<f64, ArisaError> {
    if class_scores.is_empty() {
        return Err(ArisaError::NoClasses);
    }
    if let Some(&bad) = class_scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(ArisaError::ScoreOutOfRange(bad));
    }
    let mean_log = class_scores.iter().map(|s| (s + GEOMETRIC_GUARD).ln()).sum::<f64>() / class_scores.len() as f64;
    Ok((mean_log.exp() - GEOMETRIC_GUARD).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassArisa {
    pub score: ArisaScore,
    pub flags: Vec<&'static str>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ArisaReport {
    pub classes: BTreeMap<String, ClassArisa>,
    pub system: f64,
}

/// Flags, class scores and system score for a whole metric matrix.
pub fn arisa_report(matrix: &MetricMatrix) -> Result<ArisaReport, ArisaError> {
    let table = InfluenceTable::standard();
    let flags = extreme_flags(matrix, &table)?;
    let mut classes = BTreeMap::new();
    for (name, flags) in flags {
        let score = arisa_class_score(&flags, &table)?;
        classes.insert(name, ClassArisa { score, flags });
    }
    let scores: Vec<f64> = classes.values().map(|c| c.score.maintainability).collect();
    Ok(ArisaReport {
        system: arisa_system_score(&scores)?,
        classes,
    })
}
