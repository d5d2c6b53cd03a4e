//! Multi-version analysis: rank correlations, key versions and package
//! effort coverage.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{analyze_snapshot, AnalysisOptions, SnapshotAnalysis};
use crate::frontend::{load_facts, parse_tree, ParseOptions};
use crate::metrics::MetricMatrix;

pub const DEFAULT_TDR_DELTA: f64 = 0.01;
pub const DEFAULT_MI_DELTA: f64 = 5.0;
/// Absorbs rounding when a delta lands exactly on its threshold.
const DELTA_SLACK: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 paired values, got {0}")]
    TooShort(usize),
    #[error("{0} series is constant")]
    Constant(&'static str),
}

/// Ranks starting at 1; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooShort(xs.len()));
    }
    if xs.iter().all(|x| *x == xs[0]) {
        return Err(StatsError::Constant("first"));
    }
    if ys.iter().all(|y| *y == ys[0]) {
        return Err(StatsError::Constant("second"));
    }
    Ok(pearson(&average_ranks(xs), &average_ranks(ys)))
}

/// Rank correlation over the positions where both values are present;
/// `None` when too few remain or a side is constant.
pub fn spearman_pairwise(xs: &[Option<f64>], ys: &[Option<f64>]) -> Option<f64> {
    let (a, b): (Vec<f64>, Vec<f64>) = xs.iter().zip(ys).filter_map(|(x, y)| Some(((*x)?, (*y)?))).unzip();
    spearman(&a, &b).ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub label: String,
    pub source: PathBuf,
}

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("cannot read manifest {path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `label<TAB>path`")]
    ManifestLine { path: PathBuf, line: usize },
    #[error("duplicate version label `{0}`")]
    DuplicateLabel(String),
    #[error("manifest lists no versions")]
    EmptyManifest,
    #[error("no version could be loaded")]
    NothingLoadable,
    #[error("need at least {needed} versions with scores, got {got}")]
    TooFewVersions { needed: usize, got: usize },
    #[error("need at least 3 classes, got {0}")]
    TooFewClasses(usize),
    #[error("coverage needs positive total effort")]
    NoEffort,
    #[error("coverage threshold {0} outside (0, 1]")]
    BadThreshold(f64),
}

/// Reads `label<TAB>path` lines. Blank lines and `#` comments are skipped;
/// relative paths are taken from the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, EvolutionError> {
    let text = fs::read_to_string(path).map_err(|source| EvolutionError::Manifest {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((label, source)) = line.split_once('\t') else {
            return Err(EvolutionError::ManifestLine {
                path: path.to_path_buf(),
                line: i + 1,
            });
        };
        let (label, source) = (label.trim(), source.trim());
        if label.is_empty() || source.is_empty() {
            return Err(EvolutionError::ManifestLine {
                path: path.to_path_buf(),
                line: i + 1,
            });
        }
        entries.push(ManifestEntry {
            label: label.to_string(),
            source: base.join(source),
        });
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VersionEntry {
    pub label: String,
    pub source: String,
    /// Error text when the version could not be loaded.
    pub outcome: Result<SnapshotAnalysis, String>,
}

impl VersionEntry {
    pub fn analysis(&self) -> Option<&SnapshotAnalysis> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VersionSeries {
    pub entries: Vec<VersionEntry>,
}

fn load_version(
    entry: &ManifestEntry,
    parse: &ParseOptions,
    options: &AnalysisOptions,
) -> Result<SnapshotAnalysis, String> {
    let is_facts = entry.source.is_file() && entry.source.extension().is_some_and(|e| e == "json");
    let snapshot = if is_facts {
        load_facts(&entry.source)
            .map_err(|e| e.to_string())?
            .relabeled(&entry.label)
    } else {
        let options = ParseOptions {
            label: Some(entry.label.clone()),
            ..parse.clone()
        };
        parse_tree(&entry.source, &options).map_err(|e| e.to_string())?.0
    };
    Ok(analyze_snapshot(&snapshot, options))
}

/// Analyzes every version independently; the series keeps manifest order.
pub fn analyze_series(
    manifest: &[ManifestEntry],
    parse: &ParseOptions,
    options: &AnalysisOptions,
) -> Result<VersionSeries, EvolutionError> {
    if manifest.is_empty() {
        return Err(EvolutionError::EmptyManifest);
    }
    let mut labels = HashSet::new();
    for entry in manifest {
        if !labels.insert(entry.label.as_str()) {
            return Err(EvolutionError::DuplicateLabel(entry.label.clone()));
        }
    }
    let entries: Vec<VersionEntry> = manifest
        .par_iter()
        .map(|entry| VersionEntry {
            label: entry.label.clone(),
            source: entry.source.to_string_lossy().replace('\\', "/"),
            outcome: load_version(entry, parse, options),
        })
        .collect();
    if entries.iter().all(|e| e.outcome.is_err()) {
        return Err(EvolutionError::NothingLoadable);
    }
    Ok(VersionSeries { entries })
}

pub const SIZE_MEASURES: [&str; 4] = ["packages", "classes", "methods", "statements"];
pub const MODELS: [&str; 3] = ["mi", "arisa", "sqale"];

/// Size-versus-model rank correlations; `None` marks a degenerate cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    /// `cells[size][model]`.
    pub cells: [[Option<f64>; 3]; 4],
    pub versions: usize,
}

fn model_values(a: &SnapshotAnalysis) -> [Option<f64>; 3] {
    [a.mi.map(|m| m.normalized), a.arisa_system(), a.tdr()]
}

fn size_values(a: &SnapshotAnalysis) -> [f64; 4] {
    let s = a.size;
    [s.n_packages, s.n_classes, s.n_methods, s.n_statements].map(|v| v as f64)
}

pub fn correlation_report(series: &VersionSeries) -> Result<CorrelationReport, EvolutionError> {
    let loaded: Vec<&SnapshotAnalysis> = series.entries.iter().filter_map(VersionEntry::analysis).collect();
    if loaded.len() < 3 {
        return Err(EvolutionError::TooFewVersions {
            needed: 3,
            got: loaded.len(),
        });
    }
    let sizes: Vec<[f64; 4]> = loaded.iter().map(|a| size_values(a)).collect();
    let models: Vec<[Option<f64>; 3]> = loaded.iter().map(|a| model_values(a)).collect();
    let cells = std::array::from_fn(|s| {
        std::array::from_fn(|m| {
            let xs: Vec<Option<f64>> = sizes.iter().map(|row| Some(row[s])).collect();
            let ys: Vec<Option<f64>> = models.iter().map(|row| row[m]).collect();
            spearman_pairwise(&xs, &ys)
        })
    });
    Ok(CorrelationReport {
        cells,
        versions: loaded.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyVersion {
    pub label: String,
    pub previous: String,
    pub delta_tdr: Option<f64>,
    pub delta_mi: Option<f64>,
}

/// Versions whose TDR or normalized MI moved by at least the given deltas
/// relative to the previous loaded version.
pub fn key_versions(series: &VersionSeries, delta_tdr: f64, delta_mi: f64) -> Vec<KeyVersion> {
    let loaded: Vec<(&str, &SnapshotAnalysis)> = series
        .entries
        .iter()
        .filter_map(|e| e.analysis().map(|a| (e.label.as_str(), a)))
        .collect();
    let diff = |a: Option<f64>, b: Option<f64>| Some(b? - a?);
    loaded
        .windows(2)
        .filter_map(|pair| {
            let ((prev_label, prev), (label, cur)) = (pair[0], pair[1]);
            let d_tdr = diff(prev.tdr(), cur.tdr());
            let d_mi = diff(prev.mi.map(|m| m.normalized), cur.mi.map(|m| m.normalized));
            let trips = d_tdr.is_some_and(|d| d.abs() >= delta_tdr - DELTA_SLACK)
                || d_mi.is_some_and(|d| d.abs() >= delta_mi - DELTA_SLACK);
            trips.then(|| KeyVersion {
                label: label.to_string(),
                previous: prev_label.to_string(),
                delta_tdr: d_tdr,
                delta_mi: d_mi,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageEntry {
    pub package: String,
    pub minutes: f64,
    pub cumulative_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageSet {
    pub threshold: f64,
    pub total_minutes: f64,
    pub packages: Vec<CoverageEntry>,
}

/// Smallest set of highest-effort packages whose share reaches `threshold`.
pub fn coverage_set(by_package: &BTreeMap<String, f64>, threshold: f64) -> Result<CoverageSet, EvolutionError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(EvolutionError::BadThreshold(threshold));
    }
    let total: f64 = by_package.values().sum();
    if by_package.is_empty() || total.is_nan() || total <= 0.0 {
        return Err(EvolutionError::NoEffort);
    }
    let mut ranked: Vec<(&String, f64)> = by_package.iter().map(|(p, m)| (p, *m)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut packages = Vec::new();
    let mut cumulative = 0.0;
    for (package, minutes) in ranked {
        cumulative += minutes;
        let fraction = cumulative / total;
        packages.push(CoverageEntry {
            package: package.clone(),
            minutes,
            cumulative_fraction: fraction,
        });
        if fraction >= threshold - DELTA_SLACK {
            break;
        }
    }
    Ok(CoverageSet {
        threshold,
        total_minutes: total,
        packages,
    })
}

/// Pairwise class-level rank correlations between MI, ARiSA and technical
/// debt, in that order. Classes missing a model value are left out of the
/// pairs involving that model; a class with no issues has zero debt.
pub fn cross_model_class_correlation(
    matrix: &MetricMatrix,
    mi: &BTreeMap<String, f64>,
    arisa: &BTreeMap<String, f64>,
    td: &BTreeMap<String, f64>,
) -> Result<[[Option<f64>; 3]; 3], EvolutionError> {
    let classes: Vec<&String> = matrix.rows.keys().collect();
    if classes.len() < 3 {
        return Err(EvolutionError::TooFewClasses(classes.len()));
    }
    let columns: [Vec<Option<f64>>; 3] = [
        classes.iter().map(|c| mi.get(*c).copied()).collect(),
        classes.iter().map(|c| arisa.get(*c).copied()).collect(),
        classes
            .iter()
            .map(|c| Some(td.get(*c).copied().unwrap_or(0.0)))
            .collect(),
    ];
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i == j {
                Some(1.0)
            } else {
                spearman_pairwise(&columns[i], &columns[j])
            }
        })
    }))
}

/// Per-class model values of one analysis, ready for the cross-model matrix.
pub fn class_model_columns(a: &SnapshotAnalysis) -> [BTreeMap<String, f64>; 3] {
    let mut out: [BTreeMap<String, f64>; 3] = Default::default();
    for card in &a.scorecards {
        if let Some(mi) = card.mi {
            out[0].insert(card.class.clone(), mi.raw);
        }
        if a.arisa.is_some() {
            out[1].insert(card.class.clone(), card.arisa);
        }
        out[2].insert(card.class.clone(), card.td_minutes);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricVector;
    use crate::mi::MiResult;
    use crate::model::SizeVector;
    use proptest::prelude::*;

    /// Rank of each value by counting: values below plus the mean position
    /// within its tie group.
    fn counting_ranks(v: &[f64]) -> Vec<f64> {
        v.iter()
            .map(|x| {
                let below = v.iter().filter(|y| *y < x).count() as f64;
                let equal = v.iter().filter(|y| *y == x).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    }

    /// Correlation through all pairwise differences, avoiding means.
    fn pairwise_correlation(a: &[f64], b: &[f64]) -> f64 {
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for i in 0..a.len() {
            for j in 0..a.len() {
                let (da, db) = (a[i] - a[j], b[i] - b[j]);
                sab += da * db;
                saa += da * da;
                sbb += db * db;
            }
        }
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[2.0, 4.0, 9.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap(), -0.5);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(spearman(&[1.0], &[1.0]), Err(StatsError::TooShort(1)));
        assert_eq!(spearman(&[1.0, 2.0], &[1.0]), Err(StatsError::LengthMismatch(2, 1)));
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), Err(StatsError::Constant("first")));
        assert_eq!(spearman(&[1.0, 2.0], &[5.0, 5.0]), Err(StatsError::Constant("second")));
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), [2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn coverage_examples() {
        let effort: BTreeMap<String, f64> = [("a", 50.0), ("b", 30.0), ("c", 20.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let names = |t| {
            coverage_set(&effort, t)
                .unwrap()
                .packages
                .into_iter()
                .map(|e| e.package)
                .collect::<Vec<_>>()
        };
        assert_eq!(names(0.5), ["a"]);
        assert_eq!(names(0.8), ["a", "b"]);
        assert_eq!(names(1.0), ["a", "b", "c"]);
        let single = BTreeMap::from([("only".to_string(), 3.0)]);
        assert_eq!(coverage_set(&single, 0.99).unwrap().packages.len(), 1);
        assert!(matches!(
            coverage_set(&BTreeMap::new(), 0.5),
            Err(EvolutionError::NoEffort)
        ));
        assert!(matches!(
            coverage_set(&effort, 0.0),
            Err(EvolutionError::BadThreshold(_))
        ));
        let tied = BTreeMap::from([("z".to_string(), 5.0), ("y".to_string(), 5.0)]);
        assert_eq!(coverage_set(&tied, 0.5).unwrap().packages[0].package, "y");
    }

    fn fake(label: &str, size: u64, mi: f64, arisa: Option<f64>, tdr: f64) -> VersionEntry {
        let analysis = SnapshotAnalysis {
            label: label.to_string(),
            size: SizeVector {
                n_packages: size,
                n_classes: size * 2,
                n_methods: size * 3,
                n_statements: size * 10,
                n_lines: size * 40,
            },
            production_loc: size * 40,
            matrix: MetricMatrix::default(),
            mi: Some(MiResult {
                ave_v: 0.0,
                ave_g: 0.0,
                ave_stat: 0.0,
                raw: mi,
                normalized: mi,
            }),
            arisa: arisa.map(|system| crate::arisa::ArisaReport {
                classes: BTreeMap::new(),
                system,
            }),
            debt: Some(crate::sqale::DebtReport {
                issues: vec![],
                td_minutes: tdr * 1000.0,
                dev_time_minutes: 1000.0,
                tdr,
                grade: crate::sqale::grade_for(tdr),
            }),
            scorecards: vec![],
        };
        VersionEntry {
            label: label.to_string(),
            source: String::new(),
            outcome: Ok(analysis),
        }
    }

    #[test]
    fn correlation_cells() {
        let series = VersionSeries {
            entries: vec![
                fake("1", 1, 80.0, Some(0.2), 0.01),
                fake("2", 2, 70.0, Some(0.2), 0.02),
                fake("3", 3, 75.0, Some(0.2), 0.03),
            ],
        };
        let report = correlation_report(&series).unwrap();
        for row in report.cells {
            assert_eq!(row[2], Some(1.0));
            assert_eq!(row[1], None);
            assert_eq!(row[0], Some(-0.5));
        }
        let short = VersionSeries {
            entries: series.entries[..2].to_vec(),
        };
        assert!(correlation_report(&short).is_err());
    }

    #[test]
    fn key_version_detection() {
        let flat = VersionSeries {
            entries: vec![fake("1", 1, 80.0, None, 0.02), fake("2", 1, 80.0, None, 0.02)],
        };
        assert!(key_versions(&flat, DEFAULT_TDR_DELTA, DEFAULT_MI_DELTA).is_empty());
        let bump = VersionSeries {
            entries: vec![
                fake("v1", 1, 80.0, None, 0.02),
                fake("v2", 1, 79.0, None, 0.03),
                fake("v3", 1, 79.5, None, 0.031),
            ],
        };
        let keys = key_versions(&bump, DEFAULT_TDR_DELTA, DEFAULT_MI_DELTA);
        assert_eq!(keys.iter().map(|k| k.label.as_str()).collect::<Vec<_>>(), ["v2"]);
        assert!(key_versions(&bump, 0.5, 50.0).is_empty());
    }

    #[test]
    fn cross_model_matrix() {
        let rows: BTreeMap<String, MetricVector> = ["a", "b", "c", "d"]
            .iter()
            .map(|n| (n.to_string(), MetricVector::default()))
            .collect();
        let matrix = MetricMatrix { rows };
        let col = |v: [f64; 4]| -> BTreeMap<String, f64> {
            ["a", "b", "c", "d"]
                .iter()
                .zip(v)
                .map(|(n, x)| (n.to_string(), x))
                .collect()
        };
        let m = cross_model_class_correlation(
            &matrix,
            &col([1.0, 2.0, 3.0, 4.0]),
            &col([1.0, 2.0, 3.0, 4.0]),
            &col([4.0, 3.0, 2.0, 1.0]),
        )
        .unwrap();
        assert_eq!(m[0][1], Some(1.0));
        assert_eq!(m[0][2], Some(-1.0));
        assert_eq!(m[2][0], m[0][2]);
        assert!((0..3).all(|i| m[i][i] == Some(1.0)));
        let constant =
            cross_model_class_correlation(&matrix, &col([1.0; 4]), &col([1.0, 2.0, 3.0, 4.0]), &BTreeMap::new())
                .unwrap();
        assert_eq!(constant[0][1], None);
        assert_eq!(constant[1][2], None);
        let tiny = MetricMatrix {
            rows: matrix.rows.into_iter().take(2).collect(),
        };
        assert!(cross_model_class_correlation(&tiny, &BTreeMap::new(), &BTreeMap::new(), &BTreeMap::new()).is_err());
    }

    #[test]
    fn manifest_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("versions.tsv");
        fs::write(&path, "# comment\nv1\tsrc/one\n\nv2\t/abs/two\n").unwrap();
        let entries = read_manifest(&path).unwrap();
        assert_eq!(entries[0].source, dir.path().join("src/one"));
        assert_eq!(entries[1].source, PathBuf::from("/abs/two"));
        fs::write(&path, "v1 no-tab\n").unwrap();
        assert!(matches!(
            read_manifest(&path),
            Err(EvolutionError::ManifestLine { line: 1, .. })
        ));
    }

    #[test]
    fn series_records_failures_and_rejects_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("ok")).unwrap();
        fs::write(dir.path().join("ok/A.java"), "class A { void m() { x(); } }").unwrap();
        let manifest = vec![
            ManifestEntry {
                label: "a".into(),
                source: dir.path().join("ok"),
            },
            ManifestEntry {
                label: "b".into(),
                source: dir.path().join("missing"),
            },
        ];
        let series = analyze_series(&manifest, &ParseOptions::default(), &AnalysisOptions::default()).unwrap();
        assert!(series.entries[0].outcome.is_ok());
        assert!(series.entries[1].outcome.as_ref().unwrap_err().contains("missing"));
        let dup = vec![manifest[0].clone(), manifest[0].clone()];
        assert!(matches!(
            analyze_series(&dup, &ParseOptions::default(), &AnalysisOptions::default()),
            Err(EvolutionError::DuplicateLabel(_))
        ));
        assert!(matches!(
            analyze_series(&manifest[1..], &ParseOptions::default(), &AnalysisOptions::default()),
            Err(EvolutionError::NothingLoadable)
        ));
    }

    proptest! {
        #[test]
        fn ties_match_counting_oracle(
            pairs in proptest::collection::vec((0u8..5, 0u8..5), 2..30),
        ) {
            let xs: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            prop_assert_eq!(average_ranks(&xs), counting_ranks(&xs));
            match spearman(&xs, &ys) {
                Ok(rho) => {
                    let oracle = pairwise_correlation(&counting_ranks(&xs), &counting_ranks(&ys));
                    prop_assert!((rho - oracle).abs() < 1e-12, "{} vs {}", rho, oracle);
                }
                Err(_) => prop_assert!(xs.iter().all(|x| *x == xs[0]) || ys.iter().all(|y| *y == ys[0])),
            }
        }

        #[test]
        fn symmetric_and_rank_invariant(
            xs in proptest::collection::vec(-100.0f64..100.0, 3..20),
            seed in proptest::collection::vec(-100.0f64..100.0, 3..20),
        ) {
            let n = xs.len().min(seed.len());
            let (xs, ys) = (&xs[..n], &seed[..n]);
            if let Ok(rho) = spearman(xs, ys) {
                prop_assert!((-1.0..=1.0).contains(&rho));
                prop_assert!((rho - spearman(ys, xs).unwrap()).abs() < 1e-12);
                let mapped: Vec<f64> = ys.iter().map(|y| y.powi(3) + 7.0).collect();
                prop_assert!((rho - spearman(xs, &mapped).unwrap()).abs() < 1e-12);
            }
        }

        #[test]
        fn coverage_is_minimal_and_monotone(
            minutes in proptest::collection::vec(0.5f64..100.0, 1..12),
            threshold in 0.01f64..=1.0,
        ) {
            let effort: BTreeMap<String, f64> =
                minutes.iter().enumerate().map(|(i, m)| (format!("p{i:02}"), *m)).collect();
            let set = coverage_set(&effort, threshold).unwrap();
            let fractions: Vec<f64> = set.packages.iter().map(|e| e.cumulative_fraction).collect();
            prop_assert!(fractions.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(*fractions.last().unwrap() >= threshold - 1e-9);
            if fractions.len() > 1 {
                prop_assert!(fractions[fractions.len() - 2] < threshold);
            }
        }
    }
}
