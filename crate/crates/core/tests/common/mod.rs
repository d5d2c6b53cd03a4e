#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Rank by counting: values strictly below plus the mean position inside
/// the tie group.
pub fn counting_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|x| {
            let below = values.iter().filter(|y| *y < x).count() as f64;
            let equal = values.iter().filter(|y| *y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Correlation through all ordered pairwise differences.
pub fn pairwise_correlation(a: &[f64], b: &[f64]) -> f64 {
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

/// Rank correlation oracle; `None` when either side is constant.
pub fn rank_correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
    if a.len() < 2 || constant(a) || constant(b) {
        return None;
    }
    Some(pairwise_correlation(&counting_ranks(a), &counting_ranks(b)))
}

/// Size of each node's strongly connected component via reachability sets.
pub fn brute_force_scc_sizes(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let reach: Vec<BTreeSet<usize>> = (0..n)
        .map(|start| {
            let mut seen = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &adjacency[v] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            seen
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| reach[i].contains(&j) && reach[j].contains(&i))
                .count()
        })
        .collect()
}

/// Parses `a/b` or a plain number.
pub fn fraction(text: &str) -> f64 {
    match text.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => text.parse().unwrap(),
    }
}
