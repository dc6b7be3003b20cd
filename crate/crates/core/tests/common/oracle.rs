//! Brute-force reference classifier used to cross-check `knn_classify`.
//!
//! Works on plain `(doc_id, label_name, vector)` triples and shares no code
//! with the library's distance or voting paths.

use std::collections::HashMap;

pub struct OracleDoc {
    pub id: String,
    pub label: &'static str,
    pub vector: Vec<u32>,
}

fn dist(a: &[u32], b: &[u32]) -> f64 {
    let mut acc = 0.0f64;
    for i in 0..a.len() {
        let d = a[i] as f64 - b[i] as f64;
        acc += d * d;
    }
    acc.sqrt()
}

/// Full sort by (distance, id), explicit vote count over the first `k`,
/// ties by summed distance then label name.
pub fn classify(target: &[u32], docs: &[OracleDoc], k: usize) -> &'static str {
    let mut all: Vec<(f64, &str, &'static str)> = docs
        .iter()
        .map(|d| (dist(target, &d.vector), d.id.as_str(), d.label))
        .collect();
    // insertion sort: deliberately a different algorithm from the library
    for i in 1..all.len() {
        let mut j = i;
        while j > 0 {
            let (a, b) = (&all[j - 1], &all[j]);
            let swap = a.0 > b.0 || (a.0 == b.0 && a.1 > b.1);
            if !swap {
                break;
            }
            all.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut votes: HashMap<&'static str, (usize, f64)> = HashMap::new();
    for (d, _, label) in all.iter().take(k) {
        let e = votes.entry(label).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += d;
    }
    let best_count = votes.values().map(|v| v.0).max().unwrap();
    let mut tied: Vec<(&'static str, f64)> = votes
        .iter()
        .filter(|(_, v)| v.0 == best_count)
        .map(|(l, v)| (*l, v.1))
        .collect();
    let best_sum = tied.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    tied.retain(|t| t.1 == best_sum);
    tied.iter().map(|t| t.0).min().unwrap()
}
