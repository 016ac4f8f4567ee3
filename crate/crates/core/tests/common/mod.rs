#![allow(dead_code)]

use voxdrone_core::lexicon::Lexicon;
use voxdrone_core::matcher::normalize;

/// Full-matrix evaluation of the edit-distance recurrence, written
/// independently of the crate's two-row implementation.
pub fn oracle_distance(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    let mut table = vec![vec![0usize; m + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=m {
            table[i][j] = if i.min(j) == 0 {
                i.max(j)
            } else {
                let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
                (table[i - 1][j] + 1)
                    .min(table[i][j - 1] + 1)
                    .min(table[i - 1][j - 1] + cost)
            };
        }
    }
    table[n][m]
}

pub fn oracle_str(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    oracle_distance(&a, &b)
}

/// Brute-force nearest entry: (index, distance), earliest index on ties.
pub fn oracle_nearest(hypothesis: &str, lexicon: &Lexicon) -> (usize, usize) {
    let h = normalize(hypothesis);
    let distances: Vec<usize> = lexicon
        .entries()
        .iter()
        .map(|e| oracle_str(h.as_str(), e.surface.as_str()))
        .collect();
    let min = *distances.iter().min().expect("non-empty lexicon");
    (distances.iter().position(|&d| d == min).unwrap(), min)
}

/// All strings over `alphabet` of exactly `len` characters.
pub fn strings_of_len(alphabet: &[char], len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..len {
        out = out
            .iter()
            .flat_map(|s| alphabet.iter().map(move |c| format!("{s}{c}")))
            .collect();
    }
    out
}
