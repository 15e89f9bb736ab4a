//! Count vectors labelling basis tensors and projections.
//!
//! A weakly monotone simple tensor `e_n^{k_n} ⊗ … ⊗ e_1^{k_1}` is determined
//! by how many times each letter occurs, so it is stored as the count vector
//! `(k_1, …, k_n)`. Letters are 1-based throughout the public API.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex {
    counts: Vec<u32>,
}

impl MultiIndex {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    /// The vacuum label `(0, …, 0)`.
    pub fn zero(n: usize) -> Self {
        Self { counts: vec![0; n] }
    }

    /// The count vector with a single occurrence of `letter`.
    pub fn unit(n: usize, letter: usize) -> Self {
        let mut m = Self::zero(n);
        m.counts[letter - 1] = 1;
        m
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Multiplicity of `letter` (1-based).
    pub fn get(&self, letter: usize) -> u32 {
        self.counts[letter - 1]
    }

    pub fn degree(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Largest letter present, i.e. the leftmost tensor factor.
    pub fn top_letter(&self) -> Option<usize> {
        self.counts.iter().rposition(|&c| c > 0).map(|p| p + 1)
    }

    /// Smallest letter present, i.e. the rightmost tensor factor.
    pub fn lowest_letter(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c > 0).map(|p| p + 1)
    }

    pub fn with_added(&self, letter: usize, amount: u32) -> Self {
        let mut m = self.clone();
        m.counts[letter - 1] += amount;
        m
    }

    pub fn with_removed(&self, letter: usize) -> Option<Self> {
        let c = self.counts[letter - 1];
        if c == 0 {
            return None;
        }
        let mut m = self.clone();
        m.counts[letter - 1] = c - 1;
        Some(m)
    }

    pub fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }

    /// Compact label used in CSV provenance columns: `(1;0;2)`.
    pub fn semicolon_label(&self) -> String {
        let parts: Vec<String> = self.counts.iter().map(u32::to_string).collect();
        format!("({})", parts.join(";"))
    }
}

/// Graded order: by total degree, then lexicographically on `(μ_n, …, μ_1)`.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.counts.iter().rev().cmp(other.counts.iter().rev()))
            .then_with(|| self.len().cmp(&other.len()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(counts: Vec<u32>) -> Self {
        Self::new(counts)
    }
}

/// All count vectors of length `n` with total degree at most `max_degree`,
/// in graded order. Position 0 is the vacuum.
pub fn enumerate_multi_indices(n: usize, max_degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut layer = Vec::new();
        let mut current = vec![0u32; n];
        compositions(&mut current, 0, d as u32, &mut layer);
        layer.sort();
        out.extend(layer);
    }
    out
}

fn compositions(current: &mut [u32], slot: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if current.is_empty() {
        if remaining == 0 {
            out.push(MultiIndex::new(Vec::new()));
        }
        return;
    }
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(MultiIndex::new(current.to_vec()));
        current[slot] = 0;
        return;
    }
    for c in 0..=remaining {
        current[slot] = c;
        compositions(current, slot + 1, remaining - c, out);
    }
    current[slot] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn graded_order_small() {
        let got = enumerate_multi_indices(2, 2);
        let want = vec![
            mi(&[0, 0]),
            mi(&[1, 0]),
            mi(&[0, 1]),
            mi(&[2, 0]),
            mi(&[1, 1]),
            mi(&[0, 2]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn vacuum_only_at_degree_zero() {
        assert_eq!(enumerate_multi_indices(3, 0), vec![mi(&[0, 0, 0])]);
    }

    #[test]
    fn letters() {
        let m = mi(&[0, 2, 1]);
        assert_eq!(m.top_letter(), Some(3));
        assert_eq!(m.lowest_letter(), Some(2));
        assert_eq!(m.degree(), 3);
        assert_eq!(mi(&[0, 0]).top_letter(), None);
        assert_eq!(m.with_removed(1), None);
        assert_eq!(m.with_removed(2), Some(mi(&[0, 1, 1])));
        assert_eq!(m.to_string(), "(0,2,1)");
        assert_eq!(m.semicolon_label(), "(0;2;1)");
    }
}
