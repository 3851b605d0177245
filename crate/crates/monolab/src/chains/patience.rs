//! Patience-sorting primitives shared by the chain statistics.
//!
//! All functions take y-values already arranged in increasing x-order, so a
//! strictly increasing subsequence of `ys` is an increasing point set.

/// Sorted tails structure: `tails[h]` is the smallest y-value that can end an
/// increasing subsequence of length `h + 1` among the inserted prefix.
#[derive(Debug, Default, Clone)]
pub(crate) struct Tails {
    tails: Vec<f64>,
}

impl Tails {
    pub fn new() -> Self {
        Tails { tails: Vec::new() }
    }

    /// Inserts a y-value; returns the height (1-based chain length ending here).
    pub fn insert(&mut self, y: f64) -> usize {
        let pos = self.tails.partition_point(|&t| t < y);
        if pos == self.tails.len() {
            self.tails.push(y);
        } else {
            self.tails[pos] = y;
        }
        pos + 1
    }

    /// Number of tails `<= y`: the maximal increasing subset of the inserted
    /// prefix restricted to values at most `y`.
    pub fn count_le(&self, y: f64) -> usize {
        self.tails.partition_point(|&t| t <= y)
    }

    /// Number of tails strictly below `y`.
    pub fn count_lt(&self, y: f64) -> usize {
        self.tails.partition_point(|&t| t < y)
    }
}

/// Longest strictly increasing subsequence of `ys`, with one witness.
/// Returns positions into `ys`.
pub(crate) fn lis_witness(ys: &[f64]) -> (usize, Vec<usize>) {
    if ys.is_empty() {
        return (0, Vec::new());
    }
    let mut tops: Vec<usize> = Vec::new(); // position holding each pile top
    let mut prev: Vec<usize> = vec![usize::MAX; ys.len()];
    for (i, &y) in ys.iter().enumerate() {
        let pos = tops.partition_point(|&t| ys[t] < y);
        if pos == tops.len() {
            tops.push(i);
        } else {
            tops[pos] = i;
        }
        if pos > 0 {
            prev[i] = tops[pos - 1];
        }
    }
    let mut witness = vec![0usize; tops.len()];
    let mut cur = *tops.last().unwrap();
    for slot in witness.iter_mut().rev() {
        *slot = cur;
        cur = prev[cur];
    }
    (tops.len(), witness)
}

/// Height of every element: the length of the longest increasing subsequence
/// ending at it. Equal heights form decreasing sets.
pub(crate) fn heights(ys: &[f64]) -> Vec<usize> {
    let mut t = Tails::new();
    ys.iter().map(|&y| t.insert(y)).collect()
}
