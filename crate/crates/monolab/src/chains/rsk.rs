//! Young diagram shapes via Schensted row insertion.
//!
//! Column convention: `columns[0]` is the length of the longest decreasing
//! subset, and the number of columns equals the longest increasing subset.
//! Prefix sums of the columns are the maximal k-decreasing sizes (Greene).

use crate::geometry::PointSet;
use crate::Result;
use std::io::{BufWriter, Write};
use std::path::Path;

/// RSK shape as non-increasing column lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YoungDiagram {
    columns: Vec<u32>,
}

impl YoungDiagram {
    /// Builds a diagram, validating that the columns are non-increasing.
    pub fn new(columns: Vec<u32>) -> Result<Self> {
        if columns.windows(2).any(|w| w[0] < w[1]) || columns.iter().any(|&c| c == 0) {
            return Err(crate::Error::Dimension(
                "column lengths must be positive and non-increasing".into(),
            ));
        }
        Ok(YoungDiagram { columns })
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    /// Column length `lambda_i` (1-based), zero beyond the diagram.
    pub fn column(&self, i: usize) -> u32 {
        if i == 0 || i > self.columns.len() {
            0
        } else {
            self.columns[i - 1]
        }
    }

    /// Total number of cells.
    pub fn total(&self) -> u64 {
        self.columns.iter().map(|&c| c as u64).sum()
    }

    /// CSV persistence: `i,lambda_i` rows, 1-based.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let tmp = crate::geometry::tmp_path_for(path);
        {
            let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
            writeln!(w, "i,lambda_i")?;
            for (i, c) in self.columns.iter().enumerate() {
                writeln!(w, "{},{}", i + 1, c)?;
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Greene sum: the maximal size of a k-decreasing subset, `sum_{i<=k} lambda_i`.
pub fn greene_sum(d: &YoungDiagram, k: usize) -> u64 {
    d.columns
        .iter()
        .take(k)
        .map(|&c| c as u64)
        .sum()
}

/// The permutation read off a point set: `pi[i] = j` (1-based) when the i-th
/// point from the left is the j-th from below.
pub fn permutation_of(ps: &PointSet) -> Vec<u32> {
    let ranks = y_ranks_in_x_order(ps);
    ranks.iter().map(|&r| r + 1).collect()
}

/// y-ranks (0-based) of the points sorted by x.
pub(crate) fn y_ranks_in_x_order(ps: &PointSet) -> Vec<u32> {
    let n = ps.len();
    let pts = ps.points();
    let mut by_x: Vec<u32> = (0..n as u32).collect();
    by_x.sort_by(|&a, &b| pts[a as usize].x.total_cmp(&pts[b as usize].x));
    let mut by_y: Vec<u32> = (0..n as u32).collect();
    by_y.sort_by(|&a, &b| pts[a as usize].y.total_cmp(&pts[b as usize].y));
    let mut rank = vec![0u32; n];
    for (r, &i) in by_y.iter().enumerate() {
        rank[i as usize] = r as u32;
    }
    by_x.iter().map(|&i| rank[i as usize]).collect()
}

/// RSK shape of the point set, in the column convention above.
pub fn rsk_shape(ps: &PointSet) -> YoungDiagram {
    let ranks = y_ranks_in_x_order(ps);
    let n = ranks.len() as u32;
    // Row lengths of the Schensted tableau of the complement word are the
    // column lengths of the original's tableau.
    let comp: Vec<u32> = ranks.iter().map(|&r| n - 1 - r).collect();
    YoungDiagram {
        columns: schensted_row_lengths(&comp),
    }
}

/// Row lengths of the Schensted insertion tableau of `word`.
pub(crate) fn schensted_row_lengths(word: &[u32]) -> Vec<u32> {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for &v in word {
        let mut cur = v;
        let mut placed = false;
        for row in rows.iter_mut() {
            let pos = row.partition_point(|&t| t < cur);
            if pos == row.len() {
                row.push(cur);
                placed = true;
                break;
            }
            std::mem::swap(&mut cur, &mut row[pos]);
        }
        if !placed {
            rows.push(vec![cur]);
        }
    }
    rows.iter().map(|r| r.len() as u32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_rejects_bad_columns() {
        assert!(YoungDiagram::new(vec![2, 3]).is_err());
        assert!(YoungDiagram::new(vec![3, 0]).is_err());
        assert!(YoungDiagram::new(vec![4, 2, 2, 1]).is_ok());
    }

    #[test]
    fn greene_sum_is_zero_padded_prefix() {
        let d = YoungDiagram::new(vec![4, 2, 2, 1]).unwrap();
        assert_eq!(greene_sum(&d, 0), 0);
        assert_eq!(greene_sum(&d, 2), 6);
        assert_eq!(greene_sum(&d, 100), 9);
        let d = YoungDiagram::new(vec![2, 1]).unwrap();
        assert_eq!(greene_sum(&d, 5), 3);
    }
}
