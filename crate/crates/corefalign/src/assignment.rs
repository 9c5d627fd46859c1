//! Exact rectangular linear assignment by shortest augmenting paths with
//! dual potentials, O(n²m). Used to jointly resolve ambiguous sentences, but
//! generic over any non-negative cost matrix.

use crate::error::{Error, Result};

/// A dense rows×cols cost matrix; rows must not exceed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        CostMatrix {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut matrix = CostMatrix::new(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged cost matrix");
            for (c, &value) in row.iter().enumerate() {
                matrix.set(r, c, value);
            }
        }
        matrix
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.cols + col] = value;
    }

    fn check(&self) -> Result<()> {
        if self.rows > self.cols {
            return Err(Error::MatrixShape {
                rows: self.rows,
                cols: self.cols,
            });
        }
        for row in 0..self.rows {
            for col in 0..self.cols {
                if !self.get(row, col).is_finite() {
                    return Err(Error::MatrixEntry { row, col });
                }
            }
        }
        Ok(())
    }
}

/// A minimum-cost injective row→column mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub row_to_col: Vec<usize>,
    pub cost: f64,
}

/// Solve the assignment problem exactly.
///
/// Among equal-cost optima the tie-breaking is deterministic: columns are
/// scanned in ascending order, so lower column indices win.
pub fn solve(matrix: &CostMatrix) -> Result<Assignment> {
    matrix.check()?;
    let n = matrix.rows();
    let m = matrix.cols();
    if n == 0 {
        return Ok(Assignment {
            row_to_col: Vec::new(),
            cost: 0.0,
        });
    }

    // 1-based arrays; column 0 is the virtual start of each augmenting path.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut col_row = vec![0usize; m + 1]; // 0 = free column
    let mut way = vec![0usize; m + 1];

    for row in 1..=n {
        col_row[0] = row;
        let mut j0 = 0usize;
        let mut min_to = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];

        loop {
            used[j0] = true;
            let i0 = col_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;

            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = matrix.get(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }

            for j in 0..=m {
                if used[j] {
                    u[col_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }

            j0 = j1;
            if col_row[j0] == 0 {
                break;
            }
        }

        // augment along the found path
        while j0 != 0 {
            let j1 = way[j0];
            col_row[j0] = col_row[j1];
            j0 = j1;
        }
    }

    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=m {
        if col_row[j] > 0 {
            row_to_col[col_row[j] - 1] = j - 1;
        }
    }
    let cost = row_to_col
        .iter()
        .enumerate()
        .map(|(r, &c)| matrix.get(r, c))
        .sum();

    Ok(Assignment { row_to_col, cost })
}
