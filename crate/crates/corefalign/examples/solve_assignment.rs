//! The rectangular linear assignment solver on its own.
//!
//! ```bash
//! cargo run --example solve_assignment
//! ```

use corefalign::assignment::{solve, CostMatrix};

fn main() -> corefalign::Result<()> {
    // three ambiguous sentences, five candidate positions
    let costs = [
        [0.0, 2.0, 4.0, 9.0, 7.0],
        [2.0, 0.0, 2.0, 7.0, 5.0],
        [6.0, 4.0, 2.0, 3.0, 1.0],
    ];
    let mut matrix = CostMatrix::new(3, 5);
    for (r, row) in costs.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            matrix.set(r, c, v);
        }
    }

    let solution = solve(&matrix)?;
    println!("assignment (row -> column), total cost {}", solution.cost);
    for (row, col) in solution.row_to_col.iter().enumerate() {
        println!("  sentence {row} -> candidate {col} (cost {})", matrix.get(row, *col));
    }

    // ties break toward lower column indices, deterministically
    let flat = CostMatrix::from_rows(&[vec![1.0, 1.0, 1.0]]);
    let tied = solve(&flat)?;
    println!("\nall-equal row resolves to column {}", tied.row_to_col[0]);
    Ok(())
}
