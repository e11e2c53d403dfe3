//! Minimum-cost assignment (Hungarian method with potentials, O(n^3)).

/// Solves the square assignment problem for `cost` (row-major `n×n`).
/// Returns `col_of_row` and the optimal total cost.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    assert!(cost.iter().all(|r| r.len() == n), "cost matrix must be square");
    // 1-based arrays; index 0 is the virtual start column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| cost[i][col_of_row[i]]).sum();
    (col_of_row, total)
}

/// Maximum-weight matching on a rectangular nonnegative matrix, padded with
/// zero rows/columns. Returns the optimal total weight.
pub fn max_weight_matching(weights: &[Vec<f64>]) -> f64 {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    let max = weights
        .iter()
        .flatten()
        .copied()
        .fold(0.0, f64::max);
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| max - weights.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0))
                .collect()
        })
        .collect();
    let (assign, _) = min_cost_assignment(&cost);
    assign
        .iter()
        .enumerate()
        .map(|(i, &j)| weights.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0))
        .sum()
}
