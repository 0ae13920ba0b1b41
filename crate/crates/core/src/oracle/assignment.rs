/// Exact minimum-cost perfect assignment on a square `size × size` matrix
/// (row-major), using the Hungarian method with potentials and shortest
/// augmenting paths. Runs in `O(size³)`.
///
/// Returns the optimal total cost and `row_to_col`.
pub fn solve_assignment(cost: &[f64], size: usize) -> (f64, Vec<usize>) {
    assert_eq!(cost.len(), size * size, "cost matrix must be square");
    if size == 0 {
        return (0.0, Vec::new());
    }
    // 1-based internal indexing; column 0 is the virtual root.
    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; size + 1];
    let mut v = vec![0.0f64; size + 1];
    let mut col_owner = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];

    for row in 1..=size {
        col_owner[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![inf; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=size {
                if used[j] {
                    continue;
                }
                let reduced = cost[(i0 - 1) * size + (j - 1)] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; size];
    for j in 1..=size {
        row_to_col[col_owner[j] - 1] = j - 1;
    }
    let total = row_to_col
        .iter()
        .enumerate()
        .map(|(r, &c)| cost[r * size + c])
        .sum();
    (total, row_to_col)
}
