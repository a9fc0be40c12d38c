use crate::error::{Error, Result};

/// Minimum-bottleneck perfect matching on a square cost table.
///
/// Binary search over the sorted distinct costs; each threshold is tested by
/// looking for a perfect matching among the entries at or below it. Returns
/// `matching[row] = column` and the bottleneck value.
pub fn bottleneck_assignment_2d(cost: &[Vec<i128>]) -> Result<(Vec<usize>, i128)> {
    let n = cost.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty cost table".into()));
    }
    if let Some(i) = cost.iter().position(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "cost row {i} has {} entries, table has {n} rows",
            cost[i].len()
        )));
    }
    let mut thresholds: Vec<i128> = cost.iter().flatten().copied().collect();
    thresholds.sort_unstable();
    thresholds.dedup();

    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    let mut best =
        perfect_matching(cost, thresholds[hi]).expect("complete table has a perfect matching");
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match perfect_matching(cost, thresholds[mid]) {
            Some(matching) => {
                best = matching;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let value = best
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .max()
        .expect("n >= 1");
    debug_assert_eq!(value, thresholds[lo]);
    Ok((best, value))
}

/// Augmenting-path matching restricted to edges with `cost <= limit`.
fn perfect_matching(cost: &[Vec<i128>], limit: i128) -> Option<Vec<usize>> {
    let n = cost.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut visited = vec![false; n];
        if !augment(cost, limit, row, &mut visited, &mut owner) {
            return None;
        }
    }
    let mut matching = vec![0; n];
    for (col, row) in owner.iter().enumerate() {
        matching[row.expect("perfect")] = col;
    }
    Some(matching)
}

fn augment(
    cost: &[Vec<i128>],
    limit: i128,
    row: usize,
    visited: &mut [bool],
    owner: &mut [Option<usize>],
) -> bool {
    for col in 0..cost.len() {
        if cost[row][col] > limit || visited[col] {
            continue;
        }
        visited[col] = true;
        let free = match owner[col] {
            None => true,
            Some(other) => augment(cost, limit, other, visited, owner),
        };
        if free {
            owner[col] = Some(row);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::all_permutations;
    use rand::{Rng, SeedableRng};

    fn exhaustive(cost: &[Vec<i128>]) -> i128 {
        all_permutations(cost.len())
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .map(|(i, &j)| cost[i][j])
                    .max()
                    .unwrap()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn zero_diagonal() {
        let cost = vec![vec![0, 5, 5], vec![5, 0, 5], vec![5, 5, 0]];
        assert_eq!(bottleneck_assignment_2d(&cost).unwrap(), (vec![0, 1, 2], 0));
    }

    #[test]
    fn countermonotone_sum_costs() {
        let n = 6;
        let cost: Vec<Vec<i128>> = (0..=n).map(|i| (0..=n).map(|j| i + j).collect()).collect();
        let (matching, value) = bottleneck_assignment_2d(&cost).unwrap();
        assert_eq!(value, n);
        for (i, &j) in matching.iter().enumerate() {
            assert_eq!(i as i128 + j as i128, n);
        }
    }

    #[test]
    fn matches_exhaustive_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.gen_range(1..=5);
            let cost: Vec<Vec<i128>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0..20)).collect())
                .collect();
            let (matching, value) = bottleneck_assignment_2d(&cost).unwrap();
            assert_eq!(value, exhaustive(&cost));
            let mut cols = matching.clone();
            cols.sort_unstable();
            assert_eq!(cols, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(bottleneck_assignment_2d(&[vec![1, 2]]).is_err());
        assert!(bottleneck_assignment_2d(&[]).is_err());
    }
}
