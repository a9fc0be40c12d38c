//! Permutation enumeration helpers.

/// Advances `v` to the next lexicographic permutation; returns `false` (and
/// leaves `v` sorted ascending) after the last one. Duplicates are skipped,
/// so starting from a sorted slice this visits each distinct arrangement once.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All permutations of `0..m` in lexicographic order.
pub fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..m).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// Distinct arrangements of a multiset, lexicographic.
pub fn distinct_arrangements<T: Ord + Clone>(values: &[T]) -> Vec<Vec<T>> {
    let mut cur = values.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// `m!`, saturating at `u128::MAX`.
pub fn factorial(m: usize) -> u128 {
    (1..=m as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX)
}

/// Number of distinct arrangements of a multiset, saturating.
pub fn multiset_arrangements<T: Ord + Clone>(values: &[T]) -> u128 {
    let mut sorted = values.to_vec();
    sorted.sort();
    // multinomial built one binomial factor at a time; each division is exact
    let mut count = 1u128;
    let mut placed = 0u128;
    for run in sorted.chunk_by(|a, b| a == b) {
        for k in 1..=run.len() as u128 {
            placed += 1;
            count = match count.checked_mul(placed) {
                Some(c) => c / k,
                None => return u128::MAX,
            };
        }
    }
    count
}

pub fn saturating_pow(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_of_three() {
        let p = all_permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn arrangements_skip_duplicates() {
        let a = distinct_arrangements(&[1, 0, 1]);
        assert_eq!(a, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        assert_eq!(multiset_arrangements(&[1, 0, 1]), 3);
        assert_eq!(multiset_arrangements(&[1, 1, 2, 2, 3]), 30);
        assert_eq!(multiset_arrangements(&[4, 4, 4]), 1);
        assert_eq!(multiset_arrangements::<i32>(&[]), 1);
        assert_eq!(
            multiset_arrangements(&[0, 0, 1, 1, 1, 2, 3]) as usize,
            distinct_arrangements(&[0, 0, 1, 1, 1, 2, 3]).len()
        );
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(5), 120);
        assert_eq!(factorial(200), u128::MAX);
        assert_eq!(saturating_pow(6, 3), 216);
    }
}
