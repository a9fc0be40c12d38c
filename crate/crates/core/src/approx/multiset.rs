//! Exact gamma when every column holds the same multiset of entries: choose
//! how many columns use each distinct arrangement of the multiset.

use crate::combinatorics::{distinct_arrangements, multiset_arrangements};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MixResult, Objective, PermutationProfile, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultisetConfig {
    pub max_arrangements: u128,
    pub max_nodes: u64,
}

impl Default for MultisetConfig {
    fn default() -> Self {
        MultisetConfig {
            max_arrangements: 50_000,
            max_nodes: 50_000_000,
        }
    }
}

pub fn same_multiset_gamma(a: &Matrix) -> Result<MixResult> {
    same_multiset_gamma_with(a, &MultisetConfig::default())
}

/// Branch and bound over arrangement counts `x_l ≥ 0` with `Σ x_l = d`,
/// minimizing the largest row of `Σ_l x_l · arrangement_l`.
///
/// Arrangements are picked in non-decreasing index order (counts, not
/// sequences), the sorted arrangement is always used once (rows can be
/// relabelled so that some column is sorted), and a branch is cut when its
/// peak plus the remaining columns' minimum reaches the incumbent. The search
/// stops as soon as the fractional bound `⌈d·ΣM / m⌉` is met.
pub fn same_multiset_gamma_with(a: &Matrix, config: &MultisetConfig) -> Result<MixResult> {
    let (m, d) = (a.rows(), a.cols());
    let mut multiset = a.column(0);
    multiset.sort_unstable();
    for j in 1..d {
        let mut col = a.column(j);
        col.sort_unstable();
        if col != multiset {
            return Err(Error::NotSameMultiset(j));
        }
    }
    let needed = multiset_arrangements(&multiset);
    if needed > config.max_arrangements {
        return Err(Error::BudgetExceeded {
            what: "multiset arrangement",
            needed,
            limit: config.max_arrangements,
        });
    }
    let arrangements = distinct_arrangements(&multiset);
    let smallest = multiset[0];
    let total = d as i128 * multiset.iter().sum::<i128>();
    let m_i = m as i128;
    let floor = total.div_euclid(m_i) + i128::from(total.rem_euclid(m_i) != 0);

    let mut search = CountSearch {
        arrangements: &arrangements,
        smallest,
        floor,
        max_nodes: config.max_nodes,
        nodes: 0,
        best: i128::MAX,
        best_choice: Vec::new(),
        choice: vec![0],
    };
    let start = arrangements[0].clone();
    search.descend(0, d - 1, &start)?;

    let choice = search.best_choice;
    let mut sources = Vec::with_capacity(d);
    for (j, &l) in choice.iter().enumerate() {
        sources.push(place(&a.column(j), &arrangements[l]));
    }
    let profile = PermutationProfile::from_sources(sources)?;
    MixResult::from_profile(a, profile, Objective::Gamma, Status::Exact)
}

/// Source rows that lay `column` out as `target` (equal multisets).
pub(crate) fn place(column: &[i128], target: &[i128]) -> Vec<usize> {
    let mut taken = vec![false; column.len()];
    target
        .iter()
        .map(|&v| {
            let k = (0..column.len())
                .find(|&k| !taken[k] && column[k] == v)
                .expect("target is a rearrangement of the column");
            taken[k] = true;
            k
        })
        .collect()
}

struct CountSearch<'a> {
    arrangements: &'a [Vec<i128>],
    smallest: i128,
    floor: i128,
    max_nodes: u64,
    nodes: u64,
    best: i128,
    best_choice: Vec<usize>,
    choice: Vec<usize>,
}

impl CountSearch<'_> {
    /// Returns `Ok(true)` once the fractional bound is reached.
    fn descend(&mut self, from: usize, remaining: usize, partial: &[i128]) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded {
                what: "multiset search node",
                needed: self.nodes as u128,
                limit: self.max_nodes as u128,
            });
        }
        let peak = *partial.iter().max().expect("m >= 1");
        if remaining == 0 {
            if peak < self.best {
                self.best = peak;
                self.best_choice.clone_from(&self.choice);
            }
            return Ok(self.best == self.floor);
        }
        if peak + remaining as i128 * self.smallest >= self.best {
            return Ok(false);
        }
        let mut next = vec![0i128; partial.len()];
        for l in from..self.arrangements.len() {
            for (slot, (p, v)) in next
                .iter_mut()
                .zip(partial.iter().zip(&self.arrangements[l]))
            {
                *slot = p + v;
            }
            self.choice.push(l);
            let done = self.descend(l, remaining - 1, &next)?;
            self.choice.pop();
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_gamma;

    #[test]
    fn consecutive_three_by_three() {
        let a = Matrix::from_columns(vec![vec![1, 2, 3]; 3]).unwrap();
        assert_eq!(same_multiset_gamma(&a).unwrap().value, 6);
    }

    #[test]
    fn five_columns_of_one_two_three() {
        let a = Matrix::from_columns(vec![vec![1, 2, 3]; 5]).unwrap();
        let g = same_multiset_gamma(&a).unwrap();
        assert_eq!(g.value, 10);
        assert_eq!(g.value, brute_force_gamma(&a).unwrap().value);
        assert!(g.is_constant());
    }

    #[test]
    fn constant_multiset() {
        let a = Matrix::from_columns(vec![vec![7, 7]; 4]).unwrap();
        assert_eq!(same_multiset_gamma(&a).unwrap().value, 28);
    }

    #[test]
    fn shuffled_columns_are_accepted() {
        let a = Matrix::from_columns(vec![
            vec![0, 4, 1],
            vec![4, 1, 0],
            vec![1, 0, 4],
            vec![0, 1, 4],
        ])
        .unwrap();
        assert_eq!(
            same_multiset_gamma(&a).unwrap().value,
            brute_force_gamma(&a).unwrap().value
        );
    }

    #[test]
    fn rejects_different_multisets() {
        let a = Matrix::from_columns(vec![vec![1, 2], vec![1, 3]]).unwrap();
        assert_eq!(
            same_multiset_gamma(&a).unwrap_err(),
            Error::NotSameMultiset(1)
        );
    }

    #[test]
    fn refuses_over_budget() {
        let a = Matrix::from_columns(vec![(0..10).collect(); 2]).unwrap();
        assert!(same_multiset_gamma(&a).unwrap_err().is_budget());
    }
}
