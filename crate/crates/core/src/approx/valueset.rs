//! Exact gamma for matrices over a small value set, via row patterns.
//!
//! A rearranged matrix is a multiset of `m` row patterns (one value per
//! column) whose per-column value counts match the input. Gamma is the
//! smallest threshold `Γ` for which such a multiset exists using only
//! patterns with sum at most `Γ`; feasibility is monotone in `Γ`, so the
//! candidate pattern sums are binary searched.

use std::collections::HashSet;

use crate::approx::multiset::place;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MixResult, Objective, PermutationProfile, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueSetConfig {
    pub max_patterns: u128,
    pub max_nodes: u64,
}

impl Default for ValueSetConfig {
    fn default() -> Self {
        ValueSetConfig {
            max_patterns: 200_000,
            max_nodes: 20_000_000,
        }
    }
}

/// Value set `M`, the usable row patterns and the per-column occurrence
/// counts `o[i][j]` of value `v_i` in column `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternModel {
    pub values: Vec<i128>,
    /// Patterns as value indices per column, in lexicographic order.
    pub patterns: Vec<Vec<usize>>,
    pub pattern_sums: Vec<i128>,
    pub occurrences: Vec<Vec<u32>>,
    rows: usize,
}

impl PatternModel {
    /// Builds the model, keeping only patterns whose every value occurs in
    /// its column (the others must have count zero).
    pub fn new(a: &Matrix, values: &[i128], config: &ValueSetConfig) -> Result<Self> {
        let mut values = values.to_vec();
        values.sort_unstable();
        values.dedup();
        let (m, d) = (a.rows(), a.cols());
        let s = values.len();
        let mut occurrences = vec![vec![0u32; d]; s];
        for i in 0..m {
            for (j, &v) in a.row(i).iter().enumerate() {
                let k = values.binary_search(&v).map_err(|_| Error::ValueNotInSet {
                    row: i,
                    col: j,
                    value: v,
                })?;
                occurrences[k][j] += 1;
            }
        }
        let present: Vec<Vec<usize>> = (0..d)
            .map(|j| (0..s).filter(|&k| occurrences[k][j] > 0).collect())
            .collect();
        let needed = present
            .iter()
            .try_fold(1u128, |acc, p| acc.checked_mul(p.len() as u128))
            .unwrap_or(u128::MAX);
        if needed > config.max_patterns {
            return Err(Error::BudgetExceeded {
                what: "row pattern",
                needed,
                limit: config.max_patterns,
            });
        }
        let mut patterns = vec![Vec::with_capacity(d)];
        for choices in &present {
            patterns = patterns
                .into_iter()
                .flat_map(|p| {
                    choices.iter().map(move |&k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        let pattern_sums = patterns
            .iter()
            .map(|p| p.iter().map(|&k| values[k]).sum())
            .collect();
        Ok(PatternModel {
            values,
            patterns,
            pattern_sums,
            occurrences,
            rows: m,
        })
    }

    /// `u^k_{ij}`: pattern `k` puts value `i` in column `j`.
    pub fn uses(&self, k: usize, i: usize, j: usize) -> bool {
        self.patterns[k][j] == i
    }

    /// Sorted distinct pattern sums, the candidate thresholds.
    pub fn candidate_thresholds(&self) -> Vec<i128> {
        let mut t = self.pattern_sums.clone();
        t.sort_unstable();
        t.dedup();
        t
    }

    /// Pattern counts `q` (`Σ q = m`, column counts matched) using only
    /// patterns with sum at most `threshold`, if any exist.
    pub fn feasible(&self, threshold: i128, max_nodes: u64) -> Result<Option<Vec<u32>>> {
        let allowed: Vec<usize> = (0..self.patterns.len())
            .filter(|&k| self.pattern_sums[k] <= threshold)
            .collect();
        let d = self.occurrences.first().map_or(0, |o| o.len());
        let mut remaining: Vec<u32> = self.occurrences.iter().flatten().copied().collect();
        let mut search = Feasibility {
            model: self,
            allowed: &allowed,
            d,
            failed: HashSet::new(),
            counts: vec![0; self.patterns.len()],
            nodes: 0,
            max_nodes,
        };
        if search.fill(self.rows, 0, &mut remaining)? {
            Ok(Some(search.counts))
        } else {
            Ok(None)
        }
    }
}

struct Feasibility<'a> {
    model: &'a PatternModel,
    allowed: &'a [usize],
    d: usize,
    failed: HashSet<(Vec<u32>, usize)>,
    counts: Vec<u32>,
    nodes: u64,
    max_nodes: u64,
}

impl Feasibility<'_> {
    /// Assigns patterns to the remaining rows. Rows are filled in order of
    /// their column-0 value (the smallest value still unplaced in column 0
    /// comes next) and, within one column-0 value, by non-decreasing pattern
    /// position, so every multiset of patterns is tried once.
    fn fill(&mut self, rows_left: usize, from: usize, remaining: &mut Vec<u32>) -> Result<bool> {
        if rows_left == 0 {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded {
                what: "pattern search node",
                needed: self.nodes as u128,
                limit: self.max_nodes as u128,
            });
        }
        let key = (remaining.clone(), from);
        if self.failed.contains(&key) {
            return Ok(false);
        }
        let d = self.d;
        let lead = (0..self.model.values.len())
            .find(|&i| remaining[i * d] > 0)
            .expect("rows left imply column-0 entries left");
        for pos in from..self.allowed.len() {
            let k = self.allowed[pos];
            let pattern = &self.model.patterns[k];
            if pattern[0] != lead {
                continue;
            }
            if pattern
                .iter()
                .enumerate()
                .any(|(j, &i)| remaining[i * d + j] == 0)
            {
                continue;
            }
            for (j, &i) in pattern.iter().enumerate() {
                remaining[i * d + j] -= 1;
            }
            self.counts[k] += 1;
            // a new column-0 value restarts the position order
            let still_lead = remaining[lead * d] > 0;
            let next_from = if still_lead { pos } else { 0 };
            let ok = self.fill(rows_left - 1, next_from, remaining)?;
            if ok {
                return Ok(true);
            }
            self.counts[k] -= 1;
            for (j, &i) in pattern.iter().enumerate() {
                remaining[i * d + j] += 1;
            }
        }
        self.failed.insert(key);
        Ok(false)
    }
}

pub fn fixed_valueset_gamma(a: &Matrix, values: &[i128]) -> Result<MixResult> {
    fixed_valueset_gamma_with(a, values, &ValueSetConfig::default())
}

pub fn fixed_valueset_gamma_with(
    a: &Matrix,
    values: &[i128],
    config: &ValueSetConfig,
) -> Result<MixResult> {
    let model = PatternModel::new(a, values, config)?;
    let thresholds = model.candidate_thresholds();
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    let mut witness = model
        .feasible(thresholds[hi], config.max_nodes)?
        .expect("the input matrix itself is feasible at the largest pattern sum");
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match model.feasible(thresholds[mid], config.max_nodes)? {
            Some(counts) => {
                witness = counts;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let profile = realize(a, &model, &witness)?;
    let result = MixResult::from_profile(a, profile, Objective::Gamma, Status::Exact)?;
    debug_assert_eq!(result.value, thresholds[lo]);
    Ok(result)
}

fn realize(a: &Matrix, model: &PatternModel, counts: &[u32]) -> Result<PermutationProfile> {
    let rows: Vec<&Vec<usize>> = counts
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat_n(&model.patterns[k], c as usize))
        .collect();
    let sources = (0..a.cols())
        .map(|j| {
            let target: Vec<i128> = rows.iter().map(|p| model.values[p[j]]).collect();
            place(&a.column(j), &target)
        })
        .collect();
    PermutationProfile::from_sources(sources)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force_gamma, two_value_gamma};
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_two_by_two() {
        let a = Matrix::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(fixed_valueset_gamma(&a, &[0, 1]).unwrap().value, 1);
    }

    #[test]
    fn consecutive_three_by_three() {
        let a = Matrix::from_columns(vec![vec![1, 2, 3]; 3]).unwrap();
        let g = fixed_valueset_gamma(&a, &[1, 2, 3]).unwrap();
        assert_eq!(g.value, 6);
        assert!(g.is_constant());
    }

    #[test]
    fn agrees_with_two_value_solver() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let m = rng.gen_range(1..=6);
            let d = rng.gen_range(1..=4);
            let (lo, hi) = (rng.gen_range(-5..5), rng.gen_range(5..15));
            let data = (0..m * d)
                .map(|_| if rng.gen_bool(0.4) { hi } else { lo })
                .collect();
            let a = Matrix::from_row_major(m, d, data).unwrap();
            assert_eq!(
                fixed_valueset_gamma(&a, &[lo, hi]).unwrap().value,
                two_value_gamma(&a).unwrap().value,
                "{a:?}"
            );
        }
    }

    #[test]
    fn largest_threshold_is_always_feasible() {
        let a = Matrix::new(vec![vec![0, 2, 1], vec![2, 2, 0], vec![1, 0, 0]]).unwrap();
        let model = PatternModel::new(&a, &[0, 1, 2], &ValueSetConfig::default()).unwrap();
        let top = *model.candidate_thresholds().last().unwrap();
        let counts = model.feasible(top, 1_000_000).unwrap().unwrap();
        assert_eq!(counts.iter().sum::<u32>(), 3);
        // counts reproduce the column occurrences
        for (i, occ) in model.occurrences.iter().enumerate() {
            for (j, &o) in occ.iter().enumerate() {
                let used: u32 = (0..model.patterns.len())
                    .filter(|&k| model.uses(k, i, j))
                    .map(|k| counts[k])
                    .sum();
                assert_eq!(used, o);
            }
        }
        assert_eq!(
            fixed_valueset_gamma(&a, &[0, 1, 2]).unwrap().value,
            brute_force_gamma(&a).unwrap().value
        );
    }

    #[test]
    fn rejects_value_outside_set() {
        let a = Matrix::new(vec![vec![0, 5]]).unwrap();
        assert!(matches!(
            fixed_valueset_gamma(&a, &[0, 1]),
            Err(Error::ValueNotInSet {
                row: 0,
                col: 1,
                value: 5
            })
        ));
    }

    #[test]
    fn refuses_over_budget() {
        let a = Matrix::from_columns(vec![(0..30).collect(); 5]).unwrap();
        let values: Vec<i128> = (0..30).collect();
        assert!(fixed_valueset_gamma(&a, &values).unwrap_err().is_budget());
    }
}
