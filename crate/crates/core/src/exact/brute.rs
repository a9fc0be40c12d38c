use crate::combinatorics::{all_permutations, factorial, saturating_pow};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MixResult, Objective, PermutationProfile, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceConfig {
    /// Upper limit on the profile count `(m!)^(d−1)`.
    pub max_profiles: u128,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig {
            max_profiles: 50_000_000,
        }
    }
}

/// Number of profiles enumerated with column 0 pinned to the identity.
pub fn profile_count(m: usize, d: usize) -> u128 {
    saturating_pow(factorial(m), d - 1)
}

pub fn brute_force_gamma(a: &Matrix) -> Result<MixResult> {
    brute_force_gamma_with(a, &BruteForceConfig::default())
}

pub fn brute_force_beta(a: &Matrix) -> Result<MixResult> {
    brute_force_beta_with(a, &BruteForceConfig::default())
}

/// Minimum over all profiles of the maximum row sum.
///
/// Column 0 stays in place (a common row permutation changes nothing) and the
/// remaining columns are enumerated depth first in lexicographic order of
/// their permutations. Subtrees whose partial maximum plus the smallest
/// remaining entries cannot beat the incumbent are skipped, so the returned
/// profile is the lexicographically first optimum.
pub fn brute_force_gamma_with(a: &Matrix, config: &BruteForceConfig) -> Result<MixResult> {
    let perms = search(a, config)?;
    let profile = PermutationProfile::new(perms)?;
    MixResult::from_profile(a, profile, Objective::Gamma, Status::Exact)
}

/// Maximum over all profiles of the minimum row sum, as `−γ(−A)`.
pub fn brute_force_beta_with(a: &Matrix, config: &BruteForceConfig) -> Result<MixResult> {
    let negated = a.with_data(a.entries().iter().map(|v| -v).collect());
    let perms = search(&negated, config)?;
    let profile = PermutationProfile::new(perms)?;
    MixResult::from_profile(a, profile, Objective::Beta, Status::Exact)
}

fn search(a: &Matrix, config: &BruteForceConfig) -> Result<Vec<Vec<usize>>> {
    let (m, d) = (a.rows(), a.cols());
    let needed = profile_count(m, d);
    if needed > config.max_profiles {
        return Err(Error::BudgetExceeded {
            what: "brute-force profile",
            needed,
            limit: config.max_profiles,
        });
    }
    let columns = a.columns();
    let perms = if d > 1 {
        all_permutations(m)
    } else {
        Vec::new()
    };
    // smallest entries of columns j.. summed, for the pruning bound
    let mut rest_min = vec![0i128; d + 1];
    for j in (0..d).rev() {
        rest_min[j] = rest_min[j + 1] + columns[j].iter().min().expect("m >= 1");
    }
    let total = a.total();
    let m_i = m as i128;
    let lower_bound = total.div_euclid(m_i) + i128::from(total.rem_euclid(m_i) != 0);

    let mut state = Search {
        columns: &columns,
        perms: &perms,
        rest_min: &rest_min,
        lower_bound,
        best: i128::MAX,
        best_choice: vec![0; d],
        choice: vec![0; d],
        done: false,
    };
    let start = columns[0].clone();
    state.descend(1, &start);

    let mut out = vec![(0..m).collect::<Vec<_>>()];
    out.extend(state.best_choice[1..].iter().map(|&k| perms[k].clone()));
    Ok(out)
}

struct Search<'a> {
    columns: &'a [Vec<i128>],
    perms: &'a [Vec<usize>],
    rest_min: &'a [i128],
    lower_bound: i128,
    best: i128,
    best_choice: Vec<usize>,
    choice: Vec<usize>,
    done: bool,
}

impl Search<'_> {
    fn descend(&mut self, j: usize, partial: &[i128]) {
        let d = self.columns.len();
        if j == d {
            let value = *partial.iter().max().expect("m >= 1");
            if value < self.best {
                self.best = value;
                self.best_choice.clone_from(&self.choice);
                self.done = value == self.lower_bound;
            }
            return;
        }
        let peak = *partial.iter().max().expect("m >= 1");
        if self.best != i128::MAX && peak + self.rest_min[j] >= self.best {
            return;
        }
        let column = &self.columns[j];
        let mut next = vec![0i128; partial.len()];
        for (k, perm) in self.perms.iter().enumerate() {
            for (src, &dst) in perm.iter().enumerate() {
                next[dst] = partial[dst] + column[src];
            }
            self.choice[j] = k;
            self.descend(j + 1, &next);
            if self.done {
                return;
            }
        }
    }
}
