//! The swapping (rearrangement) heuristic: reorder columns until each is
//! oppositely ordered against the sum of the others, restarted from random
//! column permutations.
//!
//! Every profile it returns is a witness, so the reported minimum row sum is a
//! certified lower bound on beta, and the complement route gives a certified
//! upper bound on gamma.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combinatorics::{all_permutations, factorial, saturating_pow};
use crate::error::{Error, Result};
use crate::matrix::{
    apply_profile, complement, drop_column, oppositely_ordered, Matrix, MixResult, Objective,
    PermutationProfile, Status,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwapMode {
    /// Re-sort the whole violating column against the other columns' sums.
    #[default]
    FullResort,
    /// Exchange a single violating pair per step, the row with the smallest
    /// current sum first.
    SingleTransposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SwapConfig {
    pub mode: SwapMode,
    /// Steps per restart; `None` means `100·m·d`.
    pub step_budget: Option<usize>,
}

impl SwapConfig {
    pub fn budget_for(&self, a: &Matrix) -> usize {
        self.step_budget.unwrap_or(100 * a.rows() * a.cols())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapStep {
    pub column: usize,
    /// The exchanged rows for single transpositions, `None` for a re-sort.
    pub rows: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwapTrace {
    pub steps: Vec<SwapStep>,
    /// Minimum row sum before the first step and after every step.
    pub min_row_sum_history: Vec<i128>,
    pub restarts_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    Cycle,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct AntisortOutcome {
    pub matrix: Matrix,
    /// Maps the input matrix onto `matrix`.
    pub profile: PermutationProfile,
    pub trace: SwapTrace,
    pub converged: bool,
    pub termination: Termination,
}

/// Working copy of a rearranged matrix that remembers where every entry came from.
#[derive(Clone)]
struct Arrangement {
    columns: Vec<Vec<i128>>,
    sources: Vec<Vec<usize>>,
    sums: Vec<i128>,
}

impl Arrangement {
    fn new(a: &Matrix) -> Self {
        let columns = a.columns();
        let m = a.rows();
        let sums = (0..m).map(|i| a.row(i).iter().sum()).collect();
        Arrangement {
            sources: vec![(0..m).collect(); columns.len()],
            columns,
            sums,
        }
    }

    fn rest(&self, j: usize) -> Vec<i128> {
        self.sums
            .iter()
            .zip(&self.columns[j])
            .map(|(s, c)| s - c)
            .collect()
    }

    fn min_sum(&self) -> i128 {
        *self.sums.iter().min().expect("m >= 1")
    }

    fn violates(&self, j: usize) -> bool {
        !oppositely_ordered(&self.rest(j), &self.columns[j]).expect("equal lengths")
    }

    fn first_violation(&self) -> Option<usize> {
        (0..self.columns.len()).find(|&j| self.violates(j))
    }

    fn resort(&mut self, j: usize) {
        let rest = self.rest(j);
        let m = rest.len();
        let mut rows: Vec<usize> = (0..m).collect();
        rows.sort_by_key(|&i| (rest[i], i));
        let mut entries: Vec<(i128, usize)> = (0..m)
            .map(|i| (self.columns[j][i], self.sources[j][i]))
            .collect();
        entries.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        for (&i, &(value, src)) in rows.iter().zip(&entries) {
            self.columns[j][i] = value;
            self.sources[j][i] = src;
            self.sums[i] = rest[i] + value;
        }
    }

    fn transpose(&mut self, j: usize) -> Option<(usize, usize)> {
        let rest = self.rest(j);
        let y = &self.columns[j];
        let m = rest.len();
        let partner = |i: usize| {
            (0..m)
                .filter(|&k| rest[i] < rest[k] && y[i] < y[k])
                .max_by_key(|&k| (y[k], std::cmp::Reverse(k)))
        };
        let (i1, i2) = (0..m)
            .filter_map(|i| partner(i).map(|k| (i, k)))
            .min_by_key(|&(i, _)| (rest[i] + y[i], i))?;
        self.columns[j].swap(i1, i2);
        self.sources[j].swap(i1, i2);
        self.sums[i1] = rest[i1] + self.columns[j][i1];
        self.sums[i2] = rest[i2] + self.columns[j][i2];
        Some((i1, i2))
    }

    /// Rows sorted, so that row order does not matter.
    fn canonical(&self) -> Vec<Vec<i128>> {
        let m = self.sums.len();
        let mut rows: Vec<Vec<i128>> = (0..m)
            .map(|i| self.columns.iter().map(|c| c[i]).collect())
            .collect();
        rows.sort_unstable();
        rows
    }

    fn to_matrix(&self, like: &Matrix) -> Matrix {
        let m = self.sums.len();
        let mut data = Vec::with_capacity(m * self.columns.len());
        for i in 0..m {
            data.extend(self.columns.iter().map(|c| c[i]));
        }
        like.with_data(data)
    }

    fn profile(&self) -> PermutationProfile {
        PermutationProfile::from_sources(self.sources.clone()).expect("sources stay bijective")
    }
}

/// Smallest column index that is not oppositely ordered against the row
/// sums of the remaining columns.
pub fn find_violating_column(a: &Matrix) -> Result<Option<usize>> {
    if a.cols() < 2 {
        return Err(Error::DimensionMismatch(
            "opposite ordering needs at least two columns".into(),
        ));
    }
    Ok(Arrangement::new(a).first_violation())
}

/// Re-sorts column `j` into opposite order against the other columns' row
/// sums (ties by row index). The minimum row sum does not decrease.
pub fn swap_step(a: &Matrix, j: usize) -> Result<Matrix> {
    if j >= a.cols() {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: a.cols(),
        });
    }
    let mut arrangement = Arrangement::new(a);
    if !arrangement.violates(j) {
        return Err(Error::AlreadyOppositelyOrdered(j));
    }
    arrangement.resort(j);
    Ok(arrangement.to_matrix(a))
}

pub fn antisort_columns(a: &Matrix, step_budget: usize) -> AntisortOutcome {
    antisort_with(
        a,
        &SwapConfig {
            mode: SwapMode::FullResort,
            step_budget: Some(step_budget),
        },
    )
}

/// Runs swap steps until no column violates opposite ordering, a row-order
/// independent state repeats, or the step budget runs out.
pub fn antisort_with(a: &Matrix, config: &SwapConfig) -> AntisortOutcome {
    let budget = config.budget_for(a);
    let mut current = Arrangement::new(a);
    let mut trace = SwapTrace {
        min_row_sum_history: vec![current.min_sum()],
        restarts_used: 1,
        ..Default::default()
    };
    let mut seen = HashSet::new();
    seen.insert(current.canonical());
    let termination = if a.cols() < 2 {
        Termination::Converged
    } else {
        loop {
            let Some(j) = current.first_violation() else {
                break Termination::Converged;
            };
            if trace.steps.len() >= budget {
                break Termination::BudgetExhausted;
            }
            let before = current.min_sum();
            let rows = match config.mode {
                SwapMode::FullResort => {
                    current.resort(j);
                    None
                }
                SwapMode::SingleTransposition => current.transpose(j),
            };
            let after = current.min_sum();
            assert!(after >= before, "a swap step lowered the minimum row sum");
            trace.steps.push(SwapStep { column: j, rows });
            trace.min_row_sum_history.push(after);
            if !seen.insert(current.canonical()) {
                break Termination::Cycle;
            }
        }
    };
    AntisortOutcome {
        matrix: current.to_matrix(a),
        profile: current.profile(),
        trace,
        converged: termination == Termination::Converged,
        termination,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestartConfig {
    pub restarts: usize,
    pub seed: u64,
    pub swap: SwapConfig,
}

impl RestartConfig {
    pub fn new(restarts: usize, seed: u64) -> Self {
        RestartConfig {
            restarts,
            seed,
            swap: SwapConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestartSummary {
    pub restarts_used: usize,
    pub best_restart: usize,
    pub converged_restarts: usize,
    pub total_steps: usize,
}

/// Random starting profile for restart `index`: column 0 stays, the others
/// are shuffled from a stream derived from `(seed, index)`.
pub fn restart_profile(m: usize, d: usize, seed: u64, index: usize) -> PermutationProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut perms = vec![(0..m).collect::<Vec<_>>()];
    for _ in 1..d {
        let mut p: Vec<usize> = (0..m).collect();
        p.shuffle(&mut rng);
        perms.push(p);
    }
    PermutationProfile::new(perms).expect("shuffles are permutations")
}

pub fn randomized_beta(a: &Matrix, restarts: usize, seed: u64) -> Result<MixResult> {
    randomized_beta_with(a, &RestartConfig::new(restarts, seed)).map(|(r, _)| r)
}

pub fn randomized_gamma(a: &Matrix, restarts: usize, seed: u64) -> Result<MixResult> {
    randomized_gamma_with(a, &RestartConfig::new(restarts, seed)).map(|(r, _)| r)
}

/// Best minimum row sum over independent restarts. Restarts run in parallel
/// and are reduced in index order, so the answer does not depend on the
/// number of worker threads.
pub fn randomized_beta_with(
    a: &Matrix,
    config: &RestartConfig,
) -> Result<(MixResult, RestartSummary)> {
    if config.restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one restart is required".into(),
        ));
    }
    let (m, d) = (a.rows(), a.cols());
    let runs: Vec<(PermutationProfile, i128, bool, usize)> = (0..config.restarts)
        .into_par_iter()
        .map(|index| {
            let start = restart_profile(m, d, config.seed, index);
            let shuffled = apply_profile(a, &start).expect("profile matches matrix");
            let outcome = antisort_with(&shuffled, &config.swap);
            let value = *outcome
                .trace
                .min_row_sum_history
                .last()
                .expect("non-empty history");
            let profile = start.then(&outcome.profile).expect("same shape");
            (profile, value, outcome.converged, outcome.trace.steps.len())
        })
        .collect();

    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.1 > runs[best].1 {
            best = k;
        }
    }
    let summary = RestartSummary {
        restarts_used: runs.len(),
        best_restart: best,
        converged_restarts: runs.iter().filter(|r| r.2).count(),
        total_steps: runs.iter().map(|r| r.3).sum(),
    };
    let profile = runs.into_iter().nth(best).expect("restarts >= 1").0;
    let result = MixResult::from_profile(a, profile, Objective::Beta, Status::HeuristicLowerBound)?;
    Ok((result, summary))
}

/// Upper bound on gamma: `d·l − β_lower(l − A)`.
pub fn randomized_gamma_with(
    a: &Matrix,
    config: &RestartConfig,
) -> Result<(MixResult, RestartSummary)> {
    let (flipped, l) = complement(a);
    let (beta, summary) = randomized_beta_with(&flipped, config)?;
    let result = MixResult::from_profile(
        a,
        beta.profile,
        Objective::Gamma,
        Status::HeuristicUpperBound,
    )?;
    debug_assert_eq!(result.value, a.cols() as i128 * l - beta.value);
    Ok((result, summary))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagnosticConfig {
    pub max_profiles: u128,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        DiagnosticConfig {
            max_profiles: 1_000_000,
        }
    }
}

pub fn distinct_rowsum_diagnostic(a: &Matrix) -> Result<bool> {
    distinct_rowsum_diagnostic_with(a, &DiagnosticConfig::default())
}

/// True iff every column has `m` distinct entries and, for every column
/// dropped, every rearrangement of the remaining columns has `m` distinct
/// row sums. Under these conditions each swap raises the minimum row sum.
pub fn distinct_rowsum_diagnostic_with(a: &Matrix, config: &DiagnosticConfig) -> Result<bool> {
    let (m, d) = (a.rows(), a.cols());
    if m == 1 {
        return Ok(true);
    }
    let columns_distinct = a.columns().into_iter().all(|mut c| {
        c.sort_unstable();
        c.windows(2).all(|w| w[0] != w[1])
    });
    if !columns_distinct {
        return Ok(false);
    }
    if d == 1 {
        // the empty submatrix has all row sums zero
        return Ok(false);
    }
    let per_column = saturating_pow(factorial(m), d.saturating_sub(2));
    let needed = per_column.saturating_mul(d as u128);
    if needed > config.max_profiles {
        return Err(Error::BudgetExceeded {
            what: "row-sum diagnostic profile",
            needed,
            limit: config.max_profiles,
        });
    }
    let perms = all_permutations(m);
    for j in 0..d {
        let sub = drop_column(a, j)?;
        if !all_rearrangements_distinct(&sub, &perms) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn all_rearrangements_distinct(sub: &Matrix, perms: &[Vec<usize>]) -> bool {
    let d = sub.cols();
    let columns = sub.columns();
    let mut idx = vec![0usize; d];
    loop {
        let mut sums = columns[0].clone();
        for j in 1..d {
            for (src, &dst) in perms[idx[j]].iter().enumerate() {
                sums[dst] += columns[j][src];
            }
        }
        sums.sort_unstable();
        if sums.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        let mut j = 1;
        loop {
            if j >= d {
                return true;
            }
            idx[j] += 1;
            if idx[j] < perms.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Fraction of `trials` random `m × d` matrices with entries uniform in
/// `1..=n` whose row sums are pairwise distinct.
pub fn distinct_rowsum_frequency(m: usize, d: usize, n: i128, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut sums: Vec<i128> = (0..m)
            .map(|_| (0..d).map(|_| rng.gen_range(1..=n)).sum())
            .collect();
        sums.sort_unstable();
        if sums.windows(2).all(|w| w[0] != w[1]) {
            hits += 1;
        }
    }
    hits as f64 / trials.max(1) as f64
}
