//! Fixed-row-count dynamic program over reachable partial row sums.
//!
//! Rows are exchangeable once a column has been placed, so a state is the
//! sorted multiset of partial row sums. Column `j` is applied to a state by
//! every distinct arrangement of its entries over the state's slots. The last
//! column is paired countermonotonically against each state, which is the
//! optimal two-column completion, so only `d − 1` layers are enumerated.

use std::collections::HashMap;

use crate::combinatorics::{distinct_arrangements, multiset_arrangements};
use crate::error::{Error, Result};
use crate::matrix::{target_row_sum, Matrix, MixResult, Objective, PermutationProfile, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpConfig {
    pub max_states: usize,
    /// Limit on distinct arrangements of a single column.
    pub max_arrangements: u128,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            max_states: 2_000_000,
            max_arrangements: 500_000,
        }
    }
}

/// Sorted partial row sums after `columns_consumed` columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DpState {
    pub partial_sums: Vec<i128>,
    pub columns_consumed: usize,
}

#[derive(Debug, Clone)]
struct Node {
    sums: Vec<i128>,
    pred: usize,
    /// Entry of the current column assigned to each slot of the predecessor.
    assign: Vec<i128>,
}

/// All layers of the forward pass; layer `j` holds the states after columns `0..=j`.
#[derive(Debug, Clone)]
pub struct DpTable {
    layers: Vec<Vec<Node>>,
}

impl DpTable {
    pub fn layer_states(&self, j: usize) -> Vec<DpState> {
        self.layers[j]
            .iter()
            .map(|n| DpState {
                partial_sums: n.sums.clone(),
                columns_consumed: j + 1,
            })
            .collect()
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Profile prefix (columns `0..=j`) realizing state `index` of layer `j`.
    pub fn realize(&self, a: &Matrix, j: usize, index: usize) -> Result<PermutationProfile> {
        let mut chain = Vec::with_capacity(j + 1);
        let mut k = index;
        for layer in (0..=j).rev() {
            let node = &self.layers[layer][k];
            chain.push(node);
            k = node.pred;
        }
        chain.reverse();
        replay(a, &chain)
    }
}

pub fn dp_gamma(a: &Matrix) -> Result<MixResult> {
    dp_gamma_with(a, &DpConfig::default())
}

pub fn dp_gamma_with(a: &Matrix, config: &DpConfig) -> Result<MixResult> {
    let d = a.cols();
    if d == 1 {
        return MixResult::from_profile(
            a,
            PermutationProfile::identity(a.rows(), 1),
            Objective::Gamma,
            Status::Exact,
        );
    }
    let table = build_table(a, d - 1, config)?;
    let last = table.layers.len() - 1;
    let column = a.column(d - 1);
    let mut desc = column.clone();
    desc.sort_unstable_by(|x, y| y.cmp(x));

    let mut best: Option<(i128, usize)> = None;
    for (k, node) in table.layers[last].iter().enumerate() {
        let value = node
            .sums
            .iter()
            .zip(&desc)
            .map(|(s, c)| s + c)
            .max()
            .expect("m >= 1");
        if best.is_none_or(|(v, _)| value < v) {
            best = Some((value, k));
        }
    }
    let (_, k) = best.expect("at least one state");
    let mut chain: Vec<&Node> = Vec::with_capacity(d);
    let mut idx = k;
    for layer in (0..=last).rev() {
        let node = &table.layers[layer][idx];
        chain.push(node);
        idx = node.pred;
    }
    chain.reverse();
    let finishing = Node {
        sums: Vec::new(),
        pred: k,
        assign: desc,
    };
    chain.push(&finishing);
    let profile = replay(a, &chain)?;
    MixResult::from_profile(a, profile, Objective::Gamma, Status::Exact)
}

/// Decides complete mixability through the exact gamma.
pub fn dp_is_mixable(a: &Matrix, config: &DpConfig) -> Result<(bool, MixResult)> {
    let result = dp_gamma_with(a, config)?;
    Ok((target_row_sum(a) == Some(result.value), result))
}

/// Forward pass over columns `0..layers`, returning every reachable state.
pub fn build_table(a: &Matrix, layers: usize, config: &DpConfig) -> Result<DpTable> {
    let mut first = a.column(0);
    first.sort_unstable();
    let mut table = DpTable {
        layers: vec![vec![Node {
            sums: first.clone(),
            pred: 0,
            assign: first,
        }]],
    };
    for j in 1..layers {
        let column = a.column(j);
        let needed = multiset_arrangements(&column);
        if needed > config.max_arrangements {
            return Err(Error::BudgetExceeded {
                what: "dp column arrangement",
                needed,
                limit: config.max_arrangements,
            });
        }
        let arrangements = distinct_arrangements(&column);
        let prev = &table.layers[j - 1];
        let mut seen: HashMap<Vec<i128>, usize> = HashMap::new();
        let mut next: Vec<Node> = Vec::new();
        for (p, node) in prev.iter().enumerate() {
            for arrangement in &arrangements {
                let mut sums: Vec<i128> = node
                    .sums
                    .iter()
                    .zip(arrangement)
                    .map(|(s, c)| s + c)
                    .collect();
                sums.sort_unstable();
                if seen.contains_key(&sums) {
                    continue;
                }
                if next.len() >= config.max_states {
                    return Err(Error::BudgetExceeded {
                        what: "dp state",
                        needed: next.len() as u128 + 1,
                        limit: config.max_states as u128,
                    });
                }
                seen.insert(sums.clone(), next.len());
                next.push(Node {
                    sums,
                    pred: p,
                    assign: arrangement.clone(),
                });
            }
        }
        // deterministic layer order for the next pass and for tie-breaking
        let mut order: Vec<usize> = (0..next.len()).collect();
        order.sort_by(|&x, &y| next[x].sums.cmp(&next[y].sums));
        let sorted = order.into_iter().map(|i| next[i].clone()).collect();
        table.layers.push(sorted);
    }
    Ok(table)
}

/// Turns a chain of slot assignments into a profile. Physical row `i` keeps
/// entry `A[i][0]`; slot `p` of each sorted state is tracked to the physical
/// row whose partial sum it holds.
fn replay(a: &Matrix, chain: &[&Node]) -> Result<PermutationProfile> {
    let m = a.rows();
    let col0 = a.column(0);
    let mut slot_row: Vec<usize> = (0..m).collect();
    slot_row.sort_by_key(|&i| col0[i]);
    let mut sums: Vec<i128> = slot_row.iter().map(|&i| col0[i]).collect();
    let mut sources = vec![(0..m).collect::<Vec<_>>()];

    for (j, node) in chain.iter().enumerate().skip(1) {
        let column = a.column(j);
        let mut pool: Vec<usize> = (0..m).collect();
        pool.sort_by_key(|&k| (column[k], k));
        let mut taken = vec![false; m];
        let mut src = vec![0usize; m];
        for (p, &value) in node.assign.iter().enumerate() {
            let k = pool
                .iter()
                .copied()
                .find(|&k| !taken[k] && column[k] == value)
                .ok_or_else(|| {
                    Error::InvalidArgument("dp assignment is not a column arrangement".into())
                })?;
            taken[k] = true;
            src[slot_row[p]] = k;
            sums[p] += value;
        }
        sources.push(src);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| sums[p]);
        slot_row = order.iter().map(|&p| slot_row[p]).collect();
        sums = order.iter().map(|&p| sums[p]).collect();
    }
    PermutationProfile::from_sources(sources)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute::brute_force_gamma;
    use crate::matrix::{apply_profile, row_sums};

    #[test]
    fn nine_by_three_consecutive() {
        let a = Matrix::from_columns(vec![(1..=9).collect(); 3]).unwrap();
        let g = dp_gamma(&a).unwrap();
        assert_eq!(g.value, 15);
        assert!(g.is_constant());
        assert!(dp_is_mixable(&a, &DpConfig::default()).unwrap().0);
    }

    #[test]
    fn constant_matrix() {
        let a = Matrix::from_columns(vec![vec![4; 3]; 5]).unwrap();
        assert_eq!(dp_gamma(&a).unwrap().value, 20);
    }

    #[test]
    fn single_column() {
        let a = Matrix::from_columns(vec![vec![2, 9, 4]]).unwrap();
        assert_eq!(dp_gamma(&a).unwrap().value, 9);
    }

    #[test]
    fn agrees_with_brute_force_on_small_grid() {
        // all 2x3 matrices over {0,1,2}, plus random 3x4
        for code in 0..3usize.pow(6) {
            let data = (0..6)
                .map(|k| ((code / 3usize.pow(k)) % 3) as i128)
                .collect();
            let a = Matrix::from_row_major(2, 3, data).unwrap();
            assert_eq!(
                dp_gamma(&a).unwrap().value,
                brute_force_gamma(&a).unwrap().value
            );
        }
    }

    #[test]
    fn every_state_is_realized_by_a_profile_prefix() {
        let a = Matrix::new(vec![vec![0, 2, 1, 1], vec![1, 0, 2, 2], vec![2, 2, 0, 1]]).unwrap();
        let table = build_table(&a, 3, &DpConfig::default()).unwrap();
        for j in 0..table.layer_count() {
            let prefix = a.select_columns(&(0..=j).collect::<Vec<_>>()).unwrap();
            for (k, state) in table.layer_states(j).into_iter().enumerate() {
                let profile = table.realize(&a, j, k).unwrap();
                let mut sums = row_sums(&apply_profile(&prefix, &profile).unwrap());
                sums.sort_unstable();
                assert_eq!(sums, state.partial_sums);
                assert_eq!(state.columns_consumed, j + 1);
            }
        }
    }

    #[test]
    fn refuses_over_budget() {
        let a = Matrix::from_columns(vec![(0..12).collect(); 3]).unwrap();
        assert!(dp_gamma(&a).unwrap_err().is_budget());
        let b = Matrix::from_columns(vec![(0..5).collect(); 4]).unwrap();
        let tight = DpConfig {
            max_states: 3,
            max_arrangements: 1000,
        };
        assert!(dp_gamma_with(&b, &tight).unwrap_err().is_budget());
    }
}
