//! Sequential bottleneck matching for three columns, within a factor 2 of
//! gamma for nonnegative matrices.

use crate::approx::bottleneck::bottleneck_assignment_2d;
use crate::error::{Error, Result};
use crate::matrix::{
    shift_normalize, Matrix, MixResult, Objective, PermutationProfile, Rational, Status,
};

/// The `3m` entries of an `m × 3` matrix in row-major order; index `l` is
/// entry `(l / 3, l % 3)` and its class (R, G, B) is the column `l % 3`.
#[derive(Debug, Clone)]
pub struct TripartiteDistance {
    entries: Vec<i128>,
}

impl TripartiteDistance {
    pub fn new(a: &Matrix) -> Result<Self> {
        if a.cols() != 3 {
            return Err(Error::DimensionMismatch(format!(
                "tripartite distance needs d = 3, got {}",
                a.cols()
            )));
        }
        Ok(TripartiteDistance {
            entries: a.entries().to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 0 for R, 1 for G, 2 for B.
    pub fn class(&self, l: usize) -> usize {
        l % 3
    }

    pub fn dist(&self, i: usize, j: usize) -> Rational {
        debug_assert_ne!(
            self.class(i),
            self.class(j),
            "only evaluated across classes"
        );
        Rational::new(self.entries[i] + self.entries[j], 2)
    }

    /// `dist(i,j) + dist(j,k) + dist(k,i)`, i.e. the plain entry sum.
    pub fn triple_cost(&self, i: usize, j: usize, k: usize) -> Rational {
        self.dist(i, j) + self.dist(j, k) + self.dist(k, i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOrder {
    /// Match R with G, then the pairs with B.
    RgThenB,
    RbThenG,
    GbThenR,
}

impl StepOrder {
    /// (first, second, last) columns.
    fn columns(self) -> (usize, usize, usize) {
        match self {
            StepOrder::RgThenB => (0, 1, 2),
            StepOrder::RbThenG => (0, 2, 1),
            StepOrder::GbThenR => (1, 2, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoApproxConfig {
    pub orders: Vec<StepOrder>,
}

impl Default for TwoApproxConfig {
    fn default() -> Self {
        TwoApproxConfig {
            orders: vec![StepOrder::RgThenB],
        }
    }
}

pub fn two_approx_gamma_d3(a: &Matrix) -> Result<MixResult> {
    two_approx_gamma_d3_with(a, &TwoApproxConfig::default())
}

/// Matches two columns by minimum bottleneck pair sum, then matches the
/// resulting pairs to the third column by minimum bottleneck triple sum. The
/// best configured step order is reported. Negative inputs are shifted to a
/// zero minimum first; the profile carries over unchanged.
pub fn two_approx_gamma_d3_with(a: &Matrix, config: &TwoApproxConfig) -> Result<MixResult> {
    if a.cols() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "2-approximation needs d = 3, got {}",
            a.cols()
        )));
    }
    if config.orders.is_empty() {
        return Err(Error::InvalidArgument("no step order configured".into()));
    }
    let shifted = if a.min_entry() < 0 {
        shift_normalize(a).0
    } else {
        a.clone()
    };
    let dist = TripartiteDistance::new(&shifted)?;
    let m = a.rows();
    let mut best: Option<MixResult> = None;
    for &order in &config.orders {
        let (x, y, z) = order.columns();
        let index = |row: usize, col: usize| 3 * row + col;
        let pair_cost: Vec<Vec<i128>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let d = dist.dist(index(i, x), index(j, y));
                        (d * 2).to_integer()
                    })
                    .collect()
            })
            .collect();
        let (pairing, _) = bottleneck_assignment_2d(&pair_cost)?;
        let triple_cost: Vec<Vec<i128>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| {
                        dist.triple_cost(index(i, x), index(pairing[i], y), index(k, z))
                            .to_integer()
                    })
                    .collect()
            })
            .collect();
        let (completion, _) = bottleneck_assignment_2d(&triple_cost)?;
        let mut sources = vec![vec![0usize; m]; 3];
        for i in 0..m {
            sources[x][i] = i;
            sources[y][i] = pairing[i];
            sources[z][i] = completion[i];
        }
        let profile = PermutationProfile::from_sources(sources)?;
        let result = MixResult::from_profile(
            a,
            profile,
            Objective::Gamma,
            Status::RatioBound(Rational::from_integer(2)),
        )?;
        if best.as_ref().is_none_or(|b| result.value < b.value) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one order"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_gamma;
    use rand::{Rng, SeedableRng};

    #[test]
    fn consecutive_within_factor_two() {
        let a = Matrix::from_columns(vec![vec![1, 2, 3]; 3]).unwrap();
        let r = two_approx_gamma_d3(&a).unwrap();
        assert!((6..=12).contains(&r.value));
        assert_eq!(r.status, Status::RatioBound(Rational::from_integer(2)));
    }

    #[test]
    fn single_row_is_exact() {
        let a = Matrix::new(vec![vec![4, 0, 9]]).unwrap();
        assert_eq!(two_approx_gamma_d3(&a).unwrap().value, 13);
    }

    #[test]
    fn wrong_width() {
        let a = Matrix::new(vec![vec![1, 2]]).unwrap();
        assert!(two_approx_gamma_d3(&a).is_err());
    }

    #[test]
    fn distance_is_symmetric_and_satisfies_triangle_inequality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let m = rng.gen_range(1..=6);
            let a =
                Matrix::from_row_major(m, 3, (0..3 * m).map(|_| rng.gen_range(0..30)).collect())
                    .unwrap();
            let dist = TripartiteDistance::new(&a).unwrap();
            let n = dist.len();
            for i in 0..n {
                for j in 0..n {
                    if dist.class(i) == dist.class(j) {
                        continue;
                    }
                    assert_eq!(dist.dist(i, j), dist.dist(j, i));
                    for k in 0..n {
                        if dist.class(k) == dist.class(i) || dist.class(k) == dist.class(j) {
                            continue;
                        }
                        assert!(dist.dist(i, j) <= dist.dist(i, k) + dist.dist(k, j));
                    }
                }
            }
        }
    }

    #[test]
    fn random_instances_within_ratio() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let all = TwoApproxConfig {
            orders: vec![StepOrder::RgThenB, StepOrder::RbThenG, StepOrder::GbThenR],
        };
        for _ in 0..100 {
            let m = rng.gen_range(1..=5);
            let a =
                Matrix::from_row_major(m, 3, (0..3 * m).map(|_| rng.gen_range(0..10)).collect())
                    .unwrap();
            let gamma = brute_force_gamma(&a).unwrap().value;
            let single = two_approx_gamma_d3(&a).unwrap().value;
            let multi = two_approx_gamma_d3_with(&a, &all).unwrap().value;
            assert!(
                gamma <= multi && multi <= single && single <= 2 * gamma,
                "{a:?}"
            );
        }
    }

    #[test]
    fn negative_entries_are_shifted() {
        let a = Matrix::new(vec![vec![-3, 1, 0], vec![2, -1, 4]]).unwrap();
        let r = two_approx_gamma_d3(&a).unwrap();
        let gamma = brute_force_gamma(&a).unwrap().value;
        assert!(r.value >= gamma);
    }
}
