//! Linear-time complete mixability for 0/1 matrices by defect balancing, and
//! its two-value generalization.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MixResult, Objective, PermutationProfile, Status};

/// Per-row defects `δ(i) = r − rowsum(i)` and their absolute sum `φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectLedger {
    pub target: i128,
    pub defects: Vec<i128>,
    pub total_defect: i128,
}

impl DefectLedger {
    fn new(target: i128, sums: &[i128]) -> Self {
        let defects: Vec<i128> = sums.iter().map(|s| target - s).collect();
        let total_defect = defects.iter().map(|d| d.abs()).sum();
        DefectLedger {
            target,
            defects,
            total_defect,
        }
    }
}

/// Work counters of one balancing run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BalanceStats {
    pub swaps: usize,
    /// Row visits plus swaps; bounded by `2·m·d`.
    pub steps: usize,
    pub phi_history: Vec<i128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroOneOutcome {
    Mixable {
        result: MixResult,
        stats: BalanceStats,
    },
    /// `m` does not divide the number of ones.
    NotMixable { total: i128, rows: usize },
}

impl ZeroOneOutcome {
    pub fn is_mixable(&self) -> bool {
        matches!(self, ZeroOneOutcome::Mixable { .. })
    }
}

pub fn zero_one_mixability(a: &Matrix) -> Result<ZeroOneOutcome> {
    for i in 0..a.rows() {
        for (j, &v) in a.row(i).iter().enumerate() {
            if v != 0 && v != 1 {
                return Err(Error::NotBinary {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    let total = a.total();
    let m = a.rows() as i128;
    if total % m != 0 {
        return Ok(ZeroOneOutcome::NotMixable {
            total,
            rows: a.rows(),
        });
    }
    let (sources, stats) = balance(a, total / m);
    let profile = PermutationProfile::from_sources(sources)?;
    let result = MixResult::from_profile(a, profile, Objective::Mixability, Status::Exact)?;
    Ok(ZeroOneOutcome::Mixable { result, stats })
}

/// Runs the column sweep on a 0/1 matrix whose total is `m·r`. Returns the
/// per-column source rows of the balanced arrangement.
///
/// For each column after the first, rows still short of `r` that hold a 0
/// are paired with rows above `r` that hold a 1, largest shortfall with
/// largest excess, and the two entries are exchanged. Each exchange lowers
/// `φ` by 2 and a single sweep ends at `φ = 0`.
fn balance(a: &Matrix, r: i128) -> (Vec<Vec<usize>>, BalanceStats) {
    let (m, d) = (a.rows(), a.cols());
    let mut columns = a.columns();
    let mut sources: Vec<Vec<usize>> = vec![(0..m).collect(); d];
    let sums: Vec<i128> = (0..m).map(|i| a.row(i).iter().sum()).collect();
    let mut ledger = DefectLedger::new(r, &sums);
    let mut stats = BalanceStats {
        phi_history: vec![ledger.total_defect],
        ..Default::default()
    };

    for j in 1..d {
        if ledger.total_defect == 0 {
            break;
        }
        let column = &mut columns[j];
        let mut short: Vec<usize> = Vec::new();
        let mut over: Vec<usize> = Vec::new();
        for (i, &bit) in column.iter().enumerate() {
            stats.steps += 1;
            let delta = ledger.defects[i];
            if delta > 0 && bit == 0 {
                short.push(i);
            } else if delta < 0 && bit == 1 {
                over.push(i);
            }
        }
        let t = short.len().min(over.len());
        if t == 0 {
            continue;
        }
        short.sort_by_key(|&i| (-ledger.defects[i], i));
        over.sort_by_key(|&i| (ledger.defects[i], i));
        let before = ledger.total_defect;
        for (&s, &o) in short.iter().zip(&over).take(t) {
            column.swap(s, o);
            sources[j].swap(s, o);
            ledger.defects[s] -= 1;
            ledger.defects[o] += 1;
            stats.steps += 1;
            stats.swaps += 1;
        }
        ledger.total_defect = ledger.defects.iter().map(|d| d.abs()).sum();
        assert_eq!(
            ledger.total_defect,
            before - 2 * t as i128,
            "each exchange must lower the total defect by 2"
        );
        stats.phi_history.push(ledger.total_defect);
    }
    assert_eq!(
        ledger.total_defect, 0,
        "sweep must end balanced when m divides the total"
    );
    (sources, stats)
}

/// Exact gamma for a matrix with at most two distinct values `a < b`.
///
/// Entries map to bits; the best achievable maximum number of `b` entries per
/// row is `⌈T/m⌉` for `T` such entries, reached by balancing the bit matrix
/// extended with a helper column of `m − (T mod m)` ones that is discarded
/// afterwards.
pub fn two_value_gamma(a: &Matrix) -> Result<MixResult> {
    let values = a.distinct_values();
    let (m, d) = (a.rows(), a.cols());
    if values.len() > 2 {
        return Err(Error::TooManyValues(values.len()));
    }
    if values.len() == 1 {
        return MixResult::from_profile(
            a,
            PermutationProfile::identity(m, d),
            Objective::Gamma,
            Status::Exact,
        );
    }
    let high = values[1];
    let mut bits: Vec<Vec<i128>> = a
        .columns()
        .into_iter()
        .map(|c| c.into_iter().map(|v| i128::from(v == high)).collect())
        .collect();
    let ones: i128 = bits.iter().flatten().sum();
    let leftover = (ones % m as i128) as usize;
    let padded = leftover != 0;
    if padded {
        let fill = m - leftover;
        bits.push((0..m).map(|i| i128::from(i < fill)).collect());
    }
    let bit_matrix = Matrix::from_columns(bits)?;
    let target = bit_matrix.total() / m as i128;
    let (mut sources, _) = balance(&bit_matrix, target);
    if padded {
        sources.pop();
    }
    let profile = PermutationProfile::from_sources(sources)?;
    MixResult::from_profile(a, profile, Objective::Gamma, Status::Exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute::brute_force_gamma;

    fn mat(rows: &[&[i128]]) -> Matrix {
        Matrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn already_balanced() {
        let out = zero_one_mixability(&mat(&[&[1, 0], &[0, 1]])).unwrap();
        let ZeroOneOutcome::Mixable { result, stats } = out else {
            panic!("expected mixable")
        };
        assert_eq!(result.row_sums, vec![1, 1]);
        assert_eq!(stats.swaps, 0);
    }

    #[test]
    fn one_swap_in_second_column() {
        let a = mat(&[&[1, 1], &[0, 0]]);
        let ZeroOneOutcome::Mixable { result, stats } = zero_one_mixability(&a).unwrap() else {
            panic!("expected mixable")
        };
        assert_eq!(stats.swaps, 1);
        assert_eq!(stats.phi_history, vec![2, 0]);
        let arranged = crate::matrix::apply_profile(&a, &result.profile).unwrap();
        assert_eq!(arranged.to_rows(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(brute_force_gamma(&a).unwrap().value, 1);
    }

    #[test]
    fn odd_total_is_not_mixable() {
        assert_eq!(
            zero_one_mixability(&mat(&[&[1], &[0]])).unwrap(),
            ZeroOneOutcome::NotMixable { total: 1, rows: 2 }
        );
    }

    #[test]
    fn rejects_non_binary() {
        assert!(matches!(
            zero_one_mixability(&mat(&[&[1, 2]])),
            Err(Error::NotBinary {
                row: 0,
                col: 1,
                value: 2
            })
        ));
    }

    #[test]
    fn two_value_examples() {
        assert_eq!(
            two_value_gamma(&mat(&[&[5, 5], &[5, 5]])).unwrap().value,
            10
        );
        let a = mat(&[&[7, 3], &[3, 7]]);
        assert_eq!(two_value_gamma(&a).unwrap().value, 10);
        assert_eq!(brute_force_gamma(&a).unwrap().value, 10);
        assert_eq!(two_value_gamma(&mat(&[&[7], &[3]])).unwrap().value, 7);
        assert!(matches!(
            two_value_gamma(&mat(&[&[1, 2, 3]])),
            Err(Error::TooManyValues(3))
        ));
    }

    #[test]
    fn two_value_with_remainder() {
        // three ones over two rows: best is two in one row
        let a = mat(&[&[1, 1, 1], &[0, 0, 0]]);
        let g = two_value_gamma(&a).unwrap();
        assert_eq!(g.value, 2);
        assert_eq!(brute_force_gamma(&a).unwrap().value, 2);
    }
}
