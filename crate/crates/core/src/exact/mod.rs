//! Exact solvers: exhaustive enumeration, the fixed-`m` dynamic program,
//! 0/1 and two-value balancing, and the explicit two-column pairing.

pub mod brute;
pub mod dp;
pub mod zero_one;

pub use brute::{
    brute_force_beta, brute_force_beta_with, brute_force_gamma, brute_force_gamma_with,
    BruteForceConfig,
};
pub use dp::{dp_gamma, dp_gamma_with, dp_is_mixable, DpConfig, DpState, DpTable};
pub use zero_one::{
    two_value_gamma, zero_one_mixability, BalanceStats, DefectLedger, ZeroOneOutcome,
};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MixResult, Objective, PermutationProfile, Status};

/// Gamma of a two-column matrix: column 1 is laid against column 0 in
/// opposite order, largest beside smallest.
pub fn gamma_two_columns(a: &Matrix) -> Result<MixResult> {
    if a.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "two-column solver needs d = 2, got {}",
            a.cols()
        )));
    }
    let m = a.rows();
    let (first, second) = (a.column(0), a.column(1));
    let mut by_first: Vec<usize> = (0..m).collect();
    by_first.sort_by_key(|&i| (first[i], i));
    let mut by_second_desc: Vec<usize> = (0..m).collect();
    by_second_desc.sort_by_key(|&k| (std::cmp::Reverse(second[k]), k));
    let mut sources = vec![0usize; m];
    for (&row, &src) in by_first.iter().zip(&by_second_desc) {
        sources[row] = src;
    }
    let profile = PermutationProfile::from_sources(vec![(0..m).collect(), sources])?;
    MixResult::from_profile(a, profile, Objective::Gamma, Status::Exact)
}
