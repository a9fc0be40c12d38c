//! Instance generators with certified structure: glueing of constant-row-sum
//! matrices, consecutive-integer matrices and their closed-form optimum, the
//! instance that traps the swapping heuristic, and reduction instances from
//! number partitioning and numerical 3-dimensional matching.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{apply_profile, row_sums, Matrix, PermutationProfile};

fn constant_row_sum(a: &Matrix) -> Result<i128> {
    let sums = row_sums(a);
    if sums.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::NonConstantRowSums);
    }
    Ok(sums[0])
}

/// Block matrix `C[m2·i + k][d2·j + l] = A[i][j] + B[k][l]`; every row sums
/// to `d2·σ_A + d1·σ_B`.
pub fn glue(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let sigma_a = constant_row_sum(a)?;
    let sigma_b = constant_row_sum(b)?;
    let (m1, d1, m2, d2) = (a.rows(), a.cols(), b.rows(), b.cols());
    let (m, d) = (m1 * m2, d1 * d2);
    let mut data = vec![0; m * d];
    for i in 0..m1 {
        for j in 0..d1 {
            for k in 0..m2 {
                for l in 0..d2 {
                    data[(m2 * i + k) * d + d2 * j + l] = a.get(i, j) + b.get(k, l);
                }
            }
        }
    }
    let c = Matrix::from_row_major(m, d, data)?;
    debug_assert!(row_sums(&c)
        .iter()
        .all(|&s| s == d2 as i128 * sigma_a + d1 as i128 * sigma_b));
    Ok(c)
}

/// Column-aligned glue of two matrices with the same column count:
/// `C[m2·i + k][j] = A[i][j] + B[k][j]`, every row summing to `σ_A + σ_B`.
pub fn glue_stacked(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let sigma_a = constant_row_sum(a)?;
    let sigma_b = constant_row_sum(b)?;
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "stacked glue needs equal column counts, got {} and {}",
            a.cols(),
            b.cols()
        )));
    }
    let (m1, m2, d) = (a.rows(), b.rows(), a.cols());
    let mut data = Vec::with_capacity(m1 * m2 * d);
    for i in 0..m1 {
        for k in 0..m2 {
            data.extend((0..d).map(|j| a.get(i, j) + b.get(k, j)));
        }
    }
    let c = Matrix::from_row_major(m1 * m2, d, data)?;
    debug_assert!(row_sums(&c).iter().all(|&s| s == sigma_a + sigma_b));
    Ok(c)
}

/// A `(N, d)` consecutive integers matrix: every column a permutation of `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsecutiveSpec {
    pub n: usize,
    pub d: usize,
    /// Applied to the identity-ordered matrix; `None` keeps the identity.
    pub profile: Option<PermutationProfile>,
}

impl ConsecutiveSpec {
    pub fn identity(n: usize, d: usize) -> Self {
        ConsecutiveSpec {
            n,
            d,
            profile: None,
        }
    }

    /// Column 0 in order, the other columns shuffled by `seed`.
    pub fn random(n: usize, d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perms = vec![(0..n).collect::<Vec<_>>()];
        for _ in 1..d {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            perms.push(p);
        }
        ConsecutiveSpec {
            n,
            d,
            profile: PermutationProfile::new(perms).ok(),
        }
    }
}

pub fn consecutive_matrix(spec: &ConsecutiveSpec) -> Result<Matrix> {
    if spec.n == 0 || spec.d == 0 {
        return Err(Error::InvalidArgument("N and d must be at least 1".into()));
    }
    let column: Vec<i128> = (1..=spec.n as i128).collect();
    let a = Matrix::from_columns(vec![column; spec.d])?;
    match &spec.profile {
        Some(p) => apply_profile(&a, p),
        None => Ok(a),
    }
}

/// The common row sum `d(d^k + 1)/2` of a mixed `(d^k, d)` consecutive matrix.
pub fn a_d_k(d: usize, k: usize) -> Result<i128> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidArgument("d and k must be at least 1".into()));
    }
    let d = d as i128;
    let power = d.checked_pow(k as u32).ok_or(Error::Overflow("d^k"))?;
    let twice = d.checked_mul(power + 1).ok_or(Error::Overflow("a_d(k)"))?;
    Ok(twice / 2)
}

/// Limit on `d^k` rows for the recursive construction.
pub const DEFAULT_MAX_CONSTRUCTION_ROWS: usize = 1 << 20;

/// The `(d^k, d)` consecutive matrix rearranged to constant row sums
/// `a_d(k)`, with the profile taking the identity-ordered matrix to it.
///
/// Starts from the cyclic `d × d` matrix with entries `((i + j) mod d) + 1`
/// and repeatedly stacks it with the scaled cyclic block
/// `d^level · ((i + j) mod d)`, which keeps every column a permutation of
/// `1..=d^(level+1)`.
pub fn mixable_consecutive_construction(
    d: usize,
    k: usize,
    max_rows: usize,
) -> Result<(Matrix, PermutationProfile)> {
    if d < 2 || k < 1 {
        return Err(Error::InvalidArgument("need d >= 2 and k >= 1".into()));
    }
    let rows = (d as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if rows > max_rows as u128 {
        return Err(Error::BudgetExceeded {
            what: "construction row",
            needed: rows,
            limit: max_rows as u128,
        });
    }
    let cyclic = |scale: i128, offset: i128| -> Result<Matrix> {
        Matrix::new(
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| scale * ((i + j) % d) as i128 + offset)
                        .collect()
                })
                .collect(),
        )
    };
    let mut mixed = cyclic(1, 1)?;
    let mut scale = d as i128;
    for _ in 1..k {
        mixed = glue_stacked(&mixed, &cyclic(scale, 0)?)?;
        scale *= d as i128;
    }
    // identity-ordered row r holds value r + 1 in every column
    let sources = (0..d)
        .map(|j| mixed.column(j).iter().map(|&v| (v - 1) as usize).collect())
        .collect();
    let profile = PermutationProfile::from_sources(sources)?;
    Ok((mixed, profile))
}

/// `(a_d(⌊log_d N⌋), a_d(⌈log_d N⌉))`, bracketing beta and gamma of any
/// `(N, d)` consecutive matrix.
pub fn consecutive_bounds(n: usize, d: usize) -> Result<(i128, i128)> {
    if d < 2 || n < d {
        return Err(Error::InvalidArgument(format!(
            "bounds need d >= 2 and N >= d, got N = {n}, d = {d}"
        )));
    }
    let mut floor_log = 0usize;
    let mut power = 1usize;
    while power.checked_mul(d).is_some_and(|p| p <= n) {
        power *= d;
        floor_log += 1;
    }
    let ceil_log = if power == n { floor_log } else { floor_log + 1 };
    Ok((a_d_k(d, floor_log)?, a_d_k(d, ceil_log)?))
}

/// The `(N, 3)` consecutive matrix with every column in increasing order.
pub fn adversarial_identity(n: usize) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::InvalidArgument("N must be at least 2".into()));
    }
    consecutive_matrix(&ConsecutiveSpec::identity(n, 3))
}

/// `(n_1 … n_d; 0 … 0)`: completely mixable iff the values split into two
/// halves of equal sum.
pub fn partition_instance(values: &[i128]) -> Result<Matrix> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "partition needs at least one value".into(),
        ));
    }
    Matrix::new(vec![values.to_vec(), vec![0; values.len()]])
}

/// Three equal-length sequences as the columns of an `m × 3` matrix.
pub fn n3dm_instance(first: &[i128], second: &[i128], third: &[i128]) -> Result<Matrix> {
    if first.len() != second.len() || first.len() != third.len() {
        return Err(Error::DimensionMismatch(format!(
            "sequences of length {}, {}, {}",
            first.len(),
            second.len(),
            third.len()
        )));
    }
    Matrix::from_columns(vec![first.to_vec(), second.to_vec(), third.to_vec()])
}

/// Multiplier `max(2·d·a*, K) + 1` for [`additive_stress`].
pub fn stress_multiplier(a: &Matrix, k: i128) -> i128 {
    (2 * a.cols() as i128 * a.max_entry()).max(k) + 1
}

/// Appends the column `(K′, 2K′, …, mK′)`; for large `K′` the row sums are
/// pulled apart so that any additive approximation of gamma within `K`
/// decides mixability of `A`.
pub fn additive_stress(a: &Matrix, k_prime: i128) -> Result<Matrix> {
    let column: Vec<i128> = (1..=a.rows() as i128).map(|i| i * k_prime).collect();
    let mut columns = a.columns();
    columns.push(column);
    Matrix::from_columns(columns)
}
