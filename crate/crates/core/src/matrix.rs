//! Exact integer matrices, per-column permutation profiles and the row-sum
//! functionals shared by every solver.
//!
//! Entries are stored as `i128` and bounded in magnitude by [`MAX_ENTRY`] at
//! ingestion, which leaves more than 20 bits of headroom for row sums and the
//! derived matrices (complement, shift) built from an ingested one.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible absolute entry of an ingested matrix.
pub const MAX_ENTRY: i128 = 1 << 100;

pub type Rational = Ratio<i128>;

/// An `m × d` matrix of exact integers.
///
/// `scale` and `shift` record the affine map back to the values the matrix
/// was built from: `stored = scale · original + shift`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
    scale: i128,
    shift: i128,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<i128>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::DimensionMismatch(
                "matrix needs at least one row".into(),
            ));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::DimensionMismatch(
                "matrix needs at least one column".into(),
            ));
        }
        let mut data = Vec::with_capacity(m * d);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {d}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Self::from_row_major(m, d, data)
    }

    pub fn from_columns(columns: Vec<Vec<i128>>) -> Result<Self> {
        let d = columns.len();
        if d == 0 {
            return Err(Error::DimensionMismatch(
                "matrix needs at least one column".into(),
            ));
        }
        let m = columns[0].len();
        if let Some(j) = columns.iter().position(|c| c.len() != m) {
            return Err(Error::DimensionMismatch(format!(
                "column {j} has {} entries, expected {m}",
                columns[j].len()
            )));
        }
        let mut data = vec![0; m * d];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * d + j] = v;
            }
        }
        Self::from_row_major(m, d, data)
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<i128>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| v.abs() > MAX_ENTRY) {
            return Err(Error::Overflow("matrix entry magnitude"));
        }
        Ok(Self::raw(rows, cols, data, 1, 0))
    }

    /// Scales rational entries by the least common multiple of their
    /// denominators and records that multiple as the scale.
    pub fn from_rationals(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let scale = rows
            .iter()
            .flatten()
            .try_fold(1i128, |acc, q| checked_lcm(acc, *q.denom()))?;
        Self::from_rationals_with_scale(rows, scale)
    }

    /// Like [`Matrix::from_rationals`] with a caller-declared scale; every
    /// entry times `scale` must be an integer.
    pub fn from_rationals_with_scale(rows: Vec<Vec<Rational>>, scale: i128) -> Result<Self> {
        if scale < 1 {
            return Err(Error::InvalidArgument(format!(
                "scale must be >= 1, got {scale}"
            )));
        }
        let scaled = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|q| {
                        if scale % q.denom() != 0 {
                            return Err(Error::InvalidArgument(format!(
                                "entry {q} is not a multiple of 1/{scale}"
                            )));
                        }
                        q.numer()
                            .checked_mul(scale / q.denom())
                            .ok_or(Error::Overflow("rational scaling"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut a = Self::new(scaled)?;
        a.scale = scale;
        Ok(a)
    }

    pub(crate) fn raw(rows: usize, cols: usize, data: Vec<i128>, scale: i128, shift: i128) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix {
            rows,
            cols,
            data,
            scale,
            shift,
        }
    }

    /// Same shape and metadata, new entries.
    pub(crate) fn with_data(&self, data: Vec<i128>) -> Self {
        Self::raw(self.rows, self.cols, data, self.scale, self.shift)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scale(&self) -> i128 {
        self.scale
    }

    pub fn shift(&self) -> i128 {
        self.shift
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i128>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[i128] {
        &self.data
    }

    pub fn max_entry(&self) -> i128 {
        *self.data.iter().max().expect("non-empty matrix")
    }

    pub fn min_entry(&self) -> i128 {
        *self.data.iter().min().expect("non-empty matrix")
    }

    pub fn total(&self) -> i128 {
        self.data.iter().sum()
    }

    /// Sorted distinct entries.
    pub fn distinct_values(&self) -> Vec<i128> {
        let mut v = self.data.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Maps a stored row sum (a sum over all `d` columns) back to original units.
    pub fn row_sum_to_original(&self, stored: i128) -> Rational {
        Rational::new(stored - self.shift * self.cols as i128, self.scale)
    }

    /// Maps a stored entry back to original units.
    pub fn entry_to_original(&self, stored: i128) -> Rational {
        Rational::new(stored - self.shift, self.scale)
    }

    /// Returns the matrix with columns in a new order; `order[k]` is the
    /// source column of output column `k`.
    pub fn select_columns(&self, order: &[usize]) -> Result<Matrix> {
        if let Some(&j) = order.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange {
                index: j,
                limit: self.cols,
            });
        }
        let d = order.len();
        if d == 0 {
            return Err(Error::DimensionMismatch("empty column selection".into()));
        }
        let mut data = Vec::with_capacity(self.rows * d);
        for i in 0..self.rows {
            data.extend(order.iter().map(|&j| self.get(i, j)));
        }
        Ok(Self::raw(self.rows, d, data, self.scale, self.shift))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Matrix> {
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: self.rows,
            });
        }
        if rows.is_empty() {
            return Err(Error::DimensionMismatch("empty row selection".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        Ok(Self::raw(
            rows.len(),
            self.cols,
            data,
            self.scale,
            self.shift,
        ))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matrix")
            .field("rows", &self.to_rows())
            .field("scale", &self.scale)
            .field("shift", &self.shift)
            .finish()
    }
}

fn checked_lcm(a: i128, b: i128) -> Result<i128> {
    let g = a.gcd(&b);
    (a / g)
        .checked_mul(b)
        .ok_or(Error::Overflow("denominator lcm"))
}

/// One permutation per column. `perm(j)[k]` is the row that source row `k`
/// of column `j` moves to, so `A^Π[perm(j)[k]][j] = A[k][j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PermutationProfile {
    perms: Vec<Vec<usize>>,
}

impl PermutationProfile {
    pub fn new(perms: Vec<Vec<usize>>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::DimensionMismatch(
                "profile needs at least one column".into(),
            ));
        }
        let m = perms[0].len();
        for (j, p) in perms.iter().enumerate() {
            if p.len() != m {
                return Err(Error::InvalidPermutation {
                    column: j,
                    reason: format!("length {} differs from {m}", p.len()),
                });
            }
            let mut seen = vec![false; m];
            for &k in p {
                if k >= m || seen[k] {
                    return Err(Error::InvalidPermutation {
                        column: j,
                        reason: format!("{k} is out of range or repeated"),
                    });
                }
                seen[k] = true;
            }
        }
        Ok(PermutationProfile { perms })
    }

    pub fn identity(m: usize, d: usize) -> Self {
        PermutationProfile {
            perms: vec![(0..m).collect(); d],
        }
    }

    /// Builds a profile from per-column placements: `sources[j][i]` is the
    /// source row whose entry ends up in row `i` of column `j`.
    pub fn from_sources(sources: Vec<Vec<usize>>) -> Result<Self> {
        let inverted = sources.iter().map(|s| invert(s)).collect();
        Self::new(inverted)
    }

    pub fn rows(&self) -> usize {
        self.perms[0].len()
    }

    pub fn cols(&self) -> usize {
        self.perms.len()
    }

    pub fn perm(&self, j: usize) -> &[usize] {
        &self.perms[j]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    /// `sources(j)[i]` is the source row placed in row `i` of column `j`.
    pub fn sources(&self, j: usize) -> Vec<usize> {
        invert(&self.perms[j])
    }

    /// The profile `Π ∘ Σ`: first apply `self`, then `next`.
    pub fn then(&self, next: &PermutationProfile) -> Result<Self> {
        check_shape(self.rows(), self.cols(), next)?;
        let perms = self
            .perms
            .iter()
            .zip(&next.perms)
            .map(|(first, second)| first.iter().map(|&k| second[k]).collect())
            .collect();
        Ok(PermutationProfile { perms })
    }
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![usize::MAX; p.len()];
    for (k, &i) in p.iter().enumerate() {
        if i < inv.len() {
            inv[i] = k;
        }
    }
    inv
}

fn check_shape(m: usize, d: usize, profile: &PermutationProfile) -> Result<()> {
    if profile.rows() != m || profile.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "profile is {}x{}, matrix is {m}x{d}",
            profile.rows(),
            profile.cols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Gamma,
    Beta,
    Mixability,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Gamma => "gamma",
            Objective::Beta => "beta",
            Objective::Mixability => "mixability",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Exact,
    HeuristicLowerBound,
    HeuristicUpperBound,
    RatioBound(Rational),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Exact => f.write_str("exact"),
            Status::HeuristicLowerBound => f.write_str("heuristic_lower_bound"),
            Status::HeuristicUpperBound => f.write_str("heuristic_upper_bound"),
            Status::RatioBound(r) => write!(f, "ratio_bound({r})"),
        }
    }
}

/// A solver answer together with the profile that witnesses it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixResult {
    pub objective: Objective,
    pub value: i128,
    pub profile: PermutationProfile,
    pub status: Status,
    pub row_sums: Vec<i128>,
}

impl MixResult {
    /// Evaluates `profile` on `a`; the value is the max row sum for gamma and
    /// mixability, the min row sum for beta.
    pub fn from_profile(
        a: &Matrix,
        profile: PermutationProfile,
        objective: Objective,
        status: Status,
    ) -> Result<Self> {
        let sums = row_sums(&apply_profile(a, &profile)?);
        let value = match objective {
            Objective::Beta => *sums.iter().min().expect("m >= 1"),
            Objective::Gamma | Objective::Mixability => *sums.iter().max().expect("m >= 1"),
        };
        Ok(MixResult {
            objective,
            value,
            profile,
            status,
            row_sums: sums,
        })
    }

    pub fn is_constant(&self) -> bool {
        self.row_sums.windows(2).all(|w| w[0] == w[1])
    }
}

pub fn apply_profile(a: &Matrix, profile: &PermutationProfile) -> Result<Matrix> {
    check_shape(a.rows(), a.cols(), profile)?;
    let d = a.cols();
    let mut data = vec![0; a.entries().len()];
    for (j, perm) in profile.perms().iter().enumerate() {
        for (k, &i) in perm.iter().enumerate() {
            data[i * d + j] = a.get(k, j);
        }
    }
    Ok(a.with_data(data))
}

pub fn row_sums(a: &Matrix) -> Vec<i128> {
    (0..a.rows()).map(|i| a.row(i).iter().sum()).collect()
}

/// The common row sum a completely mixable matrix must reach, if `m`
/// divides the grand total.
pub fn target_row_sum(a: &Matrix) -> Option<i128> {
    let total = a.total();
    let m = a.rows() as i128;
    (total % m == 0).then(|| total / m)
}

/// Returns `(l − A, l)` with `l` the largest entry.
pub fn complement(a: &Matrix) -> (Matrix, i128) {
    let l = a.max_entry();
    let data = a.entries().iter().map(|&v| l - v).collect();
    (
        Matrix::raw(a.rows(), a.cols(), data, a.scale(), l - a.shift()),
        l,
    )
}

pub fn beta_from_gamma(gamma_of_complement: i128, d: usize, l: i128) -> i128 {
    d as i128 * l - gamma_of_complement
}

/// True iff some common ordering sorts `x` ascending and `y` descending.
pub fn oppositely_ordered(x: &[i128], y: &[i128]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].cmp(&x[b]).then(y[b].cmp(&y[a])));
    Ok(idx.windows(2).all(|w| y[w[0]] >= y[w[1]]))
}

pub fn drop_column(a: &Matrix, j: usize) -> Result<Matrix> {
    if a.cols() < 2 {
        return Err(Error::DimensionMismatch(
            "cannot drop the only column".into(),
        ));
    }
    if j >= a.cols() {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: a.cols(),
        });
    }
    let order: Vec<usize> = (0..a.cols()).filter(|&k| k != j).collect();
    a.select_columns(&order)
}

/// Inserts `column` so that it becomes column `j` of the result.
pub fn insert_column(a: &Matrix, j: usize, column: &[i128]) -> Result<Matrix> {
    if j > a.cols() {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: a.cols() + 1,
        });
    }
    if column.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "column of length {} for {} rows",
            column.len(),
            a.rows()
        )));
    }
    let d = a.cols() + 1;
    let mut data = Vec::with_capacity(a.rows() * d);
    for (i, &c) in column.iter().enumerate() {
        let row = a.row(i);
        data.extend_from_slice(&row[..j]);
        data.push(c);
        data.extend_from_slice(&row[j..]);
    }
    Ok(Matrix::raw(a.rows(), d, data, a.scale(), a.shift()))
}

/// Adds `μ = −min(A)` to every entry so the smallest entry becomes zero.
pub fn shift_normalize(a: &Matrix) -> (Matrix, i128) {
    let mu = -a.min_entry();
    let data = a.entries().iter().map(|&v| v + mu).collect();
    (
        Matrix::raw(a.rows(), a.cols(), data, a.scale(), a.shift() + mu),
        mu,
    )
}

/// Formats an exact rational as a terminating decimal when possible and as
/// `p/q` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.denom() == &1 {
        return q.numer().to_string();
    }
    let mut den = *q.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let digits = twos.max(fives);
    let Some(factor) = 10i128.checked_pow(digits) else {
        return format!("{}/{}", q.numer(), q.denom());
    };
    let Some(scaled) = q.numer().checked_mul(factor / q.denom()) else {
        return format!("{}/{}", q.numer(), q.denom());
    };
    let sign = if scaled.is_negative() { "-" } else { "" };
    let abs = scaled.abs();
    let int = abs / factor;
    let frac = abs % factor;
    format!("{sign}{int}.{frac:0width$}", width = digits as usize)
}

/// Parses an integer, a decimal like `-1.25`, or a fraction `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: i128 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| bad())?,
        };
        let den = 10i128
            .checked_pow(frac.len() as u32)
            .ok_or(Error::Overflow("decimal fraction"))?;
        let frac_part: i128 = frac.parse().map_err(|_| bad())?;
        let magnitude = int_part
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_part))
            .ok_or(Error::Overflow("decimal value"))?;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, den));
    }
    s.parse::<i128>()
        .map(Rational::from_integer)
        .map_err(|_| bad())
}
