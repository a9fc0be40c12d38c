//! Dependence-uncertainty bounds on a quantile of a sum of risks, from
//! discretized marginals and extremal row sums of tail quantile matrices.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{brute_force_beta, brute_force_gamma, dp_gamma};
use crate::matrix::{beta_from_gamma, complement, Matrix, MixResult, Objective, Rational, Status};
use crate::swapping::{randomized_beta, randomized_gamma};

/// Quantiles `q_r = F⁻¹(r/N)` for `r = 0..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMarginal {
    quantiles: Vec<Rational>,
}

impl DiscreteMarginal {
    pub fn from_quantiles(quantiles: Vec<Rational>) -> Result<Self> {
        if quantiles.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need N >= 1, i.e. at least two quantiles, got {}",
                quantiles.len()
            )));
        }
        if let Some(r) = quantiles.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::NonMonotoneQuantiles(r + 1));
        }
        Ok(DiscreteMarginal { quantiles })
    }

    /// Evaluates the quantile function at `r/N`.
    pub fn from_fn(n: usize, quantile: impl Fn(Rational) -> Rational) -> Result<Self> {
        let n_i = n as i128;
        Self::from_quantiles(
            (0..=n_i)
                .map(|r| quantile(Rational::new(r, n_i.max(1))))
                .collect(),
        )
    }

    /// Empirical quantiles of a sample: `q_r` is the smallest sample value
    /// whose empirical CDF reaches `r/N`.
    pub fn from_samples(samples: &[Rational], n: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("no samples".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort();
        let len = sorted.len() as i128;
        Self::from_fn(n, |p| {
            let k = (p * len).ceil().to_integer().max(1);
            sorted[(k - 1).min(len - 1) as usize]
        })
    }

    /// Uniform distribution on `{0, …, N}` discretized at `N`: `q_r = r`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_quantiles((0..=n as i128).map(Rational::from_integer).collect())
    }

    pub fn n(&self) -> usize {
        self.quantiles.len() - 1
    }

    pub fn quantiles(&self) -> &[Rational] {
        &self.quantiles
    }

    pub fn quantile(&self, r: usize) -> Rational {
        self.quantiles[r]
    }

    /// Step CDF built from `q_0 … q_{N−1}`, each with mass `1/N`; bounds `F` from above.
    pub fn cdf_underline(&self, x: Rational) -> Rational {
        self.step_cdf(&self.quantiles[..self.n()], x)
    }

    /// Step CDF built from `q_1 … q_N`; bounds `F` from below.
    pub fn cdf_overline(&self, x: Rational) -> Rational {
        self.step_cdf(&self.quantiles[1..], x)
    }

    fn step_cdf(&self, steps: &[Rational], x: Rational) -> Rational {
        let count = steps.iter().filter(|&&q| q <= x).count();
        Rational::new(count as i128, self.n() as i128)
    }
}

/// Which quantile indices may feed a tail matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailRows {
    /// `0..=N`
    Full,
    /// `0..=N−1`
    Underline,
    /// `1..=N`
    #[default]
    Overline,
}

impl TailRows {
    fn range(self, n: usize) -> (usize, usize) {
        match self {
            TailRows::Full => (0, n),
            TailRows::Underline => (0, n - 1),
            TailRows::Overline => (1, n),
        }
    }
}

/// The `(N+1) × d` or sub-range quantile matrix, rows `r_lo..=r_hi`.
pub fn quantile_matrix(marginals: &[DiscreteMarginal], r_lo: usize, r_hi: usize) -> Result<Matrix> {
    let n = common_n(marginals)?;
    if r_lo > r_hi || r_hi > n {
        return Err(Error::InvalidArgument(format!(
            "row range {r_lo}..={r_hi} outside 0..={n}"
        )));
    }
    let rows = (r_lo..=r_hi)
        .map(|r| marginals.iter().map(|m| m.quantile(r)).collect())
        .collect();
    Matrix::from_rationals(rows)
}

fn common_n(marginals: &[DiscreteMarginal]) -> Result<usize> {
    let first = marginals
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no marginals".into()))?;
    if let Some(j) = marginals.iter().position(|m| m.n() != first.n()) {
        return Err(Error::DimensionMismatch(format!(
            "marginal {j} has N = {}, marginal 0 has N = {}",
            marginals[j].n(),
            first.n()
        )));
    }
    Ok(first.n())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSolver {
    Brute,
    Dp,
    Swapping { restarts: usize, seed: u64 },
}

impl fmt::Display for VarSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarSolver::Brute => f.write_str("brute"),
            VarSolver::Dp => f.write_str("dp"),
            VarSolver::Swapping { .. } => f.write_str("swap"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarBoundsConfig {
    pub solver: VarSolver,
    pub upper_rows: TailRows,
    pub lower_rows: TailRows,
}

impl VarBoundsConfig {
    pub fn new(solver: VarSolver) -> Self {
        VarBoundsConfig {
            solver,
            upper_rows: TailRows::Overline,
            lower_rows: TailRows::Underline,
        }
    }
}

/// One side of the interval: the tail matrix rows, its solver result and the
/// bound in the marginals' units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailBound {
    pub rows: (usize, usize),
    pub value: Rational,
    pub status: Status,
    pub matrix: Matrix,
    pub result: MixResult,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarBoundReport {
    pub alpha: Rational,
    pub solver: VarSolver,
    pub lower: TailBound,
    pub upper: TailBound,
}

impl VarBoundReport {
    pub fn interval(&self) -> (Rational, Rational) {
        (self.lower.value, self.upper.value)
    }
}

/// Upper side: `β` of the rows with `r/N ≥ α`. Lower side: `γ` of the rows
/// with `r/N ≤ α`. With the swapping solver the sides are a lower bound on
/// `β` and an upper bound on `γ`, which narrows the interval.
pub fn var_bounds(
    marginals: &[DiscreteMarginal],
    alpha: Rational,
    config: &VarBoundsConfig,
) -> Result<VarBoundReport> {
    if alpha < Rational::from_integer(0) || alpha > Rational::from_integer(1) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    let n = common_n(marginals)?;
    let n_i = n as i128;
    let scaled = alpha * n_i;
    let (ulo, uhi) = config.upper_rows.range(n);
    let upper_rows = (ulo.max(scaled.ceil().to_integer() as usize), uhi);
    let (llo, lhi) = config.lower_rows.range(n);
    let lower_rows = (llo, lhi.min(scaled.floor().to_integer() as usize));
    for (side, (lo, hi)) in [("upper", upper_rows), ("lower", lower_rows)] {
        if lo > hi {
            return Err(Error::EmptySelection(format!(
                "{side} tail is empty for alpha = {alpha}, N = {n}"
            )));
        }
    }
    let upper = solve_side(marginals, upper_rows, Objective::Beta, config.solver)?;
    let lower = solve_side(marginals, lower_rows, Objective::Gamma, config.solver)?;
    Ok(VarBoundReport {
        alpha,
        solver: config.solver,
        lower,
        upper,
    })
}

fn solve_side(
    marginals: &[DiscreteMarginal],
    rows: (usize, usize),
    objective: Objective,
    solver: VarSolver,
) -> Result<TailBound> {
    let matrix = quantile_matrix(marginals, rows.0, rows.1)?;
    let result = match (solver, objective) {
        (VarSolver::Brute, Objective::Beta) => brute_force_beta(&matrix)?,
        (VarSolver::Brute, _) => brute_force_gamma(&matrix)?,
        (VarSolver::Dp, Objective::Beta) => {
            let (comp, l) = complement(&matrix);
            let g = dp_gamma(&comp)?;
            let r = MixResult::from_profile(&matrix, g.profile, Objective::Beta, Status::Exact)?;
            debug_assert_eq!(r.value, beta_from_gamma(g.value, matrix.cols(), l));
            r
        }
        (VarSolver::Dp, _) => dp_gamma(&matrix)?,
        (VarSolver::Swapping { restarts, seed }, Objective::Beta) => {
            randomized_beta(&matrix, restarts, seed)?
        }
        (VarSolver::Swapping { restarts, seed }, _) => randomized_gamma(&matrix, restarts, seed)?,
    };
    Ok(TailBound {
        rows,
        value: matrix.row_sum_to_original(result.value),
        status: result.status,
        matrix,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn q(v: i128) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn uniform_quantiles() {
        let u = DiscreteMarginal::uniform(5).unwrap();
        assert_eq!(u.quantiles(), (0..=5).map(q).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn point_mass_views_coincide() {
        let c = DiscreteMarginal::from_fn(4, |_| Rational::new(7, 2)).unwrap();
        for x in [q(0), q(3), Rational::new(7, 2), q(4)] {
            assert_eq!(c.cdf_underline(x), c.cdf_overline(x));
        }
    }

    #[test]
    fn step_views_differ_by_at_most_one_step() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = rng.gen_range(1..10);
            let mut qs: Vec<Rational> = (0..=n)
                .map(|_| Rational::new(rng.gen_range(-20..20), 3))
                .collect();
            qs.sort();
            let marg = DiscreteMarginal::from_quantiles(qs).unwrap();
            for x in (-25..25).map(|k| Rational::new(k, 3)) {
                let diff = marg.cdf_underline(x) - marg.cdf_overline(x);
                assert!(diff == q(0) || diff == Rational::new(1, n as i128));
            }
        }
    }

    #[test]
    fn rejects_decreasing_quantiles() {
        assert_eq!(
            DiscreteMarginal::from_quantiles(vec![q(0), q(2), q(1)]).unwrap_err(),
            Error::NonMonotoneQuantiles(2)
        );
    }

    #[test]
    fn empirical_quantiles() {
        let samples: Vec<Rational> = [5, 1, 3, 2, 4].into_iter().map(q).collect();
        let m = DiscreteMarginal::from_samples(&samples, 5).unwrap();
        assert_eq!(m.quantiles(), &[q(1), q(1), q(2), q(3), q(4), q(5)]);
    }

    #[test]
    fn comonotone_and_countermonotone_uniform() {
        let n = 6;
        let u = vec![DiscreteMarginal::uniform(n).unwrap(); 2];
        let a = quantile_matrix(&u, 0, n).unwrap();
        let sums: Vec<i128> = (0..=n as i128).map(|r| 2 * r).collect();
        assert_eq!(crate::matrix::row_sums(&a), sums);
        let reversed =
            Matrix::from_columns(vec![a.column(0), a.column(1).into_iter().rev().collect()])
                .unwrap();
        assert!(crate::matrix::row_sums(&reversed)
            .iter()
            .all(|&s| s == n as i128));
    }

    #[test]
    fn single_top_row() {
        let u = vec![
            DiscreteMarginal::uniform(3).unwrap(),
            DiscreteMarginal::uniform(3).unwrap(),
        ];
        assert_eq!(
            quantile_matrix(&u, 3, 3).unwrap().to_rows(),
            vec![vec![3, 3]]
        );
    }

    #[test]
    fn mismatched_n() {
        let u = vec![
            DiscreteMarginal::uniform(3).unwrap(),
            DiscreteMarginal::uniform(4).unwrap(),
        ];
        assert!(quantile_matrix(&u, 0, 3).is_err());
    }

    #[test]
    fn full_range_alpha_zero_upper_is_n() {
        let n = 4;
        let u = vec![DiscreteMarginal::uniform(n).unwrap(); 2];
        let config = VarBoundsConfig {
            upper_rows: TailRows::Full,
            ..VarBoundsConfig::new(VarSolver::Brute)
        };
        let report = var_bounds(&u, q(0), &config).unwrap();
        assert_eq!(report.upper.value, q(n as i128));
        assert_eq!(report.upper.rows, (0, n));
    }

    #[test]
    fn single_marginal_collapses_to_quantiles() {
        let m = DiscreteMarginal::from_quantiles(vec![q(1), q(4), q(4), q(9), q(10)]).unwrap();
        let report = var_bounds(
            &[m],
            Rational::new(1, 2),
            &VarBoundsConfig::new(VarSolver::Dp),
        )
        .unwrap();
        assert_eq!(report.upper.value, q(4));
        assert_eq!(report.lower.value, q(4));
    }

    #[test]
    fn brute_dp_and_swapping_agree_on_hand_made_marginals() {
        let qs = |v: [i128; 7]| {
            DiscreteMarginal::from_quantiles(v.into_iter().map(q).collect()).unwrap()
        };
        let marginals = vec![
            qs([0, 1, 1, 2, 4, 7, 9]),
            qs([-2, 0, 3, 3, 3, 5, 12]),
            qs([1, 1, 2, 3, 5, 8, 13]),
        ];
        let alpha = Rational::new(1, 2);
        let brute = var_bounds(&marginals, alpha, &VarBoundsConfig::new(VarSolver::Brute)).unwrap();
        let dp = var_bounds(&marginals, alpha, &VarBoundsConfig::new(VarSolver::Dp)).unwrap();
        assert_eq!(brute.interval(), dp.interval());
        let swap = var_bounds(
            &marginals,
            alpha,
            &VarBoundsConfig::new(VarSolver::Swapping {
                restarts: 8,
                seed: 1,
            }),
        )
        .unwrap();
        assert!(swap.upper.value <= brute.upper.value);
        assert!(swap.lower.value >= brute.lower.value);
        assert_eq!(swap.upper.status, Status::HeuristicLowerBound);
    }

    #[test]
    fn rational_quantiles_report_original_units() {
        let m =
            DiscreteMarginal::from_quantiles(vec![Rational::new(1, 2), Rational::new(3, 4), q(2)])
                .unwrap();
        let report = var_bounds(
            &[m.clone(), m],
            q(1),
            &VarBoundsConfig::new(VarSolver::Brute),
        )
        .unwrap();
        assert_eq!(report.upper.value, q(4));
        assert_eq!(report.lower.value, Rational::new(5, 4));
    }

    #[test]
    fn extreme_alpha_empties_a_tail() {
        let u = vec![DiscreteMarginal::uniform(3).unwrap(); 2];
        let config = VarBoundsConfig {
            lower_rows: TailRows::Overline,
            ..VarBoundsConfig::new(VarSolver::Brute)
        };
        assert!(matches!(
            var_bounds(&u, q(0), &config),
            Err(Error::EmptySelection(_))
        ));
        assert!(var_bounds(
            &u,
            Rational::new(3, 2),
            &VarBoundsConfig::new(VarSolver::Brute)
        )
        .is_err());
    }
}
