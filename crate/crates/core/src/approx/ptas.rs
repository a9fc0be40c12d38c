//! `(1+ε)`-approximation of gamma by rounding entries up to a grid of width
//! `ε·a*/d` and solving the rounded instance exactly over its value set.

use crate::approx::valueset::{fixed_valueset_gamma_with, ValueSetConfig};
use crate::error::{Error, Result};
use crate::matrix::{
    shift_normalize, Matrix, MixResult, Objective, PermutationProfile, Rational, Status,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtasOutcome {
    /// Evaluated on the input matrix; `value` is the witnessed max row sum.
    pub result: MixResult,
    /// Gamma of the rounded instance in the stored units of the
    /// (possibly shifted) matrix; an upper bound on the shifted `result.value`.
    pub grid_value: Rational,
    /// The shift `μ` applied before rounding, if the input had negative entries.
    /// The ratio then holds for the shifted instance only.
    pub shifted: Option<i128>,
}

pub fn ptas_gamma(a: &Matrix, eps: Rational) -> Result<PtasOutcome> {
    ptas_gamma_with(a, eps, &ValueSetConfig::default())
}

pub fn ptas_gamma_with(a: &Matrix, eps: Rational, config: &ValueSetConfig) -> Result<PtasOutcome> {
    if eps <= Rational::from_integer(0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    let status = Status::RatioBound(Rational::from_integer(1) + eps);
    let (work, shifted) = if a.min_entry() < 0 {
        let (b, mu) = shift_normalize(a);
        (b, Some(mu))
    } else {
        (a.clone(), None)
    };
    let d = a.cols() as i128;
    let top = work.max_entry();
    if top == 0 {
        let profile = PermutationProfile::identity(a.rows(), a.cols());
        return Ok(PtasOutcome {
            result: MixResult::from_profile(a, profile, Objective::Gamma, status)?,
            grid_value: Rational::from_integer(0),
            shifted,
        });
    }
    // grid index of x: ⌈x / (ε·a*/d)⌉ = ⌈x·d·q / (p·a*)⌉ with ε = p/q
    let (p, q) = (*eps.numer(), *eps.denom());
    let denom = p.checked_mul(top).ok_or(Error::Overflow("grid width"))?;
    let mut data = Vec::with_capacity(work.entries().len());
    for &x in work.entries() {
        let num = x
            .checked_mul(d)
            .and_then(|v| v.checked_mul(q))
            .ok_or(Error::Overflow("grid rounding"))?;
        data.push(num.div_euclid(denom) + i128::from(num.rem_euclid(denom) != 0));
    }
    let rounded = Matrix::from_row_major(work.rows(), work.cols(), data)?;
    let values = rounded.distinct_values();
    let grid = fixed_valueset_gamma_with(&rounded, &values, config)?;
    let width = eps * Rational::new(top, d);
    let grid_value = width * Rational::from_integer(grid.value);

    let result = MixResult::from_profile(a, grid.profile, Objective::Gamma, status)?;
    let witnessed = result.value + shifted.unwrap_or(0) * d;
    debug_assert!(Rational::from_integer(witnessed) <= grid_value);
    Ok(PtasOutcome {
        result,
        grid_value,
        shifted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_gamma;
    use rand::{Rng, SeedableRng};

    #[test]
    fn consecutive_with_epsilon_one() {
        let a = Matrix::from_columns(vec![vec![1, 2, 3]; 3]).unwrap();
        let out = ptas_gamma(&a, Rational::from_integer(1)).unwrap();
        assert!((6..=12).contains(&out.result.value));
        assert_eq!(
            out.result.status,
            Status::RatioBound(Rational::from_integer(2))
        );
        assert!(Rational::from_integer(out.result.value) <= out.grid_value);
    }

    #[test]
    fn entries_on_grid_give_exact_gamma() {
        // a* = 3, d = 3, ε = 1: grid width 1
        let a = Matrix::new(vec![vec![0, 3, 1], vec![2, 2, 3], vec![1, 0, 0]]).unwrap();
        let out = ptas_gamma(&a, Rational::from_integer(1)).unwrap();
        let gamma = brute_force_gamma(&a).unwrap().value;
        assert_eq!(out.result.value, gamma);
        assert_eq!(out.grid_value, Rational::from_integer(gamma));
    }

    #[test]
    fn random_instances_within_ratio() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let m = rng.gen_range(1..=4);
            let a =
                Matrix::from_row_major(m, 3, (0..3 * m).map(|_| rng.gen_range(0..25)).collect())
                    .unwrap();
            let gamma = brute_force_gamma(&a).unwrap().value;
            for eps in [Rational::new(1, 2), Rational::from_integer(1)] {
                let out = ptas_gamma(&a, eps).unwrap();
                let v = Rational::from_integer(out.result.value);
                assert!(out.result.value >= gamma, "{a:?}");
                assert!(v <= (Rational::from_integer(1) + eps) * gamma, "{a:?}");
                assert!(v <= out.grid_value);
            }
        }
    }

    #[test]
    fn rejects_nonpositive_epsilon() {
        let a = Matrix::new(vec![vec![1, 2]]).unwrap();
        assert!(ptas_gamma(&a, Rational::from_integer(0)).is_err());
        assert!(ptas_gamma(&a, Rational::new(-1, 2)).is_err());
    }

    #[test]
    fn negative_entries_report_shift() {
        let a = Matrix::new(vec![vec![-2, 1], vec![3, -1]]).unwrap();
        let out = ptas_gamma(&a, Rational::new(1, 2)).unwrap();
        assert_eq!(out.shifted, Some(2));
        assert!(out.result.value >= brute_force_gamma(&a).unwrap().value);
    }

    #[test]
    fn zero_matrix() {
        let a = Matrix::new(vec![vec![0, 0]; 3]).unwrap();
        assert_eq!(ptas_gamma(&a, Rational::new(1, 4)).unwrap().result.value, 0);
    }
}
