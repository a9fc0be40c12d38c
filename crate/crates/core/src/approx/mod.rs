//! Approximation schemes and the exact solvers for restricted inputs.

pub mod bottleneck;
pub mod multiset;
pub mod ptas;
pub mod two_approx;
pub mod valueset;

pub use bottleneck::bottleneck_assignment_2d;
pub use multiset::{same_multiset_gamma, same_multiset_gamma_with, MultisetConfig};
pub use ptas::{ptas_gamma, ptas_gamma_with, PtasOutcome};
pub use two_approx::{
    two_approx_gamma_d3, two_approx_gamma_d3_with, StepOrder, TripartiteDistance, TwoApproxConfig,
};
pub use valueset::{fixed_valueset_gamma, fixed_valueset_gamma_with, PatternModel, ValueSetConfig};
