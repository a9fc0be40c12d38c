pub mod approx;
pub mod cli;
pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod io;
pub mod matrix;
pub mod swapping;
pub mod varbounds;
