//! Workbench for the (1+(λ,λ)) genetic algorithm on OneMax and planted
//! random 3-CNF instances: deterministic generators, analytical fitness
//! models, an empirical offspring-quality checker, and an experiment harness
//! that writes CSV artifacts.

pub mod algorithms;
pub mod analysis;
pub mod bits;
pub mod combinatorics;
pub mod error;
pub mod harness;
pub mod problems;
pub mod rng;

pub use bits::BitString;
pub use error::{Error, Result};
pub use rng::RandomSource;
