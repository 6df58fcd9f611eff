//! Fitness landscapes: OneMax and planted 3-CNF MAX-SAT.

mod dimacs;
mod sat;

pub use dimacs::{read_instance, read_instance_from, write_instance, write_instance_to};
pub use sat::{
    count_satisfying_clauses_total, generate_planted_instance, Clause, Formula, PlantedInstance,
};

use crate::bits::BitString;

/// A fitness landscape over bit strings of a fixed dimension. Implementations
/// are immutable and safely shareable across concurrent runs; all evaluation
/// bookkeeping (counters, scratch space) lives with the caller.
pub trait Problem: Sync {
    fn dimension(&self) -> usize;

    /// Largest attainable fitness; a run terminates when it is reached.
    fn max_fitness(&self) -> u64;

    /// Exact fitness of `x`. Panics on dimension mismatch.
    fn evaluate(&self, x: &BitString) -> u64;

    /// Fitness of `x ⊕ flipped` given `current = evaluate(x)`, touching only
    /// the parts of the problem that involve a flipped position. `flipped`
    /// must hold distinct, ascending, in-range indices; a stale `current` is
    /// undetectable and yields garbage.
    fn evaluate_delta(&self, x: &BitString, current: u64, flipped: &[usize]) -> u64;

    /// Hamming distance from `x` to the reference optimum (the all-ones
    /// string for OneMax, the planted assignment for MAX-3SAT). Used for
    /// trace output, not by the search itself.
    fn distance_to_target(&self, x: &BitString) -> u64;
}

/// OneMax: fitness is the number of one-bits.
#[derive(Debug, Clone)]
pub struct OneMax {
    n: usize,
}

impl OneMax {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "OneMax dimension must be positive");
        OneMax { n }
    }
}

impl Problem for OneMax {
    fn dimension(&self) -> usize {
        self.n
    }

    fn max_fitness(&self) -> u64 {
        self.n as u64
    }

    fn evaluate(&self, x: &BitString) -> u64 {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        x.count_ones() as u64
    }

    fn evaluate_delta(&self, x: &BitString, current: u64, flipped: &[usize]) -> u64 {
        debug_assert!(flipped.windows(2).all(|w| w[0] < w[1]));
        let mut fitness = current as i64;
        for &i in flipped {
            fitness += if x.get(i) { -1 } else { 1 };
        }
        fitness as u64
    }

    fn distance_to_target(&self, x: &BitString) -> u64 {
        (self.n - x.count_ones()) as u64
    }
}
