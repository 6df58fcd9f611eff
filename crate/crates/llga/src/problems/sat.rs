//! Planted 3-CNF MAX-SAT instances.
//!
//! An instance is a conjunction of `m` clauses over `n` Boolean variables,
//! each clause a disjunction of 3 literals on distinct variables, drawn
//! uniformly at random among the clauses satisfied by a fixed planted
//! assignment. Repeated clauses are allowed; fitness is the number of
//! satisfied clauses, so the planted assignment always has fitness `m`.

use crate::bits::BitString;
use crate::combinatorics::binomial_coefficient;
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::rng::{sample_distinct, RandomSource};

/// A 3-literal clause. Variables are stored sorted ascending with their signs
/// permuted along, so structurally equal clauses compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause {
    vars: [u32; 3],
    signs: [bool; 3],
}

impl Clause {
    /// Builds a clause from parallel variable/sign arrays, canonicalizing the
    /// order. Rejects repeated variables.
    pub fn new(vars: [u32; 3], signs: [bool; 3]) -> Result<Self> {
        let mut paired = [
            (vars[0], signs[0]),
            (vars[1], signs[1]),
            (vars[2], signs[2]),
        ];
        paired.sort_unstable_by_key(|&(v, _)| v);
        if paired[0].0 == paired[1].0 || paired[1].0 == paired[2].0 {
            return Err(Error::InvalidParameter(format!(
                "clause variables must be distinct, got {:?}",
                vars
            )));
        }
        Ok(Clause {
            vars: [paired[0].0, paired[1].0, paired[2].0],
            signs: [paired[0].1, paired[1].1, paired[2].1],
        })
    }

    pub fn vars(&self) -> [u32; 3] {
        self.vars
    }

    pub fn signs(&self) -> [bool; 3] {
        self.signs
    }

    #[inline]
    pub fn satisfied_by(&self, x: &BitString) -> bool {
        x.get(self.vars[0] as usize) == self.signs[0]
            || x.get(self.vars[1] as usize) == self.signs[1]
            || x.get(self.vars[2] as usize) == self.signs[2]
    }
}

/// A 3-CNF formula with a per-variable occurrence index. The index makes
/// incremental evaluation O(occurrences of flipped variables) instead of
/// O(m) and is built eagerly at construction.
#[derive(Debug, Clone)]
pub struct Formula {
    n: usize,
    clauses: Vec<Clause>,
    occurrence: Vec<Vec<u32>>,
}

impl Formula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "formula needs at least one variable".into(),
            ));
        }
        if clauses.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter("too many clauses".into()));
        }
        for (j, c) in clauses.iter().enumerate() {
            if c.vars[2] as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "clause {} references variable {} outside 0..{n}",
                    j + 1,
                    c.vars[2]
                )));
            }
        }
        let mut occurrence = vec![Vec::new(); n];
        for (j, c) in clauses.iter().enumerate() {
            for &v in &c.vars {
                occurrence[v as usize].push(j as u32);
            }
        }
        Ok(Formula {
            n,
            clauses,
            occurrence,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn count_satisfied(&self, x: &BitString) -> u64 {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        self.clauses.iter().filter(|c| c.satisfied_by(x)).count() as u64
    }

    /// Satisfied-clause count of `x ⊕ flips` given the count for `x`.
    /// Every affected clause is charged to its smallest flipped variable so
    /// clauses containing several flipped variables are processed once. Flip
    /// sets larger than n/3 fall back to a full rescan, which is cheaper than
    /// walking occurrence lists that by then cover most clauses.
    pub fn count_satisfied_delta(&self, x: &BitString, current: u64, flips: &[usize]) -> u64 {
        if flips.is_empty() {
            return current;
        }
        debug_assert!(flips.windows(2).all(|w| w[0] < w[1]));
        if flips.len() * 3 > self.n {
            return self.count_satisfied(&x.with_flips(flips));
        }
        let mut delta: i64 = 0;
        for &v in flips {
            for &j in &self.occurrence[v] {
                let c = &self.clauses[j as usize];
                let flipped = [
                    flips.binary_search(&(c.vars[0] as usize)).is_ok(),
                    flips.binary_search(&(c.vars[1] as usize)).is_ok(),
                    flips.binary_search(&(c.vars[2] as usize)).is_ok(),
                ];
                let owner = if flipped[0] {
                    c.vars[0]
                } else if flipped[1] {
                    c.vars[1]
                } else {
                    c.vars[2]
                };
                if owner as usize != v {
                    continue;
                }
                let mut before = false;
                let mut after = false;
                for ((&cv, &sign), &fl) in c.vars.iter().zip(&c.signs).zip(&flipped) {
                    let bit = x.get(cv as usize);
                    before |= bit == sign;
                    after |= (bit ^ fl) == sign;
                }
                delta += after as i64 - before as i64;
            }
        }
        (current as i64 + delta) as u64
    }
}

/// A formula together with the assignment it was planted around.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    formula: Formula,
    planted: BitString,
    seed: u64,
}

impl PlantedInstance {
    /// Assembles an instance from parts, enforcing that the planted
    /// assignment satisfies every clause. `j` in the error is the 1-based
    /// clause position.
    pub fn from_parts(formula: Formula, planted: BitString, seed: u64) -> Result<Self> {
        if planted.len() != formula.n() {
            return Err(Error::InvalidParameter(format!(
                "planted assignment has length {} but formula has {} variables",
                planted.len(),
                formula.n()
            )));
        }
        for (j, c) in formula.clauses().iter().enumerate() {
            if !c.satisfied_by(&planted) {
                return Err(Error::UnsatisfiedPlanted { clause: j + 1 });
            }
        }
        Ok(PlantedInstance {
            formula,
            planted,
            seed,
        })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn planted(&self) -> &BitString {
        &self.planted
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.formula.n()
    }

    pub fn m(&self) -> usize {
        self.formula.m()
    }

    /// Convenience constructor: derives the planted assignment and the
    /// clauses from a single seed, which is also stored for persistence.
    pub fn from_seed(n: usize, m: usize, seed: u64) -> Result<Self> {
        let mut rng = RandomSource::from_seed(seed);
        let planted = BitString::uniform(n, &mut rng)?;
        generate_planted_instance(n, m, &planted, &mut rng, seed)
    }
}

impl Problem for PlantedInstance {
    fn dimension(&self) -> usize {
        self.formula.n()
    }

    fn max_fitness(&self) -> u64 {
        self.formula.m() as u64
    }

    fn evaluate(&self, x: &BitString) -> u64 {
        self.formula.count_satisfied(x)
    }

    fn evaluate_delta(&self, x: &BitString, current: u64, flipped: &[usize]) -> u64 {
        self.formula.count_satisfied_delta(x, current, flipped)
    }

    fn distance_to_target(&self, x: &BitString) -> u64 {
        x.hamming_distance(&self.planted) as u64
    }
}

/// Number of distinct 3-clauses over `n` variables satisfied by any fixed
/// assignment: 7·C(n,3), since of the 8 sign patterns on 3 distinct
/// variables exactly one is falsified.
pub fn count_satisfying_clauses_total(n: usize) -> Result<u128> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 variables, got {n}"
        )));
    }
    Ok(7 * binomial_coefficient(n as u64, 3))
}

/// Draws `m` i.i.d. clauses uniformly from the satisfying set of `planted`.
///
/// Per clause: 3 distinct variables uniformly, then one of the 8 sign
/// patterns uniformly, redrawing the pattern while the clause is unsatisfied
/// by `planted`. Exactly one pattern per variable triple is rejected, so the
/// surviving distribution is uniform over the 7·C(n,3) satisfying clauses.
/// `seed` is a caller-supplied label recorded in the instance (and its
/// persisted form); it does not reseed `rng`.
pub fn generate_planted_instance(
    n: usize,
    m: usize,
    planted: &BitString,
    rng: &mut RandomSource,
    seed: u64,
) -> Result<PlantedInstance> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "planted instances need n >= 3, got {n}"
        )));
    }
    if planted.len() != n {
        return Err(Error::InvalidParameter(format!(
            "planted assignment has length {} but n = {n}",
            planted.len()
        )));
    }
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let vars = sample_distinct(n, 3, rng);
        let vars = [vars[0] as u32, vars[1] as u32, vars[2] as u32];
        let signs = loop {
            let pattern = rng.next_below(8);
            let signs = [pattern & 1 == 1, pattern & 2 == 2, pattern & 4 == 4];
            let satisfied = (0..3).any(|i| planted.get(vars[i] as usize) == signs[i]);
            if satisfied {
                break signs;
            }
        };
        // sample_distinct returns ascending order, so this is already
        // canonical and cannot fail the distinctness check.
        clauses.push(Clause::new(vars, signs)?);
    }
    PlantedInstance::from_parts(Formula::new(n, clauses)?, planted.clone(), seed)
}
