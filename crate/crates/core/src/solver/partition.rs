//! Dimension equations grouped by dimension class, without associativity.
//!
//! With `M_{a,b}^c` the sum of all `N` entries between classes `a`, `b`, `c`,
//! the grouped equations read `n_a d_a n_b d_b = sum_c M_{a,b}^c d_c` where the
//! unit contributes `delta_{a,b} n_a`, and `M` is symmetric in its indices.

use serde::{Deserialize, Serialize};

use super::search::Problem;
use super::system::LinEq;
use super::{Budget, SolveError};
use crate::types_enum::multiplicities;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionSystem {
    /// Non-unit classes `(d, n)`; the dimension-one class excludes the unit.
    pub classes: Vec<(u64, u64)>,
    /// Variable `v` is `M` over the class multiset `vars[v]` (sorted).
    pub vars: Vec<[usize; 3]>,
    pub upper: Vec<i64>,
    pub linear: Vec<LinEq>,
}

impl PartitionSystem {
    pub fn new(dims: &[u64]) -> Self {
        let mut sorted = dims.to_vec();
        sorted.sort_unstable();
        let classes: Vec<(u64, u64)> = multiplicities(&sorted)
            .into_iter()
            .map(|(d, m)| (d, if d == 1 { m as u64 - 1 } else { m as u64 }))
            .filter(|&(_, n)| n > 0)
            .collect();
        let s = classes.len();
        let mut vars = Vec::new();
        for a in 0..s {
            for b in a..s {
                for c in b..s {
                    vars.push([a, b, c]);
                }
            }
        }
        let index = |mut t: [usize; 3]| {
            t.sort_unstable();
            vars.iter().position(|&v| v == t).unwrap()
        };
        let rhs = |a: usize, b: usize| {
            let (da, na) = classes[a];
            let (db, nb) = classes[b];
            (na * da * nb * db) as i64 - if a == b { na as i64 } else { 0 }
        };
        let mut upper = vec![i64::MAX; vars.len()];
        let mut linear = Vec::new();
        for a in 0..s {
            for b in a..s {
                let mut coefs: Vec<(usize, i64)> = (0..s)
                    .map(|c| (index([a, b, c]), classes[c].0 as i64))
                    .collect();
                coefs.sort_unstable();
                let r = rhs(a, b);
                for &(v, d) in &coefs {
                    upper[v] = upper[v].min(r / d);
                }
                linear.push(LinEq { coefs, rhs: r });
            }
        }
        PartitionSystem {
            classes,
            vars,
            upper,
            linear,
        }
    }

    pub fn problem(&self) -> Problem {
        Problem {
            upper: self.upper.clone(),
            linear: self.linear.clone(),
            polynomials: Vec::new(),
        }
    }
}

/// Lattice points of the grouped system, up to `limit` of them. An empty
/// result proves that no fusion ring of this type exists.
pub fn solve_partition(
    dims: &[u64],
    budget: Budget,
    limit: Option<usize>,
) -> Result<Vec<Vec<i64>>, SolveError> {
    let sys = PartitionSystem::new(dims);
    let mut limits = budget.limits();
    limits.max_solutions = limit;
    Ok(sys.problem().solve(limits)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointed_rank_two() {
        let sols = solve_partition(&[1, 1], Budget::unlimited(), None).unwrap();
        assert_eq!(sols, vec![vec![0]]);
    }

    #[test]
    fn first_excluded_type() {
        let t = [1, 6, 12, 12, 15, 15, 15, 20, 20, 30, 30, 60];
        assert!(solve_partition(&t, Budget::seconds(60), Some(1))
            .unwrap()
            .is_empty());
    }
}
