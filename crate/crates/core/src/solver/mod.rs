//! Enumeration of fusion rings of a given type.

pub mod partition;
pub mod search;
pub mod system;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fusion::{dedup_isomorphism, AxiomViolation, FusionData};
use crate::types_enum::multiplicities;
pub use partition::{solve_partition, PartitionSystem};
pub use search::{Exhausted, Limits, Problem};
pub use system::{build_system, valid_duality, LinEq, Mono, Poly, ReducedSystem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("budget exhausted after {nodes} nodes with {} partial solutions", found.len())]
    BudgetExhausted { found: Vec<Vec<i64>>, nodes: u64 },
    #[error("solver produced invalid fusion data: {0}")]
    AxiomViolation(#[from] AxiomViolation),
}

impl From<Exhausted> for SolveError {
    fn from(e: Exhausted) -> Self {
        SolveError::BudgetExhausted {
            found: e.found,
            nodes: e.nodes,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub time: Option<Duration>,
    pub nodes: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            time: None,
            nodes: None,
        }
    }

    pub fn seconds(s: u64) -> Self {
        Budget {
            time: Some(Duration::from_secs(s)),
            nodes: None,
        }
    }

    fn limits(&self) -> Limits {
        Limits {
            deadline: self.time.map(|t| Instant::now() + t),
            max_nodes: self.nodes,
            max_solutions: None,
        }
    }
}

/// A duality map up to conjugation, with the number of involutions it stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityClass {
    pub dual: Vec<usize>,
    pub class_size: u64,
}

/// Involutions fixing 0 and preserving dimensions, one per conjugacy class
/// under dimension-preserving relabelings. In each block of equal dimension
/// the first `2t` free indices are paired consecutively.
pub fn enumerate_dualities(dims: &[u64]) -> Vec<DualityClass> {
    assert!(
        dims.first() == Some(&1) && dims.windows(2).all(|w| w[0] <= w[1]),
        "type must be sorted and start with 1"
    );
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut start = 0;
    for (d, m) in multiplicities(dims) {
        let lo = if d == 1 { 1 } else { start };
        blocks.push((lo..start + m).collect());
        start += m;
    }
    let mut out = Vec::new();
    let mut pairs = vec![0; blocks.len()];
    loop {
        let mut dual: Vec<usize> = (0..dims.len()).collect();
        let mut size = 1u64;
        for (b, &t) in blocks.iter().zip(&pairs) {
            for p in 0..t {
                dual[b[2 * p]] = b[2 * p + 1];
                dual[b[2 * p + 1]] = b[2 * p];
            }
            size *= involution_count(b.len() as u64, t as u64);
        }
        out.push(DualityClass {
            dual,
            class_size: size,
        });
        // Next pair-count vector.
        let mut idx = blocks.len();
        loop {
            if idx == 0 {
                return out;
            }
            idx -= 1;
            if 2 * (pairs[idx] + 1) <= blocks[idx].len() {
                pairs[idx] += 1;
                break;
            }
            pairs[idx] = 0;
        }
    }
}

/// Involutions of an `m`-set with exactly `t` transpositions.
fn involution_count(m: u64, t: u64) -> u64 {
    let fact = |n: u64| (1..=n).product::<u64>();
    fact(m) / (fact(t) * (1u64 << t) * fact(m - 2 * t))
}

impl ReducedSystem {
    pub fn problem(&self) -> Problem {
        Problem {
            upper: self.upper.clone(),
            linear: self.linear.clone(),
            polynomials: self.polynomials.clone(),
        }
    }
}

/// All lattice points of the system, in lexicographic order.
pub fn solve_system(sys: &ReducedSystem, budget: Budget) -> Result<Vec<Vec<i64>>, SolveError> {
    Ok(sys.problem().solve(budget.limits())?)
}

/// Per-duality outcome of [`solve_type_detailed`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualityOutcome {
    pub dual: Vec<usize>,
    pub class_size: u64,
    pub variables: usize,
    pub raw_solutions: usize,
    pub classes: usize,
}

#[derive(Debug, Clone)]
pub struct TypeOutcome {
    pub dims: Vec<u64>,
    pub dualities: Vec<DualityOutcome>,
    /// Canonical representatives, sorted.
    pub rings: Vec<FusionData>,
}

pub fn solve_type_detailed(dims: &[u64], budget: Budget) -> Result<TypeOutcome, SolveError> {
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    let classes = enumerate_dualities(&dims);
    let per: Vec<Result<(DualityOutcome, Vec<FusionData>), SolveError>> = classes
        .par_iter()
        .map(|c| {
            let sys = build_system(&dims, &c.dual);
            let sols = solve_system(&sys, budget)?;
            let rings = sols
                .iter()
                .map(|s| sys.expand(s))
                .collect::<Result<Vec<_>, _>>()?;
            let unique = dedup_isomorphism(&rings);
            let outcome = DualityOutcome {
                dual: c.dual.clone(),
                class_size: c.class_size,
                variables: sys.num_vars(),
                raw_solutions: sols.len(),
                classes: unique.len(),
            };
            Ok((outcome, unique))
        })
        .collect();
    let mut dualities = Vec::new();
    let mut rings = Vec::new();
    for r in per {
        let (o, u) = r?;
        dualities.push(o);
        rings.extend(u);
    }
    rings.sort();
    rings.dedup();
    Ok(TypeOutcome {
        dims,
        dualities,
        rings,
    })
}

/// Fusion rings of the given type up to isomorphism.
pub fn solve_type(dims: &[u64], budget: Budget) -> Result<Vec<FusionData>, SolveError> {
    Ok(solve_type_detailed(dims, budget)?.rings)
}
