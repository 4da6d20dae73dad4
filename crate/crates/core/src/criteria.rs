//! Arithmetic criteria that exclude types without solving for fusion rings.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::arith::numtheory::{gcd, mod_inverse, prime_divisors};
use crate::types_enum::{is_perfect, multiplicities};

/// Largest modulus tried by the local criterion.
pub const LOCAL_G_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CriteriaError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("budget of {0:?} exhausted")]
    BudgetExhausted(Duration),
}

/// Why a type was removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum Exclusion {
    SmallPerfect,
    Gcd { gcd: u64 },
    TypeTest { dim: u64, bound: u64 },
    Local { d: u64, m: u64, g: u64 },
}

/// A multiplicity list `[[d_1, m_1], ..., [d_s, m_s]]` with `d_1 = 1`.
pub type TypeMult = Vec<(u64, u64)>;

pub fn to_mult(t: &[u64]) -> TypeMult {
    multiplicities(t)
        .into_iter()
        .map(|(d, m)| (d, m as u64))
        .collect()
}

/// No non-trivial perfect integral fusion ring has at most three distinct dimensions.
pub fn small_perfect_test(t: &[u64]) -> bool {
    is_perfect(t) && t.len() > 1 && multiplicities(t).len() <= 3
}

/// Perfect types whose non-unit dimensions share a common factor are excluded.
pub fn gcd_test(t: &[u64]) -> Option<u64> {
    if !is_perfect(t) || t.len() < 2 {
        return None;
    }
    let g = t[1..].iter().fold(0, |acc, &d| gcd(acc, d));
    (g > 1).then_some(g)
}

/// Largest divisor of `n` coprime to `d`.
fn coprime_part(mut n: u64, d: u64) -> u64 {
    for p in prime_divisors(d) {
        while n % p == 0 {
            n /= p;
        }
    }
    n
}

/// Dimension-counting inequalities for perfect types. Returns the violated
/// dimension and the lower bound on its square.
pub fn type_test(t: &[u64]) -> Option<(u64, u64)> {
    if !is_perfect(t) || t.len() < 2 {
        return None;
    }
    let mult = multiplicities(&t[1..]);
    let dims: Vec<u64> = mult.iter().map(|&(d, _)| d).collect();
    // (d, g_d, a_d) for every dimension admitting a modulus.
    let mut s: Vec<(u64, u64, u64)> = Vec::new();
    for &d in &dims {
        let others = dims
            .iter()
            .filter(|&&x| x != d)
            .fold(0, |acc, &x| gcd(acc, x));
        if others == 0 {
            continue;
        }
        let g = coprime_part(others, d);
        if g > 1 {
            let inv = mod_inverse(d as i64, g as i64).unwrap() as u64;
            s.push((d, g, (g - inv) % g));
        }
    }
    for &(dj, mj) in &mult {
        let mut rhs: u64 = 1;
        for &(d, _, a) in &s {
            if d != dj {
                rhs += a * d;
            }
        }
        if mj == 1 {
            if let Some(&(_, g, _)) = s.iter().find(|x| x.0 == dj) {
                let g2 = (g * g) as i64;
                let inv = mod_inverse(dj as i64, g2).unwrap();
                let b = (dj as i64 - inv).rem_euclid(g2) as u64;
                rhs += b * dj;
            }
        }
        if dj * dj < rhs {
            return Some((dj, rhs));
        }
    }
    None
}

struct Search {
    g: i128,
    deadline: Instant,
    budget: Duration,
    steps: u64,
    first_only: bool,
    out: Vec<TypeMult>,
}

impl Search {
    fn tick(&mut self) -> Result<(), CriteriaError> {
        self.steps += 1;
        if self.steps % 4096 == 0 && Instant::now() > self.deadline {
            return Err(CriteriaError::BudgetExhausted(self.budget));
        }
        Ok(())
    }

    /// Partitions of `rem` as `sum a_i dims[i]` with `g | a_i`, largest dimension first.
    fn inter(&mut self, dims: &[u64], rem: i128, acc: &mut TypeMult) -> Result<(), CriteriaError> {
        self.tick()?;
        if self.first_only && !self.out.is_empty() {
            return Ok(());
        }
        if rem < 0 {
            return Ok(());
        }
        let Some((&d, rest)) = dims.split_last() else {
            if rem == 0 {
                let mut sol = acc.clone();
                sol.sort_unstable();
                self.out.push(sol);
            }
            return Ok(());
        };
        let step = d as i128 * self.g;
        // Every remaining term is a multiple of g * gcd(dims).
        let common = dims.iter().fold(0u64, |a, &x| gcd(a, x)) as i128 * self.g;
        if rem % common != 0 {
            return Ok(());
        }
        if rest.is_empty() {
            acc.push((d, (rem / self.g / d as i128) as u64 * self.g as u64));
            self.inter(rest, 0, acc)?;
            acc.pop();
            return Ok(());
        }
        let q = rem / step;
        for i in 0..=q {
            acc.push((d, (i * self.g) as u64));
            self.inter(rest, rem - i * step, acc)?;
            acc.pop();
            if self.first_only && !self.out.is_empty() {
                break;
            }
        }
        Ok(())
    }
}

fn check_local_params(t: &[(u64, u64)], d: u64, m: u64, g: u64) -> Result<(), CriteriaError> {
    if t.is_empty() || t[0].0 != 1 {
        return Err(CriteriaError::InvalidParameters(
            "type must start with dimension 1".into(),
        ));
    }
    if g <= 1 {
        return Err(CriteriaError::InvalidParameters("g must exceed 1".into()));
    }
    let Some(&(_, md)) = t[1..].iter().find(|x| x.0 == d) else {
        return Err(CriteriaError::InvalidParameters(format!(
            "{d} is not a non-unit dimension"
        )));
    };
    if md != m {
        return Err(CriteriaError::InvalidParameters(format!(
            "multiplicity of {d} is {md}, not {m}"
        )));
    }
    if gcd(d, g) != 1 {
        return Err(CriteriaError::InvalidParameters(
            "g must be coprime to d".into(),
        ));
    }
    if let Some(&(bad, _)) = t[1..].iter().find(|x| x.0 != d && x.0 % g != 0) {
        return Err(CriteriaError::InvalidParameters(format!(
            "g does not divide {bad}"
        )));
    }
    Ok(())
}

fn local_search(
    t: &[(u64, u64)],
    d: u64,
    m: u64,
    g: u64,
    budget: Duration,
    first_only: bool,
) -> Result<Vec<TypeMult>, CriteriaError> {
    check_local_params(t, d, m, g)?;
    let m1 = t[0].1 as i128;
    let (d_, m_, g_) = (d as i128, m as i128, g as i128);
    let g2 = g_ * g_;
    let mm = m_ * d_ * d_ - m1;
    let dinv = mod_inverse((d_ % g2) as i64, g2 as i64).unwrap() as i128;
    let a = (m_ * d_ - m1 * dinv).rem_euclid(g2);
    let dims: Vec<u64> = t[1..].iter().map(|x| x.0).filter(|&x| x != d).collect();
    let mut s = Search {
        g: g_,
        deadline: Instant::now() + budget,
        budget,
        steps: 0,
        first_only,
        out: Vec::new(),
    };
    if mm - a >= 0 {
        let q = (mm - a) / (d_ * g2);
        for i in 0..=q {
            let x = a + i * g2;
            let mut acc: TypeMult = vec![t[0], (d, x as u64)];
            s.inter(&dims, mm - d_ * x, &mut acc)?;
            if first_only && !s.out.is_empty() {
                break;
            }
        }
    }
    let mut out = s.out;
    out.sort();
    Ok(out)
}

/// All partitions compatible with the local congruences for `(d, m, g)`.
/// An empty result excludes the type.
pub fn local_criterion(
    t: &[(u64, u64)],
    d: u64,
    m: u64,
    g: u64,
    budget: Duration,
) -> Result<Vec<TypeMult>, CriteriaError> {
    local_search(t, d, m, g, budget, false)
}

/// Whether at least one compatible partition exists for `(d, m, g)`.
pub fn local_criterion_feasible(
    t: &[(u64, u64)],
    d: u64,
    m: u64,
    g: u64,
    budget: Duration,
) -> Result<bool, CriteriaError> {
    local_search(t, d, m, g, budget, true).map(|v| !v.is_empty())
}

/// Admissible `(d, m, g)` triples: for each non-unit dimension `d`, every prime
/// power `g <= 10^4` coprime to `d` dividing all other non-unit dimensions.
/// A type with a single non-unit dimension admits no triple.
pub fn local_parameters(t: &[(u64, u64)]) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for &(d, m) in &t[1..] {
        let others = t[1..]
            .iter()
            .filter(|x| x.0 != d)
            .fold(0, |acc, x| gcd(acc, x.0));
        if others == 0 {
            continue;
        }
        for p in prime_divisors(others) {
            if d % p == 0 {
                continue;
            }
            let mut q = p;
            while others % q == 0 && q <= LOCAL_G_CAP {
                out.push((d, m, q));
                q *= p;
            }
        }
    }
    out
}

/// Outcome of running the local criterion over all admissible parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalVerdict {
    Excluded {
        d: u64,
        m: u64,
        g: u64,
    },
    NotExcluded,
    /// Some parameter triple ran out of budget and none excluded the type.
    Abstained {
        timeouts: usize,
    },
}

pub fn local_verdict(t: &[u64], budget: Duration) -> LocalVerdict {
    let tm = to_mult(t);
    let mut timeouts = 0;
    for (d, m, g) in local_parameters(&tm) {
        match local_criterion_feasible(&tm, d, m, g, budget) {
            Ok(false) => return LocalVerdict::Excluded { d, m, g },
            Ok(true) => {}
            Err(_) => timeouts += 1,
        }
    }
    if timeouts > 0 {
        LocalVerdict::Abstained { timeouts }
    } else {
        LocalVerdict::NotExcluded
    }
}

/// Result of filtering one type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRecord {
    pub dims: Vec<u64>,
    pub excluded_by: Option<Exclusion>,
    pub local_timeouts: usize,
}

/// Applies the cheap criteria (small perfect, gcd, TypeTest) and then the
/// local criterion. The first criterion that fires is recorded.
pub fn filter_type(t: &[u64], budget: Duration) -> FilterRecord {
    let mut rec = FilterRecord {
        dims: t.to_vec(),
        excluded_by: None,
        local_timeouts: 0,
    };
    if small_perfect_test(t) {
        rec.excluded_by = Some(Exclusion::SmallPerfect);
    } else if let Some(g) = gcd_test(t) {
        rec.excluded_by = Some(Exclusion::Gcd { gcd: g });
    } else if let Some((dim, bound)) = type_test(t) {
        rec.excluded_by = Some(Exclusion::TypeTest { dim, bound });
    } else {
        match local_verdict(t, budget) {
            LocalVerdict::Excluded { d, m, g } => {
                rec.excluded_by = Some(Exclusion::Local { d, m, g })
            }
            LocalVerdict::NotExcluded => {}
            LocalVerdict::Abstained { timeouts } => rec.local_timeouts = timeouts,
        }
    }
    rec
}

pub fn filter_types(types: &[Vec<u64>], budget: Duration) -> Vec<FilterRecord> {
    use rayon::prelude::*;
    types.par_iter().map(|t| filter_type(t, budget)).collect()
}
