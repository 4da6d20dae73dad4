//! Enumeration of candidate fusion-ring types (multisets of FP dimensions)
//! from Egyptian fractions with squared denominators.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A type: FP dimensions sorted ascending, starting with 1.
pub type FusionType = Vec<u64>;

pub fn is_perfect(t: &[u64]) -> bool {
    t.iter().filter(|&&d| d == 1).count() == 1
}

pub fn fpdim(t: &[u64]) -> u64 {
    t.iter().map(|d| d * d).sum()
}

/// Distinct dimensions with multiplicities, ascending.
pub fn multiplicities(t: &[u64]) -> Vec<(u64, usize)> {
    let mut out: Vec<(u64, usize)> = Vec::new();
    for &d in t {
        match out.last_mut() {
            Some((v, m)) if *v == d => *m += 1,
            _ => out.push((d, 1)),
        }
    }
    out
}

fn isqrt_big(x: &BigInt) -> BigInt {
    if x.is_negative() {
        return BigInt::zero();
    }
    x.sqrt()
}

fn is_square_big(x: &BigInt) -> Option<BigInt> {
    let r = isqrt_big(x);
    if &(&r * &r) == x {
        Some(r)
    } else {
        None
    }
}

fn is_sum_of_two_squares(x: &BigInt) -> bool {
    let mut n = x.to_u128().expect("two-squares test on oversized value");
    if n == 0 {
        return true;
    }
    let mut p = 3u128;
    while n % 2 == 0 {
        n /= 2;
    }
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if p % 4 == 3 && e % 2 == 1 {
            return false;
        }
        p += 2;
    }
    n % 4 != 3
}

/// Whether `x` has the form 4^a (8b + 7), i.e. is not a sum of three squares.
fn is_excluded_by_three_squares(x: &BigInt) -> bool {
    let mut n = x.clone();
    if n.is_zero() {
        return false;
    }
    let four = BigInt::from(4);
    while (&n % &four).is_zero() {
        n /= &four;
    }
    (&n % BigInt::from(8)) == BigInt::from(7)
}

/// Depth-first search over ascending denominators; `m` holds the chosen
/// denominators (ascending) and `rem` the remaining sum.
fn res_rep(rem: &BigRational, m: &mut Vec<u64>, n: usize, out: &mut Vec<Vec<u64>>) {
    let len = m.len();
    if len == n {
        if rem.is_zero() {
            out.push(m.clone());
        }
        return;
    }
    if !rem.is_positive() {
        return;
    }
    let p = rem.numer();
    let q = rem.denom();
    let last = m.last().copied().unwrap_or(1);
    if len + 1 == n {
        if p.is_one() {
            if let Some(r) = is_square_big(q) {
                let r = r.to_u64().expect("denominator overflow");
                if r >= last {
                    m.push(r);
                    out.push(m.clone());
                    m.pop();
                }
            }
        }
        return;
    }
    if len + 2 == n && !(is_sum_of_two_squares(p) && is_sum_of_two_squares(q)) {
        return;
    }
    if len + 3 == n && is_excluded_by_three_squares(&(p * q)) {
        return;
    }
    let lo = (isqrt_big(&((q - BigInt::one()) / p)) + BigInt::one())
        .to_u64()
        .expect("denominator overflow")
        .max(last);
    let hi = isqrt_big(&(BigInt::from((n - len) as u64) * q / p))
        .to_u64()
        .expect("denominator overflow");
    for r in lo..=hi {
        let next = rem - BigRational::new(BigInt::one(), BigInt::from(r) * BigInt::from(r));
        m.push(r);
        res_rep(&next, m, n, out);
        m.pop();
    }
}

/// All `(s_1 >= ... >= s_r)` with `sum 1/s_i^2 = q`, in increasing
/// lexicographic order. No divisibility condition is imposed.
pub fn all_sq_egyptian(q: u64, r: usize) -> Vec<Vec<u64>> {
    if r == 0 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    res_rep(
        &BigRational::from_integer(q.into()),
        &mut Vec::new(),
        r,
        &mut raw,
    );
    let mut out: Vec<Vec<u64>> = raw
        .into_iter()
        .map(|mut m| {
            m.reverse();
            m
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Solutions of [`all_sq_egyptian`] with every `s_i` dividing `s_1`.
pub fn enumerate_sq_egyptian(q: u64, r: usize) -> Vec<Vec<u64>> {
    all_sq_egyptian(q, r)
        .into_iter()
        .filter(|s| s.iter().all(|v| s[0] % v == 0))
        .collect()
}

/// Types coming from solutions without a denominator equal to 1:
/// dimensions `s_1 / s_i`, sorted ascending.
pub fn modular_rep(q: u64, r: usize) -> Vec<FusionType> {
    enumerate_sq_egyptian(q, r)
        .into_iter()
        .filter(|s| s.iter().all(|&v| v != 1))
        .map(|s| {
            let top = s[0];
            let mut d: Vec<u64> = s.iter().map(|v| top / v).collect();
            d.sort_unstable();
            d
        })
        .collect()
}

/// All candidate types of rank `r` (integral modular data), sorted lexicographically.
pub fn types_for_rank(r: usize) -> Vec<FusionType> {
    let mut set: BTreeSet<FusionType> = BTreeSet::new();
    if r == 0 {
        return Vec::new();
    }
    set.insert(vec![1; r]);
    for k in 0..r {
        let n = r - k;
        for q in 1..=(n / 2) as u64 {
            for s in enumerate_sq_egyptian(q, n) {
                if s.contains(&1) {
                    continue;
                }
                // Denominators equal to 1 contribute dimension s_1.
                let top = s[0];
                let mut t: Vec<u64> = s.iter().map(|v| top / v).collect();
                t.extend(std::iter::repeat(top).take(k));
                t.sort_unstable();
                set.insert(t);
            }
        }
    }
    set.into_iter().collect()
}
