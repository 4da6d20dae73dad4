//! Published classification data used as regression targets.

use num_rational::Rational64;
use serde::Deserialize;

use crate::arith::CycNumber;
use crate::fusion::FusionData;

const NONPOINTED: &str = include_str!("../fixtures/nonpointed.json");
const POINTED: &str = include_str!("../fixtures/pointed.json");

/// Published per-rank counts, index `r - 1` for rank `r`.
pub mod expected {
    pub const EGYPTIAN_Q1: [usize; 8] = [1, 0, 0, 1, 0, 1, 1, 4];
    pub const TYPES: [usize; 11] = [1, 1, 1, 1, 2, 3, 3, 7, 11, 42, 144];
    pub const PERFECT_TYPES: [usize; 11] = [1, 0, 0, 0, 0, 1, 1, 2, 2, 24, 88];
    pub const LOCAL_EXCLUDED: [usize; 11] = [0, 0, 0, 0, 0, 1, 1, 3, 5, 21, 63];
    pub const RINGS: [usize; 11] = [1, 1, 1, 2, 3, 6, 9, 23, 105, 158, 1218];
    pub const NONCOMMUTATIVE: [usize; 11] = [0, 0, 0, 0, 0, 1, 0, 4, 5, 7, 38];
    pub const SELF_TRANSPOSABLE: [usize; 11] = [1, 1, 1, 2, 1, 1, 3, 7, 4, 11, 12];
    pub const POINTED_MD: [usize; 11] = [1, 2, 2, 9, 2, 4, 2, 12, 4, 4, 2];
    pub const NONPOINTED_MD: [usize; 11] = [0, 0, 0, 0, 0, 0, 0, 8, 0, 3, 8];
    /// Per abelian group, in the order of [`crate::modular::pointed_pipeline`].
    pub const POINTED_PER_GROUP: [usize; 15] = [1, 2, 2, 5, 4, 2, 4, 2, 4, 4, 4, 2, 2, 4, 2];
}

#[derive(Debug, Clone)]
pub struct PublishedDatum {
    pub dims: Vec<u64>,
    /// Source tensor when it could be read unambiguously.
    pub ring: Option<FusionData>,
    pub spins: Vec<Rational64>,
    pub conductor_s: u32,
    pub ord_t: u64,
    /// Reduced into `[0, 8)`.
    pub central_charge: Rational64,
    pub fs2: Vec<i64>,
    pub s: Vec<Vec<CycNumber>>,
}

impl PublishedDatum {
    pub fn rank(&self) -> usize {
        self.spins.len()
    }
}

#[derive(Debug, Clone)]
pub struct PublishedPointed {
    pub group: String,
    pub factors: Vec<usize>,
    pub spins: Vec<Vec<Rational64>>,
}

#[derive(Deserialize)]
struct RawBlock {
    #[serde(rename = "type")]
    dims: Vec<u64>,
    fusion: Option<Vec<Vec<Vec<u32>>>>,
    data: Vec<RawDatum>,
}

#[derive(Deserialize)]
struct RawDatum {
    spins: Vec<String>,
    conductor_s: u32,
    ord_t: u64,
    central_charge: i64,
    fs2: Vec<i64>,
    s: Vec<Vec<Vec<(i64, u32, i64)>>>,
}

#[derive(Deserialize)]
struct RawPointed {
    group: String,
    factors: Vec<usize>,
    spins: Vec<Vec<String>>,
}

fn ratios(v: &[String]) -> Vec<Rational64> {
    v.iter()
        .map(|x| x.parse().expect("fixture rational"))
        .collect()
}

pub fn nonpointed() -> Vec<PublishedDatum> {
    let blocks: Vec<RawBlock> = serde_json::from_str(NONPOINTED).expect("fixture json");
    let mut out = Vec::new();
    for b in blocks {
        let ring = b
            .fusion
            .map(|t| FusionData::from_tensor(&t).expect("fixture tensor"));
        for d in b.data {
            out.push(PublishedDatum {
                dims: b.dims.clone(),
                ring: ring.clone(),
                spins: ratios(&d.spins),
                conductor_s: d.conductor_s,
                ord_t: d.ord_t,
                central_charge: Rational64::from_integer(d.central_charge.rem_euclid(8)),
                fs2: d.fs2,
                s: d.s
                    .iter()
                    .map(|row| row.iter().map(|x| CycNumber::from_terms(x)).collect())
                    .collect(),
            });
        }
    }
    out
}

pub fn pointed() -> Vec<PublishedPointed> {
    let raw: Vec<RawPointed> = serde_json::from_str(POINTED).expect("fixture json");
    raw.into_iter()
        .map(|g| PublishedPointed {
            group: g.group,
            factors: g.factors,
            spins: g.spins.iter().map(|s| ratios(s)).collect(),
        })
        .collect()
}

/// Relabeling `p` with `p[0] = 0` such that entry `(i, j)` of the first datum
/// equals entry `(p[i], p[j])` of the second and spin `i` equals spin `p[i]`.
pub fn find_relabeling(
    s_a: &[Vec<CycNumber>],
    spins_a: &[Rational64],
    s_b: &[Vec<CycNumber>],
    spins_b: &[Rational64],
) -> Option<Vec<usize>> {
    let r = s_a.len();
    if s_b.len() != r
        || spins_a.len() != r
        || spins_b.len() != r
        || spins_a.first() != spins_b.first()
    {
        return None;
    }
    let a: Vec<Vec<String>> = s_a
        .iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect())
        .collect();
    let b: Vec<Vec<String>> = s_b
        .iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect())
        .collect();
    let sorted = |row: &Vec<String>| {
        let mut v = row.clone();
        v.sort();
        v
    };
    let rows_a: Vec<Vec<String>> = a.iter().map(sorted).collect();
    let rows_b: Vec<Vec<String>> = b.iter().map(sorted).collect();
    fn go(
        i: usize,
        p: &mut Vec<usize>,
        used: &mut [bool],
        a: &[Vec<String>],
        b: &[Vec<String>],
        ok: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        let r = a.len();
        if i == r {
            return true;
        }
        for k in 0..r {
            if used[k] || !ok(i, k) || (0..i).any(|j| a[i][j] != b[k][p[j]]) || a[i][i] != b[k][k] {
                continue;
            }
            p.push(k);
            used[k] = true;
            if go(i + 1, p, used, a, b, ok) {
                return true;
            }
            used[k] = false;
            p.pop();
        }
        false
    }
    let ok = |i: usize, k: usize| {
        spins_a[i] == spins_b[k] && rows_a[i] == rows_b[k] && (i == 0) == (k == 0)
    };
    let mut p = Vec::with_capacity(r);
    let mut used = vec![false; r];
    go(0, &mut p, &mut used, &a, &b, &ok).then_some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads() {
        let np = nonpointed();
        assert_eq!(np.len(), 19);
        assert!(np
            .iter()
            .all(|d| d.s.len() == d.rank() && d.fs2.len() == d.rank()));
        let p = pointed();
        assert_eq!(
            p.iter().map(|g| g.spins.len()).collect::<Vec<_>>(),
            expected::POINTED_PER_GROUP
        );
        let d = &np[0];
        let mut p: Vec<usize> = (0..d.rank()).collect();
        p.swap(6, 7);
        let s2: Vec<Vec<CycNumber>> = p
            .iter()
            .map(|&i| p.iter().map(|&j| d.s[i][j].clone()).collect())
            .collect();
        let sp2: Vec<Rational64> = p.iter().map(|&i| d.spins[i]).collect();
        let q = find_relabeling(&s2, &sp2, &d.s, &d.spins).unwrap();
        assert!((0..d.rank()).all(|i| sp2[i] == d.spins[q[i]]));
        assert!(find_relabeling(&np[0].s, &np[0].spins, &np[1].s, &np[1].spins).is_none());
        assert_eq!(
            expected::POINTED_MD.iter().sum::<usize>()
                + expected::NONPOINTED_MD.iter().sum::<usize>(),
            63
        );
    }
}
