//! T-matrices from the Anderson-Moore-Vafa equations, and the modular data
//! obtained by pairing them with S-matrix candidates.

mod verify;
pub mod zmod;

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::numtheory::{divisors, factorize, lcm};
use crate::arith::CycNumber;
use crate::chartable::{automorphisms, eigentable, self_transpose_search, SMatrixCandidate};
use crate::fusion::FusionData;

pub use verify::{central_charge, fs_indicator, verify_modular, ModularError, VerificationReport};
pub use zmod::ZmodSystem;

/// Largest integer whose square divides `fpdim^5`.
pub fn amv_modulus(fpdim: u64) -> u64 {
    factorize(fpdim)
        .into_iter()
        .map(|(p, e)| p.pow(5 * e / 2))
        .product()
}

/// Residues `v_i` modulo `m` with `theta_i = zeta_m^{v_i}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinVector {
    pub m: u64,
    pub v: Vec<u64>,
}

impl SpinVector {
    /// Spins `v_i / m` represented in `(-1/2, 1/2]`.
    pub fn spins(&self) -> Vec<Rational64> {
        let m = self.m as i64;
        self.v
            .iter()
            .map(|&v| {
                let v = v as i64 % m;
                let v = if 2 * v > m { v - m } else { v };
                Rational64::new(v, m)
            })
            .collect()
    }

    pub fn ord_t(&self) -> u64 {
        ord_t(&self.spins())
    }
}

/// Least common multiple of the spin denominators.
pub fn ord_t(spins: &[Rational64]) -> u64 {
    spins.iter().fold(1, |acc, s| lcm(acc, *s.denom() as u64))
}

/// `theta_i = exp(2 pi i s_i)` as exact cyclotomic numbers.
pub fn thetas(spins: &[Rational64]) -> Vec<CycNumber> {
    spins
        .iter()
        .map(|s| CycNumber::zeta(*s.denom() as u32, *s.numer()))
        .collect()
}

/// Distinct AMV coefficient rows over the variables `t_1, ..., t_{r-1}`.
pub fn amv_equations(f: &FusionData) -> Vec<Vec<i64>> {
    let r = f.rank();
    let n = |i: usize, j: usize, k: usize| f.get(i, j, k) as i64;
    let mut rows = std::collections::BTreeSet::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let mut c = vec![0i64; r];
                    let a: i64 = (0..r).map(|p| n(i, j, p) * n(p, k, l)).sum();
                    if a == 0 {
                        continue;
                    }
                    for x in [i, j, k, l] {
                        c[x] += a;
                    }
                    for p in 0..r {
                        c[p] -= n(i, j, p) * n(p, k, l)
                            + n(i, k, p) * n(j, p, l)
                            + n(j, k, p) * n(i, p, l);
                    }
                    if c[1..].iter().any(|&x| x != 0) {
                        rows.insert(c[1..].to_vec());
                    }
                }
            }
        }
    }
    rows.into_iter().collect()
}

/// All AMV solutions modulo `m` with `t_0 = 0`.
pub fn amv_solve_mod(f: &FusionData, m: u64) -> Vec<SpinVector> {
    let r = f.rank();
    let mut sys = ZmodSystem::new(r - 1, m);
    for row in amv_equations(f) {
        sys.add_row(&row);
    }
    sys.solutions()
        .into_iter()
        .map(|t| {
            let mut v = vec![0];
            v.extend(t);
            SpinVector { m, v }
        })
        .collect()
}

/// AMV solutions modulo the default modulus of the ring.
pub fn amv_solve(f: &FusionData) -> Vec<SpinVector> {
    let fpdim: u64 = f
        .fpdims()
        .map(|d| d.iter().map(|x| x * x).sum())
        .unwrap_or(1);
    amv_solve_mod(f, amv_modulus(fpdim))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularDatum {
    pub ring_hash: String,
    pub ring: FusionData,
    pub s: Vec<Vec<CycNumber>>,
    #[serde(with = "ratio_list")]
    pub spins: Vec<Rational64>,
    pub ord_t: u64,
    pub conductor_s: u32,
    #[serde(with = "ratio_one")]
    pub central_charge: Rational64,
    pub fs2: Vec<i64>,
    pub report: VerificationReport,
}

impl ModularDatum {
    pub fn rank(&self) -> usize {
        self.spins.len()
    }
}

/// Modular data on `f`, one per class under ring automorphisms.
pub fn classify_modular(f: &FusionData) -> Vec<ModularDatum> {
    classify_modular_with_modulus(f, None)
}

/// As [`classify_modular`], solving AMV modulo `modulus` when given.
pub fn classify_modular_with_modulus(f: &FusionData, modulus: Option<u64>) -> Vec<ModularDatum> {
    if !f.is_commutative() {
        return Vec::new();
    }
    let Ok(table) = eigentable(f) else {
        return Vec::new();
    };
    let cands = self_transpose_search(&table, f);
    modular_data_from_candidates(f, &cands, modulus)
}

/// Pairs the given S candidates of `f` with its AMV spin vectors and keeps
/// the verified pairs, one per class under ring automorphisms.
pub fn modular_data_from_candidates(
    f: &FusionData,
    cands: &[SMatrixCandidate],
    modulus: Option<u64>,
) -> Vec<ModularDatum> {
    if cands.is_empty() {
        return Vec::new();
    }
    let Some(dims) = f.fpdims() else {
        return Vec::new();
    };
    let fpdim: u64 = dims.iter().map(|d| d * d).sum();
    let m = modulus.unwrap_or_else(|| amv_modulus(fpdim));
    let spin_vectors = amv_solve_mod(f, m);
    let auts = automorphisms(f, &dims);
    let hash = f.canonical_hash();
    let mut found: BTreeMap<(Vec<Rational64>, Vec<String>), ModularDatum> = BTreeMap::new();
    for cand in cands {
        let s_num: Vec<Vec<Complex64>> = cand
            .s
            .iter()
            .map(|row| row.iter().map(|x| x.to_complex()).collect())
            .collect();
        let s_str: Vec<Vec<String>> = cand
            .s
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect();
        for sv in &spin_vectors {
            let spins = sv.spins();
            if !numeric_prefilter(f, &dims, &s_num, &spins) {
                continue;
            }
            let report = verify_modular(f, &cand.s, &spins);
            if !report.ok() {
                continue;
            }
            let key = auts
                .iter()
                .map(|p| {
                    let sp: Vec<Rational64> = p.iter().map(|&i| spins[i]).collect();
                    let ss: Vec<String> = p
                        .iter()
                        .flat_map(|&i| p.iter().map(move |&j| (i, j)))
                        .map(|(i, j)| s_str[i][j].clone())
                        .collect();
                    (sp, ss)
                })
                .min()
                .expect("identity is an automorphism");
            if found.contains_key(&key) {
                continue;
            }
            let fs2 = fs_indicator(f, &dims, &spins, 2)
                .iter()
                .map(|x| {
                    x.to_rational()
                        .map(|q| q.to_integer().try_into().unwrap_or(0))
                        .unwrap_or(0)
                })
                .collect();
            let datum = ModularDatum {
                ring_hash: hash.clone(),
                ring: f.clone(),
                s: cand.s.clone(),
                ord_t: ord_t(&spins),
                conductor_s: cand
                    .s
                    .iter()
                    .flatten()
                    .fold(1u64, |acc, x| lcm(acc, x.conductor() as u64))
                    as u32,
                central_charge: report
                    .central_charge
                    .expect("verified data have a central charge"),
                fs2,
                spins,
                report,
            };
            found.insert(key, datum);
        }
    }
    found.into_values().collect()
}

fn numeric_prefilter(
    f: &FusionData,
    dims: &[u64],
    s: &[Vec<Complex64>],
    spins: &[Rational64],
) -> bool {
    let r = dims.len();
    let tau = std::f64::consts::TAU;
    let theta: Vec<Complex64> = spins
        .iter()
        .map(|q| Complex64::from_polar(1.0, tau * *q.numer() as f64 / *q.denom() as f64))
        .collect();
    let d2: f64 = dims.iter().map(|&d| (d * d) as f64).sum();
    let p_plus: Complex64 = (0..r).map(|i| theta[i] * (dims[i] * dims[i]) as f64).sum();
    let tol = 1e-6 * d2.powf(1.5).max(1.0);
    if (p_plus.norm_sqr() - d2).abs() > tol {
        return false;
    }
    let mul = |a: &Vec<Vec<Complex64>>, b: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| (0..r).map(|k| a[i][k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    };
    let st: Vec<Vec<Complex64>> = (0..r)
        .map(|i| (0..r).map(|j| s[i][j] * theta[j]).collect())
        .collect();
    let st3 = mul(&mul(&st, &st), &st);
    let s2 = mul(&s.to_vec(), &s.to_vec());
    if (0..r).any(|i| (0..r).any(|j| (st3[i][j] - p_plus * s2[i][j]).norm() > tol)) {
        return false;
    }
    // Second indicator must be +-1 on self-dual objects and 0 elsewhere.
    (0..r).all(|i| {
        let mut nu = Complex64::zero();
        for j in 0..r {
            for k in 0..r {
                let c = f.get(j, k, i);
                if c != 0 {
                    nu += theta[j].powu(2)
                        * theta[k].conj().powu(2)
                        * (c as u64 * dims[j] * dims[k]) as f64;
                }
            }
        }
        nu /= d2;
        if f.dual()[i] == i {
            (nu.norm() - 1.0).abs() < 1e-6 && nu.im.abs() < 1e-6 && (nu.re.abs() - 1.0).abs() < 1e-6
        } else {
            nu.norm() < 1e-6
        }
    })
}

/// Invariant factor lists `n_1 | n_2 | ...` of the abelian groups of order `n`,
/// with more factors first.
pub fn abelian_groups(n: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, last: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 1 {
            out.push(cur.clone());
            return;
        }
        for d in divisors(rem as u64).into_iter().map(|d| d as usize) {
            if d > 1 && d % last == 0 {
                cur.push(d);
                go(rem / d, d, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out.sort_by_key(|g| std::cmp::Reverse(g.len()));
    out
}

/// Name such as `C2^3` or `C2xC4`.
pub fn group_name(factors: &[usize]) -> String {
    if factors.is_empty() {
        return "C1".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < factors.len() {
        let mut j = i;
        while j < factors.len() && factors[j] == factors[i] {
            j += 1;
        }
        parts.push(if j - i == 1 {
            format!("C{}", factors[i])
        } else {
            format!("C{}^{}", factors[i], j - i)
        });
        i = j;
    }
    parts.join("x")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointedClass {
    pub group: String,
    pub factors: Vec<usize>,
    pub data: Vec<ModularDatum>,
}

/// Modular data on the group rings of all abelian groups of order up to `order_bound`.
pub fn pointed_pipeline(order_bound: usize) -> Vec<PointedClass> {
    pointed_pipeline_with_modulus(order_bound, |m| m)
}

/// As [`pointed_pipeline`] with the AMV modulus passed through `adjust`.
pub fn pointed_pipeline_with_modulus(
    order_bound: usize,
    adjust: impl Fn(u64) -> u64 + Sync,
) -> Vec<PointedClass> {
    use rayon::prelude::*;
    let groups: Vec<Vec<usize>> = (1..=order_bound).flat_map(abelian_groups).collect();
    groups
        .par_iter()
        .map(|g| {
            let f = FusionData::abelian_group(g);
            let order: usize = g.iter().product();
            let data = classify_modular_with_modulus(&f, Some(adjust(amv_modulus(order as u64))));
            PointedClass {
                group: group_name(g),
                factors: g.clone(),
                data,
            }
        })
        .collect()
}

pub(crate) mod ratio_one {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

pub(crate) mod ratio_list {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
        q.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational64>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| x.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus() {
        assert_eq!(amv_modulus(36), 7776);
        assert_eq!(amv_modulus(32), 4096);
        assert_eq!(amv_modulus(1), 1);
    }

    #[test]
    fn groups_of_small_order() {
        assert_eq!(abelian_groups(1), vec![Vec::<usize>::new()]);
        assert_eq!(abelian_groups(8), vec![vec![2, 2, 2], vec![2, 4], vec![8]]);
        assert_eq!(abelian_groups(12), vec![vec![2, 6], vec![12]]);
        assert_eq!(group_name(&[2, 2, 2]), "C2^3");
        assert_eq!(group_name(&[2, 4]), "C2xC4");
    }

    #[test]
    fn trivial_ring() {
        let f = FusionData::trivial();
        assert_eq!(amv_solve(&f), vec![SpinVector { m: 1, v: vec![0] }]);
        let data = classify_modular(&f);
        assert_eq!(data.len(), 1);
        assert_eq!(data[0].central_charge, Rational64::zero());
    }

    #[test]
    fn cyclic_two() {
        let f = FusionData::abelian_group(&[2]);
        let sols: Vec<Vec<Rational64>> = amv_solve(&f).iter().map(|s| s.spins()).collect();
        assert!(sols.contains(&vec![Rational64::zero(), Rational64::new(1, 4)]));
        assert!(sols.contains(&vec![Rational64::zero(), Rational64::new(-1, 4)]));
        let data = classify_modular(&f);
        assert_eq!(data.len(), 2);
    }

    #[test]
    fn cyclic_three() {
        let data = classify_modular(&FusionData::abelian_group(&[3]));
        let mut spins: Vec<Vec<Rational64>> = data
            .iter()
            .map(|d| {
                let mut s = d.spins.clone();
                s.sort();
                s
            })
            .collect();
        spins.sort();
        let third = Rational64::new(1, 3);
        assert_eq!(
            spins,
            vec![
                vec![-third, -third, Rational64::zero()],
                vec![Rational64::zero(), third, third]
            ]
        );
    }
}
