use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{amv_equations, ord_t, thetas};
use crate::arith::numtheory::{gcd, prime_divisors};
use crate::arith::CycNumber;
use crate::chartable::verlinde;
use crate::fusion::FusionData;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModularError {
    #[error("S-matrix first row is not a list of positive integers")]
    BadFirstRow,
    #[error("p+ p- differs from the global dimension")]
    GaussSumNorm,
    #[error("Gauss sum ratio is not a root of unity")]
    NotRootOfUnity,
}

/// Outcome of every modular-data check, each evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub s_symmetric: bool,
    pub t_normalized: bool,
    pub first_row: bool,
    pub unitary: bool,
    pub charge_conjugation: bool,
    pub verlinde: bool,
    #[serde(with = "opt_ratio")]
    pub central_charge: Option<Rational64>,
    pub modular_relation: bool,
    pub cauchy: bool,
    pub s_conductor: bool,
    pub positive_columns: Vec<usize>,
    pub fs_cyclotomic: bool,
    pub fs1: bool,
    pub fs2: bool,
    pub amv: bool,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.s_symmetric
            && self.t_normalized
            && self.first_row
            && self.unitary
            && self.charge_conjugation
            && self.verlinde
            && self.central_charge.is_some()
            && self.modular_relation
            && self.cauchy
            && self.s_conductor
            && !self.positive_columns.is_empty()
            && self.fs_cyclotomic
            && self.fs1
            && self.fs2
            && self.amv
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let checks = [
            ("s_symmetric", self.s_symmetric),
            ("t_normalized", self.t_normalized),
            ("first_row", self.first_row),
            ("unitary", self.unitary),
            ("charge_conjugation", self.charge_conjugation),
            ("verlinde", self.verlinde),
            ("central_charge", self.central_charge.is_some()),
            ("modular_relation", self.modular_relation),
            ("cauchy", self.cauchy),
            ("s_conductor", self.s_conductor),
            ("positive_column", !self.positive_columns.is_empty()),
            ("fs_cyclotomic", self.fs_cyclotomic),
            ("fs1", self.fs1),
            ("fs2", self.fs2),
            ("amv", self.amv),
        ];
        checks.iter().filter(|c| !c.1).map(|c| c.0).collect()
    }

    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("report serializes");
        hex::encode(Sha256::digest(json))
    }
}

type Matrix = Vec<Vec<CycNumber>>;

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let r = a.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut acc = CycNumber::zero();
                    for k in 0..r {
                        if a[i][k].is_zero() || b[k][j].is_zero() {
                            continue;
                        }
                        acc = &acc + &(&a[i][k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn dims_from_s(s: &Matrix) -> Option<Vec<u64>> {
    s[0].iter()
        .map(|x| {
            x.to_rational()
                .filter(|q| q.is_integer() && q.is_positive())
                .and_then(|q| q.to_integer().to_u64())
        })
        .collect()
}

/// Central charge `c` in `[0, 8)` with `p+ = D zeta_8^c`.
pub fn central_charge(s: &Matrix, spins: &[Rational64]) -> Result<Rational64, ModularError> {
    let dims = dims_from_s(s).ok_or(ModularError::BadFirstRow)?;
    let theta = thetas(spins);
    let fpdim: u64 = dims.iter().map(|d| d * d).sum();
    let mut p_plus = CycNumber::zero();
    for (t, &d) in theta.iter().zip(&dims) {
        p_plus = &p_plus + &t.scale_int((d * d) as i64);
    }
    let p_minus = p_plus.conj();
    if &p_plus * &p_minus != CycNumber::from_int(fpdim as i64) {
        return Err(ModularError::GaussSumNorm);
    }
    let inv = BigRational::new(BigInt::one(), BigInt::from(fpdim));
    let ratio = (&p_plus * &p_plus).scale(&inv);
    if ratio.as_root_of_unity().is_none() {
        return Err(ModularError::NotRootOfUnity);
    }
    let unit = (&p_plus * &CycNumber::sqrt_int(fpdim)).scale(&inv);
    let (n, k) = unit
        .as_root_of_unity()
        .ok_or(ModularError::NotRootOfUnity)?;
    let c = Rational64::new(8 * k as i64, n as i64);
    let eight = Rational64::from_integer(8);
    Ok(c - (c / eight).floor() * eight)
}

/// `nu_n(i) = D^-2 sum_{j,k} N_{j,k}^i d_j theta_j^n conj(d_k theta_k^n)`.
pub fn fs_indicator(f: &FusionData, dims: &[u64], spins: &[Rational64], n: u32) -> Vec<CycNumber> {
    let r = f.rank();
    let fpdim: u64 = dims.iter().map(|d| d * d).sum();
    let a: Vec<CycNumber> = spins
        .iter()
        .zip(dims)
        .map(|(s, &d)| {
            CycNumber::zeta(*s.denom() as u32, *s.numer() * n as i64).scale_int(d as i64)
        })
        .collect();
    let ac: Vec<CycNumber> = a.iter().map(|x| x.conj()).collect();
    let inv = BigRational::new(BigInt::one(), BigInt::from(fpdim));
    (0..r)
        .map(|i| {
            let mut acc = CycNumber::zero();
            for j in 0..r {
                for k in 0..r {
                    let c = f.get(j, k, i);
                    if c != 0 {
                        acc = &acc + &(&a[j] * &ac[k]).scale_int(c as i64);
                    }
                }
            }
            acc.scale(&inv)
        })
        .collect()
}

/// Runs every modular-data check on `(S, T)` over the ring `f`.
pub fn verify_modular(f: &FusionData, s: &Matrix, spins: &[Rational64]) -> VerificationReport {
    let r = f.rank();
    let dual = f.dual();
    let dims = f.fpdims().unwrap_or_else(|| vec![0; r]);
    let fpdim: u64 = dims.iter().map(|d| d * d).sum();
    let d2 = CycNumber::from_int(fpdim as i64);
    let ord = ord_t(spins);
    let theta = thetas(spins);
    let shape_ok = s.len() == r && s.iter().all(|row| row.len() == r) && spins.len() == r;
    if !shape_ok {
        return VerificationReport {
            s_symmetric: false,
            t_normalized: false,
            first_row: false,
            unitary: false,
            charge_conjugation: false,
            verlinde: false,
            central_charge: None,
            modular_relation: false,
            cauchy: false,
            s_conductor: false,
            positive_columns: Vec::new(),
            fs_cyclotomic: false,
            fs1: false,
            fs2: false,
            amv: false,
        };
    }

    let s_symmetric = (0..r).all(|i| (0..i).all(|j| s[i][j] == s[j][i]));
    let half = Rational64::new(1, 2);
    let t_normalized = spins[0].is_zero() && spins.iter().all(|q| *q > -half && *q <= half);
    let first_row = (0..r).all(|i| s[0][i] == CycNumber::from_int(dims[i] as i64));

    let s_conj: Matrix = (0..r)
        .map(|i| (0..r).map(|j| s[j][i].conj()).collect())
        .collect();
    let sss = matmul(s, &s_conj);
    let unitary = (0..r).all(|i| {
        (0..r).all(|j| {
            sss[i][j]
                == if i == j {
                    d2.clone()
                } else {
                    CycNumber::zero()
                }
        })
    });
    let s2 = matmul(s, s);
    let charge_conjugation = (0..r).all(|i| {
        (0..r).all(|j| {
            s2[i][j]
                == if j == dual[i] {
                    d2.clone()
                } else {
                    CycNumber::zero()
                }
        })
    }) && (0..r).any(|i| dual[i] == i);

    let verlinde_ok = s[0].iter().all(|x| x.is_rational() && !x.is_zero()) && {
        let n = verlinde(s, &d2);
        (0..r).all(|i| {
            (0..r).all(|j| (0..r).all(|k| n[i][j][k] == CycNumber::from_int(f.get(i, j, k) as i64)))
        })
    };

    let central = if first_row {
        central_charge(s, spins).ok()
    } else {
        None
    };

    let modular_relation = {
        let mut p_plus = CycNumber::zero();
        for (t, &d) in theta.iter().zip(&dims) {
            p_plus = &p_plus + &t.scale_int((d * d) as i64);
        }
        let st: Matrix = (0..r)
            .map(|i| (0..r).map(|j| &s[i][j] * &theta[j]).collect())
            .collect();
        let st3 = matmul(&matmul(&st, &st), &st);
        (0..r).all(|i| (0..r).all(|j| st3[i][j] == &p_plus * &s2[i][j]))
    };

    let cauchy = prime_divisors(ord) == prime_divisors(fpdim);
    let s_conductor = s.iter().flatten().all(|x| ord % x.conductor() as u64 == 0);

    let positive_columns: Vec<usize> = (0..r)
        .filter(|&j| {
            (0..r).all(|i| {
                s[i][j]
                    .to_rational()
                    .is_some_and(|q| q >= BigRational::from_integer(BigInt::from(dims[j])))
            })
        })
        .collect();

    let mut fs_cyclotomic = true;
    let mut fs1 = false;
    let mut fs2 = false;
    for n in 1..=ord.max(2) as u32 {
        let nu = fs_indicator(f, &dims, spins, n);
        let bound = gcd(n as u64, ord);
        fs_cyclotomic &= nu
            .iter()
            .all(|x| x.is_integral() && bound % x.conductor() as u64 == 0);
        if n == 1 {
            fs1 = (0..r).all(|i| {
                nu[i]
                    == if i == 0 {
                        CycNumber::one()
                    } else {
                        CycNumber::zero()
                    }
            });
        }
        if n == 2 {
            fs2 = (0..r).all(|i| {
                if dual[i] == i {
                    nu[i] == CycNumber::one() || nu[i] == CycNumber::from_int(-1)
                } else {
                    nu[i].is_zero()
                }
            });
        }
    }

    let amv = {
        let t: Vec<i64> = spins
            .iter()
            .map(|q| {
                (q * Rational64::from_integer(ord as i64))
                    .to_integer()
                    .rem_euclid(ord as i64)
            })
            .collect();
        amv_equations(f).iter().all(|row| {
            row.iter()
                .zip(&t[1..])
                .map(|(&a, &b)| a as i128 * b as i128)
                .sum::<i128>()
                .rem_euclid(ord as i128)
                == 0
        })
    };

    VerificationReport {
        s_symmetric,
        t_normalized,
        first_row,
        unitary,
        charge_conjugation,
        verlinde: verlinde_ok,
        central_charge: central,
        modular_relation,
        cauchy,
        s_conductor,
        positive_columns,
        fs_cyclotomic,
        fs1,
        fs2,
        amv,
    }
}

mod opt_ratio {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
        q.map(|x| x.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational64>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|x| x.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}
