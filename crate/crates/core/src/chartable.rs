//! Character tables of commutative fusion rings and their self-transpose
//! normalizations (candidate S-matrices).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::numtheory::divisors;
use crate::arith::{CycNumber, OrbitRecognizer};
use crate::fusion::FusionData;
use crate::modular::amv_modulus;

const TOL: f64 = 1e-7;
const ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharTableError {
    #[error("fusion ring is not commutative")]
    NotCommutative,
    #[error("fusion ring has no integral Frobenius-Perron dimensions")]
    NotIntegral,
    #[error("character table is not cyclotomic within the conductor bound")]
    NotCyclotomic,
    #[error("could not separate the simultaneous eigenspaces numerically")]
    PrecisionExhausted,
}

/// Numeric character table: `values[j][i]` is character `j` at basis element `i`.
#[derive(Debug, Clone)]
pub struct NumericTable {
    pub values: Vec<Vec<Complex64>>,
    pub codegrees: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenTable {
    /// `lambda[i][j]`: character `j` evaluated at basis element `i`.
    pub lambda: Vec<Vec<CycNumber>>,
    pub codegrees: Vec<CycNumber>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SMatrixCandidate {
    pub s: Vec<Vec<CycNumber>>,
    /// Column `j` of `s` is `d_j` times character `q[j]`.
    pub q: Vec<usize>,
}

/// Simultaneous eigenvalues of the fusion matrices, in double precision.
/// Column 0 is the FP character; the others are sorted by decreasing
/// codegree, then by their values.
pub fn numeric_table(f: &FusionData) -> Result<NumericTable, CharTableError> {
    if !f.is_commutative() {
        return Err(CharTableError::NotCommutative);
    }
    let r = f.rank();
    let mats: Vec<DMatrix<f64>> = (0..r)
        .map(|i| {
            let m = f.fusion_matrix(i);
            DMatrix::from_fn(r, r, |a, b| m[a][b] as f64)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(r as u64);
    for _ in 0..ATTEMPTS {
        // Hermitian combination sum a_i (M_i + M_i^T) + i b_i (M_i - M_i^T):
        // its eigenvalues separate characters for generic a, b.
        let mut h = DMatrix::<Complex64>::zeros(r, r);
        for m in &mats {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            for x in 0..r {
                for y in 0..r {
                    let s = m[(x, y)] + m[(y, x)];
                    let d = m[(x, y)] - m[(y, x)];
                    h[(x, y)] += Complex64::new(a * s, b * d);
                }
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let scale = ev.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        if ev.windows(2).any(|w| w[1] - w[0] < 1e-6 * scale) {
            continue;
        }
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(r);
        for j in 0..r {
            let v = eig.eigenvectors.column(j);
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let chi: Vec<Complex64> = mats
                .iter()
                .map(|m| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..r {
                        for y in 0..r {
                            acc += v[x].conj() * m[(x, y)] * v[y];
                        }
                    }
                    acc / norm
                })
                .collect();
            cols.push(chi);
        }
        let codeg = |c: &Vec<Complex64>| c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let fp = cols
            .iter()
            .position(|c| c.iter().all(|z| z.re > 0.5 && z.im.abs() < TOL))
            .ok_or(CharTableError::PrecisionExhausted)?;
        let first = cols.remove(fp);
        let key = |c: &Vec<Complex64>| {
            let mut k = vec![-(codeg(c) * 1e6).round() as i64];
            for z in c {
                k.push((z.re * 1e6).round() as i64);
                k.push((z.im * 1e6).round() as i64);
            }
            k
        };
        cols.sort_by_key(key);
        cols.insert(0, first);
        let codegrees = cols.iter().map(codeg).collect();
        return Ok(NumericTable {
            values: cols,
            codegrees,
        });
    }
    Err(CharTableError::PrecisionExhausted)
}

/// Conductor candidates for a ring of the given FP dimension: divisors of
/// the AMV modulus not exceeding the FP dimension, ascending.
pub fn conductor_levels(fpdim: u64) -> Vec<u32> {
    divisors(amv_modulus(fpdim))
        .into_iter()
        .filter(|&n| n <= fpdim.max(1))
        .map(|n| n as u32)
        .collect()
}

/// Distinct values (up to tolerance) and the Galois orbit of `values[j]`,
/// found as the smallest subset of distinct values containing it whose
/// monic polynomial has integer coefficients.
fn galois_orbit(values: &[Complex64], j: usize) -> Option<Vec<Complex64>> {
    let mut distinct: Vec<Complex64> = Vec::new();
    for &v in values {
        if !distinct.iter().any(|d| (d - v).norm() < 1e-5) {
            distinct.push(v);
        }
    }
    let target = values[j];
    let t_idx = distinct.iter().position(|d| (d - target).norm() < 1e-5)?;
    let others: Vec<usize> = (0..distinct.len()).filter(|&i| i != t_idx).collect();
    for size in 0..=others.len() {
        let mut found = None;
        for_each_subset(&others, size, &mut |sub| {
            let mut roots = vec![distinct[t_idx]];
            roots.extend(sub.iter().map(|&i| distinct[i]));
            if integral_poly(&roots) {
                found = Some(roots);
                return true;
            }
            false
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

fn for_each_subset(items: &[usize], size: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(
        items: &[usize],
        size: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        for i in start..items.len() {
            cur.push(items[i]);
            if go(items, size, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    go(items, size, 0, &mut Vec::new(), f);
}

fn integral_poly(roots: &[Complex64]) -> bool {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &z in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * z;
        }
        c = next;
    }
    c.iter()
        .all(|a| (a.re - a.re.round()).abs() < 1e-5 && a.im.abs() < 1e-5)
}

/// Exact character table, verified through the character equations.
pub fn eigentable(f: &FusionData) -> Result<EigenTable, CharTableError> {
    let dims = f.fpdims().ok_or(CharTableError::NotIntegral)?;
    let num = numeric_table(f)?;
    let r = f.rank();
    let fpdim: u64 = dims.iter().map(|d| d * d).sum();
    let levels = conductor_levels(fpdim);
    let mut rec = OrbitRecognizer::new(1e-6);
    let mut lambda = vec![vec![CycNumber::zero(); r]; r];
    for i in 0..r {
        let row: Vec<Complex64> = num.values.iter().map(|c| c[i]).collect();
        for j in 0..r {
            let orbit = galois_orbit(&row, j).ok_or(CharTableError::NotCyclotomic)?;
            lambda[i][j] = rec
                .recognize(&orbit, &levels)
                .ok_or(CharTableError::NotCyclotomic)?;
        }
    }
    let table = EigenTable {
        codegrees: (0..r)
            .map(|j| {
                (0..r).fold(CycNumber::zero(), |acc, i| {
                    &acc + &(&lambda[i][j] * &lambda[i][j].conj())
                })
            })
            .collect(),
        lambda,
    };
    if !table.verify(f) {
        return Err(CharTableError::NotCyclotomic);
    }
    Ok(table)
}

impl EigenTable {
    pub fn rank(&self) -> usize {
        self.lambda.len()
    }

    /// Exact check that every column is a ring homomorphism, column 0 is the
    /// FP character and the columns are distinct.
    pub fn verify(&self, f: &FusionData) -> bool {
        let r = self.rank();
        let Some(dims) = f.fpdims() else { return false };
        for j in 0..r {
            if self.lambda[0][j] != CycNumber::one() {
                return false;
            }
            for i in 0..r {
                for k in i..r {
                    let lhs = &self.lambda[i][j] * &self.lambda[k][j];
                    let mut rhs = CycNumber::zero();
                    for t in 0..r {
                        let n = f.get(i, k, t);
                        if n != 0 {
                            rhs = &rhs + &self.lambda[t][j].scale_int(n as i64);
                        }
                    }
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        if (0..r).any(|i| self.lambda[i][0] != CycNumber::from_int(dims[i] as i64)) {
            return false;
        }
        (0..r).all(|a| (0..a).all(|b| (0..r).any(|i| self.lambda[i][a] != self.lambda[i][b])))
    }

    /// Whether the Galois action of the common conductor permutes the columns.
    pub fn galois_closed(&self) -> bool {
        let r = self.rank();
        let n = self.lambda.iter().flatten().fold(1u64, |acc, x| {
            crate::arith::numtheory::lcm(acc, x.conductor() as u64)
        });
        let cols: Vec<Vec<CycNumber>> = (0..r)
            .map(|j| (0..r).map(|i| self.lambda[i][j].clone()).collect())
            .collect();
        for a in 1..=n {
            if crate::arith::numtheory::gcd(a, n) != 1 {
                continue;
            }
            for c in &cols {
                let g: Vec<CycNumber> = c.iter().map(|x| x.galois(a as i64)).collect();
                if !cols.contains(&g) {
                    return false;
                }
            }
        }
        true
    }

    pub fn codegrees_rational(&self) -> Option<Vec<BigRational>> {
        self.codegrees.iter().map(|c| c.to_rational()).collect()
    }
}

/// Column permutations `q` with `q(0) = 0` such that
/// `S_{i,j} = d_j lambda_{i,q(j)}` is symmetric, one per orbit of the ring
/// automorphism group acting by simultaneous relabeling.
pub fn self_transpose_search(e: &EigenTable, f: &FusionData) -> Vec<SMatrixCandidate> {
    let r = e.rank();
    let Some(dims) = f.fpdims() else {
        return Vec::new();
    };
    let Some(cod) = e.codegrees_rational() else {
        return Vec::new();
    };
    let c1 = cod[0].clone();
    let num: Vec<Vec<Complex64>> = e
        .lambda
        .iter()
        .map(|row| row.iter().map(|x| x.to_complex()).collect())
        .collect();
    let mut out: Vec<SMatrixCandidate> = Vec::new();
    let mut q = vec![0usize];
    let mut used = vec![false; r];
    used[0] = true;
    let auts = automorphisms(f, &dims);
    let mut seen: Vec<Vec<Vec<CycNumber>>> = Vec::new();
    search_q(e, &dims, &cod, &c1, &num, &mut q, &mut used, &mut |q| {
        let s: Vec<Vec<CycNumber>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| e.lambda[i][q[j]].scale_int(dims[j] as i64))
                    .collect()
            })
            .collect();
        if !(0..r).all(|i| (0..i).all(|j| s[i][j] == s[j][i])) {
            return;
        }
        if seen.contains(&s) {
            return;
        }
        for p in &auts {
            seen.push(
                (0..r)
                    .map(|i| (0..r).map(|j| s[p[i]][p[j]].clone()).collect())
                    .collect(),
            );
        }
        out.push(SMatrixCandidate { s, q: q.to_vec() });
    });
    out
}

#[allow(clippy::too_many_arguments)]
fn search_q(
    e: &EigenTable,
    dims: &[u64],
    cod: &[BigRational],
    c1: &BigRational,
    num: &[Vec<Complex64>],
    q: &mut Vec<usize>,
    used: &mut Vec<bool>,
    emit: &mut dyn FnMut(&[usize]),
) {
    let r = e.rank();
    let j = q.len();
    if j == r {
        emit(q);
        return;
    }
    let want = c1 / BigRational::from_integer((dims[j] * dims[j]).into());
    for k in 1..r {
        if used[k] || cod[k] != want {
            continue;
        }
        let dj = dims[j] as f64;
        let ok = (0..j).all(|i| {
            let a = num[i][k] * dj;
            let b = num[j][q[i]] * dims[i] as f64;
            (a - b).norm() < 1e-6
        });
        if !ok {
            continue;
        }
        q.push(k);
        used[k] = true;
        search_q(e, dims, cod, c1, num, q, used, emit);
        used[k] = false;
        q.pop();
    }
}

/// Dimension-preserving relabelings fixing 0 that leave the tensor unchanged.
pub fn automorphisms(f: &FusionData, dims: &[u64]) -> Vec<Vec<usize>> {
    let r = f.rank();
    let mut out = Vec::new();
    let mut perm = vec![0usize];
    let mut used = vec![false; r];
    used[0] = true;
    fn go(
        f: &FusionData,
        dims: &[u64],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let r = f.rank();
        let p = perm.len();
        if p == r {
            out.push(perm.clone());
            return;
        }
        for o in 1..r {
            if used[o] || dims[o] != dims[p] {
                continue;
            }
            perm.push(o);
            let ok = (0..=p).all(|a| {
                (0..=p).all(|b| {
                    (0..=p).all(|c| {
                        (a != p && b != p && c != p)
                            || f.get(a, b, c) == f.get(perm[a], perm[b], perm[c])
                    })
                })
            });
            if ok {
                used[o] = true;
                go(f, dims, perm, used, out);
                used[o] = false;
            }
            perm.pop();
        }
    }
    go(f, dims, &mut perm, &mut used, &mut out);
    out
}

/// Cheap necessary condition for self-transposability: the codegrees are
/// `c_1 / d_j^2` up to order.
pub fn codegree_prefilter(t: &NumericTable, dims: &[u64]) -> bool {
    let c1 = t.codegrees[0];
    let mut want: Vec<f64> = dims.iter().map(|&d| c1 / (d * d) as f64).collect();
    let mut have = t.codegrees.clone();
    want.sort_by(f64::total_cmp);
    have.sort_by(f64::total_cmp);
    want.iter()
        .zip(&have)
        .all(|(a, b)| (a - b).abs() < 1e-6 * c1.max(1.0))
}

/// Verlinde formula: `N_{i,j}^k = sum_l S_{i,l} S_{j,l} conj(S_{k,l}) / (S_{0,l} D^2)`.
pub fn verlinde(s: &[Vec<CycNumber>], d2: &CycNumber) -> Vec<Vec<Vec<CycNumber>>> {
    let r = s.len();
    let inv_d2 = d2
        .to_rational()
        .map(|q| q.recip())
        .expect("D^2 must be rational");
    // Precompute S_{i,l} S_{j,l} / S_{0,l}.
    let mut out = vec![vec![vec![CycNumber::zero(); r]; r]; r];
    let inv0: Vec<BigRational> = (0..r)
        .map(|l| {
            s[0][l]
                .to_rational()
                .expect("S_{0,l} must be rational")
                .recip()
        })
        .collect();
    for i in 0..r {
        for j in 0..r {
            let prod: Vec<CycNumber> = (0..r)
                .map(|l| (&s[i][l] * &s[j][l]).scale(&inv0[l]))
                .collect();
            for k in 0..r {
                let mut acc = CycNumber::zero();
                for l in 0..r {
                    acc = &acc + &(&prod[l] * &s[k][l].conj());
                }
                out[i][j][k] = acc.scale(&inv_d2);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_three() {
        let f = FusionData::abelian_group(&[3]);
        let e = eigentable(&f).unwrap();
        assert!(e.codegrees.iter().all(|c| *c == CycNumber::from_int(3)));
        let z = CycNumber::zeta(3, 1);
        let z2 = CycNumber::zeta(3, 2);
        let mut cols: Vec<Vec<CycNumber>> = (0..3)
            .map(|j| (0..3).map(|i| e.lambda[i][j].clone()).collect())
            .collect();
        cols.sort_by_key(|c| format!("{c:?}"));
        let mut want = vec![
            vec![CycNumber::one(), CycNumber::one(), CycNumber::one()],
            vec![CycNumber::one(), z.clone(), z2.clone()],
            vec![CycNumber::one(), z2, z],
        ];
        want.sort_by_key(|c| format!("{c:?}"));
        assert_eq!(cols, want);
        assert!(e.galois_closed());
    }

    #[test]
    fn rep_s3() {
        let f = FusionData::from_nested(
            vec![0, 1, 2],
            &[
                vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
                vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
                vec![vec![0, 0, 1], vec![0, 0, 1], vec![1, 1, 1]],
            ],
        )
        .unwrap();
        let e = eigentable(&f).unwrap();
        let mut c: Vec<CycNumber> = e.codegrees.clone();
        assert_eq!(c[0], CycNumber::from_int(6));
        c.sort_by_key(|x| format!("{x}"));
        assert_eq!(
            c,
            vec![
                CycNumber::from_int(2),
                CycNumber::from_int(3),
                CycNumber::from_int(6)
            ]
        );
        assert!(self_transpose_search(&e, &f).is_empty());
        let t = numeric_table(&f).unwrap();
        assert!(!codegree_prefilter(&t, &[1, 1, 2]));
    }

    #[test]
    fn trivial_ring() {
        let f = FusionData::trivial();
        let e = eigentable(&f).unwrap();
        let c = self_transpose_search(&e, &f);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].s, vec![vec![CycNumber::one()]]);
        let n = verlinde(&c[0].s, &CycNumber::one());
        assert_eq!(n[0][0][0], CycNumber::one());
    }

    #[test]
    fn verlinde_recovers_cyclic_three() {
        let f = FusionData::abelian_group(&[3]);
        let e = eigentable(&f).unwrap();
        let c = self_transpose_search(&e, &f);
        assert!(!c.is_empty());
        let n = verlinde(&c[0].s, &CycNumber::from_int(3));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(n[i][j][k], CycNumber::from_int(f.get(i, j, k) as i64));
                }
            }
        }
    }
}
