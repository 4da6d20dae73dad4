//! Fusion data: structure constants `N_{i,j}^k` with a unit and a duality.
//!
//! Indices are 0-based and index 0 is the unit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomViolation {
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error("unit axiom fails at ({0}, {1})")]
    Unit(usize, usize),
    #[error("duality axiom fails at ({0}, {1})")]
    Dual(usize, usize),
    #[error("Frobenius reciprocity fails at ({0}, {1}, {2})")]
    Frobenius(usize, usize, usize),
    #[error("associativity fails at ({0}, {1}, {2}, {3})")]
    Associativity(usize, usize, usize, usize),
    #[error("dimension equation fails at ({0}, {1})")]
    Dimension(usize, usize),
    #[error("invertible element {0} does not act as a permutation")]
    Invertible(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FusionData {
    rank: usize,
    dual: Vec<usize>,
    n: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct FusionRepr {
    dual: Vec<usize>,
    #[serde(rename = "N")]
    n: Vec<Vec<Vec<u32>>>,
}

impl Serialize for FusionData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FusionRepr {
            dual: self.dual.clone(),
            n: self.to_nested(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FusionData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = FusionRepr::deserialize(d)?;
        FusionData::from_nested(repr.dual, &repr.n).map_err(serde::de::Error::custom)
    }
}

impl FusionData {
    /// Builds fusion data without checking the axioms.
    pub fn from_raw(dual: Vec<usize>, n: Vec<u32>) -> Result<Self, AxiomViolation> {
        let rank = dual.len();
        if n.len() != rank * rank * rank {
            return Err(AxiomViolation::Malformed(format!(
                "tensor has {} entries, expected {}",
                n.len(),
                rank * rank * rank
            )));
        }
        if dual.iter().any(|&d| d >= rank) {
            return Err(AxiomViolation::Malformed("duality out of range".into()));
        }
        Ok(FusionData { rank, dual, n })
    }

    /// Builds fusion data from `n[i][j][k] = N_{i,j}^k`.
    pub fn from_nested(dual: Vec<usize>, n: &[Vec<Vec<u32>>]) -> Result<Self, AxiomViolation> {
        let flat: Vec<u32> = n.iter().flatten().flatten().copied().collect();
        if n.len() != dual.len() || n.iter().any(|m| m.len() != dual.len()) {
            return Err(AxiomViolation::Malformed(
                "tensor shape does not match duality".into(),
            ));
        }
        Self::from_raw(dual, flat)
    }

    /// Builds fusion data and infers the duality from `N_{i,j}^0`.
    pub fn from_tensor(n: &[Vec<Vec<u32>>]) -> Result<Self, AxiomViolation> {
        let r = n.len();
        let mut dual = vec![0; r];
        for i in 0..r {
            let js: Vec<usize> = (0..r)
                .filter(|&j| n[i].get(j).and_then(|v| v.first()) == Some(&1))
                .collect();
            if js.len() != 1 {
                return Err(AxiomViolation::Dual(i, 0));
            }
            dual[i] = js[0];
        }
        Self::from_nested(dual, n)
    }

    /// The trivial ring of rank 1.
    pub fn trivial() -> Self {
        FusionData {
            rank: 1,
            dual: vec![0],
            n: vec![1],
        }
    }

    /// Group ring of `Z/n_1 x ... x Z/n_s`, elements in lexicographic order
    /// of their coordinates.
    pub fn abelian_group(orders: &[usize]) -> Self {
        let r: usize = orders.iter().product();
        let coords = |mut x: usize| -> Vec<usize> {
            let mut c = vec![0; orders.len()];
            for (p, &o) in orders.iter().enumerate().rev() {
                c[p] = x % o;
                x /= o;
            }
            c
        };
        let index = |c: &[usize]| c.iter().zip(orders).fold(0, |acc, (&v, &o)| acc * o + v);
        let mut n = vec![0; r * r * r];
        let mut dual = vec![0; r];
        for i in 0..r {
            let ci = coords(i);
            let inv: Vec<usize> = ci.iter().zip(orders).map(|(&v, &o)| (o - v) % o).collect();
            dual[i] = index(&inv);
            for j in 0..r {
                let cj = coords(j);
                let s: Vec<usize> = ci
                    .iter()
                    .zip(&cj)
                    .zip(orders)
                    .map(|((&a, &b), &o)| (a + b) % o)
                    .collect();
                n[(i * r + j) * r + index(&s)] = 1;
            }
        }
        FusionData { rank: r, dual, n }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dual(&self) -> &[usize] {
        &self.dual
    }

    pub fn raw(&self) -> &[u32] {
        &self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.n[(i * self.rank + j) * self.rank + k]
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<u32>>> {
        let r = self.rank;
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| (0..r).map(|k| self.get(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    /// Fusion matrix of `b_i`: entry `(k, j)` is `N_{i,j}^k`.
    pub fn fusion_matrix(&self, i: usize) -> Vec<Vec<i64>> {
        let r = self.rank;
        (0..r)
            .map(|k| (0..r).map(|j| self.get(i, j, k) as i64).collect())
            .collect()
    }

    pub fn is_commutative(&self) -> bool {
        let r = self.rank;
        (0..r).all(|i| (0..i).all(|j| (0..r).all(|k| self.get(i, j, k) == self.get(j, i, k))))
    }

    pub fn is_self_dual(&self, i: usize) -> bool {
        self.dual[i] == i
    }

    /// Checks unit, duality, Frobenius reciprocity and associativity in full.
    pub fn check_axioms(&self) -> Result<(), AxiomViolation> {
        let r = self.rank;
        let d = &self.dual;
        if r == 0 || d[0] != 0 {
            return Err(AxiomViolation::Malformed("unit must be self-dual".into()));
        }
        for i in 0..r {
            if d[d[i]] != i {
                return Err(AxiomViolation::Malformed(format!(
                    "duality is not an involution at {i}"
                )));
            }
        }
        for i in 0..r {
            for j in 0..r {
                let delta = u32::from(i == j);
                if self.get(0, i, j) != delta || self.get(i, 0, j) != delta {
                    return Err(AxiomViolation::Unit(i, j));
                }
                if self.get(d[i], j, 0) != delta || self.get(j, d[i], 0) != delta {
                    return Err(AxiomViolation::Dual(i, j));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let v = self.get(i, j, k);
                    if v != self.get(d[i], k, j) || v != self.get(k, d[j], i) {
                        return Err(AxiomViolation::Frobenius(i, j, k));
                    }
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for t in 0..r {
                        let mut lhs = 0u64;
                        let mut rhs = 0u64;
                        for s in 0..r {
                            lhs += self.get(i, j, s) as u64 * self.get(s, k, t) as u64;
                            rhs += self.get(j, k, s) as u64 * self.get(i, s, t) as u64;
                        }
                        if lhs != rhs {
                            return Err(AxiomViolation::Associativity(i, j, k, t));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks the dimension equations for `dims` and that dimension-one
    /// elements permute the basis.
    pub fn check_dims(&self, dims: &[u64]) -> Result<(), AxiomViolation> {
        let r = self.rank;
        if dims.len() != r {
            return Err(AxiomViolation::Malformed(
                "type length differs from rank".into(),
            ));
        }
        for i in 0..r {
            for j in 0..r {
                let s: u64 = (0..r).map(|k| self.get(i, j, k) as u64 * dims[k]).sum();
                if s != dims[i] * dims[j] {
                    return Err(AxiomViolation::Dimension(i, j));
                }
            }
            if dims[i] == 1 {
                for j in 0..r {
                    let row: Vec<usize> = (0..r).filter(|&k| self.get(i, j, k) != 0).collect();
                    if row.len() != 1 || self.get(i, j, row[0]) != 1 || dims[row[0]] != dims[j] {
                        return Err(AxiomViolation::Invertible(i));
                    }
                }
            }
        }
        Ok(())
    }

    /// Integral FP dimensions, if the Perron-Frobenius eigenvector is integral.
    pub fn fpdims(&self) -> Option<Vec<u64>> {
        let r = self.rank;
        // Power iteration on the sum of all fusion matrices.
        let mut v = vec![1f64; r];
        for _ in 0..500 {
            let mut w = vec![0f64; r];
            for i in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        w[k] += self.get(i, j, k) as f64 * v[j];
                    }
                }
            }
            let norm = w[0];
            let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let done = next
                .iter()
                .zip(&v)
                .all(|(a, b)| (a - b).abs() < 1e-13 * a.abs().max(1.0));
            v = next;
            if done {
                break;
            }
        }
        let dims: Vec<u64> = v.iter().map(|x| x.round() as u64).collect();
        if dims.iter().any(|&d| d == 0) {
            return None;
        }
        self.check_dims(&dims).ok()?;
        Some(dims)
    }

    /// Relabels so that new index `p` is old index `perm[p]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let r = self.rank;
        let mut inv = vec![0; r];
        for (p, &o) in perm.iter().enumerate() {
            inv[o] = p;
        }
        let mut n = vec![0; r * r * r];
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    n[(a * r + b) * r + c] = self.get(perm[a], perm[b], perm[c]);
                }
            }
        }
        let dual = (0..r).map(|a| inv[self.dual[perm[a]]]).collect();
        FusionData { rank: r, dual, n }
    }

    /// Per-element invariant used to restrict relabelings in the canonical form.
    fn label_key(&self, i: usize, dims: Option<&[u64]>) -> (u64, u32, u8, u32, u32) {
        let r = self.rank;
        let total: u32 = (0..r)
            .flat_map(|j| (0..r).map(move |k| (j, k)))
            .map(|(j, k)| self.get(i, j, k))
            .sum();
        let d = dims.map_or(0, |d| d[i]);
        (
            d,
            total,
            u8::from(self.dual[i] != i),
            self.get(i, i, i),
            self.get(i, self.dual[i], i),
        )
    }

    /// Canonical representative of the isomorphism class together with the
    /// relabeling that produces it.
    ///
    /// Labels are first sorted by an invariant key (dimension first), then the
    /// tensor is minimized over relabelings within equal-key blocks, comparing
    /// entries shell by shell: all triples with largest index `p` before `p + 1`.
    pub fn canonical_form_with_perm(&self) -> (FusionData, Vec<usize>) {
        let r = self.rank;
        let dims = self.fpdims();
        let keys: Vec<_> = (0..r).map(|i| self.label_key(i, dims.as_deref())).collect();
        let mut order: Vec<usize> = (1..r).collect();
        order.sort_by_key(|&i| keys[i]);
        let mut slot_keys = vec![keys[0]];
        slot_keys.extend(order.iter().map(|&i| keys[i]));
        let mut search = CanonSearch {
            f: self,
            keys: &keys,
            slot_keys,
            perm: vec![0],
            used: vec![false; r],
            cur: Vec::new(),
            best: None,
            best_perm: Vec::new(),
        };
        search.used[0] = true;
        search.cur.extend(shell(self, &[0], 0));
        search.run(1);
        let perm = search.best_perm;
        (self.permuted(&perm), perm)
    }

    pub fn canonical_form(&self) -> FusionData {
        self.canonical_form_with_perm().0
    }

    /// Hex SHA-256 of the canonical tensor and duality.
    pub fn canonical_hash(&self) -> String {
        self.canonical_form().hash_hex()
    }

    /// Hex SHA-256 of this labeled tensor and duality.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.rank as u64).to_le_bytes());
        for &d in &self.dual {
            h.update((d as u64).to_le_bytes());
        }
        for &v in &self.n {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Entries `N_{a,b}^c` with `max(a,b,c) = p` in lexicographic order, read
/// through the relabeling `perm` (new -> old).
fn shell(f: &FusionData, perm: &[usize], p: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(3 * (p + 1) * (p + 1));
    for a in 0..=p {
        for b in 0..=p {
            for c in 0..=p {
                if a == p || b == p || c == p {
                    out.push(f.get(perm[a], perm[b], perm[c]));
                }
            }
        }
    }
    out
}

struct CanonSearch<'a, K> {
    f: &'a FusionData,
    keys: &'a [K],
    slot_keys: Vec<K>,
    perm: Vec<usize>,
    used: Vec<bool>,
    cur: Vec<u32>,
    best: Option<Vec<u32>>,
    best_perm: Vec<usize>,
}

impl<K: Eq> CanonSearch<'_, K> {
    fn run(&mut self, p: usize) {
        let r = self.f.rank;
        if p == r {
            if self.best.as_ref().map_or(true, |b| self.cur < *b) {
                self.best = Some(self.cur.clone());
                self.best_perm = self.perm.clone();
            }
            return;
        }
        for o in 1..r {
            if self.used[o] || self.keys[o] != self.slot_keys[p] {
                continue;
            }
            self.perm.push(o);
            self.used[o] = true;
            let start = self.cur.len();
            let sh = shell(self.f, &self.perm, p);
            self.cur.extend_from_slice(&sh);
            let prune = self
                .best
                .as_ref()
                .is_some_and(|b| self.cur.as_slice() > &b[..self.cur.len()]);
            if !prune {
                self.run(p + 1);
            }
            self.cur.truncate(start);
            self.used[o] = false;
            self.perm.pop();
        }
    }
}

/// Sorts and deduplicates rings up to isomorphism, keeping canonical forms.
pub fn dedup_isomorphism(rings: &[FusionData]) -> Vec<FusionData> {
    use rayon::prelude::*;
    let canon: Vec<FusionData> = rings.par_iter().map(|f| f.canonical_form()).collect();
    let mut map: BTreeMap<FusionData, ()> = BTreeMap::new();
    for c in canon {
        map.insert(c, ());
    }
    map.into_keys().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep_s3() -> FusionData {
        FusionData::from_tensor(&[
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
            vec![vec![0, 0, 1], vec![0, 0, 1], vec![1, 1, 1]],
        ])
        .unwrap()
    }

    #[test]
    fn axioms() {
        let f = rep_s3();
        f.check_axioms().unwrap();
        assert_eq!(f.fpdims(), Some(vec![1, 1, 2]));
        assert!(f.is_commutative());
        let z6 = FusionData::abelian_group(&[2, 3]);
        z6.check_axioms().unwrap();
        assert_eq!(z6.fpdims(), Some(vec![1; 6]));
    }

    #[test]
    fn canonical_relabel() {
        let z3 = FusionData::abelian_group(&[3]);
        let swapped = z3.permuted(&[0, 2, 1]);
        assert_eq!(z3.canonical_form(), swapped.canonical_form());
        let a = FusionData::abelian_group(&[6]);
        let b = FusionData::abelian_group(&[2, 3]);
        assert_eq!(a.canonical_form(), b.canonical_form());
        let c = FusionData::abelian_group(&[2, 2]);
        let d = FusionData::abelian_group(&[4]);
        assert_ne!(c.canonical_form(), d.canonical_form());
    }

    #[test]
    fn serde_round_trip() {
        let f = rep_s3();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"N\""));
        let g: FusionData = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
