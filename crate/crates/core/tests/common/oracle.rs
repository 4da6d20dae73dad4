//! Brute-force enumeration of fusion tensors up to isomorphism.

use std::collections::BTreeSet;

use intmod::fusion::FusionData;

struct Brute {
    dims: Vec<u64>,
    dual: Vec<usize>,
    r: usize,
    n: Vec<Option<u32>>,
    out: Vec<Vec<u32>>,
}

impl Brute {
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.r + j) * self.r + k
    }

    fn consistent(&self) -> bool {
        let (r, d) = (self.r, &self.dual);
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let Some(v) = self.n[self.idx(i, j, k)] else {
                        continue;
                    };
                    for (a, b, c) in [(d[i], k, j), (k, d[j], i)] {
                        if let Some(w) = self.n[self.idx(a, b, c)] {
                            if w != v {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Fills row `(i, j)` (all `k`) with every composition of `d_i d_j`.
    fn rows(&mut self, pair: usize) {
        let r = self.r;
        if pair == r * r {
            let full: Vec<u32> = self.n.iter().map(|x| x.unwrap()).collect();
            if associative(&full, r) {
                self.out.push(full);
            }
            return;
        }
        let (i, j) = (pair / r, pair % r);
        let target = self.dims[i] * self.dims[j];
        let bound = *self.dims.iter().max().unwrap() as u32;
        self.fill(i, j, 0, target, bound, pair);
    }

    fn fill(&mut self, i: usize, j: usize, k: usize, rem: u64, bound: u32, pair: usize) {
        if k == self.r {
            if rem == 0 && self.consistent() {
                self.rows(pair + 1);
            }
            return;
        }
        let idx = self.idx(i, j, k);
        for v in 0..=bound {
            let used = v as u64 * self.dims[k];
            if used > rem {
                break;
            }
            self.n[idx] = Some(v);
            self.fill(i, j, k + 1, rem - used, bound, pair);
        }
        self.n[idx] = None;
    }
}

fn associative(n: &[u32], r: usize) -> bool {
    let g = |i: usize, j: usize, k: usize| n[(i * r + j) * r + k] as u64;
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for t in 0..r {
                    let l: u64 = (0..r).map(|s| g(i, j, s) * g(s, k, t)).sum();
                    let rr: u64 = (0..r).map(|s| g(j, k, s) * g(i, s, t)).sum();
                    if l != rr {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn involutions(dims: &[u64]) -> Vec<Vec<usize>> {
    fn go(dims: &[u64], cur: &mut Vec<Option<usize>>, i: usize, out: &mut Vec<Vec<usize>>) {
        let r = dims.len();
        if i == r {
            out.push(cur.iter().map(|x| x.unwrap()).collect());
            return;
        }
        if cur[i].is_some() {
            return go(dims, cur, i + 1, out);
        }
        for j in i..r {
            if cur[j].is_none() && dims[j] == dims[i] && (i != 0 || j == 0) {
                cur[i] = Some(j);
                cur[j] = Some(i);
                go(dims, cur, i + 1, out);
                cur[i] = None;
                cur[j] = None;
            }
        }
    }
    let mut out = Vec::new();
    go(dims, &mut vec![None; dims.len()], 0, &mut out);
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (p, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(p);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Lexicographically least flattened tensor over dimension-preserving relabelings.
pub fn brute_canonical(n: &[u32], dims: &[u64]) -> Vec<u32> {
    let r = dims.len();
    let rest: Vec<usize> = (1..r).collect();
    let mut best: Option<Vec<u32>> = None;
    for p in permutations(&rest) {
        let perm: Vec<usize> = std::iter::once(0).chain(p).collect();
        if (0..r).any(|a| dims[perm[a]] != dims[a]) {
            continue;
        }
        let mut t = Vec::with_capacity(n.len());
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    t.push(n[(perm[a] * r + perm[b]) * r + perm[c]]);
                }
            }
        }
        if best.as_ref().map_or(true, |b| t < *b) {
            best = Some(t);
        }
    }
    best.unwrap()
}

pub fn brute_classes(dims: &[u64]) -> BTreeSet<Vec<u32>> {
    let r = dims.len();
    let mut all = BTreeSet::new();
    for dual in involutions(dims) {
        let mut b = Brute {
            dims: dims.to_vec(),
            dual,
            r,
            n: vec![None; r * r * r],
            out: Vec::new(),
        };
        b.rows(0);
        for t in b.out {
            let f = FusionData::from_raw(b.dual.clone(), t.clone()).unwrap();
            if f.check_axioms().is_ok() {
                all.insert(brute_canonical(&t, dims));
            }
        }
    }
    all
}
