//! Homogeneous linear systems over `Z/mZ`.
//!
//! Rows are folded into the Hermite basis of `rowspace + mZ^n` by unimodular
//! integer row operations. Since that lattice contains `mZ^n`, entries can be
//! kept reduced modulo `m` and the basis is upper triangular with diagonal
//! entries dividing `m`; solutions are then enumerated by back substitution.

use num_integer::Integer;

#[derive(Debug, Clone)]
pub struct ZmodSystem {
    m: i128,
    /// `h[c]` has zeros before column `c` and `h[c][c]` divides `m`.
    h: Vec<Vec<i128>>,
}

impl ZmodSystem {
    pub fn new(n: usize, m: u64) -> Self {
        assert!(m >= 1);
        let m = m as i128;
        let h = (0..n)
            .map(|c| {
                let mut row = vec![0; n];
                row[c] = m;
                row
            })
            .collect();
        ZmodSystem { m, h }
    }

    pub fn vars(&self) -> usize {
        self.h.len()
    }

    pub fn modulus(&self) -> u64 {
        self.m as u64
    }

    pub fn add_row(&mut self, row: &[i64]) {
        let n = self.vars();
        assert_eq!(row.len(), n);
        let m = self.m;
        let mut v: Vec<i128> = row.iter().map(|&x| (x as i128).rem_euclid(m)).collect();
        for c in 0..n {
            if v[c] == 0 {
                continue;
            }
            let p = &self.h[c];
            let e = v[c].extended_gcd(&p[c]);
            let (g, a, b) = (e.gcd, e.x, e.y);
            let (vq, pq) = (v[c] / g, p[c] / g);
            let mut pivot = vec![0i128; n];
            let mut rest = vec![0i128; n];
            for j in c..n {
                pivot[j] = (a * v[j] + b * p[j]).rem_euclid(m);
                rest[j] = (pq * v[j] - vq * p[j]).rem_euclid(m);
            }
            // The pivot must stay a divisor of m rather than its residue.
            pivot[c] = g;
            self.h[c] = pivot;
            v = rest;
        }
    }

    /// Diagonal of the Hermite basis; the solution count is their product.
    pub fn diagonal(&self) -> Vec<u64> {
        (0..self.vars()).map(|c| self.h[c][c] as u64).collect()
    }

    pub fn count(&self) -> u128 {
        self.diagonal().iter().map(|&g| g as u128).product()
    }

    /// All solutions, each entry in `[0, m)`, in lexicographic order.
    pub fn solutions(&self) -> Vec<Vec<u64>> {
        let n = self.vars();
        let mut out = Vec::new();
        let mut t = vec![0i128; n];
        self.back_substitute(n, &mut t, &mut out);
        out.sort_unstable();
        out
    }

    fn back_substitute(&self, c: usize, t: &mut Vec<i128>, out: &mut Vec<Vec<u64>>) {
        if c == 0 {
            out.push(t.iter().map(|&x| x as u64).collect());
            return;
        }
        let c = c - 1;
        let m = self.m;
        let row = &self.h[c];
        let g = row[c];
        let rhs = -(c + 1..self.vars()).map(|j| row[j] * t[j]).sum::<i128>();
        let rhs = rhs.rem_euclid(m);
        debug_assert_eq!(
            rhs % g,
            0,
            "Hermite basis back substitution is always solvable"
        );
        let step = m / g;
        let base = (rhs / g) % step;
        for k in 0..g {
            t[c] = base + k * step;
            self.back_substitute(c, t, out);
        }
        t[c] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(rows: &[Vec<i64>], n: usize, m: u64) -> Vec<Vec<u64>> {
        let total = (m as usize).pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut x = code;
            let t: Vec<u64> = (0..n)
                .map(|_| {
                    let d = (x % m as usize) as u64;
                    x /= m as usize;
                    d
                })
                .collect();
            if rows.iter().all(|r| {
                r.iter()
                    .zip(&t)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum::<i128>()
                    .rem_euclid(m as i128)
                    == 0
            }) {
                out.push(t);
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn matches_brute_force() {
        let cases: Vec<(Vec<Vec<i64>>, usize, u64)> = vec![
            (vec![vec![2, 4, 6]], 3, 12),
            (vec![vec![3, 0, 1], vec![1, 5, 2]], 3, 18),
            (vec![vec![4, -2], vec![6, 3]], 2, 36),
            (vec![], 2, 5),
            (vec![vec![1, 1, 1, 1]], 4, 6),
        ];
        for (rows, n, m) in cases {
            let mut s = ZmodSystem::new(n, m);
            for r in &rows {
                s.add_row(r);
            }
            let sols = s.solutions();
            assert_eq!(sols.len() as u128, s.count());
            assert_eq!(sols, brute(&rows, n, m), "rows {rows:?} mod {m}");
        }
    }
}
