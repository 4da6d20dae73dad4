//! Recovering exact cyclotomic numbers from numerical approximations.
//!
//! Every answer produced here is a hint: callers verify the identities they
//! need with exact arithmetic.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::cyc::{field_degree, CycNumber};
use super::hp::{eval_cyc, root_of_unity, HpComplex, HpReal};
use super::numtheory::gcd;
use super::ArithError;

/// Upper bound on the size of one half-table in the bounded search.
const TABLE_LIMIT: u64 = 1 << 22;
/// Upper bound on coarse (double precision) matches before giving up.
const CANDIDATE_LIMIT: usize = 1 << 16;

/// Finds the unique cyclotomic integer with conductor dividing `conductor_bound`
/// and power-basis coefficients bounded by `height_bound` in absolute value
/// whose value lies within `2^{-p/2}` of `approx` (p = precision of `approx`).
///
/// The search splits the number into its real part and imaginary part, which
/// live in the maximal real subfield and in `(zeta - zeta^-1)` times it, and
/// runs a meet-in-the-middle search on each independently.
pub fn recognize_cyclotomic(
    approx: &HpComplex,
    conductor_bound: u32,
    height_bound: u32,
) -> Result<Option<CycNumber>, ArithError> {
    let mut n = conductor_bound.max(1);
    if n % 4 == 2 {
        n /= 2;
    }
    let prec = approx.prec();
    let tol_bits = prec / 2;
    let h = height_bound as i64;

    if n <= 2 {
        if !approx.im.below_pow2(tol_bits) {
            return Ok(None);
        }
        let r = approx.re.to_f64().round();
        if r.abs() > h as f64 {
            return Ok(None);
        }
        let cand = HpReal::from_int(r as i64, prec);
        if (&cand - &approx.re).below_pow2(tol_bits) {
            return Ok(Some(CycNumber::from_int(r as i64)));
        }
        return Ok(None);
    }

    let phi = field_degree(n);
    let half = phi / 2;
    let real_basis: Vec<CycNumber> = (0..half as i64)
        .map(|j| &CycNumber::zeta(n, j) + &CycNumber::zeta(n, -j))
        .collect();
    let imag_basis: Vec<CycNumber> = (1..=half as i64)
        .map(|j| &CycNumber::zeta(n, j) - &CycNumber::zeta(n, -j))
        .collect();
    let real_targets: Vec<CycNumber> = (0..phi as i64)
        .map(|k| &CycNumber::zeta(n, k) + &CycNumber::zeta(n, -k))
        .collect();
    let imag_targets: Vec<CycNumber> = (0..phi as i64)
        .map(|k| &CycNumber::zeta(n, k) - &CycNumber::zeta(n, -k))
        .collect();
    let ra = coordinate_bounds(&real_basis, &real_targets, h);
    let ib = coordinate_bounds(&imag_basis, &imag_targets, h);

    // 2 Re(x) = sum A_j 2cos(2 pi j/n); 2 Im(x) = sum B_j 2sin(2 pi j/n).
    let p = prec + 32;
    let two = BigInt::from(2);
    let re_vals: Vec<HpReal> = (0..half as i64)
        .map(|j| root_of_unity(n, j, p).re.mul_int(&two))
        .collect();
    let im_vals: Vec<HpReal> = (1..=half as i64)
        .map(|j| root_of_unity(n, j, p).im.mul_int(&two))
        .collect();
    let t_re = approx.re.with_prec(p).mul_int(&two);
    let t_im = approx.im.with_prec(p).mul_int(&two);
    let res = search_1d(&re_vals, &ra, &t_re, tol_bits)?;
    let ims = search_1d(&im_vals, &ib, &t_im, tol_bits)?;

    let mut found: Vec<CycNumber> = Vec::new();
    for a in &res {
        let mut re_part = CycNumber::zero();
        for (c, b) in a.iter().zip(&real_basis) {
            if *c != 0 {
                re_part = &re_part + &b.scale_int(*c);
            }
        }
        for b in &ims {
            let mut x = re_part.clone();
            for (c, basis) in b.iter().zip(&imag_basis) {
                if *c != 0 {
                    x = &x + &basis.scale_int(*c);
                }
            }
            let x = x.div_int(2);
            let coeffs = x.reduced();
            let ok = coeffs
                .iter()
                .all(|v| v.is_integer() && v.abs() <= BigRational::from_integer(h.into()));
            if !ok {
                continue;
            }
            let val = eval_cyc(&x, prec);
            if !val.close_to(approx, tol_bits) {
                continue;
            }
            if !found.contains(&x) {
                found.push(x);
            }
        }
    }
    match found.len() {
        0 => Ok(None),
        1 => Ok(Some(found.pop().unwrap().minimal())),
        k => Err(ArithError::AmbiguousRecognition { candidates: k }),
    }
}

/// Runs [`recognize_cyclotomic`] at 128 bits and doubles the working
/// precision up to 1024 bits while the answer stays ambiguous.
pub fn recognize_cyclotomic_adaptive<F>(
    source: F,
    conductor_bound: u32,
    height_bound: u32,
) -> Result<Option<CycNumber>, ArithError>
where
    F: Fn(u32) -> HpComplex,
{
    let mut prec = 128;
    loop {
        match recognize_cyclotomic(&source(prec), conductor_bound, height_bound) {
            Err(ArithError::AmbiguousRecognition { .. }) if prec < 1024 => prec *= 2,
            other => return other,
        }
    }
}

/// Per-coordinate bounds for the coordinates of `sum c_k targets[k]` in
/// `basis` when every `|c_k| <= h`.
fn coordinate_bounds(basis: &[CycNumber], targets: &[CycNumber], h: i64) -> Vec<i64> {
    let cols: Vec<Vec<BigRational>> = basis.iter().map(|b| b.reduced()).collect();
    let mut bounds = vec![0i64; basis.len()];
    for t in targets {
        let coords = solve_in_span(&cols, &t.reduced()).expect("target outside the span");
        for (b, c) in bounds.iter_mut().zip(coords) {
            *b += c.abs().ceil().to_integer().to_i64().unwrap_or(i64::MAX / 4) * h;
        }
    }
    bounds
}

/// Solves `sum a_j cols[j] = target` exactly; `None` when inconsistent.
pub fn solve_in_span(
    cols: &[Vec<BigRational>],
    target: &[BigRational],
) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let k = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=k {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = m[i][k].clone();
    }
    Some(sol)
}

/// All integer vectors `a` with `|a_j| <= bounds[j]` and
/// `|sum a_j vals[j] - target| < 2^-tol_bits`.
fn search_1d(
    vals: &[HpReal],
    bounds: &[i64],
    target: &HpReal,
    tol_bits: u32,
) -> Result<Vec<Vec<i64>>, ArithError> {
    let k = vals.len();
    let split = k.div_ceil(2);
    let fv: Vec<f64> = vals.iter().map(|v| v.to_f64()).collect();
    let ft = target.to_f64();
    let size = |r: std::ops::Range<usize>| -> u64 {
        bounds[r]
            .iter()
            .fold(1u64, |acc, &b| acc.saturating_mul(2 * b as u64 + 1))
    };
    let left_size = size(0..split);
    let right_size = size(split..k);
    if left_size > TABLE_LIMIT || right_size > TABLE_LIMIT * 64 {
        return Err(ArithError::SearchTooLarge {
            size: left_size.saturating_mul(right_size),
        });
    }
    let decode = |mut idx: u64, r: std::ops::Range<usize>| -> Vec<i64> {
        r.map(|j| {
            let w = 2 * bounds[j] as u64 + 1;
            let d = (idx % w) as i64 - bounds[j];
            idx /= w;
            d
        })
        .collect()
    };
    let dot = |a: &[i64], off: usize| -> f64 {
        a.iter()
            .enumerate()
            .map(|(j, &c)| c as f64 * fv[off + j])
            .sum()
    };
    let mut left: Vec<(f64, u64)> = (0..left_size)
        .map(|i| (dot(&decode(i, 0..split), 0), i))
        .collect();
    left.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale: f64 = bounds
        .iter()
        .zip(&fv)
        .map(|(&b, v)| b as f64 * v.abs())
        .sum::<f64>()
        + ft.abs()
        + 1.0;
    let tol = 1e-9 + 4e-15 * scale;
    let mut coarse = Vec::new();
    for ri in 0..right_size {
        let rv = decode(ri, split..k);
        let need = ft - dot(&rv, split);
        let lo = left.partition_point(|e| e.0 < need - tol);
        for e in &left[lo..] {
            if e.0 > need + tol {
                break;
            }
            let mut a = decode(e.1, 0..split);
            a.extend_from_slice(&rv);
            coarse.push(a);
            if coarse.len() > CANDIDATE_LIMIT {
                return Err(ArithError::SearchTooLarge {
                    size: coarse.len() as u64,
                });
            }
        }
    }
    let mut out = Vec::new();
    for a in coarse {
        let mut s = -target;
        for (c, v) in a.iter().zip(vals) {
            if *c != 0 {
                s = &s + &v.mul_int(&BigInt::from(*c));
            }
        }
        if s.below_pow2(tol_bits) {
            out.push(a);
        }
    }
    Ok(out)
}

/// Recognizes an algebraic integer from its full set of Galois conjugates,
/// given numerically (`orbit[0]` is the value itself).
///
/// For each level `n` and each subgroup `H` of `(Z/n)^x` of index
/// `orbit.len()`, the conjugates are matched with the cosets of `H`
/// (respecting complex conjugation), and the power-basis coefficients are
/// read off by inverting the Vandermonde system on primitive roots.
pub struct OrbitRecognizer {
    tol: f64,
    cache: HashMap<u32, LevelData>,
}

struct LevelData {
    units: Vec<u32>,
    subgroups: Vec<Vec<u32>>,
    inverse: DMatrix<Complex64>,
}

impl OrbitRecognizer {
    pub fn new(tol: f64) -> Self {
        OrbitRecognizer {
            tol,
            cache: HashMap::new(),
        }
    }

    fn level(&mut self, n: u32) -> &LevelData {
        self.cache.entry(n).or_insert_with(|| {
            let units: Vec<u32> = (1..=n)
                .filter(|&a| gcd(a as u64, n as u64) == 1)
                .map(|a| a % n)
                .collect();
            let phi = units.len();
            let v = DMatrix::from_fn(phi, phi, |i, k| {
                let th = 2.0 * std::f64::consts::PI * (units[i] as f64 * k as f64) / n as f64;
                Complex64::new(th.cos(), th.sin())
            });
            let inverse = v
                .try_inverse()
                .expect("Vandermonde on distinct roots is invertible");
            let subgroups = all_subgroups(&units, n);
            LevelData {
                units,
                subgroups,
                inverse,
            }
        })
    }

    pub fn recognize(&mut self, orbit: &[Complex64], levels: &[u32]) -> Option<CycNumber> {
        let tol = self.tol;
        let z = orbit[0];
        let e = orbit.len();
        if e == 1 {
            let r = z.re.round();
            if (z.re - r).abs() < tol && z.im.abs() < tol {
                return Some(CycNumber::from_int(r as i64));
            }
            return None;
        }
        if orbit.iter().all(|o| (o.norm() - 1.0).abs() < tol) {
            let a = z.arg() / (2.0 * std::f64::consts::PI);
            for &n in levels {
                let l = if n % 2 == 1 { 2 * n } else { n };
                let k = (a * l as f64).round();
                if (a * l as f64 - k).abs() < tol * l as f64 {
                    return Some(CycNumber::zeta(l, k as i64).minimal());
                }
            }
        }
        let conj_idx = nearest(orbit, z.conj(), tol)?;
        for &n in levels {
            if n % 4 == 2 {
                continue;
            }
            let phi = field_degree(n);
            if phi % e != 0 {
                continue;
            }
            let tol_c = tol;
            let data = self.level(n);
            for h in data.subgroups.iter().filter(|h| h.len() * e == phi) {
                if let Some(x) = label_and_solve(data, n, h, orbit, conj_idx, tol_c) {
                    return Some(x);
                }
            }
        }
        None
    }
}

fn nearest(orbit: &[Complex64], v: Complex64, tol: f64) -> Option<usize> {
    orbit
        .iter()
        .enumerate()
        .filter(|(_, o)| (*o - v).norm() < tol.sqrt())
        .min_by(|a, b| (a.1 - v).norm().total_cmp(&(b.1 - v).norm()))
        .map(|(i, _)| i)
}

fn label_and_solve(
    data: &LevelData,
    n: u32,
    h: &[u32],
    orbit: &[Complex64],
    conj_idx: usize,
    tol: f64,
) -> Option<CycNumber> {
    let e = orbit.len();
    // Coset index of every unit.
    let mut coset_of: HashMap<u32, usize> = HashMap::new();
    let mut reps: Vec<u32> = Vec::new();
    for &a in &data.units {
        if coset_of.contains_key(&a) {
            continue;
        }
        let idx = reps.len();
        reps.push(a);
        for &g in h {
            coset_of.insert((a as u64 * g as u64 % n as u64) as u32, idx);
        }
    }
    let neg = |a: u32| (n - a) % n;
    let conj_coset: Vec<usize> = reps.iter().map(|&a| coset_of[&neg(a)]).collect();
    if (conj_coset[0] == 0) != (conj_idx == 0) {
        return None;
    }
    let mut label = vec![usize::MAX; e];
    let mut used = vec![false; e];
    label[0] = 0;
    used[0] = true;
    if conj_coset[0] != 0 {
        label[conj_coset[0]] = conj_idx;
        used[conj_idx] = true;
    }
    let conj_of: Vec<usize> = (0..e)
        .map(|i| nearest(orbit, orbit[i].conj(), tol).unwrap_or(usize::MAX))
        .collect();
    let mut result = None;
    dfs_label(
        1,
        &mut label,
        &mut used,
        &conj_coset,
        &conj_of,
        &mut |lab| {
            let y: Vec<Complex64> = data.units.iter().map(|a| orbit[lab[coset_of[a]]]).collect();
            let yv = nalgebra::DVector::from_vec(y);
            let c = &data.inverse * yv;
            let mut coeffs = Vec::with_capacity(c.len());
            for v in c.iter() {
                let r = v.re.round();
                if (v.re - r).abs() > 1e-5 || v.im.abs() > 1e-5 {
                    return false;
                }
                coeffs.push(BigRational::from_integer(BigInt::from(r as i64)));
            }
            result = Some(CycNumber::from_coeffs(n, coeffs).minimal());
            true
        },
    );
    result
}

fn dfs_label(
    pos: usize,
    label: &mut Vec<usize>,
    used: &mut Vec<bool>,
    conj_coset: &[usize],
    conj_of: &[usize],
    done: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let e = label.len();
    if pos == e {
        return done(label);
    }
    if label[pos] != usize::MAX {
        return dfs_label(pos + 1, label, used, conj_coset, conj_of, done);
    }
    let partner = conj_coset[pos];
    for v in 0..e {
        if used[v] {
            continue;
        }
        let cv = conj_of[v];
        if cv == usize::MAX {
            continue;
        }
        if partner == pos {
            if cv != v {
                continue;
            }
        } else if label[partner] != usize::MAX {
            if label[partner] != cv {
                continue;
            }
        } else if used[cv] || cv == v {
            continue;
        }
        label[pos] = v;
        used[v] = true;
        let paired = partner != pos && label[partner] == usize::MAX;
        if paired {
            label[partner] = cv;
            used[cv] = true;
        }
        if dfs_label(pos + 1, label, used, conj_coset, conj_of, done) {
            return true;
        }
        if paired {
            label[partner] = usize::MAX;
            used[cv] = false;
        }
        label[pos] = usize::MAX;
        used[v] = false;
    }
    false
}

fn all_subgroups(units: &[u32], n: u32) -> Vec<Vec<u32>> {
    let close = |gens: &[u32]| -> Vec<u32> {
        let mut set = vec![1 % n];
        let mut i = 0;
        while i < set.len() {
            for &g in gens {
                let x = (set[i] as u64 * g as u64 % n as u64) as u32;
                if !set.contains(&x) {
                    set.push(x);
                }
            }
            i += 1;
        }
        set.sort_unstable();
        set
    };
    let mut found: Vec<Vec<u32>> = vec![close(&[])];
    let mut i = 0;
    while i < found.len() {
        let cur = found[i].clone();
        for &g in units {
            if cur.contains(&g) {
                continue;
            }
            let mut gens = cur.clone();
            gens.push(g);
            let s = close(&gens);
            if !found.contains(&s) {
                found.push(s);
            }
        }
        i += 1;
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::hp::eval_cyc;

    #[test]
    fn recognizes_integer() {
        let a = HpComplex::from_f64(Complex64::new(2.0, 0.0), 128);
        let x = recognize_cyclotomic(&a, 36, 8).unwrap().unwrap();
        assert_eq!(x, CycNumber::from_int(2));
    }

    #[test]
    fn recognizes_real_nonic() {
        let x = CycNumber::from_terms(&[(2, 9, 2), (2, 9, 7)]);
        let a = eval_cyc(&x, 128);
        let y = recognize_cyclotomic(&a, 9, 4).unwrap().unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn orbit_recognition() {
        let x = CycNumber::from_terms(&[(2, 9, 4), (2, 9, 5)]);
        let orbit: Vec<Complex64> = [1, 2, 4]
            .iter()
            .map(|&a| x.galois(a).to_complex())
            .collect();
        let mut r = OrbitRecognizer::new(1e-8);
        let y = r.recognize(&orbit, &[1, 3, 9]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn subgroup_counts() {
        let units: Vec<u32> = (1..9)
            .filter(|a| gcd(*a, 9) == 1)
            .map(|a| a as u32)
            .collect();
        // (Z/9)^x is cyclic of order 6: four subgroups.
        assert_eq!(all_subgroups(&units, 9).len(), 4);
    }
}
