use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::numtheory::{euler_phi, factorize, gcd, lcm, mod_inverse};

/// An element of the cyclotomic field Q(zeta_n), stored as rational
/// coefficients on the residues mod n. The representation is not unique;
/// equality and hashing go through [`CycNumber::canonical`].
#[derive(Clone)]
pub struct CycNumber {
    n: u32,
    c: Vec<BigRational>,
}

fn cyclo_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the n-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    if let Some(p) = cyclo_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    let arc = Arc::new(num);
    cyclo_cache().lock().unwrap().insert(n, arc.clone());
    arc
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut q = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let t = rem[k + dd];
        q[k] = t;
        if t != 0 {
            for (i, &b) in den.iter().enumerate() {
                rem[k + i] -= t * b;
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

impl CycNumber {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        CycNumber { n: 1, c: vec![q] }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// `zeta_n^k`.
    pub fn zeta(n: u32, k: i64) -> Self {
        assert!(n > 0);
        let mut c = vec![BigRational::zero(); n as usize];
        c[k.rem_euclid(n as i64) as usize] = BigRational::one();
        CycNumber { n, c }
    }

    /// Builds `sum coef * zeta_n^k` from `(coef, n, k)` terms.
    pub fn from_terms(terms: &[(i64, u32, i64)]) -> Self {
        let mut acc = Self::zero();
        for &(coef, n, k) in terms {
            acc = &acc + &Self::zeta(n, k).scale_int(coef);
        }
        acc
    }

    /// Builds a number from residue coefficients at level `n`.
    pub fn from_coeffs(n: u32, c: Vec<BigRational>) -> Self {
        assert!(n > 0 && c.len() <= n as usize);
        let mut c = c;
        c.resize(n as usize, BigRational::zero());
        CycNumber { n, c }
    }

    /// The level of the current representation (a multiple of the conductor).
    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    /// Re-expresses the number at level `m`, which must be a multiple of the current level.
    pub fn lift(&self, m: u32) -> Self {
        assert!(
            m % self.n == 0,
            "lift target must be a multiple of the level"
        );
        if m == self.n {
            return self.clone();
        }
        let f = (m / self.n) as usize;
        let mut c = vec![BigRational::zero(); m as usize];
        for (k, v) in self.c.iter().enumerate() {
            if !v.is_zero() {
                c[k * f] = v.clone();
            }
        }
        CycNumber { n: m, c }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        CycNumber {
            n: self.n,
            c: self
                .c
                .iter()
                .map(|v| if v.is_zero() { v.clone() } else { v * q })
                .collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }

    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        self.scale(&BigRational::new(1.into(), k.into()))
    }

    /// Complex conjugate: zeta^k -> zeta^{-k}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Galois action zeta -> zeta^a, with `a` coprime to the level.
    pub fn galois(&self, a: i64) -> Self {
        let n = self.n as i64;
        assert!(gcd(a.rem_euclid(n) as u64, n as u64) == 1 || n == 1);
        let mut c = vec![BigRational::zero(); self.n as usize];
        for (k, v) in self.c.iter().enumerate() {
            if !v.is_zero() {
                c[(a * k as i64).rem_euclid(n) as usize] += v;
            }
        }
        CycNumber { n: self.n, c }
    }

    /// Coefficients reduced modulo Phi_n (power basis of length phi(n)) at the current level.
    pub fn reduced(&self) -> Vec<BigRational> {
        let phi_poly = cyclotomic_polynomial(self.n);
        let deg = phi_poly.len() - 1;
        let mut a = self.c.clone();
        for k in (deg..a.len()).rev() {
            if a[k].is_zero() {
                continue;
            }
            let t = std::mem::replace(&mut a[k], BigRational::zero());
            for (i, &b) in phi_poly.iter().enumerate().take(deg) {
                if b != 0 {
                    a[k - deg + i] -= &t * BigRational::from_integer(b.into());
                }
            }
        }
        a.truncate(deg);
        a
    }

    fn reduced_self(&self) -> Self {
        let mut r = self.reduced();
        r.resize(self.n as usize, BigRational::zero());
        CycNumber { n: self.n, c: r }
    }

    pub fn is_zero(&self) -> bool {
        if self.c.iter().all(|v| v.is_zero()) {
            return true;
        }
        self.reduced().iter().all(|v| v.is_zero())
    }

    /// Projection onto Q(zeta_{n/p}) given by the normalized relative trace.
    fn trace_projection(&self, p: u32) -> Self {
        let n = self.n;
        let m = n / p;
        let mut c = vec![BigRational::zero(); m as usize];
        if m % p == 0 {
            for (k, v) in self.c.iter().enumerate() {
                if k as u32 % p == 0 && !v.is_zero() {
                    c[k / p as usize] += v;
                }
            }
        } else {
            // zeta_n^k = zeta_m^alpha * zeta_p^beta with k = p*alpha + m*beta (mod n).
            let pinv = mod_inverse(p as i64, m as i64).unwrap_or(0);
            let minv = mod_inverse(m as i64, p as i64).unwrap();
            let share = BigRational::new((-1).into(), ((p - 1) as i64).into());
            for (k, v) in self.c.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let k = k as i64;
                let alpha = if m == 1 {
                    0
                } else {
                    (k * pinv).rem_euclid(m as i64)
                };
                let beta = (k * minv).rem_euclid(p as i64);
                if beta == 0 {
                    c[alpha as usize] += v;
                } else {
                    c[alpha as usize] += v * &share;
                }
            }
        }
        CycNumber { n: m, c }
    }

    /// Same number expressed at its minimal conductor, reduced modulo the cyclotomic polynomial.
    pub fn minimal(&self) -> Self {
        let mut x = self.reduced_self();
        'outer: loop {
            if x.n == 1 {
                return x;
            }
            for (p, _) in factorize(x.n as u64) {
                let p = p as u32;
                let proj = x.trace_projection(p);
                let diff = &proj.lift(x.n) - &x;
                if diff.reduced().iter().all(|v| v.is_zero()) {
                    x = proj.reduced_self();
                    continue 'outer;
                }
            }
            return x;
        }
    }

    /// Minimal conductor of the number (1 for rationals). A level n = 2 mod 4
    /// never occurs since Q(zeta_n) = Q(zeta_{n/2}) there.
    pub fn conductor(&self) -> u32 {
        self.minimal().n
    }

    /// Canonical form: minimal conductor and power-basis coefficients.
    pub fn canonical(&self) -> (u32, Vec<BigRational>) {
        let m = self.minimal();
        let r = m.reduced();
        (m.n, r)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        let (n, c) = self.canonical();
        if n == 1 {
            Some(c[0].clone())
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    /// Whether the number is a cyclotomic integer (power-basis coefficients are integral).
    pub fn is_integral(&self) -> bool {
        self.reduced().iter().all(|v| v.is_integer())
    }

    pub fn is_real(&self) -> bool {
        (self - &self.conj()).is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let th = 2.0 * std::f64::consts::PI * k as f64 / n;
            let f = v.to_f64().unwrap_or(f64::NAN);
            acc += Complex64::new(f * th.cos(), f * th.sin());
        }
        acc
    }

    /// If the number is a root of unity, returns `(order, k)` with the number
    /// equal to `zeta_order^k` and `gcd(k, order) = 1`. The decision is exact:
    /// a numeric angle guess is checked against the candidates of order
    /// dividing `2 * level`.
    pub fn as_root_of_unity(&self) -> Option<(u32, u32)> {
        if !(self * &self.conj() - CycNumber::one()).is_zero() {
            return None;
        }
        let x = self.minimal();
        let l = lcm(2, x.n as u64) as u32;
        let z = x.to_complex();
        let guess = ((z.arg() / (2.0 * std::f64::consts::PI) * l as f64).round() as i64)
            .rem_euclid(l as i64);
        let mut order: Vec<i64> = vec![guess];
        order.extend((0..l as i64).filter(|&k| k != guess));
        for k in order {
            if (&CycNumber::zeta(l, k) - &x).is_zero() {
                let g = gcd(k as u64, l as u64) as u32;
                let g = if k == 0 { l } else { g };
                return Some((l / g, k as u32 / g));
            }
        }
        None
    }

    /// Exact square root of a positive integer inside a cyclotomic field, built from Gauss sums.
    pub fn sqrt_int(v: u64) -> Self {
        assert!(v > 0);
        let mut outside = 1i64;
        let mut acc = CycNumber::one();
        for (p, e) in factorize(v) {
            outside *= (p as i64).pow(e / 2);
            if e % 2 == 1 {
                acc = &acc * &sqrt_prime(p as u32);
            }
        }
        acc.scale_int(outside)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = CycNumber::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn combine(&self, other: &Self, sign: i32) -> Self {
        let l = lcm(self.n as u64, other.n as u64) as u32;
        let mut a = self.lift(l);
        let fb = (l / other.n) as usize;
        for (k, v) in other.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if sign > 0 {
                a.c[k * fb] += v;
            } else {
                a.c[k * fb] -= v;
            }
        }
        a
    }
}

fn sqrt_prime(p: u32) -> CycNumber {
    if p == 2 {
        // zeta_8 + zeta_8^7
        return &CycNumber::zeta(8, 1) + &CycNumber::zeta(8, 7);
    }
    // Quadratic Gauss sum g = sum (a/p) zeta_p^a, g^2 = (-1/p) p.
    let mut g = CycNumber::zero();
    for a in 1..p {
        let leg = legendre(a as u64, p as u64);
        g = &g + &CycNumber::zeta(p, a as i64).scale_int(leg);
    }
    if p % 4 == 1 {
        g
    } else {
        // g = i sqrt(p)
        &g * &CycNumber::zeta(4, 3)
    }
}

fn legendre(a: u64, p: u64) -> i64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

impl Add for &CycNumber {
    type Output = CycNumber;
    fn add(self, o: &CycNumber) -> CycNumber {
        self.combine(o, 1)
    }
}

impl Sub for &CycNumber {
    type Output = CycNumber;
    fn sub(self, o: &CycNumber) -> CycNumber {
        self.combine(o, -1)
    }
}

impl Sub<CycNumber> for CycNumber {
    type Output = CycNumber;
    fn sub(self, o: CycNumber) -> CycNumber {
        self.combine(&o, -1)
    }
}

impl Add<CycNumber> for CycNumber {
    type Output = CycNumber;
    fn add(self, o: CycNumber) -> CycNumber {
        self.combine(&o, 1)
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            n: self.n,
            c: self.c.iter().map(|v| -v).collect(),
        }
    }
}

impl Mul for &CycNumber {
    type Output = CycNumber;
    fn mul(self, o: &CycNumber) -> CycNumber {
        let l = lcm(self.n as u64, o.n as u64) as usize;
        let fa = l / self.n as usize;
        let fb = l / o.n as usize;
        let xs: Vec<(usize, &BigRational)> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| (k * fa, v))
            .collect();
        let ys: Vec<(usize, &BigRational)> =
            o.c.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k * fb, v))
                .collect();
        let mut c = vec![BigRational::zero(); l];
        let all_int = xs.iter().chain(ys.iter()).all(|(_, v)| v.is_integer());
        if all_int {
            let mut acc = vec![BigInt::zero(); l];
            for (i, a) in &xs {
                for (j, b) in &ys {
                    acc[(i + j) % l] += a.numer() * b.numer();
                }
            }
            for (slot, v) in c.iter_mut().zip(acc) {
                if !v.is_zero() {
                    *slot = BigRational::from_integer(v);
                }
            }
        } else {
            for (i, a) in &xs {
                for (j, b) in &ys {
                    c[(i + j) % l] += *a * *b;
                }
            }
        }
        CycNumber { n: l as u32, c }
    }
}

impl Mul<CycNumber> for CycNumber {
    type Output = CycNumber;
    fn mul(self, o: CycNumber) -> CycNumber {
        &self * &o
    }
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for CycNumber {}

impl Hash for CycNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, c) = self.canonical();
        let mut first = true;
        for (k, v) in c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let sign = if v.is_negative() { "-" } else { "+" };
            if first {
                if v.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            first = false;
            let a = v.abs();
            if k == 0 {
                write!(f, "{}", a)?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", a)?;
                }
                if k == 1 {
                    write!(f, "z{}", n)?;
                } else {
                    write!(f, "z{}^{}", n, k)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycRepr {
    n: u32,
    c: Vec<(BigInt, BigInt)>,
}

impl Serialize for CycNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (n, c) = self.canonical();
        CycRepr {
            n,
            c: c.into_iter()
                .map(|v| (v.numer().clone(), v.denom().clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CycRepr::deserialize(d)?;
        if r.n == 0 || r.c.len() > r.n as usize {
            return Err(serde::de::Error::custom(
                "invalid cyclotomic representation",
            ));
        }
        let mut c = Vec::with_capacity(r.c.len());
        for (num, den) in r.c {
            if den.is_zero() {
                return Err(serde::de::Error::custom("zero denominator"));
            }
            c.push(BigRational::new(num, den));
        }
        Ok(CycNumber::from_coeffs(r.n, c))
    }
}

/// Number of field elements of the power basis at conductor n.
pub fn field_degree(n: u32) -> usize {
    euler_phi(n as u64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(36).len() - 1, 12);
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        let mut s = CycNumber::zero();
        for k in 0..9 {
            s = &s + &CycNumber::zeta(9, k);
        }
        assert!(s.is_zero());
    }

    #[test]
    fn conductor_descent() {
        // zeta_9^3 = zeta_3
        assert_eq!(CycNumber::zeta(9, 3).conductor(), 3);
        assert_eq!(CycNumber::zeta(6, 1).conductor(), 3);
        assert_eq!(CycNumber::zeta(4, 2).conductor(), 1);
        assert_eq!(CycNumber::zeta(12, 3).conductor(), 4);
        let x = &CycNumber::zeta(9, 2) + &CycNumber::zeta(9, 7);
        assert_eq!(x.conductor(), 9);
        assert!(x.is_real());
    }

    #[test]
    fn square_roots() {
        for v in [2u64, 3, 5, 6, 7, 8, 12, 36, 11, 1296] {
            let s = CycNumber::sqrt_int(v);
            assert_eq!(&s * &s, CycNumber::from_int(v as i64), "sqrt {}", v);
            assert!(s.to_complex().re > 0.0);
        }
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(CycNumber::zeta(9, 6).as_root_of_unity(), Some((3, 2)));
        assert_eq!(CycNumber::from_int(-1).as_root_of_unity(), Some((2, 1)));
        assert_eq!(CycNumber::one().as_root_of_unity(), Some((1, 0)));
        assert_eq!(CycNumber::from_int(2).as_root_of_unity(), None);
        let x = -&CycNumber::zeta(9, 1);
        assert_eq!(x.as_root_of_unity(), Some((18, 11)));
    }

    #[test]
    fn serde_roundtrip() {
        let x = &CycNumber::zeta(9, 4).scale_int(2) + &CycNumber::from_ratio(1, 3);
        let s = serde_json::to_string(&x).unwrap();
        let y: CycNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
