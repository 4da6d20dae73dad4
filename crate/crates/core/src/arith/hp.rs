//! Fixed-point high-precision reals and complex numbers.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cyc::CycNumber;

const GUARD: u32 = 32;

/// A real number `m / 2^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpReal {
    m: BigInt,
    prec: u32,
}

impl HpReal {
    pub fn zero(prec: u32) -> Self {
        HpReal {
            m: BigInt::zero(),
            prec,
        }
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        HpReal {
            m: BigInt::from(v) << prec,
            prec,
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        HpReal {
            m: (q.numer() << prec) / q.denom(),
            prec,
        }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        let q = BigRational::from_float(v).unwrap_or_else(BigRational::zero);
        Self::from_rational(&q, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let m = if prec >= self.prec {
            &self.m << (prec - self.prec)
        } else {
            &self.m >> (self.prec - prec)
        };
        HpReal { m, prec }
    }

    pub fn abs(&self) -> Self {
        HpReal {
            m: self.m.abs(),
            prec: self.prec,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.prec.saturating_sub(60);
        let m = (&self.m >> shift).to_f64().unwrap_or(f64::NAN);
        m / 2f64.powi((self.prec - shift) as i32)
    }

    /// Whether `|self| < 2^-bits`.
    pub fn below_pow2(&self, bits: u32) -> bool {
        if bits >= self.prec {
            return self.m.is_zero();
        }
        self.m.abs() < (BigInt::one() << (self.prec - bits))
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        HpReal {
            m: &self.m * k,
            prec: self.prec,
        }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        HpReal {
            m: &self.m / k,
            prec: self.prec,
        }
    }
}

impl Add for &HpReal {
    type Output = HpReal;
    fn add(self, o: &HpReal) -> HpReal {
        debug_assert_eq!(self.prec, o.prec);
        HpReal {
            m: &self.m + &o.m,
            prec: self.prec,
        }
    }
}

impl Sub for &HpReal {
    type Output = HpReal;
    fn sub(self, o: &HpReal) -> HpReal {
        debug_assert_eq!(self.prec, o.prec);
        HpReal {
            m: &self.m - &o.m,
            prec: self.prec,
        }
    }
}

impl Mul for &HpReal {
    type Output = HpReal;
    fn mul(self, o: &HpReal) -> HpReal {
        debug_assert_eq!(self.prec, o.prec);
        HpReal {
            m: (&self.m * &o.m) >> self.prec,
            prec: self.prec,
        }
    }
}

impl Neg for &HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal {
            m: -&self.m,
            prec: self.prec,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpComplex {
    pub re: HpReal,
    pub im: HpReal,
}

impl HpComplex {
    pub fn zero(prec: u32) -> Self {
        HpComplex {
            re: HpReal::zero(prec),
            im: HpReal::zero(prec),
        }
    }

    pub fn from_f64(z: Complex64, prec: u32) -> Self {
        HpComplex {
            re: HpReal::from_f64(z.re, prec),
            im: HpReal::from_f64(z.im, prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        HpComplex {
            re: self.re.with_prec(prec),
            im: self.im.with_prec(prec),
        }
    }

    /// Whether both components differ from `o` by less than `2^-bits`.
    pub fn close_to(&self, o: &HpComplex, bits: u32) -> bool {
        (&self.re - &o.re).below_pow2(bits) && (&self.im - &o.im).below_pow2(bits)
    }
}

impl Add for &HpComplex {
    type Output = HpComplex;
    fn add(self, o: &HpComplex) -> HpComplex {
        HpComplex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &HpComplex {
    type Output = HpComplex;
    fn sub(self, o: &HpComplex) -> HpComplex {
        HpComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &HpComplex {
    type Output = HpComplex;
    fn mul(self, o: &HpComplex) -> HpComplex {
        HpComplex {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

/// pi to `prec` bits via Machin's formula.
pub fn pi(prec: u32) -> HpReal {
    let p = prec + GUARD;
    let a = atan_inv(5, p).mul_int(&16.into());
    let b = atan_inv(239, p).mul_int(&4.into());
    (&a - &b).with_prec(prec)
}

fn atan_inv(x: i64, prec: u32) -> HpReal {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut term: BigInt = (BigInt::one() << prec) / &x;
    let mut sum = term.clone();
    let mut k = 1i64;
    loop {
        term = &term / &x2;
        if term.is_zero() {
            break;
        }
        let t = &term / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    HpReal { m: sum, prec }
}

/// `exp(2 pi i k / n)` to `prec` bits.
pub fn root_of_unity(n: u32, k: i64, prec: u32) -> HpComplex {
    let p = prec + GUARD;
    let k = k.rem_euclid(n as i64);
    // Reduce to an angle in [-pi, pi].
    let (num, den) = if 2 * k > n as i64 {
        (k - n as i64, n as i64)
    } else {
        (k, n as i64)
    };
    let theta = pi(p)
        .mul_int(&BigInt::from(2 * num))
        .div_int(&BigInt::from(den));
    let (c, s) = cos_sin(&theta);
    HpComplex {
        re: c.with_prec(prec),
        im: s.with_prec(prec),
    }
}

fn cos_sin(theta: &HpReal) -> (HpReal, HpReal) {
    let p = theta.prec;
    let one = HpReal::from_int(1, p);
    let mut cos = one.clone();
    let mut sin = theta.clone();
    let mut term = theta.clone();
    let mut k = 1i64;
    loop {
        term = (&term * theta).div_int(&BigInt::from(k + 1));
        if term.m.is_zero() {
            break;
        }
        let idx = k + 1;
        let signed = if (idx / 2) % 2 == 1 {
            -&term
        } else {
            term.clone()
        };
        if idx % 2 == 0 {
            cos = &cos + &signed;
        } else {
            sin = &sin + &signed;
        }
        k += 1;
    }
    (cos, sin)
}

/// Evaluates a cyclotomic number at `zeta_n = exp(2 pi i / n)` to `prec` bits.
pub fn eval_cyc(x: &CycNumber, prec: u32) -> HpComplex {
    let n = x.level();
    let p = prec + GUARD;
    let mut acc = HpComplex::zero(p);
    for (k, v) in x.coeffs().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let z = root_of_unity(n, k as i64, p);
        let q = HpReal::from_rational(v, p);
        acc = &acc
            + &HpComplex {
                re: &z.re * &q,
                im: &z.im * &q,
            };
    }
    acc.with_prec(prec)
}
