//! Double-double ("dd") arithmetic: an unevaluated sum `hi + lo` of two
//! doubles carrying roughly 106 bits of significand.
//!
//! Series terms near a pole are large and the transformation laws compare
//! values at two different points, so term denominators, reciprocals and
//! accumulation all run in this format. Only the final value is rounded to
//! `f64`.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    /// Nearest double-double to `num / den`, computed from a ~110-bit
    /// integer quotient so that huge or tiny rationals convert without
    /// intermediate overflow.
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        if num.is_zero() {
            return Dd::ZERO;
        }
        let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
        let n = num.abs();
        let d = den.abs();
        let shift = 110 - (n.bits() as i64 - d.bits() as i64);
        let q = if shift >= 0 {
            (n << shift as usize) / d
        } else {
            n / (d << (-shift) as usize)
        };
        let hi = q.to_f64().unwrap_or(f64::INFINITY);
        let rem = &q - BigInt::from_f64(hi).unwrap_or_default();
        let lo = rem.to_f64().unwrap_or(0.0);
        let v = Dd::from_parts(hi, lo).scale_pow2(-shift);
        if negative {
            -v
        } else {
            v
        }
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        Dd::from_ratio(x, &BigInt::from(1))
    }

    fn from_parts(hi: f64, lo: f64) -> Self {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    /// Multiplies by `2^e`, splitting the factor so that neither half
    /// overflows on its own.
    fn scale_pow2(self, e: i64) -> Self {
        let e = e.clamp(-4000, 4000) as i32;
        let a = 2f64.powi(e / 2);
        let b = 2f64.powi(e - e / 2);
        Dd {
            hi: self.hi * a * b,
            lo: self.lo * a * b,
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: DdComplex = DdComplex {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn real(x: Dd) -> Self {
        DdComplex {
            re: x,
            im: Dd::ZERO,
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn scale(self, k: Dd) -> Self {
        DdComplex {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn conj(self) -> Self {
        DdComplex {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.square() + self.im.square()
    }

    /// `1 / self`, rescaled by a power of two first so that `|w|^2`
    /// neither overflows nor underflows.
    pub fn recip(self) -> Self {
        let big = self.re.hi.abs().max(self.im.hi.abs());
        if big == 0.0 || !big.is_finite() {
            let d = self.norm_sqr();
            return DdComplex {
                re: self.re / d,
                im: -self.im / d,
            };
        }
        let scale = Dd::new(2f64.powi(-(big.log2().floor() as i32)));
        let w = self.scale(scale);
        let d = w.norm_sqr();
        DdComplex {
            re: w.re / d,
            im: -w.im / d,
        }
        .scale(scale)
    }

    pub fn powu(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = DdComplex::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// `self^n` for any integer `n`; negative exponents invert first.
    pub fn powi(self, n: i64) -> Self {
        if n < 0 {
            self.recip().powu(n.unsigned_abs() as u32)
        } else {
            self.powu(n as u32)
        }
    }
}

impl From<Complex64> for DdComplex {
    fn from(z: Complex64) -> Self {
        DdComplex {
            re: Dd::new(z.re),
            im: Dd::new(z.im),
        }
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    fn neg(self) -> Self {
        DdComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, o: Self) -> Self {
        DdComplex {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, o: Self) -> Self {
        DdComplex {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, o: Self) -> Self {
        DdComplex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}
