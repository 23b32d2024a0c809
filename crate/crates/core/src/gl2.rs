//! Exact 2x2 integer matrices and the generators of GL2(Z).

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::lucas::{LucasSequence, SequenceSpec};

/// Row-major `[[p, q], [r, s]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMat2 {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
    pub s: BigInt,
}

impl IntMat2 {
    pub fn new(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        r: impl Into<BigInt>,
        s: impl Into<BigInt>,
    ) -> Self {
        IntMat2 {
            p: p.into(),
            q: q.into(),
            r: r.into(),
            s: s.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// Translation `z -> z + 1`.
    pub fn t() -> Self {
        Self::new(1, 1, 0, 1)
    }

    pub fn u() -> Self {
        Self::new(0, 1, 1, 0)
    }

    pub fn v() -> Self {
        Self::new(1, 0, 0, -1)
    }

    /// Inversion `z -> -1/z`.
    pub fn s() -> Self {
        Self::new(0, -1, 1, 0)
    }

    /// Reflection `z -> 1 - z`.
    pub fn p() -> Self {
        Self::p_a(1)
    }

    /// The even-function matrix `z -> -z`.
    pub fn m_prime() -> Self {
        Self::new(-1, 0, 0, 1)
    }

    /// Reflection `z -> a - z` about `Re z = a/2`.
    pub fn p_a(a: i64) -> Self {
        Self::new(-1, a, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.p * &self.s - &self.q * &self.r
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// `self^n` by repeated squaring.
    pub fn power(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity();
        while n > 0 {
            if n.is_odd() {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Adjugate inverse; defined only for determinant `±1`.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if !d.abs().is_one() {
            return None;
        }
        Some(IntMat2 {
            p: &self.s * &d,
            q: -&self.q * &d,
            r: -&self.r * &d,
            s: &self.p * &d,
        })
    }

    /// `self^n` for any integer `n`, negative powers through the inverse.
    pub fn signed_power(&self, n: i64) -> Option<Self> {
        if n >= 0 {
            Some(self.power(n as u64))
        } else {
            Some(self.inverse()?.power(n.unsigned_abs()))
        }
    }

    fn entries_f64(&self) -> [f64; 4] {
        [&self.p, &self.q, &self.r, &self.s].map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    /// `(p z + q) / (r z + s)`.
    pub fn mobius_apply(&self, z: Complex64) -> Result<Complex64> {
        let [p, q, r, s] = self.entries_f64();
        let den = z * r + s;
        if den == Complex64::zero() {
            return Err(Error::MobiusPole);
        }
        Ok((z * p + q) / den)
    }

    /// Möbius action in double-double precision.
    pub fn mobius_apply_dd(&self, z: DdComplex) -> Result<DdComplex> {
        let [p, q, r, s] = [&self.p, &self.q, &self.r, &self.s].map(Dd::from_bigint);
        let den = z.scale(r) + DdComplex::real(s);
        if den.re.hi == 0.0 && den.im.hi == 0.0 {
            return Err(Error::MobiusPole);
        }
        let num = z.scale(p) + DdComplex::real(q);
        if self.r.is_zero() {
            return Ok(num.scale(s.recip()));
        }
        Ok(num * den.recip())
    }

    /// Automorphy factor `r z + s`.
    pub fn automorphy_dd(&self, z: DdComplex) -> DdComplex {
        z.scale(Dd::from_bigint(&self.r)) + DdComplex::real(Dd::from_bigint(&self.s))
    }
}

impl Mul for &IntMat2 {
    type Output = IntMat2;
    fn mul(self, o: &IntMat2) -> IntMat2 {
        IntMat2 {
            p: &self.p * &o.p + &self.q * &o.r,
            q: &self.p * &o.q + &self.q * &o.s,
            r: &self.r * &o.p + &self.s * &o.r,
            s: &self.r * &o.q + &self.s * &o.s,
        }
    }
}

impl Mul for IntMat2 {
    type Output = IntMat2;
    fn mul(self, o: IntMat2) -> IntMat2 {
        &self * &o
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.p, self.q, self.r, self.s)
    }
}

pub fn multiply(a: &IntMat2, b: &IntMat2) -> IntMat2 {
    a * b
}

/// `[[F_{n+1}, F_n], [F_n, F_{n-1}]]` built from the sequence values;
/// `F_{-1} = 1`.
pub fn fibonacci_matrix(n: u64) -> IntMat2 {
    let fib = LucasSequence::new(SequenceSpec::FIBONACCI);
    let f = |k: u64| fib.nonnegative(k as usize);
    let prev = if n == 0 { BigInt::one() } else { f(n - 1) };
    IntMat2::new(f(n + 1), f(n), f(n), prev)
}

/// `(PS)^n` equals the Fibonacci matrix of order `n`.
pub fn fib_matrix_check(n: u64) -> bool {
    let ps = IntMat2::p() * IntMat2::s();
    ps.power(n) == fibonacci_matrix(n)
}

/// Every generator relation, each evaluated exactly.
pub fn generator_identities() -> Vec<(String, bool)> {
    let (t, u, v, s, p) = (
        IntMat2::t(),
        IntMat2::u(),
        IntMat2::v(),
        IntMat2::s(),
        IntMat2::p(),
    );
    let s3 = s.power(3);
    let pt = &p * &t;
    let mut out = vec![
        ("U=PTS".to_string(), &pt * &s == u),
        ("V=SPTS^3".to_string(), &(&s * &pt) * &s3 == v),
        ("P_0=M'".to_string(), IntMat2::p_a(0) == IntMat2::m_prime()),
        ("S^4=I".to_string(), s.power(4) == IntMat2::identity()),
        (
            "PS=[[1,1],[1,0]]".to_string(),
            &p * &s == IntMat2::new(1, 1, 1, 0),
        ),
    ];
    for a in -3..=3i64 {
        let pa_ta = match t.signed_power(a) {
            Some(ta) => &IntMat2::p_a(a) * &ta,
            None => {
                out.push((format!("P_aT^a=PT (a={a})"), false));
                continue;
            }
        };
        out.push((format!("P_aT^a=PT (a={a})"), pa_ta == pt));
        out.push((format!("U=P_aT^aS (a={a})"), &pa_ta * &s == u));
        out.push((format!("V=SP_aT^aS^3 (a={a})"), &(&s * &pa_ta) * &s3 == v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(IntMat2::s().det(), BigInt::from(1));
        assert_eq!(IntMat2::p().det(), BigInt::from(-1));
        assert_eq!(IntMat2::m_prime().det(), BigInt::from(-1));
        for m in [IntMat2::t(), IntMat2::u(), IntMat2::v(), IntMat2::p_a(7)] {
            assert!(m.is_unimodular());
        }
    }

    #[test]
    fn powers_and_products() {
        assert_eq!(IntMat2::s().power(4), IntMat2::identity());
        assert_eq!(IntMat2::s().power(0), IntMat2::identity());
        assert_eq!(
            multiply(&IntMat2::p(), &IntMat2::s()),
            IntMat2::new(1, 1, 1, 0)
        );
        assert_eq!(IntMat2::t().power(5), IntMat2::new(1, 5, 0, 1));
    }

    #[test]
    fn inverse_requires_unit_determinant() {
        let m = IntMat2::new(2, 1, 7, 4);
        assert_eq!(&m * &m.inverse().unwrap(), IntMat2::identity());
        assert_eq!(
            &IntMat2::p() * &IntMat2::p().inverse().unwrap(),
            IntMat2::identity()
        );
        assert!(IntMat2::new(2, 0, 0, 1).inverse().is_none());
        assert_eq!(
            IntMat2::t().signed_power(-2).unwrap(),
            IntMat2::new(1, -2, 0, 1)
        );
    }

    #[test]
    fn fibonacci_matrix_powers() {
        assert_eq!(
            (IntMat2::p() * IntMat2::s()).power(3),
            IntMat2::new(3, 2, 2, 1)
        );
        assert!(fib_matrix_check(1));
        assert!(fib_matrix_check(3));
        let big = (IntMat2::p() * IntMat2::s()).power(50);
        assert_eq!(big.p, BigInt::from(20_365_011_074_u64));
        assert_eq!(big.q, BigInt::from(12_586_269_025_u64));
        assert!(fib_matrix_check(50));
        assert!(fib_matrix_check(200));
        assert!(fib_matrix_check(0));
    }

    #[test]
    fn all_generator_identities_hold() {
        let ids = generator_identities();
        assert_eq!(ids.len(), 5 + 3 * 7);
        for (name, ok) in ids {
            assert!(ok, "{name}");
        }
    }

    #[test]
    fn mobius_examples() {
        let i = Complex64::new(0.0, 1.0);
        assert!((IntMat2::s().mobius_apply(i).unwrap() - i).norm() < 1e-16);
        let z = Complex64::new(0.25, -1.5);
        assert_eq!(
            IntMat2::p().mobius_apply(z).unwrap(),
            Complex64::new(0.75, 1.5)
        );
        assert_eq!(
            IntMat2::p_a(3)
                .mobius_apply(Complex64::new(1.0, 1.0))
                .unwrap(),
            Complex64::new(2.0, -1.0)
        );
        assert_eq!(
            IntMat2::s().mobius_apply(Complex64::zero()),
            Err(Error::MobiusPole)
        );
        assert_eq!(
            IntMat2::s().mobius_apply_dd(DdComplex::ZERO),
            Err(Error::MobiusPole)
        );
    }
}
