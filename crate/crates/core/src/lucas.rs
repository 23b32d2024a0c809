//! Lucas sequences `L_n(a, b)` over all integer indices.
//!
//! Non-negative indices come from the recursion `L_n = a L_{n-1} - b L_{n-2}`
//! started from the kind's initial pair. Negative indices use the closed
//! form `L_{-n} = (-1)^l L_n / b^n` with `l = 1` for the first kind and
//! `l = 2` for the second; values are exact rationals and integers
//! whenever `b = ±1`.

use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `|n|` accepted by [`LucasSequence::term`].
pub const INDEX_CAP: i64 = 100_000;

/// Number of extra ratios spanned by [`LucasSequence::growth_info`].
pub const RATIO_WINDOW: i64 = 16;

// Values above this index are recomputed on demand instead of memoized;
// the table would otherwise hold hundreds of megabytes near the cap.
const MEMO_LIMIT: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Initial values `L_0 = 0, L_1 = 1`.
    First,
    /// Initial values `L_0 = 2, L_1 = a`.
    Second,
}

/// Parameters of a Lucas sequence. `a = 0` and `b = 0` are rejected: the
/// associated series diverge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    a: i64,
    b: i64,
    kind: Kind,
}

impl SequenceSpec {
    pub const FIBONACCI: SequenceSpec = SequenceSpec {
        a: 1,
        b: -1,
        kind: Kind::First,
    };

    pub const LUCAS_NUMBERS: SequenceSpec = SequenceSpec {
        a: 1,
        b: -1,
        kind: Kind::Second,
    };

    pub fn new(a: i64, b: i64, kind: Kind) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidSequence("b must be nonzero".into()));
        }
        if a == 0 {
            return Err(Error::InvalidSequence(
                "a must be nonzero (the a = 0 series diverges)".into(),
            ));
        }
        const LIMIT: i64 = 1 << 31;
        if a.abs() > LIMIT || b.abs() > LIMIT {
            return Err(Error::InvalidSequence(format!(
                "|a| and |b| must not exceed {LIMIT}"
            )));
        }
        Ok(SequenceSpec { a, b, kind })
    }

    /// `a`-Fibonacci numbers: first kind with `b = -1`.
    pub fn a_fibonacci(a: i64) -> Result<Self> {
        Self::new(a, -1, Kind::First)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_fibonacci(&self) -> bool {
        *self == Self::FIBONACCI
    }

    /// `b = -1`: negative indices mirror positive ones up to sign, which is
    /// what the transformation laws and the certified tail bounds need.
    pub fn has_sign_symmetry(&self) -> bool {
        self.b == -1
    }

    fn initial(&self) -> (BigInt, BigInt) {
        match self.kind {
            Kind::First => (BigInt::zero(), BigInt::one()),
            Kind::Second => (BigInt::from(2), BigInt::from(self.a)),
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_fibonacci() {
            return write!(f, "fib");
        }
        if *self == Self::LUCAS_NUMBERS {
            return write!(f, "lucas");
        }
        let kind = match self.kind {
            Kind::First => "first",
            Kind::Second => "second",
        };
        write!(f, "lucas-{}:{}:{}", kind, self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqValue {
    pub index: i64,
    pub value: BigRational,
}

/// Closed real interval with exact rational endpoints containing the
/// ratios `L_{j-1} / L_j` for `j >= start`.
///
/// `proven` is set only when every later ratio is guaranteed to lie in the
/// interval; otherwise the interval merely spans the sampled window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioInterval {
    pub start: i64,
    pub lo: BigRational,
    pub hi: BigRational,
    pub proven: bool,
}

impl RatioInterval {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn max_abs(&self) -> BigRational {
        std::cmp::max(self.lo.abs(), self.hi.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthInfo {
    /// Root of `x^2 = a x - b` with the largest modulus.
    pub dominant_root: f64,
    /// `lim L_n / L_{n-1}`.
    pub limit_ratio_pos: f64,
    /// `lim -L_{n-1} / L_n`.
    pub limit_ratio_neg: f64,
    pub ratio_interval: RatioInterval,
}

/// A Lucas sequence with a memo table of its non-negative values.
/// Safe to share between threads.
#[derive(Debug)]
pub struct LucasSequence {
    spec: SequenceSpec,
    table: RwLock<Vec<BigInt>>,
}

impl Clone for LucasSequence {
    fn clone(&self) -> Self {
        let table = self.table.read().expect("lucas memo poisoned").clone();
        LucasSequence {
            spec: self.spec,
            table: RwLock::new(table),
        }
    }
}

impl LucasSequence {
    pub fn new(spec: SequenceSpec) -> Self {
        let (l0, l1) = spec.initial();
        LucasSequence {
            spec,
            table: RwLock::new(vec![l0, l1]),
        }
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// `L_n` for `n >= 0`.
    pub fn nonnegative(&self, n: usize) -> BigInt {
        {
            let table = self.table.read().expect("lucas memo poisoned");
            if n < table.len() {
                return table[n].clone();
            }
        }
        let a = BigInt::from(self.spec.a);
        let b = BigInt::from(self.spec.b);
        let step = |prev: &BigInt, prev2: &BigInt| &a * prev - &b * prev2;

        let mut table = self.table.write().expect("lucas memo poisoned");
        let stop = n.min(MEMO_LIMIT);
        while table.len() <= stop {
            let k = table.len();
            let next = step(&table[k - 1], &table[k - 2]);
            table.push(next);
        }
        if n < table.len() {
            return table[n].clone();
        }
        let k = table.len();
        let (mut prev2, mut prev) = (table[k - 2].clone(), table[k - 1].clone());
        drop(table);
        for _ in k..=n {
            let next = step(&prev, &prev2);
            prev2 = std::mem::replace(&mut prev, next);
        }
        prev
    }

    /// `L_n` as an exact rational for any integer `n` with `|n| <= INDEX_CAP`.
    pub fn value(&self, n: i64) -> Result<BigRational> {
        if n.abs() > INDEX_CAP {
            return Err(Error::IndexCapExceeded {
                index: n,
                cap: INDEX_CAP,
            });
        }
        if n >= 0 {
            return Ok(BigRational::from_integer(self.nonnegative(n as usize)));
        }
        let k = n.unsigned_abs() as usize;
        let mut v = self.nonnegative(k);
        if self.spec.kind == Kind::First {
            v = -v;
        }
        let den = BigInt::from(self.spec.b).pow(k as u32);
        Ok(BigRational::new(v, den))
    }

    pub fn term(&self, n: i64) -> Result<SeqValue> {
        Ok(SeqValue {
            index: n,
            value: self.value(n)?,
        })
    }

    /// Dominant-root data and the ratio interval for `L_{j-1} / L_j`,
    /// `j >= start`.
    ///
    /// For `b = -1` the ratios `x_j = L_{j-1} / L_j` obey `x_{j+1} =
    /// 1 / (a + x_j)`, a decreasing map that does not expand distances once
    /// `a x_j >= 0`. Consecutive ratios therefore straddle the fixed point
    /// and every later ratio lies between `x_j` and `x_{j+1}`, so the hull
    /// of the sampled window is a proven enclosure. For other `b` the hull
    /// is returned unproven.
    pub fn growth_info(&self, start: i64) -> Result<GrowthInfo> {
        if start < 3 {
            return Err(Error::InvalidArgument(format!(
                "ratio interval start must be at least 3, got {start}"
            )));
        }
        let a = self.spec.a as f64;
        let disc = (self.spec.a as i128).pow(2) - 4 * self.spec.b as i128;
        if disc <= 0 {
            return Err(Error::RatioBoundUnavailable(format!(
                "x^2 = {}x - ({}) has no strictly dominant real root",
                self.spec.a, self.spec.b
            )));
        }
        let sq = (disc as f64).sqrt();
        let dominant_root = if a >= 0.0 {
            (a + sq) / 2.0
        } else {
            (a - sq) / 2.0
        };
        if dominant_root.abs() <= 1.0 {
            return Err(Error::RatioBoundUnavailable(format!(
                "dominant root {dominant_root} does not exceed 1 in modulus"
            )));
        }

        let end = start + RATIO_WINDOW;
        if end > INDEX_CAP {
            return Err(Error::IndexCapExceeded {
                index: end,
                cap: INDEX_CAP,
            });
        }
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        let mut prev = self.nonnegative(start as usize - 1);
        for j in start..=end {
            let cur = self.nonnegative(j as usize);
            if !cur.is_zero() {
                let x = BigRational::new(prev.clone(), cur.clone());
                if lo.as_ref().is_none_or(|l| &x < l) {
                    lo = Some(x.clone());
                }
                if hi.as_ref().is_none_or(|h| &x > h) {
                    hi = Some(x);
                }
            }
            prev = cur;
        }
        let (lo, hi) = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                return Err(Error::RatioBoundUnavailable(
                    "sequence vanishes across the ratio window".into(),
                ))
            }
        };
        let proven = self.spec.has_sign_symmetry();

        Ok(GrowthInfo {
            dominant_root,
            limit_ratio_pos: dominant_root,
            limit_ratio_neg: -1.0 / dominant_root,
            ratio_interval: RatioInterval {
                start,
                lo,
                hi,
                proven,
            },
        })
    }
}

/// Convenience wrapper: `L_n` of `spec` without keeping a memo table.
pub fn term(spec: &SequenceSpec, n: i64) -> Result<SeqValue> {
    LucasSequence::new(*spec).term(n)
}

pub(crate) fn rational_to_f64(x: &BigRational) -> f64 {
    crate::dd::Dd::from_ratio(x.numer(), x.denom()).to_f64()
}

pub(crate) fn bigint_ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn worked_values() {
        let fib = LucasSequence::new(SequenceSpec::FIBONACCI);
        assert_eq!(fib.value(10).unwrap(), int(55));
        assert_eq!(fib.value(-4).unwrap(), int(-3));
        let lucas = LucasSequence::new(SequenceSpec::LUCAS_NUMBERS);
        assert_eq!(lucas.value(-3).unwrap(), int(-4));
        let pell = SequenceSpec::new(2, -1, Kind::First).unwrap();
        assert_eq!(term(&pell, 4).unwrap().value, int(12));
        let s = SequenceSpec::new(3, 2, Kind::First).unwrap();
        assert_eq!(
            term(&s, -1).unwrap().value,
            BigRational::new(BigInt::from(-1), BigInt::from(2))
        );
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(matches!(
            SequenceSpec::new(1, 0, Kind::First),
            Err(Error::InvalidSequence(_))
        ));
        assert!(matches!(
            SequenceSpec::new(0, -1, Kind::Second),
            Err(Error::InvalidSequence(_))
        ));
    }

    #[test]
    fn index_cap() {
        let fib = LucasSequence::new(SequenceSpec::FIBONACCI);
        assert!(matches!(
            fib.value(INDEX_CAP + 1),
            Err(Error::IndexCapExceeded { .. })
        ));
        assert!(matches!(
            fib.value(-INDEX_CAP - 1),
            Err(Error::IndexCapExceeded { .. })
        ));
    }

    #[test]
    fn beyond_memo_limit_matches_recursion() {
        let fib = LucasSequence::new(SequenceSpec::FIBONACCI);
        let n = MEMO_LIMIT + 20;
        let x = fib.nonnegative(n);
        let y = fib.nonnegative(n - 1);
        let z = fib.nonnegative(n - 2);
        assert_eq!(x, y + z);
    }

    #[test]
    fn growth_info_fibonacci() {
        let fib = LucasSequence::new(SequenceSpec::FIBONACCI);
        let g = fib.growth_info(5).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((g.dominant_root - 1.618_033_988_7).abs() < 1e-10);
        assert!((g.limit_ratio_neg + 1.0 / phi).abs() < 1e-15);
        let iv = &g.ratio_interval;
        assert!(iv.proven);
        assert!(rational_to_f64(&iv.lo) < 1.0 / phi && 1.0 / phi < rational_to_f64(&iv.hi));
    }

    #[test]
    fn growth_info_pell_and_unavailable() {
        let pell = LucasSequence::new(SequenceSpec::new(2, -1, Kind::First).unwrap());
        let g = pell.growth_info(5).unwrap();
        assert!((g.dominant_root - (1.0 + 2f64.sqrt())).abs() < 1e-15);

        let periodic = LucasSequence::new(SequenceSpec::new(1, 1, Kind::First).unwrap());
        assert!(matches!(
            periodic.growth_info(5),
            Err(Error::RatioBoundUnavailable(_))
        ));
        assert!(matches!(
            pell.growth_info(2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn negative_a_is_a_reflection() {
        let pos = LucasSequence::new(SequenceSpec::new(2, -1, Kind::Second).unwrap());
        let neg = LucasSequence::new(SequenceSpec::new(-2, -1, Kind::Second).unwrap());
        for n in -10..=10i64 {
            let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
            assert_eq!(neg.value(n).unwrap(), pos.value(n).unwrap() * int(sign));
        }
        let g = neg.growth_info(3).unwrap();
        assert!((g.dominant_root + 1.0 + 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn display_round_trips_selector_names() {
        assert_eq!(SequenceSpec::FIBONACCI.to_string(), "fib");
        assert_eq!(SequenceSpec::LUCAS_NUMBERS.to_string(), "lucas");
        let s = SequenceSpec::new(3, -1, Kind::Second).unwrap();
        assert_eq!(s.to_string(), "lucas-second:3:-1");
    }
}
