//! Bilateral Lucas-Eisenstein series
//!
//! ```text
//! Standard:  sum_j (L_j z + L_{j-1})^(-m)
//! Footnote:  sum_j (F_j - F_{j-1} z)^(-m)      (Fibonacci only)
//! ```
//!
//! Each series is split into the half over `j <= 0` ([`Half::Minus`]) and
//! the half over `j >= 1` ([`Half::Plus`]). Every half is summed from its
//! outer window edge inward in double-double arithmetic; the full value is
//! the sum of the two half values.
//!
//! For `b = -1` the omitted terms of a half with window edge `e` all have
//! the shape `A_i (z - c_i)` with `|A_i| >= A_0 r^i` and every `c_i` inside
//! a real interval `K` derived from the proven ratio enclosure, so
//!
//! ```text
//! tail <= dist(z, K)^(-m) A_0^(-m) / (1 - r^(-m)).
//! ```
//!
//! Other `b` are evaluated in exploration mode with a heuristic geometric
//! tail estimate and `certified = false`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::lucas::{
    bigint_ln_abs, rational_to_f64, Kind, LucasSequence, RatioInterval, SequenceSpec, INDEX_CAP,
};

pub const DEFAULT_GUARD_EPS: f64 = 1e-6;
/// Poles `L_n / L_{n-1}` with `|n|` up to this are checked individually;
/// farther ones sit inside the accumulation-point guard.
pub const GUARD_RANGE: i64 = 64;
pub const INITIAL_EXTENT: i64 = 8;
pub const WINDOW_CAP: i64 = 10_000;
pub const MIN_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Terms `(L_j z + L_{j-1})^(-m)`.
    Standard,
    /// Terms `(F_j - F_{j-1} z)^(-m)`.
    Footnote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Half {
    /// Indices `j <= 0`.
    Minus,
    /// Indices `j >= 1`.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub tol: f64,
    pub guard_eps: f64,
    pub require_certified: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tol: 1e-12,
            guard_eps: DEFAULT_GUARD_EPS,
            require_certified: false,
        }
    }
}

impl EvalOptions {
    pub fn with_tol(tol: f64) -> Self {
        EvalOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    /// The same sum kept in double-double precision.
    pub extended: DdComplex,
    pub tail_bound: f64,
    pub j_min: i64,
    pub j_max: i64,
    pub certified: bool,
}

/// Geometric majorant of one omitted tail, independent of `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TailModel {
    ln_lead: f64,
    lo: f64,
    hi: f64,
    ratio: f64,
}

impl TailModel {
    fn bound(&self, z: Complex64, weight: u32) -> f64 {
        let d = distance_to_interval(z, self.lo, self.hi) * (1.0 - 1e-15);
        if !(d > 0.0) || !(self.ratio > 1.0) {
            return f64::INFINITY;
        }
        let m = weight as f64;
        let geometric = 1.0 / (1.0 - self.ratio.powf(-m));
        (-m * (d.ln() + self.ln_lead)).exp() * geometric * (1.0 + 1e-12)
    }
}

fn distance_to_interval(z: Complex64, lo: f64, hi: f64) -> f64 {
    let dx = if z.re < lo {
        lo - z.re
    } else if z.re > hi {
        z.re - hi
    } else {
        0.0
    };
    dx.hypot(z.im)
}

fn round_out(lo: &BigRational, hi: &BigRational) -> (f64, f64) {
    let l = rational_to_f64(lo);
    let h = rational_to_f64(hi);
    (
        l - l.abs() * 4.0 * f64::EPSILON - f64::MIN_POSITIVE,
        h + h.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE,
    )
}

#[derive(Debug)]
struct CoeffCache {
    // L_n for n >= 0 and L_{-n} for n >= 1, as double-doubles.
    pos: Vec<Dd>,
    neg: Vec<Dd>,
    // b^neg.len()
    neg_pow: BigInt,
}

impl Default for CoeffCache {
    fn default() -> Self {
        CoeffCache {
            pos: Vec::new(),
            neg: Vec::new(),
            neg_pow: BigInt::one(),
        }
    }
}

#[derive(Debug)]
struct Inner {
    seq: LucasSequence,
    weight: u32,
    variant: Variant,
    certified: bool,
    poles: Vec<f64>,
    accumulation: Vec<f64>,
    coeffs: RwLock<CoeffCache>,
    tails: RwLock<HashMap<(Half, i64), TailModel>>,
}

/// A weighted series over a Lucas sequence. Cheap to clone; all caches are
/// shared and thread-safe.
#[derive(Debug, Clone)]
pub struct SeriesSpec {
    inner: Arc<Inner>,
}

impl SeriesSpec {
    pub fn new(seq: SequenceSpec, weight: u32, variant: Variant) -> Result<Self> {
        if weight < 2 {
            return Err(Error::InvalidArgument(format!(
                "weight must be at least 2, got {weight}"
            )));
        }
        if variant == Variant::Footnote && !seq.is_fibonacci() {
            return Err(Error::InvalidArgument(
                "the footnote variant is defined for the Fibonacci sequence only".into(),
            ));
        }
        let lucas = LucasSequence::new(seq);
        let mut poles = Vec::with_capacity(2 * GUARD_RANGE as usize + 1);
        for n in -GUARD_RANGE..=GUARD_RANGE {
            if let Some(p) = crate::poles::pole_at(&lucas, n)? {
                poles.push(rational_to_f64(&p));
            }
        }
        let accumulation = crate::poles::accumulation_guard(&lucas);
        Ok(SeriesSpec {
            inner: Arc::new(Inner {
                certified: seq.has_sign_symmetry(),
                seq: lucas,
                weight,
                variant,
                poles,
                accumulation,
                coeffs: RwLock::new(CoeffCache::default()),
                tails: RwLock::new(HashMap::new()),
            }),
        })
    }

    pub fn fibonacci(weight: u32) -> Result<Self> {
        Self::new(SequenceSpec::FIBONACCI, weight, Variant::Standard)
    }

    pub fn lucas_numbers(weight: u32) -> Result<Self> {
        Self::new(SequenceSpec::LUCAS_NUMBERS, weight, Variant::Standard)
    }

    pub fn sequence(&self) -> &SequenceSpec {
        self.inner.seq.spec()
    }

    pub fn lucas(&self) -> &LucasSequence {
        &self.inner.seq
    }

    pub fn weight(&self) -> u32 {
        self.inner.weight
    }

    pub fn variant(&self) -> Variant {
        self.inner.variant
    }

    /// Whether tail bounds for this series are proven.
    pub fn is_certified(&self) -> bool {
        self.inner.certified
    }

    /// Same sequence and variant at another weight.
    pub fn with_weight(&self, weight: u32) -> Result<Self> {
        Self::new(*self.sequence(), weight, self.variant())
    }

    /// Rejects `z` within `eps` of a guarded pole or accumulation point.
    pub fn check_guard(&self, z: Complex64, eps: f64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidArgument("z must be finite".into()));
        }
        let near = |p: f64| {
            let d = (z - Complex64::new(p, 0.0)).norm();
            (d <= eps).then_some(Error::PoleProximity {
                pole: p,
                distance: d,
            })
        };
        if let Some(e) = self.inner.accumulation.iter().find_map(|&p| near(p)) {
            return Err(e);
        }
        if let Some(e) = self.inner.poles.iter().find_map(|&p| near(p)) {
            return Err(e);
        }
        Ok(())
    }

    /// Smallest distance from `z` to a guarded pole or accumulation point.
    pub fn pole_distance(&self, z: Complex64) -> f64 {
        self.inner
            .poles
            .iter()
            .chain(&self.inner.accumulation)
            .map(|&p| (z - Complex64::new(p, 0.0)).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn seq_dd(&self, n: i64) -> Dd {
        let idx = n.unsigned_abs() as usize;
        {
            let cache = self
                .inner
                .coeffs
                .read()
                .expect("coefficient cache poisoned");
            let v = if n >= 0 {
                cache.pos.get(idx)
            } else {
                cache.neg.get(idx - 1)
            };
            if let Some(v) = v {
                return *v;
            }
        }
        let seq = &self.inner.seq;
        if idx as i64 > INDEX_CAP {
            return Dd::new(f64::INFINITY);
        }
        let mut cache = self
            .inner
            .coeffs
            .write()
            .expect("coefficient cache poisoned");
        if n >= 0 {
            while cache.pos.len() <= idx {
                let k = cache.pos.len();
                cache.pos.push(Dd::from_bigint(&seq.nonnegative(k)));
            }
            cache.pos[idx]
        } else {
            // L_{-k} = (-1)^l L_k / b^k, without normalizing the fraction.
            let b = BigInt::from(seq.spec().b());
            let first = seq.spec().kind() == Kind::First;
            while cache.neg.len() < idx {
                let k = cache.neg.len() + 1;
                let pow = &cache.neg_pow * &b;
                let mut num = seq.nonnegative(k);
                if first {
                    num = -num;
                }
                cache.neg.push(Dd::from_ratio(&num, &pow));
                cache.neg_pow = pow;
            }
            cache.neg[idx - 1]
        }
    }

    /// `(c1, c0)` with term `j` equal to `(c1 z + c0)^(-m)`.
    pub fn coefficients(&self, j: i64) -> (Dd, Dd) {
        match self.inner.variant {
            Variant::Standard => (self.seq_dd(j), self.seq_dd(j - 1)),
            Variant::Footnote => (-self.seq_dd(j - 1), self.seq_dd(j)),
        }
    }

    /// Term `j` at `z`. Terms whose coefficients overflow `f64` are zero.
    pub fn term(&self, j: i64, z: DdComplex) -> DdComplex {
        let (c1, c0) = self.coefficients(j);
        if !(c1.is_finite() && c0.is_finite()) {
            return DdComplex::ZERO;
        }
        let den = z.scale(c1) + DdComplex::real(c0);
        den.powi(-(self.inner.weight as i64))
    }

    fn half_indices(half: Half, extent: i64) -> Box<dyn Iterator<Item = i64>> {
        match half {
            Half::Minus => Box::new(-extent..=0),
            Half::Plus => Box::new((1..=extent).rev()),
        }
    }

    fn sum_half(&self, half: Half, extent: i64, z: DdComplex) -> DdComplex {
        Self::half_indices(half, extent).fold(DdComplex::ZERO, |acc, j| acc + self.term(j, z))
    }

    fn tail_model(&self, half: Half, extent: i64) -> Result<TailModel> {
        if let Some(t) = self
            .inner
            .tails
            .read()
            .expect("tail cache poisoned")
            .get(&(half, extent))
        {
            return Ok(*t);
        }
        let seq = &self.inner.seq;
        let interval_at =
            |start: i64| -> Result<RatioInterval> { Ok(seq.growth_info(start)?.ratio_interval) };
        let abs_at = |n: i64| -> f64 { bigint_ln_abs(&seq.nonnegative(n as usize)) };
        let negated = |iv: &RatioInterval| round_out(&-iv.hi.clone(), &-iv.lo.clone());
        let reciprocal = |iv: &RatioInterval| round_out(&iv.hi.recip(), &iv.lo.recip());

        let (iv, ln_lead, (lo, hi)) = match (self.inner.variant, half) {
            (Variant::Standard, Half::Plus) => {
                let iv = interval_at(extent + 1)?;
                let c = negated(&iv);
                (iv, abs_at(extent + 1), c)
            }
            (Variant::Standard, Half::Minus) => {
                let iv = interval_at(extent + 2)?;
                let c = reciprocal(&iv);
                (iv, abs_at(extent + 1), c)
            }
            (Variant::Footnote, Half::Plus) => {
                let iv = interval_at(extent + 1)?;
                let c = reciprocal(&iv);
                (iv, abs_at(extent), c)
            }
            (Variant::Footnote, Half::Minus) => {
                let iv = interval_at(extent + 2)?;
                let c = negated(&iv);
                (iv, abs_at(extent + 2), c)
            }
        };
        if !iv.proven
            || iv.lo.is_zero()
            || iv.hi.is_zero()
            || iv.lo.is_positive() != iv.hi.is_positive()
        {
            return Err(Error::RatioBoundUnavailable(
                "ratio interval is not a proven enclosure".into(),
            ));
        }
        let sup = iv.max_abs();
        let ratio = if sup < BigRational::one() {
            rational_to_f64(&sup.recip()) * (1.0 - 4.0 * f64::EPSILON)
        } else {
            1.0
        };
        let model = TailModel {
            ln_lead,
            lo,
            hi,
            ratio,
        };
        self.inner
            .tails
            .write()
            .expect("tail cache poisoned")
            .insert((half, extent), model);
        Ok(model)
    }

    /// Bound on the total modulus of the terms a half omits beyond `extent`.
    /// Certified for `b = -1`; otherwise a geometric extrapolation from the
    /// two outermost included terms.
    pub fn half_tail_bound(&self, half: Half, extent: i64, z: DdComplex) -> Result<f64> {
        if extent < 2 {
            return Err(Error::InvalidArgument(format!(
                "window extent must be at least 2, got {extent}"
            )));
        }
        if self.inner.certified {
            let model = self.tail_model(half, extent)?;
            return Ok(model.bound(z.to_c64(), self.inner.weight));
        }
        let (outer, inner) = match half {
            Half::Minus => (-extent, -extent + 1),
            Half::Plus => (extent, extent - 1),
        };
        let t_outer = self.term(outer, z).norm();
        let t_inner = self.term(inner, z).norm();
        let rho = t_outer / t_inner;
        if rho.is_finite() && rho < 1.0 {
            Ok(t_outer * rho / (1.0 - rho))
        } else if t_outer == 0.0 {
            Ok(0.0)
        } else {
            Ok(f64::INFINITY)
        }
    }

    fn check_inputs(&self, z: DdComplex, opts: &EvalOptions) -> Result<()> {
        if !(opts.tol >= MIN_TOL) || !opts.tol.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be finite and at least {MIN_TOL:e}, got {}",
                opts.tol
            )));
        }
        if opts.require_certified && !self.inner.certified {
            return Err(Error::UncertifiedOnly);
        }
        self.check_guard(z.to_c64(), opts.guard_eps)
    }

    fn half_result(&self, half: Half, extent: i64, z: DdComplex, tail_bound: f64) -> SeriesResult {
        let extended = self.sum_half(half, extent, z);
        let (j_min, j_max) = match half {
            Half::Minus => (-extent, 0),
            Half::Plus => (1, extent),
        };
        SeriesResult {
            value: extended.to_c64(),
            extended,
            tail_bound,
            j_min,
            j_max,
            certified: self.inner.certified,
        }
    }

    fn adaptive_half(&self, half: Half, z: DdComplex, tol: f64) -> Result<SeriesResult> {
        let target = tol / 2.0;
        let mut extent = INITIAL_EXTENT;
        loop {
            let bound = self.half_tail_bound(half, extent, z)?;
            if bound <= target {
                return Ok(self.half_result(half, extent, z, bound));
            }
            if extent >= WINDOW_CAP {
                return Err(Error::ToleranceUnreachable {
                    bound,
                    tol,
                    cap: WINDOW_CAP,
                });
            }
            extent = (extent * 2).min(WINDOW_CAP);
        }
    }

    /// `(F^-, F^+)`: the halves over `j <= 0` and `j >= 1`, each with its
    /// own window and tail bound at most `tol / 2`.
    pub fn evaluate_halves_at(
        &self,
        z: DdComplex,
        opts: &EvalOptions,
    ) -> Result<(SeriesResult, SeriesResult)> {
        self.check_inputs(z, opts)?;
        let minus = self.adaptive_half(Half::Minus, z, opts.tol)?;
        let plus = self.adaptive_half(Half::Plus, z, opts.tol)?;
        Ok((minus, plus))
    }

    pub fn evaluate_halves(&self, z: Complex64, tol: f64) -> Result<(SeriesResult, SeriesResult)> {
        self.evaluate_halves_at(z.into(), &EvalOptions::with_tol(tol))
    }

    pub fn evaluate_at(&self, z: DdComplex, opts: &EvalOptions) -> Result<SeriesResult> {
        let (minus, plus) = self.evaluate_halves_at(z, opts)?;
        Ok(combine(&minus, &plus))
    }

    pub fn evaluate(&self, z: Complex64, tol: f64) -> Result<SeriesResult> {
        self.evaluate_at(z.into(), &EvalOptions::with_tol(tol))
    }

    /// Fixed symmetric window `-extent <= j <= extent` with its tail bound.
    pub fn partial_sum(&self, z: DdComplex, extent: i64) -> Result<SeriesResult> {
        self.check_guard(z.to_c64(), 0.0)?;
        let minus_bound = self.half_tail_bound(Half::Minus, extent, z)?;
        let plus_bound = self.half_tail_bound(Half::Plus, extent, z)?;
        let minus = self.half_result(Half::Minus, extent, z, minus_bound);
        let plus = self.half_result(Half::Plus, extent, z, plus_bound);
        Ok(combine(&minus, &plus))
    }

    /// Plain symmetric partial sum over `|j| <= extent` in double-double,
    /// ascending `j`, straight from the exact sequence values. Used as a
    /// reference for the adaptive evaluator.
    pub fn brute_force_oracle(&self, z: Complex64, extent: i64) -> Result<DdComplex> {
        if !(0..=500).contains(&extent) {
            return Err(Error::InvalidArgument(format!(
                "oracle window must be within 0..=500, got {extent}"
            )));
        }
        let seq = &self.inner.seq;
        let exact_re = if z.im == 0.0 {
            BigRational::from_float(z.re)
        } else {
            None
        };
        let zz = DdComplex::from(z);
        let mut acc = DdComplex::ZERO;
        for j in -extent..=extent {
            let (c1, c0) = match self.inner.variant {
                Variant::Standard => (seq.value(j)?, seq.value(j - 1)?),
                Variant::Footnote => (-seq.value(j - 1)?, seq.value(j)?),
            };
            if let Some(x) = &exact_re {
                if (&c1 * x + &c0).is_zero() {
                    return Err(Error::PoleProximity {
                        pole: z.re,
                        distance: 0.0,
                    });
                }
            }
            let c1 = Dd::from_ratio(c1.numer(), c1.denom());
            let c0 = Dd::from_ratio(c0.numer(), c0.denom());
            if !(c1.is_finite() && c0.is_finite()) {
                continue;
            }
            let inv = DdComplex::new(zz.re * c1 + c0, zz.im * c1).recip();
            let mut p = DdComplex::ONE;
            for _ in 0..self.inner.weight {
                p = p * inv;
            }
            acc = acc + p;
        }
        Ok(acc)
    }
}

/// Full-series result from its two halves: the value is the sum of the
/// half values, so the decomposition is exact at `f64` level.
pub fn combine(minus: &SeriesResult, plus: &SeriesResult) -> SeriesResult {
    SeriesResult {
        value: minus.value + plus.value,
        extended: minus.extended + plus.extended,
        tail_bound: (minus.tail_bound + plus.tail_bound) * (1.0 + f64::EPSILON),
        j_min: minus.j_min,
        j_max: plus.j_max,
        certified: minus.certified && plus.certified,
    }
}
