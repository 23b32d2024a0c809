//! Weight-`m` slash action and numerical checks of the semi-modular
//! transformation laws.
//!
//! A check samples points from a seeded generator over an annulus, rejects
//! points close to the pole set, and compares both sides of the law in
//! double-double arithmetic. Each point gets its own tolerance: the
//! certified tails of every evaluation involved, scaled by their
//! coefficients, plus a rounding floor of `1e-9 (1 + |z|)^(2k)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::gl2::IntMat2;
use crate::series::{EvalOptions, SeriesResult, SeriesSpec, Variant};

pub const ANNULUS_MIN: f64 = 0.2;
pub const ANNULUS_MAX: f64 = 5.0;
pub const POLE_MARGIN: f64 = 0.05;
pub const ROUNDING_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityKind {
    /// `f(-1/z) = z^(2k) f(z)`.
    InversionS,
    /// `f(a - z) = f(z)`.
    MirrorPa { a: i64 },
}

impl IdentityKind {
    pub fn matrix(&self) -> IntMat2 {
        match *self {
            IdentityKind::InversionS => IntMat2::s(),
            IdentityKind::MirrorPa { a } => IntMat2::p_a(a),
        }
    }
}

/// Intermediate identities of the half-sum argument, for a sign-symmetric
/// sequence with parameter `a`, weight `2k` and `c(z) = (L_1 + L_0 z)^(-2k)`
/// (`c = 1` for Fibonacci).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofStep {
    /// `F+(z + a) = z^(-2k) F+(1/z) - c(z)`
    PlusShift,
    /// `F-(z + a) = z^(-2k) F-(1/z) + c(z)`
    MinusShift,
    /// `F(z + a) = z^(-2k) F(1/z)`
    FullShift,
    /// `F-(-z) = z^(-2k) F+(1/z)`
    MinusNegation,
    /// `F+(-z) = z^(-2k) F-(1/z)`
    PlusNegation,
    /// `F(-z) = z^(-2k) F(1/z)`
    FullNegation,
}

impl ProofStep {
    pub const ALL: [ProofStep; 6] = [
        ProofStep::PlusShift,
        ProofStep::MinusShift,
        ProofStep::FullShift,
        ProofStep::MinusNegation,
        ProofStep::PlusNegation,
        ProofStep::FullNegation,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Per-evaluation tolerance handed to the series evaluator.
    pub tol: f64,
    /// Allow `MirrorPa` with `a` different from the sequence's `a`
    /// (negative controls).
    pub allow_unpaired: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            n_samples: 100,
            seed: 0,
            tol: 1e-12,
            allow_unpaired: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub sample_points: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub tolerances: Vec<f64>,
    pub pass: bool,
    pub seed: u64,
}

impl ResidualReport {
    fn from_samples(points: Vec<Complex64>, checks: Vec<(f64, f64)>, seed: u64) -> Self {
        let (residuals, tolerances): (Vec<f64>, Vec<f64>) = checks.into_iter().unzip();
        let pass = residuals.iter().zip(&tolerances).all(|(r, t)| r <= t);
        ResidualReport {
            sample_points: points,
            residuals,
            tolerances,
            pass,
            seed,
        }
    }

    pub fn failures(&self) -> usize {
        self.residuals
            .iter()
            .zip(&self.tolerances)
            .filter(|(r, t)| !(r <= t))
            .count()
    }

    pub fn failure_fraction(&self) -> f64 {
        if self.residuals.is_empty() {
            return 0.0;
        }
        self.failures() as f64 / self.residuals.len() as f64
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn mobius_apply(m: &IntMat2, z: Complex64) -> Result<Complex64> {
    m.mobius_apply(z)
}

/// `(r z + s)^(-m) f(M z)` together with its certified error bound.
pub fn slash_at(
    spec: &SeriesSpec,
    m: &IntMat2,
    z: DdComplex,
    opts: &EvalOptions,
) -> Result<(DdComplex, f64)> {
    let image = m.mobius_apply_dd(z)?;
    let value = spec.evaluate_at(image, opts)?;
    let factor = m.automorphy_dd(z).powi(-(spec.weight() as i64));
    Ok((factor * value.extended, factor.norm() * value.tail_bound))
}

pub fn slash(spec: &SeriesSpec, m: &IntMat2, z: Complex64, tol: f64) -> Result<Complex64> {
    Ok(slash_at(spec, m, z.into(), &EvalOptions::with_tol(tol))?
        .0
        .to_c64())
}

fn rounding_floor(z: Complex64, weight: u32) -> f64 {
    ROUNDING_FLOOR * (1.0 + z.norm()).powi(weight as i32)
}

fn eval(spec: &SeriesSpec, z: DdComplex, tol: f64) -> Result<SeriesResult> {
    spec.evaluate_at(z, &EvalOptions::with_tol(tol))
}

/// Residual `|f(M z) - factor(z) f(z)|` and its tolerance at one point.
pub fn identity_residual(
    spec: &SeriesSpec,
    kind: IdentityKind,
    z: DdComplex,
    tol: f64,
) -> Result<(f64, f64)> {
    let weight = spec.weight() as i64;
    let m = kind.matrix();
    let image = m.mobius_apply_dd(z)?;
    // f|M = f  <=>  f(Mz) = (rz + s)^m f(z)
    let factor = m.automorphy_dd(z).powi(weight);
    let lhs = eval(spec, image, tol)?;
    let rhs = eval(spec, z, tol)?;
    let residual = (lhs.extended - factor * rhs.extended).to_c64().norm();
    let tolerance =
        lhs.tail_bound + factor.norm() * rhs.tail_bound + rounding_floor(z.to_c64(), spec.weight());
    Ok((residual, tolerance))
}

fn validate_even_certified(spec: &SeriesSpec) -> Result<()> {
    if !spec.weight().is_multiple_of(2) {
        return Err(Error::OddWeight(spec.weight()));
    }
    if !spec.is_certified() {
        return Err(Error::UncertifiedOnly);
    }
    Ok(())
}

/// Seeded sample points over the annulus, away from the poles of `z` and
/// of every image `z` is mapped to.
pub fn sample_points(
    spec: &SeriesSpec,
    cfg: &CheckConfig,
    images: impl Fn(DdComplex) -> Vec<DdComplex>,
) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (ln_lo, ln_hi) = (ANNULUS_MIN.ln(), ANNULUS_MAX.ln());
    let mut points = Vec::with_capacity(cfg.n_samples);
    let max_attempts = 1000 * cfg.n_samples.max(1);
    let mut attempts = 0;
    while points.len() < cfg.n_samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::InvalidArgument(
                "could not draw enough sample points away from the poles".into(),
            ));
        }
        let r = rng.random_range(ln_lo..ln_hi).exp();
        let theta = rng.random_range(0.0..2.0 * PI);
        let z = Complex64::from_polar(r, theta);
        let far = std::iter::once(DdComplex::from(z))
            .chain(images(z.into()))
            .all(|w| w.is_finite() && spec.pole_distance(w.to_c64()) > POLE_MARGIN);
        if far {
            points.push(z);
        }
    }
    Ok(points)
}

fn run(
    points: Vec<Complex64>,
    seed: u64,
    check: impl Fn(DdComplex) -> Result<(f64, f64)> + Sync,
) -> Result<ResidualReport> {
    let checks = points
        .par_iter()
        .map(|&z| check(z.into()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::from_samples(points, checks, seed))
}

/// Checks `f|_m M = f` for the matrix of `kind` over `cfg.n_samples` points.
pub fn check_identity(
    spec: &SeriesSpec,
    kind: IdentityKind,
    cfg: &CheckConfig,
) -> Result<ResidualReport> {
    validate_even_certified(spec)?;
    if let IdentityKind::MirrorPa { a } = kind {
        let seq_a = spec.sequence().a();
        if a != seq_a && !cfg.allow_unpaired {
            return Err(Error::InvalidPairing { seq_a, mirror_a: a });
        }
    }
    let m = kind.matrix();
    let points = sample_points(spec, cfg, |z| m.mobius_apply_dd(z).into_iter().collect())?;
    run(points, cfg.seed, |z| {
        identity_residual(spec, kind, z, cfg.tol)
    })
}

fn shift_by(z: DdComplex, a: i64) -> DdComplex {
    z + DdComplex::real(Dd::new(a as f64))
}

/// Residual and tolerance of one proof-step identity at `z`.
pub fn proof_step_residual(
    spec: &SeriesSpec,
    step: ProofStep,
    z: DdComplex,
    tol: f64,
) -> Result<(f64, f64)> {
    let weight = spec.weight() as i64;
    let a = spec.sequence().a();
    let opts = EvalOptions::with_tol(tol);
    let shifted = shift_by(z, a);
    let inverted = z.recip();
    let negated = -z;
    let zpow = z.powi(-weight);

    let (l0, l1) = (spec.lucas().value(0)?, spec.lucas().value(1)?);
    let l0 = Dd::from_ratio(l0.numer(), l0.denom());
    let l1 = Dd::from_ratio(l1.numer(), l1.denom());
    let boundary = (z.scale(l0) + DdComplex::real(l1)).powi(-weight);

    let (lhs, rhs, rhs_coef): (SeriesResult, SeriesResult, DdComplex) = match step {
        ProofStep::PlusShift | ProofStep::MinusShift | ProofStep::FullShift => {
            let (lm, lp) = spec.evaluate_halves_at(shifted, &opts)?;
            let (rm, rp) = spec.evaluate_halves_at(inverted, &opts)?;
            match step {
                ProofStep::PlusShift => (lp, rp, zpow),
                ProofStep::MinusShift => (lm, rm, zpow),
                _ => (
                    crate::series::combine(&lm, &lp),
                    crate::series::combine(&rm, &rp),
                    zpow,
                ),
            }
        }
        ProofStep::MinusNegation | ProofStep::PlusNegation | ProofStep::FullNegation => {
            let (lm, lp) = spec.evaluate_halves_at(negated, &opts)?;
            let (rm, rp) = spec.evaluate_halves_at(inverted, &opts)?;
            match step {
                ProofStep::MinusNegation => (lm, rp, zpow),
                ProofStep::PlusNegation => (lp, rm, zpow),
                _ => (
                    crate::series::combine(&lm, &lp),
                    crate::series::combine(&rm, &rp),
                    zpow,
                ),
            }
        }
    };
    let constant = match step {
        ProofStep::PlusShift => -boundary,
        ProofStep::MinusShift => boundary,
        _ => DdComplex::ZERO,
    };
    let diff = lhs.extended - (rhs_coef * rhs.extended + constant);
    let tolerance = lhs.tail_bound
        + rhs_coef.norm() * rhs.tail_bound
        + rounding_floor(z.to_c64(), spec.weight());
    Ok((diff.to_c64().norm(), tolerance))
}

/// Checks one proof-step identity over seeded samples. Requires an even
/// weight, a sign-symmetric sequence and the standard variant.
pub fn check_proof_step(
    spec: &SeriesSpec,
    step: ProofStep,
    cfg: &CheckConfig,
) -> Result<ResidualReport> {
    validate_even_certified(spec)?;
    if spec.variant() != Variant::Standard {
        return Err(Error::InvalidArgument(
            "proof-step identities are stated for the standard series".into(),
        ));
    }
    let a = spec.sequence().a();
    let points = sample_points(spec, cfg, |z| vec![shift_by(z, a), z.recip(), -z])?;
    run(points, cfg.seed, |z| {
        proof_step_residual(spec, step, z, cfg.tol)
    })
}
