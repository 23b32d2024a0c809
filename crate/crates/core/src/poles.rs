//! Pole sets of the Lucas-Eisenstein series.
//!
//! The term at index `j` vanishes at `z = -L_{j-1} / L_j`. Indexing by
//! `n = 1 - j` gives `-L_{-n} / L_{1-n}`, which equals `L_n / L_{n-1}`
//! whenever `b = -1`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lucas::{LucasSequence, SequenceSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PoleMap {
    /// Distinct poles in increasing order.
    pub poles: Vec<BigRational>,
    /// Limit points of the pole set (`b = -1` only).
    pub accumulation_points: Vec<f64>,
}

/// JSON form of an exact pole.
#[derive(Debug, Clone, Serialize)]
pub struct PoleRecord {
    pub fraction: String,
    pub num: String,
    pub den: String,
    pub approx: f64,
}

impl From<&BigRational> for PoleRecord {
    fn from(p: &BigRational) -> Self {
        PoleRecord {
            fraction: p.to_string(),
            num: p.numer().to_string(),
            den: p.denom().to_string(),
            approx: crate::lucas::rational_to_f64(p),
        }
    }
}

/// Pole contributed by index `n`, or `None` when `L_{1-n} = 0`.
pub fn pole_at(seq: &LucasSequence, n: i64) -> Result<Option<BigRational>> {
    let den = seq.value(1 - n)?;
    if den.is_zero() {
        return Ok(None);
    }
    Ok(Some(-seq.value(-n)? / den))
}

pub fn pole_map(spec: &SequenceSpec, n_min: i64, n_max: i64) -> Result<PoleMap> {
    if n_min > n_max {
        return Err(Error::InvalidArgument(format!(
            "empty index range {n_min}..={n_max}"
        )));
    }
    let seq = LucasSequence::new(*spec);
    let mut poles = Vec::new();
    for n in n_min..=n_max {
        if let Some(p) = pole_at(&seq, n)? {
            poles.push(p);
        }
    }
    poles.sort();
    poles.dedup();

    let accumulation_points = if spec.has_sign_symmetry() {
        match seq.growth_info(3) {
            Ok(g) => vec![g.limit_ratio_pos, g.limit_ratio_neg],
            Err(_) => Vec::new(),
        }
    } else {
        Vec::new()
    };
    Ok(PoleMap {
        poles,
        accumulation_points,
    })
}

/// Limit points used by the evaluation guard: `-1/r` for both roots `r`
/// of `x^2 = a x - b`, when real.
pub(crate) fn accumulation_guard(seq: &LucasSequence) -> Vec<f64> {
    let spec = seq.spec();
    let a = spec.a() as f64;
    let disc = (spec.a() as i128).pow(2) - 4 * spec.b() as i128;
    if disc < 0 {
        return Vec::new();
    }
    let sq = (disc as f64).sqrt();
    [(a + sq) / 2.0, (a - sq) / 2.0]
        .into_iter()
        .filter(|r| *r != 0.0)
        .map(|r| -1.0 / r)
        .collect()
}
