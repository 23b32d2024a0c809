//! Fibonacci- and Lucas-Eisenstein series.
//!
//! Bilateral sums `sum_j (L_j z + L_{j-1})^(-m)` over a Lucas sequence
//! `L_n(a, b)`: exact sequence values ([`lucas`]), evaluation with certified
//! truncation bounds ([`series`]), exact pole sets ([`poles`]), checks of
//! the semi-modular transformation laws ([`symmetry`]), the GL2(Z)
//! generator algebra behind them ([`gl2`]) and the `semimod` command line
//! ([`cli`], [`render`]).

// `!(x <= y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dd;
pub mod error;
pub mod gl2;
pub mod lucas;
pub mod poles;
pub mod render;
pub mod series;
pub mod symmetry;

pub use error::{Error, Result};
pub use gl2::IntMat2;
pub use lucas::{GrowthInfo, Kind, LucasSequence, RatioInterval, SeqValue, SequenceSpec};
pub use poles::{pole_map, PoleMap};
pub use series::{EvalOptions, Half, SeriesResult, SeriesSpec, Variant};
pub use symmetry::{
    check_identity, check_proof_step, CheckConfig, IdentityKind, ProofStep, ResidualReport,
};
