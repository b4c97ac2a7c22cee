//! Statistical comparison of Bengali text corpora.
//!
//! Words are decomposed into script units, syllables and morphemes; each
//! corpus becomes a set of frequency tables and length distributions; pairs of
//! corpora are compared with two-sample Kolmogorov-Smirnov tests.
//!
//! Numeric code is generic over [`Scalar`], so the same routines run on `f64`,
//! `f32` or exact rationals. The aliases below fix the common choices.

pub mod features;
pub mod ks;
pub mod morphology;
pub mod num;
pub mod pipeline;
pub mod report;
pub mod script;
pub mod syllable;
pub mod tokenizer;

pub use num::{RealScalar, Scalar};

use num_rational::Rational64;

/// Default floating-point scalar.
pub type Real = f64;
/// Exact rational scalar, for checks that must not round.
pub type Exact = Rational64;

pub type PairedSampleF64 = features::PairedSample<String, f64>;
pub type PairedSampleExact = features::PairedSample<String, Exact>;
pub type LengthSampleF64 = features::PairedSample<u32, f64>;
pub type LengthSampleExact = features::PairedSample<u32, Exact>;
pub type DeviationsF64 = ks::Deviations<f64>;
pub type DeviationsExact = ks::Deviations<Exact>;
pub type KsOutcomeF64 = ks::KsOutcome<f64>;
pub type KsOutcomeF32 = ks::KsOutcome<f32>;
pub type EvalReportF64 = morphology::EvalReport<f64>;
pub type EvalReportExact = morphology::EvalReport<Exact>;
