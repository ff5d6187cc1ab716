//! Fibonacci statistical convergence of sequences in intuitionistic fuzzy
//! normed spaces, evaluated on finite prefixes.
//!
//! The pieces, bottom up: exact Fibonacci arithmetic and the `F̂` difference
//! operator ([`fib_core`]), natural-density estimation of index sets
//! ([`density`]), t-norms and t-conorms ([`fuzzy_algebra`]), intuitionistic
//! fuzzy norms ([`ifns`]) and the convergence classifiers built on all of them
//! ([`convergence`]). [`generator`] produces test sequences from spec strings.

// `!(x > 0.0)` is used on purpose so that NaN is rejected along with
// nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod density;
pub mod error;
pub mod fib_core;
pub mod fuzzy_algebra;
pub mod generator;
pub mod ifns;
pub mod sequence;

pub use convergence::{
    ConvergenceReport, Mode, Scale, SubsequenceWitness, TestParams, Verdict,
};
pub use density::{DensityConfig, DensityProfile, DensityVerdict, IndexSet};
pub use error::{Error, Result};
pub use fuzzy_algebra::{TriangularConorm, TriangularNorm};
pub use generator::{default_family, parse_generator, GeneratorSpec};
pub use ifns::{standard_ifn, IntuitionisticFuzzyNorm, Norm, NormedSpace};
pub use sequence::{Domain, RealSequence, SequenceFile, Subject};
