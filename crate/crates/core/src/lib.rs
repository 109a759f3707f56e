//! Greedy approximation toolkit: thresholding and weak greedy algorithms over
//! concrete normalized bases, brute-force best m-term oracles, and dyadic
//! weight analysis for the Haar system in weighted Littlewood-Paley norms.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod dyadic;
pub mod error;
pub mod greedy;
pub mod haar;
pub mod oracle;
pub mod sign;
pub mod weights;

pub use dyadic::{DyadicInterval, StepFunction};
pub use error::{Error, Result};
pub use greedy::{Basis, BasisSpec, CanonicalLp, Element, HaarXp, SummingBasis};
pub use haar::{HaarExpansion, HaarIndex};
pub use oracle::{ApproximationResult, Budget};
pub use sign::Sign;
pub use weights::{DyadicWeight, IndexedSequence, LevelConstant};
