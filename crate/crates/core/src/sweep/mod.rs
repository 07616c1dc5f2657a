//! Rekasius-parameter sweep over the `2n x 2n` companion matrix.
//!
//! Substituting `e^{-tau s} = (1 - T s) / (1 + T s)` into the characteristic
//! equation turns the transcendental problem into a quadratic eigenvalue
//! problem in `s` parameterized by the real number `T`. Purely imaginary
//! eigenvalues of the companion matrix at some `T` mark crossings; each one
//! maps back to a ladder of delays.

pub mod analyze;
pub mod companion;
pub mod config;
pub mod direction;
pub mod ladder;
pub mod refine;
pub mod scan;

pub use analyze::{analyze, find_crossings, stability_walk, Crossing, DelayMargin, StabilityReport, StableWindow};
pub use companion::{build_companion, spectrum_at, CompanionBuilder};
pub use config::{SweepConfig, DEFAULT_K_MAX, DEFAULT_T_BOUND, DEFAULT_T_STEP};
pub use direction::{classify_direction, Direction};
pub use ladder::{rekasius_factor, rekasius_parameter, taus_from_crossing};
pub use refine::{refine_crossing, RefinedPoint};
pub use scan::{coarse_scan, parallel_scan, CandidateKind, CrossingCandidate};
