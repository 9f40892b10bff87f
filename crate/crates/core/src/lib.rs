//! Exact counting and uniform sampling for studying how robust election
//! winners are under random adjacent swaps.
//!
//! The crate covers Plurality and Borda elections, exact big-integer counting
//! of elections at a given swap distance, an exactly uniform sampler over
//! those elections, counting algorithms for swap- and shift-bribery, several
//! statistical cultures for generating elections, and the estimation pipeline
//! that turns samples into per-candidate winning frequencies and 50%-winner
//! thresholds.

pub mod bribery;
pub mod cultures;
pub mod election;
pub mod error;
pub mod experiments;
pub mod format;
pub mod rng;
pub mod sampler;
pub mod selftest;
pub mod tables;

pub use election::{election_swap_distance, swap_distance, CandidateId, Election, Rule, Vote};
pub use bribery::{CostFunction, Guards, ShiftMode};
pub use cultures::{Culture, CultureSpec};
pub use error::{Error, Result};
pub use num_bigint::BigUint;
pub use rng::RandomSource;
pub use tables::{ElectionCountTable, MahonianTable, SamplingTables};
