//! Exact computation of multiple harmonic q-sums modulo powers of `[p]`, identity checkers,
//! relation mining over finite prime sets, and the analytic limit experiments.

pub mod analytic;
pub mod error;
pub mod exact;
pub mod hsum;
pub mod index;
pub mod linalg;
pub mod miner;
pub mod primes;
pub mod tables;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
