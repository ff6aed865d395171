//! Design and verification of switched shunt reactive compensation, small
//! AC power flow with a distributed slack, and grading of candidate
//! solutions against analytic and brute-force oracles.

pub mod ac;
pub mod finding;
pub mod grader;
pub mod grid;
pub mod multiperiod;
pub mod powerflow;
pub mod switched;
pub mod tolerance;

pub use tolerance::Tolerance;
