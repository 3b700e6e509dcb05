//! Numerical verification engine for Hermite–Hadamard type inequalities over
//! generalized convexity classes.
//!
//! The crate is split along the pipeline a verification run follows:
//!
//! - [`expr`]: the expression language used to describe `f`, `g` and `h`.
//! - [`quad`]: adaptive quadrature in one to three dimensions plus the Gamma
//!   function.
//! - [`classes`]: sampling-based membership checks that emit counterexample
//!   certificates.
//! - [`theorems`]: the inequality registry, side evaluation and verdicts.
//! - [`means`]: geometric and identric means and the mean-inequality harness.

pub mod classes;
pub mod expr;
mod interval;
pub mod means;
pub mod quad;
pub mod theorems;

pub use interval::{Interval, IntervalError};
