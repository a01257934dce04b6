//! Exact q-series toolkit for product formulas of weight-two newforms.
//!
//! A newform `f = Σ f_n q^n` attached to an elliptic curve over ℚ can be
//! written as `f = q ∏_{n≥1} (1 - q^n)^{g_n}` with integer `g_n`. This crate
//! computes `f_n` by point counting, extracts the exponents `g_n` through the
//! logarithmic derivative and Möbius inversion, and provides the eta, theta
//! and search machinery built on top of them.

pub mod arith;
pub mod elliptic;
pub mod error;
pub mod eta;
pub mod lmfdb;
pub mod products;
pub mod qseries;
pub mod registry;
pub mod search;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
