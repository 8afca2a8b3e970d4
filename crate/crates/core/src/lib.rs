//! CM points on split and non-split Cartan level structures.
//!
//! The finite layer (`cartan`, `quad`, `embedding`) works exactly over F_p
//! and with binary quadratic forms. The analytic layer (`analytic`) evaluates
//! the modular parametrization of an elliptic curve at high precision, and
//! `experiment` ties the two together into Heegner trace experiments.

pub mod analytic;
pub mod arith;
pub mod cartan;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod experiment;
pub mod quad;

pub use error::{Error, Result};
