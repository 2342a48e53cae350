//! Multitype Galton–Watson trees and randomly coloured random graphs:
//! samplers, exact log-probabilities, empirical measures, rate functions,
//! and an arithmetic coder driven by the same models.

pub mod codec;
pub mod error;
pub mod graph;
pub mod harness;
pub mod measures;
pub mod numerics;
pub mod rates;
pub mod rng;
pub mod tree;

pub use error::{Error, Result};
