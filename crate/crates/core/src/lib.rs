//! Multilevel diversity coding with secure regeneration over GF(p).
//!
//! The crate builds separate-coding systems out of secure product-matrix MBR
//! codes, simulates repair and eavesdropping by type I (stored content) and
//! type II (all inbound repair data) compromised nodes, measures leakage by
//! exact rank computation, and checks the tradeoff bounds and entropy
//! inequalities of the MBR converse on instantiated codes.
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```bash
//! cargo run -p mdcsr --example tradeoff_bounds
//! cargo run -p mdcsr --example encode_recover
//! ```

pub mod bounds;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod galois;
pub mod mbr_code;
pub mod rational;
pub mod secrecy;
pub mod system;

pub use error::{Error, Result};
pub use galois::{FieldMatrix, FieldModulus};
pub use rational::Rational;
