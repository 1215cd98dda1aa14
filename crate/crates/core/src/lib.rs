//! Reed-Muller codes over the binary symmetric channel: encoding, fast
//! Hadamard maximum-likelihood decoding of first-order codes, recursive
//! projection-aggregation (RPA) decoding, closed-form error bounds in log
//! domain, and a seeded Monte Carlo harness.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod fht;
pub mod gf2;
pub mod rm;
pub mod rpa;
pub mod sim;
pub mod subspace;
pub mod word;

pub use error::{Error, Result};
pub use rm::CodeParams;
pub use rpa::{rpa_decode, DecodeOutcome, RpaConfig, RpaDecoder};
pub use word::Word;
