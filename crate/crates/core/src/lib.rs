//! Puncturing of polar codes with a fixed information set.
//!
//! The crate is organised bottom-up:
//!
//! - [`bitops`]: binary expansions, bit reversal and the covering relation
//!   between bit-channel indices.
//! - [`degrade`]: the level-by-level degradation process that carries an index
//!   set to its destination set, reused for puncture propagation.
//! - [`construct`]: reliability profiles (BEC Bhattacharyya, Gaussian
//!   approximation, polarization weight) and information-set selection.
//! - [`puncture`]: quasi-uniform (QUP) and worst-quality (WQP) puncturing
//!   patterns plus their diagnostics.
//! - [`codec`]: encoder, CRC, SC and CRC-aided SCL decoders.
//! - [`channel`]: BPSK-AWGN / BEC models with puncturing and depuncturing.
//! - [`sim`]: the Monte-Carlo FER/BER harness behind the `polarpunct` CLI.

pub mod bitops;
pub mod channel;
pub mod codec;
pub mod construct;
pub mod degrade;
mod error;
pub mod puncture;
pub mod sim;

pub use error::{Error, Result};

pub use bitops::BitIndex;
pub use construct::{Method, PolarCodeSpec, ReliabilityProfile};
pub use degrade::{LevelSet, PropagationMap};
pub use puncture::{PatternReport, PuncturePattern, Scheme};
