//! Binary modulation on conjugate-reciprocal zeros (BMOCZ) with the jutted
//! zero constellation (JBMOCZ), and the building blocks of a pilot-free,
//! non-coherent OFDM link around it.
//!
//! The crate is `no_std` and only needs `alloc`. IO, experiment harnesses and
//! the command-line interface live in the companion `jbmocz-sim` crate.
//!
//! Module map:
//!
//! - [`zeros`]: constellation parameters, bits to zeros to coefficients, AACF
//!   and the codebook-common template transform.
//! - [`dizet`]: hard-decision direct zero-testing and pseudo-LLRs.
//! - [`stability`]: capacity-based zero reliability and radius/asymmetry
//!   design curves.
//! - [`rotation`]: zero rotation, template-correlation rotation estimation.
//! - [`phy`]: OFDM mapping, modulation, synchronization, PAPR, blind channel
//!   estimation and the hybrid packet.
//! - [`channel`]: sequence-level and sample-level channel impairments.
//! - [`polar`]: polar code construction, encoding and SC decoding.

#![no_std]

extern crate alloc;

pub mod channel;
pub mod dizet;
mod error;
pub mod fft;
pub mod phy;
pub mod polar;
pub mod poly;
pub mod rotation;
pub mod stability;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A bit, stored as `0` or `1`.
pub type Bit = u8;
