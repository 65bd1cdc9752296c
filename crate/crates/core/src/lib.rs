//! Analytical ergodic-capacity model of an active reconfigurable intelligent
//! surface (RIS) assisted terahertz downlink, with an independent Monte-Carlo
//! simulator to check it.
//!
//! - [`channel`]: free-space and molecular-absorption gains, pointing-error law
//! - [`cascade_stats`]: moments of the cascaded Rayleigh channel and its Gamma fit
//! - [`capacity`]: SNR distribution and ergodic capacity
//! - [`montecarlo`]: seeded, batch-parallel simulation of the same SNR
//! - [`cli`]: scenario files, sweeps and CSV output for the `thz-ris` binary

pub mod capacity;
pub mod cascade_stats;
pub mod channel;
pub mod cli;
mod error;
pub mod montecarlo;
pub mod numerics;

pub use error::{Error, Result};
