//! Link-level simulator for digital over-the-air computation (AirComp).
//!
//! `K` devices quantize their data to `B` bits, split each index into `L`
//! low-width slices, and transmit every slice as a square-QAM symbol over a
//! multi-access channel with channel-inversion power control. The server
//! detects the superimposed constellation with a MAP detector, demaps the
//! aggregated slice sums, reassembles the aggregated index and denormalizes it
//! into an estimate of `y = Σ_k x_k`.
//!
//! Module map:
//!
//! * [`bits`]: quantizer, bit-slicing, slice assembly and denormalization.
//! * [`modem`]: digital QAM mapping and the analog baseline mapping.
//! * [`channel`]: block fading, channel inversion and AWGN.
//! * [`detector`]: aggregated-constellation priors, MAP/ML boundaries, detection.
//! * [`analysis`]: closed-form error expressions, Lambert-type special
//!   functions and the digital-vs-analog SNR regime.
//! * [`adaptive`]: precision selection and importance-aware slicing.
//! * [`transceiver`]: end-to-end digital and analog AirComp systems.
//! * [`harness`]: Monte Carlo runner, sweeps and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod analysis;
pub mod bits;
pub mod channel;
pub mod detector;
mod error;
pub mod harness;
pub mod modem;
pub mod transceiver;

pub use error::{Error, Result};

/// Converts an SNR in decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
