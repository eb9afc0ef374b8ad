//! Modeling, extraction and readout for chipless LC temperature sensors
//! built from conductor-loaded dielectric capacitors.
//!
//! * [`rfnet`]: frequency grids, one/two-port sweeps, Z/S conversions.
//! * [`touchstone`]: Touchstone v1 `.s1p`/`.s2p` reader and writer.
//! * [`extraction`]: capacitance, Q, loss tangent and self-resonance from
//!   impedance sweeps.
//! * [`composite`]: temperature laws for composite capacitors and fitting.
//! * [`coupled`]: reader/sensor coupled-loop simulator.
//! * [`readout`]: dip detection, tracking, sensitivity and calibration
//!   inversion.
//! * [`cli`]: the `lcsense` command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod composite;
pub mod coupled;
pub mod extraction;
pub mod readout;
pub mod rfnet;
pub mod touchstone;

/// 9 significant digits in scientific notation with an `E` marker.
pub(crate) fn format_sig9(v: f64) -> String {
    format!("{v:.8E}")
}
