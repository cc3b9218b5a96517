//! Cascade of asymmetric resonators (CAR) model of the basilar membrane.
//!
//! The crate is organised bottom-up:
//!
//! * [`design`] turns cochlear place coordinates into per-section
//!   coefficients and exposes analytic transfer-function oracles.
//! * [`cascade`] is the floating-point reference cascade.
//! * [`fixed`] emulates the fixed-point hardware datapath bit-accurately.
//! * [`schedule`] models time-multiplexed execution on a clocked core.
//! * [`analysis`] holds the measurement instruments (MLS, impulse and
//!   frequency responses, float/fixed parity).
//! * [`io`] covers WAV input, coefficient files, cochleagram output and
//!   run configuration.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cascade;
pub mod design;
mod error;
pub mod fixed;
pub mod io;
pub mod schedule;
mod tap_matrix;

pub use cascade::{CascadeState, SectionState};
pub use design::{CascadeDesign, ChannelCoeffs, DesignParams, HPolicy, RadiusPolicy};
pub use error::{Error, Result};
pub use fixed::{FixedFormat, FixedValue, Overflow, QuantizedDesign, Rounding};
pub use schedule::{HardwareParams, ScheduleReport};
pub use tap_matrix::TapMatrix;
