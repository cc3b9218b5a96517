//! Measurement instruments: maximum-length sequences, impulse and
//! frequency responses, and float/fixed parity.

mod mls;
mod parity;
mod response;
mod system;

pub use mls::{default_taps, mls_generate, MlsConfig, DEFAULT_WARMUP_PERIODS, MAX_ORDER, MIN_ORDER};
pub use parity::{parity_report, snr_db, ParityReport, Snr};
pub use response::{
    frequency_response_analytic, frequency_response_measured, impulse_response, peak_trajectory,
    ImpulseResponses, IrMethod, Peak, ResponseResult, DB_FLOOR,
};
pub use system::{FixedCascade, FloatCascade, TapSystem};
