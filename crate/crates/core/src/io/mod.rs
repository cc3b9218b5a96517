//! File formats and run configuration.

pub mod cochleagram;
pub mod coeffs;
pub mod config;
pub mod wav;

pub use cochleagram::{
    read_cochleagram_binary, read_cochleagram_csv, write_cochleagram, CochleagramFormat,
};
pub use coeffs::{read_coefficients, read_quantized, write_coefficients, write_quantized};
pub use config::{Mode, RunConfig};
pub use wav::{encode_wav, read_wav, AudioBuffer};

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}
