use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// Coefficient or parameter failed a model constraint.
    #[error("{0}")]
    Validation(String),

    /// A design step failed for one particular section.
    #[error("section {section}: {source}")]
    Section {
        section: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate design: {0}")]
    Degenerate(String),

    /// Mismatched shapes, formats or other inconsistent configuration.
    #[error("{0}")]
    Config(String),

    #[error("non-finite input sample: {0}")]
    NonFinite(f64),

    /// One cascade section cannot complete inside a sample period.
    #[error("infeasible core: {cycles} cycles per section exceed the {budget:.3} cycles available per sample")]
    InfeasibleCore { cycles: u32, budget: f64 },

    #[error("undefined SNR: {0}")]
    UndefinedSnr(String),

    #[error("unsupported WAV format: {field} = {value}")]
    UnsupportedFormat { field: &'static str, value: String },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Short stable tag used as a machine-parsable prefix by front ends.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Validation(_) => "validation",
            Error::Section { source, .. } => source.kind(),
            Error::Degenerate(_) => "degenerate",
            Error::Config(_) => "config",
            Error::NonFinite(_) => "non-finite",
            Error::InfeasibleCore { .. } => "infeasible-core",
            Error::UndefinedSnr(_) => "undefined-snr",
            Error::UnsupportedFormat { .. } => "unsupported-format",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn in_section(self, section: usize) -> Self {
        Error::Section {
            section,
            source: Box::new(self),
        }
    }
}
