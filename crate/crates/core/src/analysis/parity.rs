use std::fmt::{self, Write as _};
use std::ops::Range;

use crate::fixed::SaturationStats;
use crate::{Error, Result, TapMatrix};

/// Signal-to-noise ratio of a test signal against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    /// The test signal equals the reference exactly.
    Exact,
    Db(f64),
}

impl Snr {
    /// `+∞` for [`Snr::Exact`].
    pub fn as_db(self) -> f64 {
        match self {
            Snr::Exact => f64::INFINITY,
            Snr::Db(db) => db,
        }
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Snr::Exact => f.write_str("exact"),
            Snr::Db(db) => write!(f, "{db:.3}"),
        }
    }
}

/// `10·log10(Σ ref² / Σ (ref − test)²)`.
pub fn snr_db(reference: &[f64], test: &[f64]) -> Result<Snr> {
    if reference.len() != test.len() {
        return Err(Error::Config(format!(
            "reference has {} samples, test has {}",
            reference.len(),
            test.len()
        )));
    }
    let signal: f64 = reference.iter().map(|r| r * r).sum();
    if signal == 0.0 {
        return Err(Error::UndefinedSnr("reference has zero energy".into()));
    }
    let noise: f64 = reference.iter().zip(test).map(|(r, t)| (r - t) * (r - t)).sum();
    if noise == 0.0 {
        return Ok(Snr::Exact);
    }
    Ok(Snr::Db(10.0 * (signal / noise).log10()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityReport {
    /// One entry per tap.
    pub snr: Vec<Snr>,
    pub worst_channel: usize,
    pub worst: Snr,
    pub saturation: SaturationStats,
    /// Rows of the tap matrices that were compared.
    pub window: Range<usize>,
}

/// Compares fixed-point taps against float taps over a window of rows.
pub fn parity_report(
    reference: &TapMatrix,
    test: &TapMatrix,
    window: Range<usize>,
    saturation: Option<&SaturationStats>,
) -> Result<ParityReport> {
    if reference.n_taps() != test.n_taps() || reference.n_samples() != test.n_samples() {
        return Err(Error::Config(format!(
            "shape mismatch: {}x{} vs {}x{}",
            reference.n_samples(),
            reference.n_taps(),
            test.n_samples(),
            test.n_taps()
        )));
    }
    if window.start >= window.end || window.end > reference.n_samples() {
        return Err(Error::Config(format!(
            "comparison window {window:?} is empty or exceeds {} samples",
            reference.n_samples()
        )));
    }
    let snr = (0..reference.n_taps())
        .map(|k| {
            let r = &reference.column(k)[window.clone()];
            let t = &test.column(k)[window.clone()];
            snr_db(r, t).map_err(|e| match e {
                Error::UndefinedSnr(msg) => Error::UndefinedSnr(format!("channel {k}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (worst_channel, worst) = snr
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.as_db().total_cmp(&b.1.as_db()))
        .ok_or_else(|| Error::Config("no channels to compare".into()))?;
    Ok(ParityReport {
        snr,
        worst_channel,
        worst,
        saturation: saturation.cloned().unwrap_or_default(),
        window,
    })
}

impl ParityReport {
    /// `channel,snr_db,saturations`; exact channels print `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("channel,snr_db,saturations\n");
        for (k, snr) in self.snr.iter().enumerate() {
            let sat = self.saturation.per_section.get(k).copied().unwrap_or(0);
            let db = match snr {
                Snr::Exact => "inf".to_string(),
                Snr::Db(db) => format!("{db:.6}"),
            };
            let _ = writeln!(out, "{k},{db},{sat}");
        }
        out
    }
}

impl fmt::Display for ParityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "channels: {}", self.snr.len())?;
        writeln!(f, "window: samples {}..{}", self.window.start, self.window.end)?;
        writeln!(f, "worst_channel: {}", self.worst_channel)?;
        writeln!(f, "worst_snr_db: {}", self.worst)?;
        writeln!(f, "saturations_total: {}", self.saturation.total())?;
        writeln!(f, "saturations_input: {}", self.saturation.input)
    }
}
