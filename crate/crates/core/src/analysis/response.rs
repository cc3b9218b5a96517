use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::mls::{mls_generate, MlsConfig};
use super::system::TapSystem;
use crate::design::{transfer_function, CascadeDesign};
use crate::{Error, Result};

/// Magnitudes below this are reported at this level in dB.
pub const DB_FLOOR: f64 = -200.0;

/// Responses flatter than this (max − min, dB) have no defined peak.
const FLAT_TOLERANCE_DB: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum IrMethod {
    /// Feed `[1, 0, 0, …]`.
    DirectImpulse,
    /// Feed `warmup_periods` periods and one measured period of an MLS, then
    /// recover the periodic impulse response by circular cross-correlation.
    Mls(MlsConfig),
}

/// Impulse responses of selected taps.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponses {
    pub channels: Vec<usize>,
    pub responses: Vec<Vec<f64>>,
}

fn check_channels(system: &dyn TapSystem, channels: &[usize]) -> Result<()> {
    if let Some(&bad) = channels.iter().find(|&&c| c >= system.n_taps()) {
        return Err(Error::Config(format!(
            "channel {bad} out of range for {} taps",
            system.n_taps()
        )));
    }
    Ok(())
}

/// Measures the impulse responses of `channels`, starting from reset.
pub fn impulse_response(
    system: &mut dyn TapSystem,
    channels: &[usize],
    n_samples: usize,
    method: &IrMethod,
) -> Result<ImpulseResponses> {
    check_channels(system, channels)?;
    system.reset();
    let mut taps = vec![0.0; system.n_taps()];
    let responses = match method {
        IrMethod::DirectImpulse => {
            let mut responses = vec![Vec::with_capacity(n_samples); channels.len()];
            for n in 0..n_samples {
                system.process(if n == 0 { 1.0 } else { 0.0 }, &mut taps)?;
                for (resp, &c) in responses.iter_mut().zip(channels) {
                    resp.push(taps[c]);
                }
            }
            responses
        }
        IrMethod::Mls(config) => {
            let period = config.period();
            if n_samples > period {
                return Err(Error::Config(format!(
                    "{n_samples} response samples exceed the MLS period {period}"
                )));
            }
            let seq = mls_generate(config)?;
            for _ in 0..config.warmup_periods {
                for &x in &seq {
                    system.process(x, &mut taps)?;
                }
            }
            let mut recorded = vec![Vec::with_capacity(period); channels.len()];
            for &x in &seq {
                system.process(x, &mut taps)?;
                for (rec, &c) in recorded.iter_mut().zip(channels) {
                    rec.push(taps[c]);
                }
            }
            deconvolve_mls(&seq, config.amplitude, &recorded, n_samples)
        }
    };
    Ok(ImpulseResponses {
        channels: channels.to_vec(),
        responses,
    })
}

/// Circular cross-correlation of each recorded period with the MLS.
///
/// The MLS autocorrelation is `A²·((N+1)·δ[k] − 1)`, so the raw
/// correlation normalised by `N·A²` is `((N+1)·h[k] − Σh)/N`. The DC term
/// is removed exactly: `h[k] = N·(ĥ[k] + Σĥ)/(N+1)`.
fn deconvolve_mls(seq: &[f64], amplitude: f64, recorded: &[Vec<f64>], n_samples: usize) -> Vec<Vec<f64>> {
    let n = seq.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut x_spec: Vec<Complex64> = seq.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut x_spec);
    let scale = 1.0 / (n as f64 * n as f64 * amplitude * amplitude);
    recorded
        .iter()
        .map(|y| {
            let mut spec: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            forward.process(&mut spec);
            for (s, x) in spec.iter_mut().zip(&x_spec) {
                *s *= x.conj();
            }
            inverse.process(&mut spec);
            let raw: Vec<f64> = spec.iter().map(|c| c.re * scale).collect();
            let sum: f64 = raw.iter().sum();
            let nf = n as f64;
            raw.iter()
                .take(n_samples)
                .map(|&v| nf * (v + sum) / (nf + 1.0))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Bin of the largest magnitude.
    pub bin: usize,
    /// Frequency of `bin`.
    pub bin_hz: f64,
    /// Parabolically interpolated peak frequency.
    pub hz: f64,
    /// Interpolated peak level.
    pub db: f64,
    /// The response is flat, so the peak is meaningless.
    pub flat: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseResult {
    pub channels: Vec<usize>,
    pub sample_rate_hz: f64,
    pub n_fft: usize,
    /// Per channel, zero-padded to `n_fft` samples.
    pub impulse: Vec<Vec<f64>>,
    /// Per channel, `n_fft/2 + 1` bins.
    pub magnitude: Vec<Vec<f64>>,
    /// `20·log10(magnitude)`, floored at [`DB_FLOOR`].
    pub magnitude_db: Vec<Vec<f64>>,
    pub frequencies_hz: Vec<f64>,
    pub peaks: Vec<Peak>,
}

pub(crate) fn to_db(magnitude: f64) -> f64 {
    if magnitude > 0.0 {
        (20.0 * magnitude.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

fn magnitude_spectrum(signal: &[f64], n_bins: usize) -> Vec<f64> {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(signal.len());
    let mut spec: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut spec);
    spec.iter().take(n_bins).map(|c| c.norm()).collect()
}

/// Magnitude responses from measured impulse responses.
pub fn frequency_response_measured(
    irs: &ImpulseResponses,
    n_fft: usize,
    sample_rate_hz: f64,
) -> Result<ResponseResult> {
    if n_fft == 0 {
        return Err(Error::Config("FFT length must be positive".into()));
    }
    if let Some(long) = irs.responses.iter().find(|r| r.len() > n_fft) {
        return Err(Error::Config(format!(
            "impulse response of {} samples is longer than the FFT length {n_fft}",
            long.len()
        )));
    }
    let n_bins = n_fft / 2 + 1;
    let impulse: Vec<Vec<f64>> = irs
        .responses
        .iter()
        .map(|r| {
            let mut padded = r.clone();
            padded.resize(n_fft, 0.0);
            padded
        })
        .collect();
    let magnitude: Vec<Vec<f64>> = impulse.iter().map(|h| magnitude_spectrum(h, n_bins)).collect();
    let magnitude_db = magnitude
        .iter()
        .map(|m| m.iter().map(|&v| to_db(v)).collect())
        .collect();
    let frequencies_hz = (0..n_bins)
        .map(|k| k as f64 * sample_rate_hz / n_fft as f64)
        .collect();
    let mut result = ResponseResult {
        channels: irs.channels.clone(),
        sample_rate_hz,
        n_fft,
        impulse,
        magnitude,
        magnitude_db,
        frequencies_hz,
        peaks: Vec::new(),
    };
    result.peaks = peak_trajectory(&result);
    Ok(result)
}

impl ResponseResult {
    /// Recomputes the magnitude bins from the stored impulse responses.
    pub fn recompute_magnitude(&self) -> Vec<Vec<f64>> {
        let n_bins = self.n_fft / 2 + 1;
        self.impulse.iter().map(|h| magnitude_spectrum(h, n_bins)).collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.recompute_magnitude() == self.magnitude
    }
}

/// Complex cascade gain at each tap in `channels` for each frequency.
///
/// Tap `k` is the product of the responses of sections `0..=k`.
pub fn frequency_response_analytic(
    design: &CascadeDesign,
    channels: &[usize],
    frequencies_hz: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let fs = design.sample_rate_hz;
    if let Some(&bad) = channels.iter().find(|&&c| c >= design.n_sections()) {
        return Err(Error::Config(format!(
            "channel {bad} out of range for {} sections",
            design.n_sections()
        )));
    }
    if let Some(&bad) = frequencies_hz.iter().find(|&&f| !(0.0..=0.5 * fs).contains(&f)) {
        return Err(Error::Domain(format!(
            "frequency {bad} Hz outside [0, {}] Hz",
            0.5 * fs
        )));
    }
    let last = match channels.iter().max() {
        Some(&m) => m,
        None => return Ok(Vec::new()),
    };
    let tfs: Vec<_> = design.sections[..=last].iter().map(transfer_function).collect();
    let mut out = vec![Vec::with_capacity(frequencies_hz.len()); channels.len()];
    let mut running = vec![Complex64::new(0.0, 0.0); last + 1];
    for &f in frequencies_hz {
        let z = Complex64::from_polar(1.0, 2.0 * PI * f / fs);
        let mut gain = Complex64::new(1.0, 0.0);
        for (tf, slot) in tfs.iter().zip(running.iter_mut()) {
            gain *= tf.eval(z);
            *slot = gain;
        }
        for (col, &c) in out.iter_mut().zip(channels) {
            col.push(running[c]);
        }
    }
    Ok(out)
}

/// Per-channel magnitude peak with parabolic interpolation on the dB
/// values of the peak bin and its two neighbours.
pub fn peak_trajectory(result: &ResponseResult) -> Vec<Peak> {
    let df = if result.n_fft > 0 {
        result.sample_rate_hz / result.n_fft as f64
    } else {
        0.0
    };
    result
        .magnitude_db
        .iter()
        .map(|db| {
            let (bin, &peak) = db
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap_or((0, &DB_FLOOR));
            let min = db.iter().copied().fold(f64::INFINITY, f64::min);
            let flat = db.is_empty() || peak - min < FLAT_TOLERANCE_DB;
            let (offset, level) = if bin > 0 && bin + 1 < db.len() {
                let (a, b, c) = (db[bin - 1], db[bin], db[bin + 1]);
                let denom = a - 2.0 * b + c;
                if denom < 0.0 {
                    let p = 0.5 * (a - c) / denom;
                    (p, b - 0.25 * (a - c) * p)
                } else {
                    (0.0, b)
                }
            } else {
                (0.0, peak)
            };
            Peak {
                bin,
                bin_hz: bin as f64 * df,
                hz: (bin as f64 + offset) * df,
                db: level,
                flat,
            }
        })
        .collect()
}
