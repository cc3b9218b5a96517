use crate::{Error, Result};

/// Feedback taps of a primitive polynomial for each register length 2..=24.
///
/// Entry `n − 2` lists the exponents of `x^n + … + 1`, most significant first.
const PRIMITIVE_TAPS: [&[u32]; 23] = [
    &[2, 1],
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 5, 3, 1],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 6, 2, 1],
    &[20, 17],
    &[21, 19],
    &[22, 21],
    &[23, 18],
    &[24, 23, 22, 17],
];

pub const MIN_ORDER: u32 = 2;
pub const MAX_ORDER: u32 = 24;

pub fn default_taps(order: u32) -> Option<&'static [u32]> {
    (MIN_ORDER..=MAX_ORDER)
        .contains(&order)
        .then(|| PRIMITIVE_TAPS[(order - MIN_ORDER) as usize])
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlsConfig {
    pub order: u32,
    pub taps: Vec<u32>,
    pub amplitude: f64,
    /// Periods played before the recorded one when measuring a response.
    pub warmup_periods: u32,
}

/// Enough for the slowest default section (decay time about a quarter
/// of an order-14 period) to settle below double precision noise.
pub const DEFAULT_WARMUP_PERIODS: u32 = 4;

impl MlsConfig {
    pub fn new(order: u32) -> Result<Self> {
        let taps = default_taps(order).ok_or_else(|| {
            Error::Config(format!("MLS order {order} outside {MIN_ORDER}..={MAX_ORDER}"))
        })?;
        Ok(Self {
            order,
            taps: taps.to_vec(),
            amplitude: 1.0,
            warmup_periods: DEFAULT_WARMUP_PERIODS,
        })
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        Self { amplitude, ..self }
    }

    pub fn with_warmup(self, warmup_periods: u32) -> Self {
        Self { warmup_periods, ..self }
    }

    pub fn period(&self) -> usize {
        (1usize << self.order) - 1
    }
}

/// One period of a maximum-length sequence. Register bits equal to 1
/// map to `+amplitude` and 0 to `−amplitude`, so `+amplitude` occurs
/// once more than `−amplitude`.
///
/// The Fibonacci register starts from all ones; the taps are accepted
/// only if the register first returns to its seed after exactly
/// `2^order − 1` steps.
pub fn mls_generate(config: &MlsConfig) -> Result<Vec<f64>> {
    let order = config.order;
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::Config(format!(
            "MLS order {order} outside {MIN_ORDER}..={MAX_ORDER}"
        )));
    }
    if config.taps.is_empty() || config.taps.iter().any(|&t| t == 0 || t > order) {
        return Err(Error::Validation(format!(
            "feedback taps {:?} must lie in 1..={order}",
            config.taps
        )));
    }
    if !(config.amplitude.is_finite() && config.amplitude != 0.0) {
        return Err(Error::Validation(format!(
            "MLS amplitude {} must be finite and non-zero",
            config.amplitude
        )));
    }
    let mask: u32 = config.taps.iter().fold(0, |m, &t| m | 1 << (order - t));
    let seed: u32 = (1u32 << order) - 1;
    let period = config.period();
    let mut reg = seed;
    let mut out = Vec::with_capacity(period);
    for step in 1..=period {
        let bit = reg & 1;
        out.push(if bit == 1 { config.amplitude } else { -config.amplitude });
        let feedback = (reg & mask).count_ones() & 1;
        reg = (reg >> 1) | (feedback << (order - 1));
        if reg == seed && step != period {
            return Err(Error::Validation(format!(
                "taps {:?} are not primitive for order {order}: period {step} instead of {period}",
                config.taps
            )));
        }
    }
    if reg != seed {
        return Err(Error::Validation(format!(
            "taps {:?} are not primitive for order {order}: register did not return to its seed",
            config.taps
        )));
    }
    Ok(out)
}
