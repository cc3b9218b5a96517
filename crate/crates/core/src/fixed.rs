//! Bit-accurate emulation of the fixed-point cascade datapath.
//!
//! Values are two's-complement integers with a binary point `frac_bits`
//! from the right. Every arithmetic result is formed exactly in a wide
//! (128-bit) accumulator and rounded once into its destination format.
//!
//! The quantized cascade uses the pre-multiplied coefficients
//! `a = r·a0`, `c = r·c0`, `g` and `h`, so one section step is
//!
//! ```text
//! w1' = a·w1 − c·w2 + x
//! w2' = c·w1 + a·w2
//! y   = g·(x + h·w2')
//! ```
//!
//! with each line accumulated exactly and rounded a single time at the
//! state (or output) write.

use std::fmt;

use crate::design::{CascadeDesign, ChannelCoeffs};
use crate::{Error, Result, TapMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Rounding {
    /// Round half to even.
    #[default]
    NearestEven,
    /// Drop the discarded bits (round toward −∞).
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Overflow {
    #[default]
    Saturate,
    Wrap,
}

/// Signed fixed-point number format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedFormat {
    total_bits: u32,
    frac_bits: u32,
    rounding: Rounding,
    overflow: Overflow,
}

impl FixedFormat {
    pub fn new(total_bits: u32, frac_bits: u32) -> Result<Self> {
        if !(2..=64).contains(&total_bits) {
            return Err(Error::Config(format!("total bits {total_bits} outside 2..=64")));
        }
        if frac_bits >= total_bits {
            return Err(Error::Config(format!(
                "fraction bits {frac_bits} must be below total bits {total_bits}"
            )));
        }
        Ok(Self {
            total_bits,
            frac_bits,
            rounding: Rounding::NearestEven,
            overflow: Overflow::Saturate,
        })
    }

    pub fn with_rounding(self, rounding: Rounding) -> Self {
        Self { rounding, ..self }
    }

    pub fn with_overflow(self, overflow: Overflow) -> Self {
        Self { overflow, ..self }
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    pub fn overflow(&self) -> Overflow {
        self.overflow
    }

    pub fn min_raw(&self) -> i64 {
        (-(1i128 << (self.total_bits - 1))) as i64
    }

    pub fn max_raw(&self) -> i64 {
        ((1i128 << (self.total_bits - 1)) - 1) as i64
    }

    /// Weight of one least significant bit.
    pub fn lsb(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn min_value(&self) -> f64 {
        self.min_raw() as f64 * self.lsb()
    }

    pub fn max_value(&self) -> f64 {
        self.max_raw() as f64 * self.lsb()
    }

    pub fn contains_raw(&self, raw: i64) -> bool {
        (self.min_raw()..=self.max_raw()).contains(&raw)
    }

    fn fit(&self, q: i128) -> Requantized {
        let (min, max) = (self.min_raw() as i128, self.max_raw() as i128);
        if (min..=max).contains(&q) {
            return Requantized { raw: q as i64, overflowed: false };
        }
        let raw = match self.overflow {
            Overflow::Saturate => q.clamp(min, max) as i64,
            Overflow::Wrap => wrap(q, self.total_bits),
        };
        Requantized { raw, overflowed: true }
    }
}

impl fmt::Display for FixedFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.total_bits - self.frac_bits, self.frac_bits)
    }
}

fn wrap(q: i128, total_bits: u32) -> i64 {
    let modulus = 1i128 << total_bits;
    let m = q.rem_euclid(modulus);
    if m >= modulus >> 1 {
        (m - modulus) as i64
    } else {
        m as i64
    }
}

/// Result of fitting a wide value into a format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Requantized {
    pub raw: i64,
    /// The value was outside the format range and was saturated or wrapped.
    pub overflowed: bool,
}

/// Rounds the exact value `acc · 2^−acc_frac` into `out`.
///
/// `acc_frac` may not exceed 126.
pub fn requantize(acc: i128, acc_frac: u32, out: FixedFormat) -> Requantized {
    debug_assert!(acc_frac <= 126);
    let target = out.frac_bits;
    if acc_frac >= target {
        let shift = acc_frac - target;
        if shift == 0 {
            return out.fit(acc);
        }
        let floor = acc >> shift;
        let q = match out.rounding {
            Rounding::Truncate => floor,
            Rounding::NearestEven => {
                let rem = acc & ((1i128 << shift) - 1);
                let half = 1i128 << (shift - 1);
                if rem > half || (rem == half && floor & 1 == 1) {
                    floor + 1
                } else {
                    floor
                }
            }
        };
        out.fit(q)
    } else {
        let shift = target - acc_frac;
        match acc.checked_shl(shift).filter(|v| v >> shift == acc) {
            Some(v) => out.fit(v),
            None => match out.overflow {
                Overflow::Saturate => Requantized {
                    raw: if acc < 0 { out.min_raw() } else { out.max_raw() },
                    overflowed: true,
                },
                Overflow::Wrap => Requantized {
                    raw: wrap(acc.wrapping_shl(shift), out.total_bits),
                    overflowed: true,
                },
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedValue {
    pub raw: i64,
    pub format: FixedFormat,
}

impl FixedValue {
    pub fn new(raw: i64, format: FixedFormat) -> Result<Self> {
        if !format.contains_raw(raw) {
            return Err(Error::Validation(format!("raw value {raw} does not fit {format}")));
        }
        Ok(Self { raw, format })
    }

    pub fn zero(format: FixedFormat) -> Self {
        Self { raw: 0, format }
    }

    pub fn to_real(self) -> f64 {
        to_real(self)
    }
}

/// Quantizes a real value, also reporting whether it overflowed the format.
pub fn quantize_checked(value: f64, format: FixedFormat) -> Result<(FixedValue, bool)> {
    if value.is_nan() {
        return Err(Error::Domain("cannot quantize NaN".into()));
    }
    if value.is_infinite() && format.overflow == Overflow::Wrap {
        return Err(Error::Domain("cannot wrap an infinite value".into()));
    }
    let scaled = value * (format.frac_bits as f64).exp2();
    let rounded = match format.rounding {
        Rounding::NearestEven => scaled.round_ties_even(),
        Rounding::Truncate => scaled.floor(),
    };
    // 2^126: beyond this every finite f64 is a multiple of 2^73 and wraps to 0
    const WIDE: f64 = 8.507_059_173_023_462e37;
    let fitted = if rounded.abs() < WIDE {
        format.fit(rounded as i128)
    } else {
        match format.overflow {
            Overflow::Saturate => Requantized {
                raw: if rounded < 0.0 { format.min_raw() } else { format.max_raw() },
                overflowed: true,
            },
            Overflow::Wrap => Requantized { raw: 0, overflowed: true },
        }
    };
    Ok((FixedValue { raw: fitted.raw, format }, fitted.overflowed))
}

/// `raw = round(value · 2^frac_bits)` under the format's rounding and overflow policies.
pub fn quantize(value: f64, format: FixedFormat) -> Result<FixedValue> {
    quantize_checked(value, format).map(|(v, _)| v)
}

/// `raw / 2^frac_bits`; exact whenever `raw` fits in 53 bits.
pub fn to_real(v: FixedValue) -> f64 {
    v.raw as f64 * v.format.lsb()
}

pub fn fixed_mul_checked(a: FixedValue, b: FixedValue, out: FixedFormat) -> Requantized {
    let acc = a.raw as i128 * b.raw as i128;
    requantize(acc, a.format.frac_bits + b.format.frac_bits, out)
}

/// Exact product, rounded once into `out`.
pub fn fixed_mul(a: FixedValue, b: FixedValue, out: FixedFormat) -> FixedValue {
    FixedValue {
        raw: fixed_mul_checked(a, b, out).raw,
        format: out,
    }
}

pub fn fixed_add_checked(a: FixedValue, b: FixedValue, out: FixedFormat) -> Requantized {
    let frac = a.format.frac_bits.max(b.format.frac_bits);
    let acc = ((a.raw as i128) << (frac - a.format.frac_bits))
        + ((b.raw as i128) << (frac - b.format.frac_bits));
    requantize(acc, frac, out)
}

/// Exact sum at the finer of the two binary points, rounded once into `out`.
pub fn fixed_add(a: FixedValue, b: FixedValue, out: FixedFormat) -> FixedValue {
    FixedValue {
        raw: fixed_add_checked(a, b, out).raw,
        format: out,
    }
}

/// Word lengths of the quantized cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedFormats {
    /// Cascade input.
    pub io: FixedFormat,
    /// Section state and inter-section signals (the taps).
    pub state: FixedFormat,
    /// Section coefficients `a`, `c`, `g`, `h`.
    pub coeff: FixedFormat,
}

/// io Q1.15, state Q16.24, coefficients Q2.23.
///
/// The state keeps 16 integer bits because the resonator states of the
/// default 100-section design peak near 1e4 for a −12 dBFS broadband
/// input. Coefficients use 23 fraction bits since the low-CF sections
/// have `c` of only a few thousandths and coarser steps move their poles.
impl Default for FixedFormats {
    fn default() -> Self {
        Self {
            io: FixedFormat::new(16, 15).expect("valid io format"),
            state: FixedFormat::new(40, 24).expect("valid state format"),
            coeff: FixedFormat::new(25, 23).expect("valid coefficient format"),
        }
    }
}

impl FixedFormats {
    /// Binary point of the aligned accumulator of the state update lines.
    fn line_frac(&self) -> u32 {
        (self.coeff.frac_bits + self.state.frac_bits).max(self.io.frac_bits)
    }

    /// Checks that every accumulator of the section step fits in 128 bits.
    pub fn validate(&self) -> Result<()> {
        let line_frac = self.line_frac();
        let product_bits = self.coeff.total_bits + self.state.total_bits - 1;
        let product_int = product_bits - (self.coeff.frac_bits + self.state.frac_bits);
        let input_int = (self.io.total_bits - self.io.frac_bits)
            .max(self.state.total_bits - self.state.frac_bits);
        // sign + integer bits + fraction bits + two carries for the sums
        let line_bits = 1 + product_int.max(input_int) + line_frac + 2;
        let output_bits = line_bits + self.coeff.total_bits;
        if output_bits > 127 || self.coeff.frac_bits + line_frac > 126 {
            return Err(Error::Config(format!(
                "formats io {} / state {} / coeff {} need a {output_bits}-bit accumulator (max 127)",
                self.io, self.state, self.coeff
            )));
        }
        Ok(())
    }
}

/// Raw coefficient codes of one section, all in the coefficient format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedSection {
    pub a: i64,
    pub c: i64,
    pub g: i64,
    pub h: i64,
}

impl FixedSection {
    pub const NAMES: [&'static str; 4] = ["a", "c", "g", "h"];

    pub fn get(&self, name: &str) -> Option<i64> {
        match name {
            "a" => Some(self.a),
            "c" => Some(self.c),
            "g" => Some(self.g),
            "h" => Some(self.h),
            _ => None,
        }
    }

    pub fn raws(&self) -> [i64; 4] {
        [self.a, self.c, self.g, self.h]
    }
}

/// Real-valued coefficients `(a, c, g, h)` the quantized datapath approximates.
pub fn ideal_coefficients(c: &ChannelCoeffs) -> [f64; 4] {
    [c.r * c.a0, c.r * c.c0, c.g, c.h]
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedDesign {
    design: CascadeDesign,
    formats: FixedFormats,
    sections: Vec<FixedSection>,
}

/// Rounds every coefficient of `design` to the nearest code of the
/// coefficient format. Values outside the format range are an error.
pub fn quantize_design(design: &CascadeDesign, formats: FixedFormats) -> Result<QuantizedDesign> {
    formats.validate()?;
    let coeff_format = formats
        .coeff
        .with_rounding(Rounding::NearestEven)
        .with_overflow(Overflow::Saturate);
    let sections = design
        .sections
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut raws = [0i64; 4];
            for ((raw, value), name) in raws
                .iter_mut()
                .zip(ideal_coefficients(c))
                .zip(FixedSection::NAMES)
            {
                let (q, overflowed) = quantize_checked(value, coeff_format)
                    .map_err(|e| e.in_section(i))?;
                if overflowed {
                    return Err(Error::Validation(format!(
                        "coefficient {name} = {value} outside {} range [{}, {}]",
                        formats.coeff,
                        formats.coeff.min_value(),
                        formats.coeff.max_value()
                    ))
                    .in_section(i));
                }
                *raw = q.raw;
            }
            Ok(FixedSection {
                a: raws[0],
                c: raws[1],
                g: raws[2],
                h: raws[3],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantizedDesign {
        design: design.clone(),
        formats,
        sections,
    })
}

impl QuantizedDesign {
    /// Rebuilds a quantized design from raw coefficient codes, e.g. read
    /// from a quantized coefficient file. The float design is recovered
    /// by dequantization.
    pub fn from_raw(
        sample_rate_hz: f64,
        formats: FixedFormats,
        sections: Vec<FixedSection>,
    ) -> Result<Self> {
        formats.validate()?;
        for (i, s) in sections.iter().enumerate() {
            for (raw, name) in s.raws().into_iter().zip(FixedSection::NAMES) {
                if !formats.coeff.contains_raw(raw) {
                    return Err(Error::Validation(format!(
                        "coefficient {name} code {raw} does not fit {}",
                        formats.coeff
                    ))
                    .in_section(i));
                }
            }
        }
        let design = CascadeDesign::new(
            sample_rate_hz,
            sections
                .iter()
                .enumerate()
                .map(|(i, s)| dequantize_section(i, s, formats.coeff, None, sample_rate_hz))
                .collect(),
        );
        Ok(Self {
            design,
            formats,
            sections,
        })
    }

    pub fn design(&self) -> &CascadeDesign {
        &self.design
    }

    pub fn formats(&self) -> &FixedFormats {
        &self.formats
    }

    pub fn sections(&self) -> &[FixedSection] {
        &self.sections
    }

    pub fn n_sections(&self) -> usize {
        self.sections.len()
    }

    /// Float design whose coefficients equal the quantized ones.
    pub fn dequantized(&self) -> CascadeDesign {
        let fs = self.design.sample_rate_hz;
        CascadeDesign::new(
            fs,
            self.sections
                .iter()
                .zip(&self.design.sections)
                .enumerate()
                .map(|(i, (q, orig))| dequantize_section(i, q, self.formats.coeff, Some(orig), fs))
                .collect(),
        )
    }

    /// Largest `|dequantized − ideal|` over every coefficient of every section.
    pub fn max_quantization_error(&self) -> f64 {
        let lsb = self.formats.coeff.lsb();
        self.sections
            .iter()
            .zip(&self.design.sections)
            .flat_map(|(q, c)| {
                q.raws()
                    .into_iter()
                    .zip(ideal_coefficients(c))
                    .map(move |(raw, ideal)| (raw as f64 * lsb - ideal).abs())
            })
            .fold(0.0, f64::max)
    }
}

fn dequantize_section(
    index: usize,
    q: &FixedSection,
    coeff: FixedFormat,
    original: Option<&ChannelCoeffs>,
    sample_rate_hz: f64,
) -> ChannelCoeffs {
    let lsb = coeff.lsb();
    let (a, c) = (q.a as f64 * lsb, q.c as f64 * lsb);
    let r = a.hypot(c);
    let (theta_r, a0, c0) = if r > 0.0 {
        (c.atan2(a), a / r, c / r)
    } else if let Some(o) = original {
        (o.theta_r, o.a0, o.c0)
    } else {
        (f64::NAN, 1.0, 0.0)
    };
    ChannelCoeffs {
        section_index: index,
        x: original.map_or(f64::NAN, |o| o.x),
        cf_hz: theta_r * sample_rate_hz / (2.0 * std::f64::consts::PI),
        theta_r,
        r,
        a0,
        c0,
        h: q.h as f64 * lsb,
        g: q.g as f64 * lsb,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FixedSectionState {
    pub w1: i64,
    pub w2: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedStep {
    pub y: FixedValue,
    /// Number of results (w1', w2', y) that left the format range.
    pub overflows: u32,
}

#[inline]
fn align(raw: i64, from_frac: u32, to_frac: u32) -> i128 {
    (raw as i128) << (to_frac - from_frac)
}

/// One sample through one quantized section.
///
/// `x` may be in any format whose binary point does not exceed
/// `formats.coeff.frac + formats.state.frac` or `formats.io.frac`; the
/// state and the output are in `formats.state`. `formats` must pass
/// [`FixedFormats::validate`].
pub fn fixed_step_section(
    coeffs: &FixedSection,
    formats: &FixedFormats,
    state: &mut FixedSectionState,
    x: FixedValue,
) -> FixedStep {
    let (fc, fs) = (formats.coeff.frac_bits, formats.state.frac_bits);
    let line_frac = formats.line_frac().max(x.format.frac_bits);
    let xa = align(x.raw, x.format.frac_bits, line_frac);
    let product_shift = line_frac - (fc + fs);
    let (a, c) = (coeffs.a as i128, coeffs.c as i128);
    let (w1, w2) = (state.w1 as i128, state.w2 as i128);

    let acc1 = ((a * w1 - c * w2) << product_shift) + xa;
    let acc2 = (c * w1 + a * w2) << product_shift;
    let w1_new = requantize(acc1, line_frac, formats.state);
    let w2_new = requantize(acc2, line_frac, formats.state);
    state.w1 = w1_new.raw;
    state.w2 = w2_new.raw;

    let inner = xa + ((coeffs.h as i128 * w2_new.raw as i128) << product_shift);
    let y = requantize(coeffs.g as i128 * inner, fc + line_frac, formats.state);

    FixedStep {
        y: FixedValue {
            raw: y.raw,
            format: formats.state,
        },
        overflows: w1_new.overflowed as u32 + w2_new.overflowed as u32 + y.overflowed as u32,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedCascadeState {
    sections: Vec<FixedSectionState>,
    samples_processed: u64,
}

impl FixedCascadeState {
    pub fn new(n_sections: usize) -> Self {
        Self {
            sections: vec![FixedSectionState::default(); n_sections],
            samples_processed: 0,
        }
    }

    pub fn for_design(design: &QuantizedDesign) -> Self {
        Self::new(design.n_sections())
    }

    pub fn sections(&self) -> &[FixedSectionState] {
        &self.sections
    }

    pub fn samples_processed(&self) -> u64 {
        self.samples_processed
    }

    pub fn reset(&mut self) {
        self.sections.fill(FixedSectionState::default());
        self.samples_processed = 0;
    }
}

/// Overflow events observed while running the quantized cascade.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SaturationStats {
    /// Per section, base first.
    pub per_section: Vec<u64>,
    /// Input samples that overflowed the io format during quantization.
    pub input: u64,
}

impl SaturationStats {
    pub fn new(n_sections: usize) -> Self {
        Self {
            per_section: vec![0; n_sections],
            input: 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.input + self.per_section.iter().sum::<u64>()
    }

    pub fn merge(&mut self, other: &SaturationStats) {
        self.input += other.input;
        if self.per_section.len() < other.per_section.len() {
            self.per_section.resize(other.per_section.len(), 0);
        }
        for (a, b) in self.per_section.iter_mut().zip(&other.per_section) {
            *a += b;
        }
    }
}

/// Raw tap codes of a quantized run, row-major `[n_samples × n_sections]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedBlock {
    pub n_taps: usize,
    pub raw: Vec<i64>,
    pub format: FixedFormat,
    pub stats: SaturationStats,
}

impl FixedBlock {
    pub fn n_samples(&self) -> usize {
        self.raw.len().checked_div(self.n_taps).unwrap_or(0)
    }

    pub fn to_tap_matrix(&self) -> TapMatrix {
        let lsb = self.format.lsb();
        TapMatrix::from_rows(self.n_taps, self.raw.iter().map(|&r| r as f64 * lsb).collect())
    }
}

/// Quantizes a real signal into io codes, counting overflows.
pub fn quantize_signal(samples: &[f64], format: FixedFormat) -> Result<(Vec<i64>, u64)> {
    let mut overflows = 0;
    let raw = samples
        .iter()
        .map(|&x| {
            let (v, o) = quantize_checked(x, format)?;
            overflows += o as u64;
            Ok(v.raw)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((raw, overflows))
}

/// One io-format input code through every section; tap codes go to `taps`.
#[inline]
fn run_fixed_sections(
    qdesign: &QuantizedDesign,
    states: &mut [FixedSectionState],
    code: i64,
    taps: &mut [i64],
    overflows: &mut [u64],
) {
    let formats = &qdesign.formats;
    let mut x = FixedValue {
        raw: code,
        format: formats.io,
    };
    for (((coeffs, s), tap), count) in qdesign
        .sections
        .iter()
        .zip(states.iter_mut())
        .zip(taps.iter_mut())
        .zip(overflows.iter_mut())
    {
        let step = fixed_step_section(coeffs, formats, s, x);
        *count += step.overflows as u64;
        *tap = step.y.raw;
        x = step.y;
    }
}

/// One sample through the quantized cascade, for callers that stream.
///
/// `code` must fit the io format and the slices must match the section count.
pub fn fixed_process_sample(
    qdesign: &QuantizedDesign,
    state: &mut FixedCascadeState,
    code: i64,
    taps: &mut [i64],
    stats: &mut SaturationStats,
) -> Result<()> {
    let n = qdesign.n_sections();
    if state.sections.len() != n || taps.len() != n || stats.per_section.len() != n {
        return Err(Error::Config(format!(
            "buffers do not match the {n}-section design"
        )));
    }
    if !qdesign.formats.io.contains_raw(code) {
        return Err(Error::Config(format!(
            "input code {code} does not fit io format {}",
            qdesign.formats.io
        )));
    }
    run_fixed_sections(qdesign, &mut state.sections, code, taps, &mut stats.per_section);
    state.samples_processed += 1;
    Ok(())
}

/// Runs the quantized cascade on io-format input codes.
pub fn fixed_process_block(
    qdesign: &QuantizedDesign,
    state: &mut FixedCascadeState,
    input: &[i64],
) -> Result<FixedBlock> {
    let n = qdesign.n_sections();
    if state.sections.len() != n {
        return Err(Error::Config(format!(
            "state has {} sections but design has {n}",
            state.sections.len()
        )));
    }
    let formats = qdesign.formats;
    if let Some(&bad) = input.iter().find(|&&r| !formats.io.contains_raw(r)) {
        return Err(Error::Config(format!(
            "input code {bad} does not fit io format {}",
            formats.io
        )));
    }
    let mut raw = vec![0i64; n * input.len()];
    let mut stats = SaturationStats::new(n);
    if n > 0 {
        for (&code, row) in input.iter().zip(raw.chunks_exact_mut(n)) {
            run_fixed_sections(qdesign, &mut state.sections, code, row, &mut stats.per_section);
        }
    }
    state.samples_processed += input.len() as u64;
    Ok(FixedBlock {
        n_taps: n,
        raw,
        format: formats.state,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{design_cascade, DesignParams};

    fn q(total: u32, frac: u32) -> FixedFormat {
        FixedFormat::new(total, frac).unwrap()
    }

    #[test]
    fn format_range() {
        let f = q(16, 15);
        assert_eq!((f.min_raw(), f.max_raw()), (-32768, 32767));
        assert_eq!(f.min_value(), -1.0);
        assert_eq!(f.max_value(), 1.0 - 2f64.powi(-15));
        let f = q(32, 24);
        assert_eq!(f.min_value(), -128.0);
        let f = q(64, 0);
        assert_eq!((f.min_raw(), f.max_raw()), (i64::MIN, i64::MAX));
        assert!(FixedFormat::new(1, 0).is_err());
        assert!(FixedFormat::new(65, 0).is_err());
        assert!(FixedFormat::new(16, 16).is_err());
        assert_eq!(q(18, 16).to_string(), "Q2.16");
    }

    #[test]
    fn quantize_examples() {
        let f = q(16, 15);
        assert_eq!(quantize(0.5, f).unwrap().raw, 16384);
        assert_eq!(quantize(1.0, f).unwrap().raw, 32767);
        assert_eq!(quantize(2f64.powi(-16), f).unwrap().raw, 0);
        assert_eq!(quantize(3.0 * 2f64.powi(-16), f).unwrap().raw, 2);
        assert_eq!(quantize(-1.5, f).unwrap().raw, -32768);
        assert_eq!(quantize(f64::INFINITY, f).unwrap().raw, 32767);
        assert!(quantize(f64::NAN, f).is_err());
        let t = f.with_rounding(Rounding::Truncate);
        assert_eq!(quantize(-2f64.powi(-16), t).unwrap().raw, -1);
        let w = f.with_overflow(Overflow::Wrap);
        assert_eq!(quantize(1.0, w).unwrap().raw, -32768);
        assert_eq!(quantize(1e300, w).unwrap().raw, 0);
        assert!(quantize(f64::NEG_INFINITY, w).is_err());
        let (_, overflowed) = quantize_checked(1.0, f).unwrap();
        assert!(overflowed);
    }

    #[test]
    fn to_real_examples() {
        let f = q(16, 15);
        assert_eq!(FixedValue::new(16384, f).unwrap().to_real(), 0.5);
        assert_eq!(FixedValue::new(-32768, f).unwrap().to_real(), -1.0);
        assert!(FixedValue::new(32768, f).is_err());
    }

    #[test]
    fn mul_examples() {
        let f = q(16, 15);
        let half = quantize(0.5, f).unwrap();
        assert_eq!(fixed_mul(half, half, f).to_real(), 0.25);
        let m1 = quantize(-1.0, f).unwrap();
        let r = fixed_mul_checked(m1, m1, f);
        assert_eq!(r.raw, 32767);
        assert!(r.overflowed);
    }

    #[test]
    fn add_examples() {
        let f = q(16, 15);
        let quarter = quantize(0.25, f).unwrap();
        assert_eq!(fixed_add(quarter, quarter, f).to_real(), 0.5);
        let max = FixedValue::new(f.max_raw(), f).unwrap();
        assert_eq!(fixed_add(max, max, f).raw, f.max_raw());
        let a = FixedValue::new(-12345, f).unwrap();
        assert_eq!(fixed_add(a, FixedValue::zero(f), f), a);
        // mixed binary points align to the finer one
        let coarse = FixedValue::new(3, q(8, 2)).unwrap(); // 0.75
        let fine = FixedValue::new(1, q(16, 10)).unwrap();
        assert_eq!(fixed_add(coarse, fine, q(16, 10)).raw, 3 * 256 + 1);
    }

    #[test]
    fn requantize_rounding_and_shifts() {
        let f = q(16, 0);
        // 2.5 -> 2, 3.5 -> 4, -2.5 -> -2
        assert_eq!(requantize(5, 1, f).raw, 2);
        assert_eq!(requantize(7, 1, f).raw, 4);
        assert_eq!(requantize(-5, 1, f).raw, -2);
        assert_eq!(requantize(-5, 1, f.with_rounding(Rounding::Truncate)).raw, -3);
        // left shift into a finer format
        assert_eq!(requantize(3, 0, q(16, 4)).raw, 48);
        let r = requantize(i128::MAX >> 2, 0, q(64, 62));
        assert!(r.overflowed);
        assert_eq!(r.raw, i64::MAX);
    }

    #[test]
    fn default_format_widths_fit() {
        FixedFormats::default().validate().unwrap();
        let wide = FixedFormats {
            io: q(64, 63),
            state: q(64, 40),
            coeff: q(64, 60),
        };
        assert!(matches!(wide.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn design_quantization() {
        let design = design_cascade(&DesignParams::new(48000.0, 40)).unwrap();
        let formats = FixedFormats {
            coeff: q(34, 30),
            ..Default::default()
        };
        let qd = quantize_design(&design, formats).unwrap();
        assert!(qd.max_quantization_error() <= 2f64.powi(-31));

        let qd = quantize_design(&design, FixedFormats::default()).unwrap();
        assert!(qd.max_quantization_error() <= 0.5 * FixedFormats::default().coeff.lsb());
        let again = quantize_design(&qd.dequantized(), FixedFormats::default()).unwrap();
        assert_eq!(again.sections(), qd.sections());

        let from_raw =
            QuantizedDesign::from_raw(48000.0, FixedFormats::default(), qd.sections().to_vec()).unwrap();
        assert_eq!(from_raw.sections(), qd.sections());
    }

    #[test]
    fn zero_a_quantizes_to_zero() {
        let s = ChannelCoeffs::from_pole(0, std::f64::consts::FRAC_PI_2, 0.9, 0.5, 48000.0).unwrap();
        let qd = quantize_design(&CascadeDesign::new(48000.0, vec![s]), FixedFormats::default()).unwrap();
        assert_eq!(qd.sections()[0].a, 0);
    }

    #[test]
    fn out_of_range_coefficient_names_section() {
        let mut design = design_cascade(&DesignParams::new(48000.0, 5)).unwrap();
        design.sections[3].h = 2.5;
        let err = quantize_design(&design, FixedFormats::default()).unwrap_err();
        match err {
            Error::Section { section: 3, source } => assert!(source.to_string().contains("coefficient h")),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn section_step_zero_state() {
        let design = design_cascade(&DesignParams::new(48000.0, 10)).unwrap();
        let qd = quantize_design(&design, FixedFormats::default()).unwrap();
        let formats = *qd.formats();
        let coeffs = qd.sections()[5];
        let mut s = FixedSectionState::default();
        let step = fixed_step_section(&coeffs, &formats, &mut s, FixedValue::zero(formats.io));
        assert_eq!((s, step.y.raw, step.overflows), (FixedSectionState::default(), 0, 0));

        let x = quantize(0.3, formats.io).unwrap();
        let step = fixed_step_section(&coeffs, &formats, &mut s, x);
        // w1' = x exactly, re-expressed on the state grid
        assert_eq!(s.w1, x.raw << (formats.state.frac_bits - formats.io.frac_bits));
        assert_eq!(s.w2, 0);
        let g = FixedValue::new(coeffs.g, formats.coeff).unwrap();
        assert_eq!(step.y, fixed_mul(g, x, formats.state));
    }

    #[test]
    fn silence_and_stats() {
        let design = design_cascade(&DesignParams::new(48000.0, 20)).unwrap();
        let qd = quantize_design(&design, FixedFormats::default()).unwrap();
        let mut state = FixedCascadeState::for_design(&qd);
        let out = fixed_process_block(&qd, &mut state, &[0; 500]).unwrap();
        assert!(out.raw.iter().all(|&r| r == 0));
        assert_eq!(out.stats.total(), 0);
        assert_eq!(state.samples_processed(), 500);
        assert!(fixed_process_block(&qd, &mut state, &[40000]).is_err());
    }

    #[test]
    fn full_scale_dc_settles_without_saturation() {
        let design = design_cascade(&DesignParams::new(48000.0, 100)).unwrap();
        let qd = quantize_design(&design, FixedFormats::default()).unwrap();
        let mut state = FixedCascadeState::for_design(&qd);
        let code = qd.formats().io.max_raw();
        let out = fixed_process_block(&qd, &mut state, &vec![code; 96_000]).unwrap();
        let taps = out.to_tap_matrix();
        let want = qd.formats().io.max_value();
        for &y in taps.row(taps.n_samples() - 1) {
            assert!((y - want).abs() < 1e-3, "{y}");
        }
        assert_eq!(out.stats.total(), 0);
    }

    #[test]
    fn narrow_state_saturation_is_counted() {
        let design = design_cascade(&DesignParams::new(48000.0, 100)).unwrap();
        let formats = FixedFormats {
            state: FixedFormat::new(32, 24).unwrap(),
            ..FixedFormats::default()
        };
        let qd = quantize_design(&design, formats).unwrap();
        let mut state = FixedCascadeState::for_design(&qd);
        let code = qd.formats().io.max_raw();
        let out = fixed_process_block(&qd, &mut state, &vec![code; 48_000]).unwrap();
        assert!(out.stats.total() > 0);
        assert_eq!(out.stats.total(), out.stats.per_section.iter().sum::<u64>() + out.stats.input);
        // the base sections never leave the ±128 range
        assert!(out.stats.per_section[..10].iter().all(|&n| n == 0));
    }
}
