//! Timing model of the time-multiplexed hardware cascade.
//!
//! One physical section core is reused for as many logical sections as
//! fit into a sample period; such a group is an array. Arrays are chained
//! through a pipeline register, so each further array adds one sample
//! period of latency.

use std::fmt::{self, Write as _};

use crate::cascade::{run_sections, SectionState};
use crate::design::CascadeDesign;
use crate::{Error, Result, TapMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardwareParams {
    pub clock_hz: f64,
    pub cycles_per_section: u32,
    pub sample_rate_hz: f64,
    pub max_arrays: u32,
}

impl Default for HardwareParams {
    fn default() -> Self {
        Self {
            clock_hz: 142e6,
            cycles_per_section: 29,
            sample_rate_hz: 48_000.0,
            max_arrays: 12,
        }
    }
}

impl HardwareParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.clock_hz) || !positive(self.sample_rate_hz) {
            return Err(Error::Config(format!(
                "clock ({} Hz) and sample rate ({} Hz) must be positive",
                self.clock_hz, self.sample_rate_hz
            )));
        }
        if self.cycles_per_section == 0 || self.max_arrays == 0 {
            return Err(Error::Config(
                "cycles per section and max arrays must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Clock cycles available in one sample period (possibly fractional).
    pub fn cycles_per_sample(&self) -> f64 {
        self.clock_hz / self.sample_rate_hz
    }
}

/// Time one section occupies the core.
pub fn section_latency(cycles: u32, clock_hz: f64) -> f64 {
    cycles as f64 / clock_hz
}

/// Largest number of sections one core can serve within a sample period.
pub fn sections_per_array(params: &HardwareParams) -> Result<u32> {
    params.validate()?;
    let budget = params.cycles_per_sample();
    let n = (budget / params.cycles_per_section as f64).floor();
    if n < 1.0 {
        return Err(Error::InfeasibleCore {
            cycles: params.cycles_per_section,
            budget,
        });
    }
    Ok(n.min(u32::MAX as f64) as u32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleReport {
    pub n_sections: usize,
    pub section_latency_s: f64,
    pub sections_per_array: u32,
    pub arrays_needed: u32,
    /// Sections the available arrays could host.
    pub total_sections_capacity: u64,
    pub end_to_end_latency_s: f64,
    pub sample_period_s: f64,
    pub feasible: bool,
    pub slack_cycles_per_sample: i64,
}

pub fn plan(params: &HardwareParams, n_sections: usize) -> Result<ScheduleReport> {
    if n_sections == 0 {
        return Err(Error::Domain("schedule needs at least one section".into()));
    }
    let per_array = sections_per_array(params)?;
    let arrays_needed = n_sections.div_ceil(per_array as usize) as u32;
    let sample_period_s = 1.0 / params.sample_rate_hz;
    let busy = params.cycles_per_section as i64 * n_sections.min(per_array as usize) as i64;
    Ok(ScheduleReport {
        n_sections,
        section_latency_s: section_latency(params.cycles_per_section, params.clock_hz),
        sections_per_array: per_array,
        arrays_needed,
        total_sections_capacity: per_array as u64 * params.max_arrays as u64,
        end_to_end_latency_s: arrays_needed as f64 * sample_period_s,
        sample_period_s,
        feasible: arrays_needed <= params.max_arrays,
        slack_cycles_per_sample: params.cycles_per_sample().floor() as i64 - busy,
    })
}

impl ScheduleReport {
    const FIELDS: [&'static str; 10] = [
        "n_sections",
        "section_latency_s",
        "sections_per_array",
        "arrays_needed",
        "total_sections_capacity",
        "end_to_end_latency_s",
        "sample_period_s",
        "feasible",
        "slack_cycles_per_sample",
        "end_to_end_latency_us",
    ];

    fn values(&self) -> [String; 10] {
        [
            self.n_sections.to_string(),
            format!("{:e}", self.section_latency_s),
            self.sections_per_array.to_string(),
            self.arrays_needed.to_string(),
            self.total_sections_capacity.to_string(),
            format!("{:e}", self.end_to_end_latency_s),
            format!("{:e}", self.sample_period_s),
            self.feasible.to_string(),
            self.slack_cycles_per_sample.to_string(),
            format!("{:.3}", self.end_to_end_latency_s * 1e6),
        ]
    }

    /// Header plus one data row.
    pub fn to_csv(&self) -> String {
        let mut out = Self::FIELDS.join(",");
        out.push('\n');
        out.push_str(&self.values().join(","));
        out.push('\n');
        out
    }

    /// Per-array section ranges `[start, end)` for this plan.
    pub fn array_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let per = self.sections_per_array as usize;
        (0..self.arrays_needed as usize)
            .map(|k| k * per..((k + 1) * per).min(self.n_sections))
            .collect()
    }
}

/// `key: value` lines.
impl fmt::Display for ScheduleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut text = String::new();
        for (key, value) in Self::FIELDS.iter().zip(self.values()) {
            let _ = writeln!(text, "{key}: {value}");
        }
        f.write_str(&text)
    }
}

/// Tap outputs of the array pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// `[n_samples × n_sections]`; a tap in array `k` lags the reference
    /// cascade by `k` rows.
    pub taps: TapMatrix,
    /// Integer-sample lag of every tap relative to the reference cascade.
    pub tap_delay_samples: Vec<usize>,
    /// Time from input sample arrival to availability of each tap, one
    /// sample period per array traversed.
    pub tap_latency_s: Vec<f64>,
    pub report: ScheduleReport,
}

/// Runs the cascade the way the array pipeline computes it.
///
/// Within a sample, each array processes its sections strictly in index
/// order (the per-section `done` handshake) and finishes before the
/// sample barrier. The last output of each array is latched into a
/// register that feeds the next array during the following sample.
pub fn simulate_pipeline(
    design: &CascadeDesign,
    params: &HardwareParams,
    samples: &[f64],
) -> Result<PipelineOutput> {
    let report = plan(params, design.n_sections())?;
    if !report.feasible {
        return Err(Error::Config(format!(
            "{} sections need {} arrays but only {} are available",
            design.n_sections(),
            report.arrays_needed,
            params.max_arrays
        )));
    }
    if let Some(&bad) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let ranges = report.array_ranges();
    let n = design.n_sections();
    let mut states = vec![SectionState::default(); n];
    let mut registers = vec![0.0f64; ranges.len()];
    let mut out = vec![0.0; n * samples.len()];
    for (&x, row) in samples.iter().zip(out.chunks_exact_mut(n)) {
        let mut input = x;
        for (range, register) in ranges.iter().zip(registers.iter_mut()) {
            let last = run_sections(
                &design.sections[range.clone()],
                &mut states[range.clone()],
                input,
                &mut row[range.clone()],
            );
            // The next array consumes what this register held before the barrier.
            input = std::mem::replace(register, last);
        }
    }
    let mut tap_delay_samples = vec![0; n];
    let mut tap_latency_s = vec![0.0; n];
    for (k, range) in ranges.iter().enumerate() {
        for tap in range.clone() {
            tap_delay_samples[tap] = k;
            tap_latency_s[tap] = (k + 1) as f64 * report.sample_period_s;
        }
    }
    Ok(PipelineOutput {
        taps: TapMatrix::from_rows(n, out),
        tap_delay_samples,
        tap_latency_s,
        report,
    })
}
