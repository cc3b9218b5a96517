//! Floating-point reference cascade.
//!
//! Each section keeps two state variables and realises its transfer
//! function with a coupled-form (rotator) recurrence:
//!
//! ```text
//! w1' = r·(a0·w1 − c0·w2) + x
//! w2' = r·(c0·w1 + a0·w2)
//! y   = g·(x + h·w2')
//! ```
//!
//! The output of section `k` is both tap `k` and the input of section `k + 1`.

use crate::design::{CascadeDesign, ChannelCoeffs};
use crate::{Error, Result, TapMatrix};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SectionState {
    pub w1: f64,
    pub w2: f64,
}

/// Advances one section by one sample; returns the section output.
#[inline]
pub(crate) fn step(c: &ChannelCoeffs, s: &mut SectionState, x: f64) -> f64 {
    let w1 = c.r * (c.a0 * s.w1 - c.c0 * s.w2) + x;
    let w2 = c.r * (c.c0 * s.w1 + c.a0 * s.w2);
    s.w1 = w1;
    s.w2 = w2;
    c.g * (x + c.h * w2)
}

/// One sample through one section. Non-finite input is rejected before
/// it can reach the state.
pub fn step_section(coeffs: &ChannelCoeffs, state: &mut SectionState, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(step(coeffs, state, x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeState {
    sections: Vec<SectionState>,
    samples_processed: u64,
}

impl CascadeState {
    pub fn new(n_sections: usize) -> Self {
        Self {
            sections: vec![SectionState::default(); n_sections],
            samples_processed: 0,
        }
    }

    pub fn for_design(design: &CascadeDesign) -> Self {
        Self::new(design.n_sections())
    }

    pub fn sections(&self) -> &[SectionState] {
        &self.sections
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn samples_processed(&self) -> u64 {
        self.samples_processed
    }

    pub fn reset(&mut self) {
        self.sections.fill(SectionState::default());
        self.samples_processed = 0;
    }

    fn check(&self, design: &CascadeDesign) -> Result<()> {
        if self.sections.len() != design.n_sections() {
            return Err(Error::Config(format!(
                "state has {} sections but design has {}",
                self.sections.len(),
                design.n_sections()
            )));
        }
        Ok(())
    }
}

pub fn reset(state: &mut CascadeState) {
    state.reset();
}

/// Runs `x` through `sections` in order, writing each tap and returning
/// the last output.
#[inline]
pub(crate) fn run_sections(
    sections: &[ChannelCoeffs],
    states: &mut [SectionState],
    mut x: f64,
    taps: &mut [f64],
) -> f64 {
    for ((c, s), tap) in sections.iter().zip(states.iter_mut()).zip(taps.iter_mut()) {
        x = step(c, s, x);
        *tap = x;
    }
    x
}

/// Pushes one sample through the whole cascade, writing every tap into `taps`.
pub fn process_sample_into(
    design: &CascadeDesign,
    state: &mut CascadeState,
    x: f64,
    taps: &mut [f64],
) -> Result<()> {
    state.check(design)?;
    if taps.len() != design.n_sections() {
        return Err(Error::Config(format!(
            "tap buffer holds {} values for {} sections",
            taps.len(),
            design.n_sections()
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    run_sections(&design.sections, &mut state.sections, x, taps);
    state.samples_processed += 1;
    Ok(())
}

pub fn process_sample(design: &CascadeDesign, state: &mut CascadeState, x: f64) -> Result<Vec<f64>> {
    let mut taps = vec![0.0; design.n_sections()];
    process_sample_into(design, state, x, &mut taps)?;
    Ok(taps)
}

/// Processes a block; row `t` of the result is the tap vector at time `t`.
///
/// The whole block is validated before any sample is processed, so an
/// error leaves the state untouched.
pub fn process_block(design: &CascadeDesign, state: &mut CascadeState, samples: &[f64]) -> Result<TapMatrix> {
    state.check(design)?;
    if let Some(&bad) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let n = design.n_sections();
    let mut out = vec![0.0; n * samples.len()];
    if n > 0 {
        for (&x, row) in samples.iter().zip(out.chunks_exact_mut(n)) {
            run_sections(&design.sections, &mut state.sections, x, row);
        }
    }
    state.samples_processed += samples.len() as u64;
    Ok(TapMatrix::from_rows(n, out))
}
