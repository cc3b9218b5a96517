use crate::cascade::{process_sample_into, CascadeState};
use crate::design::CascadeDesign;
use crate::fixed::{
    fixed_process_sample, quantize_checked, FixedCascadeState, QuantizedDesign, SaturationStats,
};
use crate::Result;

/// Anything that turns one input sample into a vector of tap outputs.
pub trait TapSystem {
    fn n_taps(&self) -> usize;

    /// Returns the system to its zero initial state.
    fn reset(&mut self);

    fn process(&mut self, x: f64, taps: &mut [f64]) -> Result<()>;
}

/// Float reference cascade as a [`TapSystem`].
#[derive(Debug, Clone)]
pub struct FloatCascade<'a> {
    design: &'a CascadeDesign,
    state: CascadeState,
}

impl<'a> FloatCascade<'a> {
    pub fn new(design: &'a CascadeDesign) -> Self {
        Self {
            design,
            state: CascadeState::for_design(design),
        }
    }
}

impl TapSystem for FloatCascade<'_> {
    fn n_taps(&self) -> usize {
        self.design.n_sections()
    }

    fn reset(&mut self) {
        self.state.reset();
    }

    fn process(&mut self, x: f64, taps: &mut [f64]) -> Result<()> {
        process_sample_into(self.design, &mut self.state, x, taps)
    }
}

/// Quantized cascade as a [`TapSystem`]: real input is quantized to the
/// io format at the entrance and tap codes are converted back to reals.
#[derive(Debug, Clone)]
pub struct FixedCascade<'a> {
    qdesign: &'a QuantizedDesign,
    state: FixedCascadeState,
    raw: Vec<i64>,
    stats: SaturationStats,
}

impl<'a> FixedCascade<'a> {
    pub fn new(qdesign: &'a QuantizedDesign) -> Self {
        let n = qdesign.n_sections();
        Self {
            qdesign,
            state: FixedCascadeState::new(n),
            raw: vec![0; n],
            stats: SaturationStats::new(n),
        }
    }

    /// Overflow events since construction (not cleared by `reset`).
    pub fn stats(&self) -> &SaturationStats {
        &self.stats
    }
}

impl TapSystem for FixedCascade<'_> {
    fn n_taps(&self) -> usize {
        self.qdesign.n_sections()
    }

    fn reset(&mut self) {
        self.state.reset();
    }

    fn process(&mut self, x: f64, taps: &mut [f64]) -> Result<()> {
        let formats = self.qdesign.formats();
        let (code, overflowed) = quantize_checked(x, formats.io)?;
        self.stats.input += overflowed as u64;
        fixed_process_sample(self.qdesign, &mut self.state, code.raw, &mut self.raw, &mut self.stats)?;
        let lsb = formats.state.lsb();
        for (y, &r) in taps.iter_mut().zip(&self.raw) {
            *y = r as f64 * lsb;
        }
        Ok(())
    }
}
