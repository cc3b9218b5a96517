//! `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys:
//!
//! | key | value |
//! |-----|-------|
//! | `sample_rate_hz`, `n_sections`, `x_base`, `x_apex`, `damping_zeta` | design parameters |
//! | `h_policy` | `c0`, `explicit:<h>` or `fraction:<f>` |
//! | `r` | global pole radius (overrides `damping_zeta`) |
//! | `mode` | `float`, `fixed` or `pipeline` |
//! | `io_bits`, `io_frac`, `state_bits`, `state_frac`, `coeff_bits`, `coeff_frac` | fixed formats |
//! | `rounding` | `nearest_even` or `truncate` (io and state formats) |
//! | `overflow` | `saturate` or `wrap` (io and state formats) |
//! | `clock_hz`, `cycles_per_section`, `max_arrays` | hardware parameters |
//! | `input`, `output`, `coefficients` | paths |

use std::path::PathBuf;
use std::str::FromStr;

use crate::design::{DesignParams, HPolicy, RadiusPolicy};
use crate::fixed::{FixedFormat, FixedFormats, Overflow, Rounding};
use crate::schedule::HardwareParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Float,
    Fixed,
    Pipeline,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "fixed" => Ok(Mode::Fixed),
            "pipeline" => Ok(Mode::Pipeline),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

pub fn parse_h_policy(s: &str) -> Result<HPolicy> {
    let number = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("h policy value {v:?}: {e}")))
    };
    match s.split_once(':') {
        None if s == "c0" => Ok(HPolicy::ProportionalToC0),
        Some(("explicit", v)) => Ok(HPolicy::Explicit(number(v)?)),
        Some(("fraction", v)) => Ok(HPolicy::FractionOfBound(number(v)?)),
        _ => Err(Error::Config(format!(
            "unknown h policy {s:?} (expected c0, explicit:<h> or fraction:<f>)"
        ))),
    }
}

pub fn parse_rounding(s: &str) -> Result<Rounding> {
    match s {
        "nearest_even" => Ok(Rounding::NearestEven),
        "truncate" => Ok(Rounding::Truncate),
        other => Err(Error::Config(format!("unknown rounding {other:?}"))),
    }
}

pub fn parse_overflow(s: &str) -> Result<Overflow> {
    match s {
        "saturate" => Ok(Overflow::Saturate),
        "wrap" => Ok(Overflow::Wrap),
        other => Err(Error::Config(format!("unknown overflow policy {other:?}"))),
    }
}

/// Default section count: the full 1224-section cascade.
pub const DEFAULT_SECTIONS: usize = 1224;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub design: DesignParams,
    pub mode: Mode,
    pub formats: FixedFormats,
    pub hardware: HardwareParams,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub coefficients: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            design: DesignParams::new(48_000.0, DEFAULT_SECTIONS),
            mode: Mode::Float,
            formats: FixedFormats::default(),
            hardware: HardwareParams::default(),
            input: None,
            output: None,
            coefficients: None,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("{key} = {value:?}: {e}")))
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(text)?;
        Ok(config)
    }

    /// Applies every `key = value` line on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got {line:?}", i + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let formats = &mut self.formats;
        let resize = |f: &mut FixedFormat, total: Option<u32>, frac: Option<u32>| -> Result<()> {
            let next = FixedFormat::new(total.unwrap_or(f.total_bits()), frac.unwrap_or(f.frac_bits()))?
                .with_rounding(f.rounding())
                .with_overflow(f.overflow());
            *f = next;
            Ok(())
        };
        match key {
            "sample_rate_hz" => {
                let fs = num(key, value)?;
                self.design.sample_rate_hz = fs;
                self.hardware.sample_rate_hz = fs;
            }
            "n_sections" => self.design.n_sections = num(key, value)?,
            "x_base" => self.design.x_base = num(key, value)?,
            "x_apex" => self.design.x_apex = num(key, value)?,
            "damping_zeta" => self.design.damping_zeta = num(key, value)?,
            "h_policy" => self.design.h_policy = parse_h_policy(value)?,
            "r" => self.design.radius = RadiusPolicy::Global(num(key, value)?),
            "mode" => self.mode = value.parse()?,
            "io_bits" => resize(&mut formats.io, Some(num(key, value)?), None)?,
            "io_frac" => resize(&mut formats.io, None, Some(num(key, value)?))?,
            "state_bits" => resize(&mut formats.state, Some(num(key, value)?), None)?,
            "state_frac" => resize(&mut formats.state, None, Some(num(key, value)?))?,
            "coeff_bits" => resize(&mut formats.coeff, Some(num(key, value)?), None)?,
            "coeff_frac" => resize(&mut formats.coeff, None, Some(num(key, value)?))?,
            "rounding" => {
                let r = parse_rounding(value)?;
                formats.io = formats.io.with_rounding(r);
                formats.state = formats.state.with_rounding(r);
            }
            "overflow" => {
                let o = parse_overflow(value)?;
                formats.io = formats.io.with_overflow(o);
                formats.state = formats.state.with_overflow(o);
            }
            "clock_hz" => self.hardware.clock_hz = num(key, value)?,
            "cycles_per_section" => self.hardware.cycles_per_section = num(key, value)?,
            "max_arrays" => self.hardware.max_arrays = num(key, value)?,
            "input" => self.input = Some(PathBuf::from(value)),
            "output" => self.output = Some(PathBuf::from(value)),
            "coefficients" => self.coefficients = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Checks parameter invariants and that referenced input files exist.
    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        match self.mode {
            Mode::Float => {}
            Mode::Fixed => self.formats.validate()?,
            Mode::Pipeline => self.hardware.validate()?,
        }
        for path in [&self.input, &self.coefficients].into_iter().flatten() {
            if !path.exists() {
                return Err(Error::Config(format!("{} does not exist", path.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_sections() {
        let text = "\
# cascade
sample_rate_hz = 96000
n_sections = 20
h_policy = fraction:0.25
mode = fixed
state_bits = 40
state_frac = 30
rounding = truncate
clock_hz = 2e8
";
        let c = RunConfig::from_text(text).unwrap();
        assert_eq!(c.design.sample_rate_hz, 96000.0);
        assert_eq!(c.hardware.sample_rate_hz, 96000.0);
        assert_eq!(c.design.n_sections, 20);
        assert_eq!(c.design.h_policy, HPolicy::FractionOfBound(0.25));
        assert_eq!(c.mode, Mode::Fixed);
        assert_eq!((c.formats.state.total_bits(), c.formats.state.frac_bits()), (40, 30));
        assert_eq!(c.formats.state.rounding(), Rounding::Truncate);
        assert_eq!(c.formats.coeff.rounding(), Rounding::NearestEven);
        assert_eq!(c.hardware.clock_hz, 2e8);
        c.validate().unwrap();
    }

    #[test]
    fn reports_line_numbers() {
        let err = RunConfig::from_text("n_sections = 3\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(RunConfig::from_text("n_sections 3").is_err());
        assert!(RunConfig::from_text("mode = turbo").is_err());
        assert!(RunConfig::from_text("h_policy = explicit:abc").is_err());
    }

    #[test]
    fn missing_files_fail_validation() {
        let c = RunConfig::from_text("input = /definitely/not/here.wav").unwrap();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn h_policy_forms() {
        assert_eq!(parse_h_policy("c0").unwrap(), HPolicy::ProportionalToC0);
        assert_eq!(parse_h_policy("explicit:0.3").unwrap(), HPolicy::Explicit(0.3));
        assert!(parse_h_policy("half").is_err());
    }
}
