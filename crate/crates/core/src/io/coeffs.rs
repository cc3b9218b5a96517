//! Coefficient tables.
//!
//! The float table has header `section,x,cf_hz,theta_r,r,a0,c0,h,g` with
//! one row per section, base first. The quantized table has header
//! `section,coeff_name,raw_int,total_bits,frac_bits`; its raw integers are
//! the interchange values.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::design::{CascadeDesign, ChannelCoeffs};
use crate::fixed::{FixedFormat, FixedSection, QuantizedDesign};
use crate::{Error, Result};

pub const COEFF_HEADER: &str = "section,x,cf_hz,theta_r,r,a0,c0,h,g";
pub const QUANTIZED_HEADER: &str = "section,coeff_name,raw_int,total_bits,frac_bits";

fn sci(v: f64) -> String {
    // 17 significant digits round-trips every f64
    format!("{v:.16e}")
}

pub fn write_coefficients(design: &CascadeDesign) -> String {
    let mut out = String::with_capacity(200 * (design.n_sections() + 1));
    out.push_str(COEFF_HEADER);
    out.push('\n');
    for (i, s) in design.sections.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{},{}",
            sci(s.x),
            sci(s.cf_hz),
            sci(s.theta_r),
            sci(s.r),
            sci(s.a0),
            sci(s.c0),
            sci(s.h),
            sci(s.g)
        );
    }
    out
}

fn line_error(line_no: usize, message: impl Into<String>) -> Error {
    Error::Config(format!("line {line_no}: {}", message.into()))
}

/// Parses a float coefficient table.
///
/// The table carries no sample rate column; when `sample_rate_hz` is
/// `None` it is recovered from `2π·cf_hz / theta_r` and must agree across
/// all rows to 1e-9 relative.
pub fn read_coefficients(text: &str, sample_rate_hz: Option<f64>) -> Result<CascadeDesign> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, header)) if header.trim_end() == COEFF_HEADER => {}
        Some((n, header)) => return Err(line_error(n, format!("unexpected header {header:?}"))),
        None => return Err(line_error(1, "empty coefficient table")),
    }
    let mut sections = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 9 {
            return Err(line_error(n, format!("expected 9 fields, found {}", fields.len())));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|e| line_error(n, format!("section {:?}: {e}", fields[0])))?;
        if index != sections.len() {
            return Err(line_error(n, format!("section {index} out of order, expected {}", sections.len())));
        }
        let mut v = [0.0f64; 8];
        for (slot, f) in v.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|e| line_error(n, format!("{f:?}: {e}")))?;
        }
        let [x, cf_hz, theta_r, r, a0, c0, h, g] = v;
        for (name, value) in [("theta_r", theta_r), ("r", r), ("a0", a0), ("c0", c0), ("h", h), ("g", g)] {
            if !value.is_finite() {
                return Err(line_error(n, format!("{name} = {value} is not finite")));
            }
        }
        sections.push(ChannelCoeffs {
            section_index: index,
            x,
            cf_hz,
            theta_r,
            r,
            a0,
            c0,
            h,
            g,
        });
    }
    if sections.is_empty() {
        return Err(Error::Config("coefficient table has no sections".into()));
    }
    let fs = match sample_rate_hz {
        Some(fs) => fs,
        None => {
            let derived: Vec<f64> = sections
                .iter()
                .filter(|s| s.theta_r > 0.0 && s.cf_hz.is_finite())
                .map(|s| 2.0 * PI * s.cf_hz / s.theta_r)
                .collect();
            let first = *derived.first().ok_or_else(|| {
                Error::Config("cannot recover the sample rate from the coefficient table".into())
            })?;
            if let Some(bad) = derived.iter().find(|&&f| ((f - first) / first).abs() > 1e-9) {
                return Err(Error::Config(format!(
                    "rows imply different sample rates ({first} Hz vs {bad} Hz)"
                )));
            }
            // designs use whole-Hz rates; snap away the trig round-off
            if (first - first.round()).abs() < 1e-6 {
                first.round()
            } else {
                first
            }
        }
    };
    Ok(CascadeDesign::new(fs, sections))
}

pub fn write_quantized(qdesign: &QuantizedDesign) -> String {
    let f = qdesign.formats().coeff;
    let mut out = String::from(QUANTIZED_HEADER);
    out.push('\n');
    for (i, s) in qdesign.sections().iter().enumerate() {
        for (name, raw) in FixedSection::NAMES.iter().zip(s.raws()) {
            let _ = writeln!(out, "{i},{name},{raw},{},{}", f.total_bits(), f.frac_bits());
        }
    }
    out
}

/// Parses a quantized table into per-section codes and their common format.
pub fn read_quantized(text: &str) -> Result<(Vec<FixedSection>, FixedFormat)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, header)) if header.trim_end() == QUANTIZED_HEADER => {}
        Some((n, header)) => return Err(line_error(n, format!("unexpected header {header:?}"))),
        None => return Err(line_error(1, "empty quantized table")),
    }
    let mut format: Option<FixedFormat> = None;
    let mut partial: Vec<[Option<i64>; 4]> = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 5 {
            return Err(line_error(n, format!("expected 5 fields, found {}", fields.len())));
        }
        let parse_int = |s: &str| -> Result<i64> {
            s.parse().map_err(|e| line_error(n, format!("{s:?}: {e}")))
        };
        let section = parse_int(fields[0])? as usize;
        let slot = FixedSection::NAMES
            .iter()
            .position(|&name| name == fields[1])
            .ok_or_else(|| line_error(n, format!("unknown coefficient {:?}", fields[1])))?;
        let raw = parse_int(fields[2])?;
        let fmt = FixedFormat::new(parse_int(fields[3])? as u32, parse_int(fields[4])? as u32)?;
        match format {
            None => format = Some(fmt),
            Some(f) if f != fmt => {
                return Err(line_error(n, format!("format {fmt} differs from {f} used earlier")))
            }
            Some(_) => {}
        }
        if !fmt.contains_raw(raw) {
            return Err(line_error(n, format!("code {raw} does not fit {fmt}")));
        }
        if section >= partial.len() {
            partial.resize(section + 1, [None; 4]);
        }
        if partial[section][slot].replace(raw).is_some() {
            return Err(line_error(n, format!("duplicate {} for section {section}", fields[1])));
        }
    }
    let format = format.ok_or_else(|| Error::Config("quantized table has no rows".into()))?;
    let sections = partial
        .into_iter()
        .enumerate()
        .map(|(i, slots)| match slots {
            [Some(a), Some(c), Some(g), Some(h)] => Ok(FixedSection { a, c, g, h }),
            _ => Err(Error::Config(format!("section {i} is missing coefficients"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sections, format))
}
