//! Coefficient design for the resonator cascade.
//!
//! Each section is a two-pole two-zero filter
//!
//! ```text
//! Y/X = g · (z² + (−2·a0 + h·c0)·r·z + r²) / (z² − 2·a0·r·z + r²)
//! ```
//!
//! with `a0 = cos θ`, `c0 = sin θ` and θ the pole angle of the section's
//! characteristic frequency. Sections are ordered base first, i.e. from
//! the highest characteristic frequency down to the lowest.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Coefficients of the human place-frequency map `f = A·(10^(a·x) − 1)`.
const GREENWOOD_A_HZ: f64 = 165.4;
const GREENWOOD_SLOPE: f64 = 2.1;

/// Place-to-frequency map of the human cochlea. `x` runs from 0 at the
/// apex to 1 at the base.
pub fn greenwood_cf(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("place coordinate {x} outside [0, 1]")));
    }
    Ok(GREENWOOD_A_HZ * (10f64.powf(GREENWOOD_SLOPE * x) - 1.0))
}

/// Equally spaced place coordinates from `x_base` down to `x_apex`.
pub fn place_positions(n_sections: usize, x_base: f64, x_apex: f64) -> Result<Vec<f64>> {
    if n_sections == 0 {
        return Err(Error::Domain("cascade needs at least one section".into()));
    }
    if !(x_apex < x_base) {
        return Err(Error::Domain(format!(
            "apex coordinate {x_apex} must lie below base coordinate {x_base}"
        )));
    }
    if n_sections == 1 {
        return Ok(vec![x_base]);
    }
    let step = (x_base - x_apex) / (n_sections - 1) as f64;
    let mut xs: Vec<f64> = (0..n_sections).map(|i| x_base - step * i as f64).collect();
    // pin the endpoint exactly
    xs[n_sections - 1] = x_apex;
    Ok(xs)
}

/// Pole angle in radians per sample for a resonance at `cf_hz`.
pub fn pole_angle(cf_hz: f64, sample_rate_hz: f64) -> Result<f64> {
    if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
        return Err(Error::Domain(format!("sample rate {sample_rate_hz} Hz must be positive")));
    }
    let nyquist = 0.5 * sample_rate_hz;
    if !(cf_hz > 0.0) {
        return Err(Error::Domain(format!("characteristic frequency {cf_hz} Hz must be positive")));
    }
    if cf_hz >= nyquist {
        return Err(Error::Domain(format!(
            "characteristic frequency {cf_hz} Hz is at or above Nyquist ({nyquist} Hz)"
        )));
    }
    Ok(2.0 * PI * cf_hz / sample_rate_hz)
}

/// `(a0, c0) = (cos θ, sin θ)`.
pub fn rotator_coeffs(theta_r: f64) -> Result<(f64, f64)> {
    if !(theta_r > 0.0 && theta_r < PI) {
        return Err(Error::Domain(format!("pole angle {theta_r} outside (0, π)")));
    }
    Ok((theta_r.cos(), theta_r.sin()))
}

/// How the zero coefficient `h` is chosen for each section.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum HPolicy {
    /// `h = c0`, which places the zeros roughly half an octave above the
    /// poles for low-frequency sections.
    #[default]
    ProportionalToC0,
    /// The same `h` for every section.
    Explicit(f64),
    /// A fraction in `[0, 1)` of the complex-zero bound `(2 + 2·a0)/c0`.
    FractionOfBound(f64),
}

/// Upper bound on `h` below which the numerator roots stay complex.
pub fn complex_zero_bound(a0: f64, c0: f64) -> f64 {
    (2.0 + 2.0 * a0) / c0
}

/// Zero coefficient for one section. The result always satisfies the
/// complex-zero bound; an explicit `h` at or above it is rejected.
pub fn zero_coeff(a0: f64, c0: f64, policy: HPolicy) -> Result<f64> {
    if !(c0 > 0.0) {
        return Err(Error::Domain(format!("c0 = {c0} must be positive")));
    }
    let bound = complex_zero_bound(a0, c0);
    let h = match policy {
        HPolicy::ProportionalToC0 => c0,
        HPolicy::Explicit(h) => h,
        HPolicy::FractionOfBound(fraction) => {
            if !(0.0..1.0).contains(&fraction) {
                return Err(Error::Validation(format!(
                    "fraction of complex-zero bound {fraction} outside [0, 1)"
                )));
            }
            fraction * bound
        }
    };
    if !h.is_finite() || h >= bound {
        return Err(Error::Validation(format!(
            "h = {h} violates complex-zero bound h < {bound}"
        )));
    }
    Ok(h)
}

/// Gain that makes the section's response exactly 1 at DC.
pub fn dc_gain_coeff(a0: f64, c0: f64, h: f64, r: f64) -> Result<f64> {
    let num = 1.0 - 2.0 * a0 * r + r * r;
    let den = 1.0 - (2.0 * a0 - h * c0) * r + r * r;
    if den.abs() < f64::EPSILON {
        return Err(Error::Degenerate(format!(
            "DC gain denominator vanishes (a0 = {a0}, c0 = {c0}, h = {h}, r = {r})"
        )));
    }
    Ok(num / den)
}

/// Pole radius selection.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusPolicy {
    /// `r = 1 − damping_zeta·θ` per section.
    Damped,
    /// The same radius for every section.
    Global(f64),
    /// One radius per section, base first.
    PerSection(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignParams {
    pub sample_rate_hz: f64,
    pub n_sections: usize,
    pub x_base: f64,
    pub x_apex: f64,
    pub damping_zeta: f64,
    pub h_policy: HPolicy,
    pub radius: RadiusPolicy,
}

impl DesignParams {
    pub fn new(sample_rate_hz: f64, n_sections: usize) -> Self {
        Self {
            sample_rate_hz,
            n_sections,
            x_base: 1.0,
            x_apex: 0.023,
            damping_zeta: 0.1,
            h_policy: HPolicy::default(),
            radius: RadiusPolicy::Damped,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(Error::Domain(format!(
                "sample rate {} Hz must be positive",
                self.sample_rate_hz
            )));
        }
        if self.n_sections == 0 {
            return Err(Error::Domain("cascade needs at least one section".into()));
        }
        if !(0.0 <= self.x_apex && self.x_apex < self.x_base && self.x_base <= 1.0) {
            return Err(Error::Domain(format!(
                "place range requires 0 <= x_apex < x_base <= 1, got [{}, {}]",
                self.x_apex, self.x_base
            )));
        }
        if !(self.damping_zeta >= 0.0 && self.damping_zeta.is_finite()) {
            return Err(Error::Domain(format!(
                "damping {} must be non-negative",
                self.damping_zeta
            )));
        }
        if let RadiusPolicy::PerSection(radii) = &self.radius {
            if radii.len() != self.n_sections {
                return Err(Error::Config(format!(
                    "{} per-section radii given for {} sections",
                    radii.len(),
                    self.n_sections
                )));
            }
        }
        Ok(())
    }

    fn radius_for(&self, section: usize, theta_r: f64) -> f64 {
        match &self.radius {
            RadiusPolicy::Damped => 1.0 - self.damping_zeta * theta_r,
            RadiusPolicy::Global(r) => *r,
            RadiusPolicy::PerSection(radii) => radii[section],
        }
    }
}

/// Parameters of one cascade section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCoeffs {
    pub section_index: usize,
    /// Place coordinate the section was designed from.
    pub x: f64,
    pub cf_hz: f64,
    pub theta_r: f64,
    pub r: f64,
    pub a0: f64,
    pub c0: f64,
    pub h: f64,
    pub g: f64,
}

impl ChannelCoeffs {
    /// Builds a section directly from its pole angle, radius and `h`,
    /// solving `g` for unity DC gain.
    pub fn from_pole(
        section_index: usize,
        theta_r: f64,
        r: f64,
        h: f64,
        sample_rate_hz: f64,
    ) -> Result<Self> {
        let (a0, c0) = rotator_coeffs(theta_r)?;
        check_radius(r)?;
        let g = dc_gain_coeff(a0, c0, h, r)?;
        Ok(Self {
            section_index,
            x: f64::NAN,
            cf_hz: theta_r * sample_rate_hz / (2.0 * PI),
            theta_r,
            r,
            a0,
            c0,
            h,
            g,
        })
    }

    /// Pass-through section (`r = 0`, `h = 0`, `g = 1`): its output equals its input.
    pub fn identity(section_index: usize, theta_r: f64) -> Self {
        Self {
            section_index,
            x: f64::NAN,
            cf_hz: f64::NAN,
            theta_r,
            r: 0.0,
            a0: theta_r.cos(),
            c0: theta_r.sin(),
            h: 0.0,
            g: 1.0,
        }
    }

    pub fn zero_bound(&self) -> f64 {
        complex_zero_bound(self.a0, self.c0)
    }

    /// Complex response of this section at `omega` radians per sample.
    pub fn response_at(&self, omega: f64) -> Complex64 {
        transfer_function(self).eval(Complex64::from_polar(1.0, omega))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("pole radius {r} outside (0, 1]")))
    }
}

/// A designed cascade: sections base first plus the sample rate they were designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeDesign {
    pub sample_rate_hz: f64,
    pub sections: Vec<ChannelCoeffs>,
}

impl CascadeDesign {
    pub fn new(sample_rate_hz: f64, sections: Vec<ChannelCoeffs>) -> Self {
        Self {
            sample_rate_hz,
            sections,
        }
    }

    pub fn n_sections(&self) -> usize {
        self.sections.len()
    }

    /// `n` tap indices spread evenly from the first to the last section.
    pub fn evenly_spaced_taps(&self, n: usize) -> Vec<usize> {
        evenly_spaced(self.sections.len(), n)
    }
}

pub(crate) fn evenly_spaced(len: usize, n: usize) -> Vec<usize> {
    if len == 0 || n == 0 {
        return Vec::new();
    }
    if n >= len {
        return (0..len).collect();
    }
    if n == 1 {
        return vec![0];
    }
    let mut taps: Vec<usize> = (0..n)
        .map(|i| ((i * (len - 1)) as f64 / (n - 1) as f64).round() as usize)
        .collect();
    taps.dedup();
    taps
}

/// Designs every section from equally spaced cochlear places.
pub fn design_cascade(params: &DesignParams) -> Result<CascadeDesign> {
    params.validate()?;
    let positions = place_positions(params.n_sections, params.x_base, params.x_apex)?;
    let sections = positions
        .iter()
        .enumerate()
        .map(|(i, &x)| design_section(params, i, x).map_err(|e| e.in_section(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CascadeDesign::new(params.sample_rate_hz, sections))
}

fn design_section(params: &DesignParams, section_index: usize, x: f64) -> Result<ChannelCoeffs> {
    let cf_hz = greenwood_cf(x)?;
    let theta_r = pole_angle(cf_hz, params.sample_rate_hz)?;
    let (a0, c0) = rotator_coeffs(theta_r)?;
    let r = params.radius_for(section_index, theta_r);
    check_radius(r)?;
    let h = zero_coeff(a0, c0, params.h_policy)?;
    let g = dc_gain_coeff(a0, c0, h, r)?;
    Ok(ChannelCoeffs {
        section_index,
        x,
        cf_hz,
        theta_r,
        r,
        a0,
        c0,
        h,
        g,
    })
}

/// `(b0·z² + b1·z + b2) / (a0_den·z² + a1_den·z + a2_den)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalTF {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a0_den: f64,
    pub a1_den: f64,
    pub a2_den: f64,
}

impl RationalTF {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let num = (z * self.b0 + self.b1) * z + self.b2;
        let den = (z * self.a0_den + self.a1_den) * z + self.a2_den;
        num / den
    }
}

pub fn transfer_function(coeffs: &ChannelCoeffs) -> RationalTF {
    let ChannelCoeffs { r, a0, c0, h, g, .. } = *coeffs;
    RationalTF {
        b0: g,
        b1: g * (-2.0 * a0 + h * c0) * r,
        b2: g * r * r,
        a0_den: 1.0,
        a1_den: -2.0 * a0 * r,
        a2_den: r * r,
    }
}

/// A root in polar form; `angle` is in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarRoot {
    pub radius: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolesZeros {
    pub poles: [PolarRoot; 2],
    pub zeros: [PolarRoot; 2],
    pub zeros_complex: bool,
}

/// Poles and zeros of one section, read off the coefficient structure.
///
/// The poles sit at `r·e^{±jθ}`. The zeros are the roots of
/// `z² + (−2·a0 + h·c0)·r·z + r²`; they form a conjugate pair at radius `r`
/// while `|2·a0 − h·c0| < 2` and turn real otherwise.
pub fn poles_zeros(coeffs: &ChannelCoeffs) -> PolesZeros {
    let ChannelCoeffs { r, theta_r, a0, c0, h, .. } = *coeffs;
    let poles = [
        PolarRoot { radius: r, angle: theta_r },
        PolarRoot { radius: r, angle: -theta_r },
    ];
    // z² − 2·β·r·z + r² with β = a0 − h·c0/2
    let beta = a0 - 0.5 * h * c0;
    let (zeros, zeros_complex) = if beta.abs() < 1.0 {
        let phi = beta.acos();
        (
            [
                PolarRoot { radius: r, angle: phi },
                PolarRoot { radius: r, angle: -phi },
            ],
            true,
        )
    } else {
        let disc = (beta * beta - 1.0).sqrt();
        let real_root = |z: f64| PolarRoot {
            radius: z.abs(),
            angle: if z < 0.0 { PI } else { 0.0 },
        };
        (
            [real_root(r * (beta + disc)), real_root(r * (beta - disc))],
            false,
        )
    };
    PolesZeros {
        poles,
        zeros,
        zeros_complex,
    }
}
