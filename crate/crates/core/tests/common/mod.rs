//! Oracles shared by the integration tests.
#![allow(dead_code)]

use cochlea_car::design::{transfer_function, RationalTF};
use cochlea_car::ChannelCoeffs;
use num_complex::Complex64;
use rand::Rng;

/// Impulse response of a rational transfer function by long division in z⁻¹.
pub fn long_division(tf: &RationalTF, n: usize) -> Vec<f64> {
    let num = [tf.b0, tf.b1, tf.b2];
    let mut h = vec![0.0; n];
    for k in 0..n {
        let mut v = if k < 3 { num[k] / tf.a0_den } else { 0.0 };
        if k >= 1 {
            v -= tf.a1_den / tf.a0_den * h[k - 1];
        }
        if k >= 2 {
            v -= tf.a2_den / tf.a0_den * h[k - 2];
        }
        h[k] = v;
    }
    h
}

/// Both roots of `a·z² + b·z + c`.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = Complex64::new(b * b - 4.0 * a * c, 0.0).sqrt();
    [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)]
}

pub fn denominator_roots(c: &ChannelCoeffs) -> [Complex64; 2] {
    let tf = transfer_function(c);
    quadratic_roots(tf.a0_den, tf.a1_den, tf.a2_den)
}

pub fn numerator_roots(c: &ChannelCoeffs) -> [Complex64; 2] {
    let tf = transfer_function(c);
    quadratic_roots(tf.b0, tf.b1, tf.b2)
}

pub fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sum / a.len() as f64).sqrt()
}

pub fn rms(a: &[f64]) -> f64 {
    (a.iter().map(|x| x * x).sum::<f64>() / a.len() as f64).sqrt()
}

/// A random stable section with complex zeros.
pub fn random_section(rng: &mut impl Rng, index: usize) -> ChannelCoeffs {
    let theta = rng.gen_range(0.01..3.1);
    let r = rng.gen_range(0.5..0.999);
    let probe = ChannelCoeffs::from_pole(index, theta, r, 0.0, 48000.0).unwrap();
    let h = rng.gen_range(0.0..0.95) * probe.zero_bound();
    ChannelCoeffs::from_pole(index, theta, r, h, 48000.0).unwrap()
}

/// Samples to discard before measuring a steady state: the larger of
/// `max(8/θ, 512)` and 16 decay time constants of the slowest pole.
pub fn settle_samples(sections: &[ChannelCoeffs]) -> usize {
    sections
        .iter()
        .map(|c| {
            let conventional = (8.0 / c.theta_r).max(512.0);
            let decay = if c.r < 1.0 { 16.0 / -c.r.ln() } else { f64::INFINITY };
            conventional.max(decay).ceil() as usize
        })
        .max()
        .unwrap_or(512)
}
