//! Float cascade against analytic oracles.

mod common;

use cochlea_car::analysis::frequency_response_analytic;
use cochlea_car::cascade::{process_block, step_section, CascadeState, SectionState};
use cochlea_car::design::{design_cascade, transfer_function};
use cochlea_car::{ChannelCoeffs, DesignParams};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn section_impulse(c: &ChannelCoeffs, n: usize) -> Vec<f64> {
    let mut s = SectionState::default();
    (0..n)
        .map(|k| step_section(c, &mut s, if k == 0 { 1.0 } else { 0.0 }).unwrap())
        .collect()
}

#[test]
fn fifty_random_sections_match_long_division() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..50 {
        let c = random_section(&mut rng, i);
        let got = section_impulse(&c, 2048);
        let want = long_division(&transfer_function(&c), 2048);
        let err = rms_diff(&got, &want);
        assert!(err <= 1e-10, "section {i}: rms {err:e}");
    }
}

#[test]
fn damped_sections_decay() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..50 {
        let c = random_section(&mut rng, i);
        let c = ChannelCoeffs::from_pole(i, c.theta_r, c.r.min(0.99), 0.5 * c.zero_bound(), 48000.0).unwrap();
        let h = section_impulse(&c, 2048);
        // h[n] = A·rⁿ·cos(nθ + φ) for n ≥ 1, so the envelope ratio never grows
        let envelope = |range: std::ops::Range<usize>| {
            range.clone().zip(&h[range]).fold(0.0f64, |m, (n, v)| m.max(v.abs() / c.r.powi(n as i32)))
        };
        let amp = envelope(1..1024);
        for (n, v) in h.iter().enumerate().skip(1024) {
            assert!(v.abs() <= amp * c.r.powi(n as i32) * (1.0 + 1e-9) + 1e-14, "section {i}, n {n}");
        }
        // A grows like 1/θ and 0.99^1024 is only 3e-5, so the absolute
        // bound needs some margin on both
        if c.theta_r >= 0.1 && c.r <= 0.98 {
            let tail = h[1024..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(tail < 1e-6, "section {i}: tail {tail:e}");
        }
    }
}

/// DTFT of a finite sequence at `omega`.
fn dtft(h: &[f64], omega: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, -omega);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for &v in h {
        acc += z * v;
        z *= step;
    }
    acc
}

#[test]
fn taps_compose_section_responses() {
    let design = design_cascade(&DesignParams::new(48000.0, 20)).unwrap();
    let n = 1 << 17;
    let mut impulse = vec![0.0; n];
    impulse[0] = 1.0;
    let taps = process_block(&design, &mut CascadeState::for_design(&design), &impulse).unwrap();
    let probes: Vec<f64> = (0..32).map(|i| 20.0 * 1000f64.powf(i as f64 / 31.0)).collect();
    for k in 0..design.n_sections() {
        let h = taps.column(k);
        for &f in &probes {
            let omega = 2.0 * PI * f / 48000.0;
            let analytic: Complex64 = design.sections[..=k].iter().map(|c| c.response_at(omega)).product();
            let measured = dtft(&h, omega);
            let diff = 20.0 * (measured.norm() / analytic.norm()).log10();
            assert!(diff.abs() < 0.1, "tap {k} at {f:.1} Hz: {diff:.3} dB");
        }
    }
}

#[test]
fn sine_rms_matches_analytic_gain() {
    let design = design_cascade(&DesignParams::new(48000.0, 20)).unwrap();
    let settle = settle_samples(&design.sections);
    let n = settle + 480;
    let x: Vec<f64> = (0..n).map(|t| (2.0 * PI * 1000.0 * t as f64 / 48000.0).sin()).collect();
    let taps = process_block(&design, &mut CascadeState::for_design(&design), &x).unwrap();
    let channels: Vec<usize> = (0..20).collect();
    let gains = frequency_response_analytic(&design, &channels, &[1000.0]).unwrap();
    for k in channels {
        let measured = rms(&taps.column(k)[settle..]);
        let expected = gains[k][0].norm() / 2f64.sqrt();
        assert!((measured / expected - 1.0).abs() < 0.01, "tap {k}: {measured} vs {expected}");
    }
}

#[test]
fn dc_input_converges_on_every_tap() {
    let design = design_cascade(&DesignParams::new(48000.0, 30)).unwrap();
    let n = settle_samples(&design.sections) + 1;
    let taps = process_block(&design, &mut CascadeState::for_design(&design), &vec![1.0; n]).unwrap();
    for &y in taps.row(n - 1) {
        assert!((y - 1.0).abs() < 1e-6, "{y}");
    }
}

fn signal(seed: u64, n: usize) -> Vec<f64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cascade_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, s1 in any::<u64>(), s2 in any::<u64>()) {
        let design = design_cascade(&DesignParams::new(48000.0, 12)).unwrap();
        let (x1, x2) = (signal(s1, 400), signal(s2, 400));
        let mix: Vec<f64> = x1.iter().zip(&x2).map(|(u, v)| a * u + b * v).collect();
        let run = |x: &[f64]| process_block(&design, &mut CascadeState::for_design(&design), x).unwrap();
        let (y1, y2, ym) = (run(&x1), run(&x2), run(&mix));
        let scale = ym.as_slice().iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        for ((p, q), m) in y1.as_slice().iter().zip(y2.as_slice()).zip(ym.as_slice()) {
            prop_assert!((a * p + b * q - m).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn cascade_is_deterministic(seed in any::<u64>(), n in 1usize..40) {
        let design = design_cascade(&DesignParams::new(48000.0, n)).unwrap();
        let x = signal(seed, 300);
        let run = || process_block(&design, &mut CascadeState::for_design(&design), &x).unwrap();
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn random_sections_match_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_section(&mut rng, 0);
        let err = rms_diff(&section_impulse(&c, 2048), &long_division(&transfer_function(&c), 2048));
        prop_assert!(err <= 1e-10);
    }
}
