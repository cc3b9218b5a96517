//! File formats: cross-format equality and round trips.

use cochlea_car::design::design_cascade;
use cochlea_car::io::wav::decode_wav;
use cochlea_car::io::{
    encode_wav, read_cochleagram_binary, read_cochleagram_csv, read_coefficients, read_wav,
    write_cochleagram, write_coefficients, CochleagramFormat, Mode, RunConfig,
};
use cochlea_car::{DesignParams, Error, TapMatrix};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = TapMatrix> {
    (1usize..6, 0usize..20).prop_flat_map(|(taps, rows)| {
        prop::collection::vec(
            prop_oneof![-1e6f64..1e6, -1e-12f64..1e-12, Just(0.0), Just(-0.0)],
            taps * rows,
        )
        .prop_map(move |data| TapMatrix::from_rows(taps, data))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_and_binary_encode_the_same_matrix(m in matrix(), fs in 8000.0f64..192000.0) {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("c.csv");
        let bin = dir.path().join("c.carc");
        write_cochleagram(&m, fs, &csv, CochleagramFormat::Csv).unwrap();
        write_cochleagram(&m, fs, &bin, CochleagramFormat::Binary).unwrap();
        let from_csv = read_cochleagram_csv(&csv).unwrap();
        let (from_bin, rate) = read_cochleagram_binary(&bin).unwrap();
        prop_assert_eq!(rate.to_bits(), fs.to_bits());
        prop_assert_eq!(from_csv.n_taps(), m.n_taps());
        let bits = |t: &TapMatrix| t.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&from_bin), bits(&m));
        prop_assert_eq!(from_csv.as_slice(), m.as_slice());
    }

    #[test]
    fn pcm24_round_trips(codes in prop::collection::vec(-(1i32 << 23)..(1 << 23), 0..200)) {
        let audio = decode_wav(&encode_wav(44100, 24, &codes).unwrap()).unwrap();
        prop_assert_eq!(audio.sample_rate_hz, 44100);
        for (&c, &s) in codes.iter().zip(&audio.samples) {
            prop_assert_eq!(s, c as f64 / (1 << 23) as f64);
        }
    }
}

#[test]
fn coefficient_table_round_trips() {
    let design = design_cascade(&DesignParams::new(48000.0, 1224)).unwrap();
    let text = write_coefficients(&design);
    assert_eq!(text.lines().count(), 1225);
    let back = read_coefficients(&text, None).unwrap();
    assert_eq!(back.sample_rate_hz, 48000.0);
    for (a, b) in design.sections.iter().zip(&back.sections) {
        assert_eq!(a, b);
    }
}

#[test]
fn wav_file_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.wav");
    std::fs::write(&path, encode_wav(48000, 16, &[0]).unwrap()).unwrap();
    let audio = read_wav(&path).unwrap();
    assert_eq!(audio.samples, vec![0.0]);
    assert!(matches!(read_wav(dir.path().join("missing.wav")), Err(Error::Io(_))));
}

#[test]
fn stereo_is_rejected_by_field() {
    let mut bytes = encode_wav(48000, 16, &[0, 0]).unwrap();
    bytes[22] = 2; // num_channels
    match decode_wav(&bytes) {
        Err(Error::UnsupportedFormat { field, .. }) => assert_eq!(field, "num_channels"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn config_file_drives_run_settings() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("in.wav");
    std::fs::write(&wav, encode_wav(48000, 16, &[1, 2, 3]).unwrap()).unwrap();
    let text = format!(
        "# fixed run\nmode = fixed\nn_sections = 64\ninput = {}\noutput = out.csv\nstate_frac = 20\n",
        wav.display()
    );
    let config = RunConfig::from_text(&text).unwrap();
    assert_eq!(config.mode, Mode::Fixed);
    assert_eq!(config.design.n_sections, 64);
    assert_eq!(config.formats.state.frac_bits(), 20);
    config.validate().unwrap();
}
