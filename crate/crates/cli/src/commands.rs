use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{debug, info, warn};

use cochlea_car::analysis::{
    frequency_response_measured, impulse_response, mls_generate, parity_report, FixedCascade,
    FloatCascade, IrMethod, MlsConfig, TapSystem,
};
use cochlea_car::cascade::{process_block, CascadeState};
use cochlea_car::design::design_cascade;
use cochlea_car::fixed::{
    fixed_process_block, quantize_design, quantize_signal, FixedBlock, FixedCascadeState,
};
use cochlea_car::io::{
    read_coefficients, read_wav, write_cochleagram, write_coefficients, write_quantized,
    CochleagramFormat, Mode, RunConfig,
};
use cochlea_car::schedule::{plan, simulate_pipeline};
use cochlea_car::{CascadeDesign, Error, TapMatrix};

use crate::args::*;

/// Applies `(key, value)` overrides on top of the loaded configuration.
fn apply(config: &mut RunConfig, overrides: Vec<(&str, Option<String>)>) -> Result<()> {
    for (key, value) in overrides {
        if let Some(value) = value {
            config
                .set(key, &value)
                .with_context(|| format!("flag for {key}"))?;
        }
    }
    Ok(())
}

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(T::to_string)
}

fn design_overrides(f: &DesignFlags) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("sample_rate_hz", s(&f.fs)),
        ("n_sections", s(&f.sections)),
        ("x_base", s(&f.x_base)),
        ("x_apex", s(&f.x_apex)),
        ("damping_zeta", s(&f.damping)),
        ("h_policy", f.h_policy.clone()),
        ("r", s(&f.r)),
    ]
}

fn format_overrides(f: &FormatFlags) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("io_bits", s(&f.io_bits)),
        ("io_frac", s(&f.io_frac)),
        ("state_bits", s(&f.state_bits)),
        ("state_frac", s(&f.state_frac)),
        ("coeff_bits", s(&f.coeff_bits)),
        ("coeff_frac", s(&f.coeff_frac)),
        ("rounding", f.rounding.clone()),
        ("overflow", f.overflow.clone()),
    ]
}

fn hardware_overrides(f: &HardwareFlags) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("clock_hz", s(&f.clock_hz)),
        ("cycles_per_section", s(&f.cycles_per_section)),
        ("max_arrays", s(&f.max_arrays)),
    ]
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(Error::from)
                .with_context(|| format!("reading config {}", path.display()))?;
            let config = RunConfig::from_text(&text)
                .with_context(|| format!("in config {}", path.display()))?;
            debug!("loaded config from {}", path.display());
            Ok(config)
        }
        None => Ok(RunConfig::default()),
    }
}

/// Coefficient file when one is given, otherwise a fresh design.
fn load_design(config: &RunConfig, coefficients: Option<&PathBuf>) -> Result<CascadeDesign> {
    match coefficients.or(config.coefficients.as_ref()) {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(Error::from)
                .with_context(|| format!("reading coefficients {}", path.display()))?;
            let design = read_coefficients(&text, None)
                .with_context(|| format!("in coefficients {}", path.display()))?;
            info!("loaded {} sections from {}", design.n_sections(), path.display());
            Ok(design)
        }
        None => {
            config.design.validate()?;
            let design = design_cascade(&config.design)?;
            info!("designed {} sections at {} Hz", design.n_sections(), design.sample_rate_hz);
            Ok(design)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(Error::from)
        .with_context(|| format!("writing {}", path.display()))
}

fn require(path: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    path.ok_or_else(|| Error::Config(format!("no {what} given (flag or config key)")).into())
}

/// Reads a WAV and checks it against the design rate.
fn read_input(path: &Path, design: &CascadeDesign) -> Result<Vec<f64>> {
    let audio = read_wav(path).with_context(|| format!("reading {}", path.display()))?;
    if audio.sample_rate_hz as f64 != design.sample_rate_hz {
        return Err(Error::Config(format!(
            "{} is sampled at {} Hz but the design runs at {} Hz (no resampling)",
            path.display(),
            audio.sample_rate_hz,
            design.sample_rate_hz
        ))
        .into());
    }
    info!("read {} samples from {}", audio.samples.len(), path.display());
    Ok(audio.samples)
}

fn run_fixed(config: &RunConfig, design: &CascadeDesign, samples: &[f64]) -> Result<FixedBlock> {
    config.formats.validate()?;
    let qdesign = quantize_design(design, config.formats)?;
    let (codes, input_overflows) = quantize_signal(samples, config.formats.io)?;
    let mut state = FixedCascadeState::for_design(&qdesign);
    let mut block = fixed_process_block(&qdesign, &mut state, &codes)?;
    block.stats.input = input_overflows;
    Ok(block)
}

fn run_float(design: &CascadeDesign, samples: &[f64]) -> Result<TapMatrix> {
    let mut state = CascadeState::for_design(design);
    Ok(process_block(design, &mut state, samples)?)
}

pub fn design(mut config: RunConfig, cmd: DesignCmd) -> Result<()> {
    apply(&mut config, design_overrides(&cmd.design))?;
    apply(&mut config, format_overrides(&cmd.formats))?;
    let design = load_design(&config, None)?;
    let table = write_coefficients(&design);
    match &cmd.output {
        Some(path) => write_file(path, &table)?,
        None => print!("{table}"),
    }
    if let Some(path) = &cmd.quantize {
        config.formats.validate()?;
        let qdesign = quantize_design(&design, config.formats)?;
        info!("max coefficient quantization error {:e}", qdesign.max_quantization_error());
        write_file(path, &write_quantized(&qdesign))?;
    }
    Ok(())
}

pub fn run(mut config: RunConfig, cmd: RunCmd) -> Result<()> {
    apply(&mut config, design_overrides(&cmd.design))?;
    apply(&mut config, format_overrides(&cmd.formats))?;
    apply(&mut config, hardware_overrides(&cmd.hardware))?;
    if let Some(mode) = cmd.mode {
        config.mode = match mode {
            ModeArg::Float => Mode::Float,
            ModeArg::Fixed => Mode::Fixed,
            ModeArg::Pipeline => Mode::Pipeline,
        };
    }
    let input = require(cmd.input.or(config.input.clone()), "input WAV")?;
    let output = require(cmd.output.or(config.output.clone()), "output path")?;
    let design = load_design(&config, cmd.coefficients.as_ref())?;
    let samples = read_input(&input, &design)?;

    let taps = match config.mode {
        Mode::Float => run_float(&design, &samples)?,
        Mode::Fixed => {
            let block = run_fixed(&config, &design, &samples)?;
            let stats = &block.stats;
            println!("saturations: {}", stats.total());
            println!("input_overflows: {}", stats.input);
            if stats.total() > 0 {
                warn!("{} saturation events", stats.total());
            }
            if let Some(path) = &cmd.stats {
                let mut csv = String::from("section,saturations\n");
                for (k, n) in stats.per_section.iter().enumerate() {
                    let _ = writeln!(csv, "{k},{n}");
                }
                write_file(path, &csv)?;
            }
            block.to_tap_matrix()
        }
        Mode::Pipeline => {
            let mut hardware = config.hardware;
            hardware.sample_rate_hz = design.sample_rate_hz;
            let out = simulate_pipeline(&design, &hardware, &samples)?;
            println!(
                "arrays: {}  end_to_end_latency_us: {:.3}",
                out.report.arrays_needed,
                out.report.end_to_end_latency_s * 1e6
            );
            out.taps
        }
    };

    let format = match cmd.format {
        FormatArg::Csv => CochleagramFormat::Csv,
        FormatArg::Binary => CochleagramFormat::Binary,
    };
    write_cochleagram(&taps, design.sample_rate_hz, &output, format)
        .with_context(|| format!("writing {}", output.display()))?;
    info!("wrote {}x{} cochleagram to {}", taps.n_samples(), taps.n_taps(), output.display());
    Ok(())
}

pub fn analyze(mut config: RunConfig, cmd: AnalyzeCmd) -> Result<()> {
    apply(&mut config, design_overrides(&cmd.design))?;
    apply(&mut config, format_overrides(&cmd.formats))?;
    let design = load_design(&config, cmd.coefficients.as_ref())?;
    let channels = cmd.channels.clone().unwrap_or_else(|| design.evenly_spaced_taps(20));

    let (method, n_samples) = match cmd.method {
        MethodArg::Impulse => (IrMethod::DirectImpulse, cmd.n_fft),
        MethodArg::Mls => {
            let mls = MlsConfig::new(cmd.mls_order)?
                .with_amplitude(cmd.amplitude)
                .with_warmup(cmd.mls_warmup);
            let n = mls.period().min(cmd.n_fft);
            (IrMethod::Mls(mls), n)
        }
    };
    let qdesign;
    let mut float_system;
    let mut fixed_system;
    let system: &mut dyn TapSystem = if cmd.fixed {
        config.formats.validate()?;
        qdesign = quantize_design(&design, config.formats)?;
        fixed_system = FixedCascade::new(&qdesign);
        &mut fixed_system
    } else {
        float_system = FloatCascade::new(&design);
        &mut float_system
    };
    let irs = impulse_response(system, &channels, n_samples, &method)?;
    let response = frequency_response_measured(&irs, cmd.n_fft, design.sample_rate_hz)?;

    fs::create_dir_all(&cmd.out_dir)
        .map_err(Error::from)
        .with_context(|| format!("creating {}", cmd.out_dir.display()))?;
    let mut peaks = String::from("channel,cf_hz,peak_hz,peak_db,flat\n");
    for (i, &c) in response.channels.iter().enumerate() {
        let mut ir = String::from("sample_index,amplitude\n");
        for (n, v) in response.impulse[i].iter().enumerate() {
            let _ = writeln!(ir, "{n},{v:?}");
        }
        write_file(&cmd.out_dir.join(format!("impulse_tap{c:04}.csv")), &ir)?;
        let mut fr = String::from("frequency_hz,magnitude_db\n");
        for (f, db) in response.frequencies_hz.iter().zip(&response.magnitude_db[i]) {
            let _ = writeln!(fr, "{f:?},{db:?}");
        }
        write_file(&cmd.out_dir.join(format!("freq_tap{c:04}.csv")), &fr)?;
        let p = &response.peaks[i];
        let _ = writeln!(
            peaks,
            "{c},{:?},{:?},{:?},{}",
            design.sections[c].cf_hz, p.hz, p.db, p.flat
        );
    }
    write_file(&cmd.out_dir.join("peaks.csv"), &peaks)?;
    println!(
        "analyzed {} channels into {}",
        response.channels.len(),
        cmd.out_dir.display()
    );
    Ok(())
}

pub fn schedule(mut config: RunConfig, cmd: ScheduleCmd) -> Result<()> {
    apply(
        &mut config,
        vec![("n_sections", s(&cmd.sections)), ("sample_rate_hz", s(&cmd.fs))],
    )?;
    apply(&mut config, hardware_overrides(&cmd.hardware))?;
    config.hardware.validate()?;
    let report = plan(&config.hardware, config.design.n_sections)?;
    if cmd.csv {
        print!("{}", report.to_csv());
    } else {
        print!("{report}");
    }
    if !report.feasible {
        warn!(
            "{} arrays needed but only {} available",
            report.arrays_needed, config.hardware.max_arrays
        );
    }
    Ok(())
}

pub fn compare(mut config: RunConfig, cmd: CompareCmd) -> Result<()> {
    apply(&mut config, design_overrides(&cmd.design))?;
    apply(&mut config, format_overrides(&cmd.formats))?;
    let design = load_design(&config, cmd.coefficients.as_ref())?;
    let samples = match cmd.input.or(config.input.clone()) {
        Some(path) => read_input(&path, &design)?,
        None => {
            let mls = MlsConfig::new(cmd.mls_order)?.with_amplitude(cmd.amplitude);
            mls_generate(&mls)?
        }
    };
    let reference = run_float(&design, &samples)?;
    let block = run_fixed(&config, &design, &samples)?;
    let report = parity_report(
        &reference,
        &block.to_tap_matrix(),
        0..samples.len(),
        Some(&block.stats),
    )?;
    print!("{report}");
    if let Some(path) = &cmd.output {
        write_file(path, &report.to_csv())?;
    }
    Ok(())
}
