//! Cochleagram (time × tap matrix) files.
//!
//! CSV: header `t,y_0,…,y_{N−1}`, then one row per sample.
//!
//! Binary, little-endian: magic `CARC`, `u16` version, `u32` tap count,
//! `u64` sample count, `f64` sample rate, then row-major `f64` values.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::fmt_real;
use crate::{Error, Result, TapMatrix};

pub const MAGIC: &[u8; 4] = b"CARC";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 4 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CochleagramFormat {
    Csv,
    Binary,
}

pub fn write_csv<W: Write>(taps: &TapMatrix, mut w: W) -> Result<()> {
    let mut header = String::from("t");
    for k in 0..taps.n_taps() {
        header.push_str(&format!(",y_{k}"));
    }
    writeln!(w, "{header}")?;
    let mut line = String::new();
    for (t, row) in taps.rows().enumerate() {
        line.clear();
        line.push_str(&t.to_string());
        for &v in row {
            line.push(',');
            line.push_str(&fmt_real(v));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_binary<W: Write>(taps: &TapMatrix, sample_rate_hz: f64, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(taps.n_taps() as u32).to_le_bytes())?;
    w.write_all(&(taps.n_samples() as u64).to_le_bytes())?;
    w.write_all(&sample_rate_hz.to_le_bytes())?;
    for &v in taps.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cochleagram(
    taps: &TapMatrix,
    sample_rate_hz: f64,
    path: impl AsRef<Path>,
    format: CochleagramFormat,
) -> Result<()> {
    if let Some(bad) = taps.as_slice().iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    let w = BufWriter::new(File::create(path)?);
    match format {
        CochleagramFormat::Csv => write_csv(taps, w),
        CochleagramFormat::Binary => write_binary(taps, sample_rate_hz, w),
    }
}

pub fn decode_binary(bytes: &[u8]) -> Result<(TapMatrix, f64)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Parse {
            offset: bytes.len() as u64,
            message: format!("cochleagram header needs {HEADER_LEN} bytes"),
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Parse {
            offset: 0,
            message: "missing CARC magic".into(),
        });
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Parse {
            offset: 4,
            message: format!("unsupported cochleagram version {version}"),
        });
    }
    let n_taps = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let n_samples = u64::from_le_bytes(bytes[10..18].try_into().unwrap()) as usize;
    let sample_rate = f64::from_le_bytes(bytes[18..26].try_into().unwrap());
    let body = &bytes[HEADER_LEN..];
    let expected = n_taps
        .checked_mul(n_samples)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::Parse {
            offset: 6,
            message: "matrix dimensions overflow".into(),
        })?;
    if body.len() != expected {
        return Err(Error::Parse {
            offset: (HEADER_LEN + body.len().min(expected)) as u64,
            message: format!("expected {expected} data bytes, found {}", body.len()),
        });
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((TapMatrix::from_rows(n_taps, data), sample_rate))
}

pub fn read_cochleagram_binary(path: impl AsRef<Path>) -> Result<(TapMatrix, f64)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    decode_binary(&bytes)
}

pub fn parse_csv(text: &str) -> Result<TapMatrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        offset: 0,
        message: "empty cochleagram CSV".into(),
    })?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") || cols[1..].iter().enumerate().any(|(k, c)| *c != format!("y_{k}")) {
        return Err(Error::Parse {
            offset: 0,
            message: format!("unexpected cochleagram header {header:?}"),
        });
    }
    let n_taps = cols.len() - 1;
    let mut data = Vec::new();
    let mut offset = header.len() + 1;
    for (t, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let bad = |message: String| Error::Parse {
            offset: offset as u64,
            message,
        };
        if fields.len() != n_taps + 1 {
            return Err(bad(format!("row {t} has {} fields, expected {}", fields.len(), n_taps + 1)));
        }
        if fields[0].parse::<usize>().ok() != Some(t) {
            return Err(bad(format!("row {t} has time index {:?}", fields[0])));
        }
        for f in &fields[1..] {
            data.push(f.parse::<f64>().map_err(|e| bad(format!("{f:?}: {e}")))?);
        }
        offset += line.len() + 1;
    }
    Ok(TapMatrix::from_rows(n_taps, data))
}

pub fn read_cochleagram_csv(path: impl AsRef<Path>) -> Result<TapMatrix> {
    parse_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_csv() {
        let mut out = Vec::new();
        write_csv(&TapMatrix::from_rows(1, vec![0.5]), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "t,y_0\n0,0.5\n");
    }

    #[test]
    fn empty_matrix_writes_headers_only() {
        let empty = TapMatrix::new(3);
        let mut csv = Vec::new();
        write_csv(&empty, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "t,y_0,y_1,y_2\n");
        let mut bin = Vec::new();
        write_binary(&empty, 48000.0, &mut bin).unwrap();
        assert_eq!(bin.len(), HEADER_LEN);
        let (back, fs) = decode_binary(&bin).unwrap();
        assert_eq!((back.n_taps(), back.n_samples(), fs), (3, 0, 48000.0));
    }

    #[test]
    fn binary_layout() {
        let m = TapMatrix::from_rows(2, vec![1.0, -2.0, 0.25, 1e-300]);
        let mut bin = Vec::new();
        write_binary(&m, 44100.0, &mut bin).unwrap();
        assert_eq!(&bin[..4], b"CARC");
        assert_eq!(u16::from_le_bytes([bin[4], bin[5]]), 1);
        assert_eq!(u32::from_le_bytes(bin[6..10].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bin[10..18].try_into().unwrap()), 2);
        assert_eq!(bin.len(), HEADER_LEN + 32);
        let (back, _) = decode_binary(&bin).unwrap();
        assert_eq!(back, m);
        assert!(decode_binary(&bin[..bin.len() - 1]).is_err());
    }

    #[test]
    fn non_finite_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = TapMatrix::from_rows(1, vec![f64::NAN]);
        assert!(write_cochleagram(&m, 1.0, dir.path().join("x.csv"), CochleagramFormat::Csv).is_err());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let m = TapMatrix::from_rows(1, vec![0.0]);
        let err = write_cochleagram(&m, 1.0, "/nonexistent-dir/x.bin", CochleagramFormat::Binary).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
