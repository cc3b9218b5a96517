//! Minimal RIFF/WAVE reader for mono integer PCM.

use std::fs;
use std::path::Path;

use crate::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub sample_rate_hz: u32,
    /// Normalised to `[−1, 1)`.
    pub samples: Vec<f64>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Parse {
                offset: self.pos as u64,
                message: format!(
                    "truncated {what}: need {n} bytes, {} left",
                    self.bytes.len() - self.pos
                ),
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

struct Format {
    sample_rate: u32,
    bits: u16,
    block_align: u16,
}

fn parse_fmt(chunk: &[u8], offset: usize) -> Result<Format> {
    let mut r = Reader { bytes: chunk, pos: 0 };
    let wrap = |e: Error| match e {
        Error::Parse { offset: o, message } => Error::Parse {
            offset: o + offset as u64,
            message,
        },
        other => other,
    };
    let audio_format = r.u16("fmt chunk").map_err(wrap)?;
    let channels = r.u16("fmt chunk").map_err(wrap)?;
    let sample_rate = r.u32("fmt chunk").map_err(wrap)?;
    let _byte_rate = r.u32("fmt chunk").map_err(wrap)?;
    let block_align = r.u16("fmt chunk").map_err(wrap)?;
    let bits = r.u16("fmt chunk").map_err(wrap)?;
    let effective_format = if audio_format == FORMAT_EXTENSIBLE {
        // cbSize, valid bits, channel mask, then the sub-format GUID
        let _cb = r.u16("extensible fmt chunk").map_err(wrap)?;
        let _valid = r.u16("extensible fmt chunk").map_err(wrap)?;
        let _mask = r.u32("extensible fmt chunk").map_err(wrap)?;
        r.u16("extensible fmt chunk").map_err(wrap)?
    } else {
        audio_format
    };
    if effective_format != FORMAT_PCM {
        return Err(Error::UnsupportedFormat {
            field: "audio_format",
            value: format!("{effective_format:#06x}"),
        });
    }
    if channels != 1 {
        return Err(Error::UnsupportedFormat {
            field: "num_channels",
            value: channels.to_string(),
        });
    }
    if bits != 16 && bits != 24 {
        return Err(Error::UnsupportedFormat {
            field: "bits_per_sample",
            value: bits.to_string(),
        });
    }
    if block_align != bits / 8 {
        return Err(Error::UnsupportedFormat {
            field: "block_align",
            value: block_align.to_string(),
        });
    }
    if sample_rate == 0 {
        return Err(Error::UnsupportedFormat {
            field: "sample_rate",
            value: "0".into(),
        });
    }
    Ok(Format {
        sample_rate,
        bits,
        block_align,
    })
}

/// Decodes a mono 16- or 24-bit PCM WAV image.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "RIFF header")? != b"RIFF" {
        return Err(Error::Parse {
            offset: 0,
            message: "missing RIFF signature".into(),
        });
    }
    let _riff_size = r.u32("RIFF header")?;
    if r.take(4, "RIFF header")? != b"WAVE" {
        return Err(Error::Parse {
            offset: 8,
            message: "missing WAVE form type".into(),
        });
    }
    let mut format = None;
    loop {
        let chunk_start = r.pos;
        let id = r.take(4, "chunk header")?;
        let size = r.u32("chunk header")? as usize;
        match id {
            b"fmt " => {
                let body_offset = r.pos;
                let body = r.take(size, "fmt chunk")?;
                format = Some(parse_fmt(body, body_offset)?);
            }
            b"data" => {
                let fmt = format.ok_or_else(|| Error::Parse {
                    offset: chunk_start as u64,
                    message: "data chunk before fmt chunk".into(),
                })?;
                let data_offset = r.pos;
                let body = r.take(size, "data chunk")?;
                let width = fmt.block_align as usize;
                if body.len() % width != 0 {
                    return Err(Error::Parse {
                        offset: (data_offset + body.len() - body.len() % width) as u64,
                        message: format!("data chunk ends inside a {width}-byte frame"),
                    });
                }
                let scale = 1.0 / (1u32 << (fmt.bits - 1)) as f64;
                let samples = body
                    .chunks_exact(width)
                    .map(|frame| {
                        let v = match frame.len() {
                            2 => i16::from_le_bytes([frame[0], frame[1]]) as i32,
                            _ => i32::from_le_bytes([0, frame[0], frame[1], frame[2]]) >> 8,
                        };
                        v as f64 * scale
                    })
                    .collect();
                return Ok(AudioBuffer {
                    sample_rate_hz: fmt.sample_rate,
                    samples,
                });
            }
            _ => {
                r.take(size, "chunk body")?;
            }
        }
        if size % 2 == 1 && r.pos < bytes.len() {
            r.pos += 1;
        }
    }
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    decode_wav(&fs::read(path)?)
}

/// Encodes integer PCM codes as a canonical 44-byte-header mono WAV.
pub fn encode_wav(sample_rate_hz: u32, bits: u16, codes: &[i32]) -> Result<Vec<u8>> {
    if bits != 16 && bits != 24 {
        return Err(Error::UnsupportedFormat {
            field: "bits_per_sample",
            value: bits.to_string(),
        });
    }
    let width = bits as usize / 8;
    let limit = 1i32 << (bits - 1);
    if let Some(bad) = codes.iter().find(|&&c| c < -limit || c >= limit) {
        return Err(Error::Validation(format!("PCM code {bad} does not fit {bits} bits")));
    }
    let data_len = codes.len() * width;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * width as u32).to_le_bytes());
    out.extend_from_slice(&(width as u16).to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &c in codes {
        out.extend_from_slice(&c.to_le_bytes()[..width]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_bit_scaling() {
        let bytes = encode_wav(48000, 16, &[-32768, 16384, 0, 32767]).unwrap();
        let audio = decode_wav(&bytes).unwrap();
        assert_eq!(audio.sample_rate_hz, 48000);
        assert_eq!(audio.samples, vec![-1.0, 0.5, 0.0, 32767.0 / 32768.0]);
    }

    #[test]
    fn twenty_four_bit_scaling() {
        let bytes = encode_wav(44100, 24, &[-(1 << 23), 1 << 22, -1]).unwrap();
        let audio = decode_wav(&bytes).unwrap();
        assert_eq!(audio.samples, vec![-1.0, 0.5, -1.0 / (1 << 23) as f64]);
    }

    #[test]
    fn minimal_single_sample() {
        let bytes = encode_wav(48000, 16, &[0]).unwrap();
        assert_eq!(bytes.len(), 46);
        let audio = decode_wav(&bytes).unwrap();
        assert_eq!(audio.samples, vec![0.0]);
    }

    fn patch_u16(bytes: &mut [u8], at: usize, v: u16) {
        bytes[at..at + 2].copy_from_slice(&v.to_le_bytes());
    }

    #[test]
    fn unsupported_headers_are_named() {
        let base = encode_wav(48000, 16, &[1, 2]).unwrap();
        let mut stereo = base.clone();
        patch_u16(&mut stereo, 22, 2);
        match decode_wav(&stereo) {
            Err(Error::UnsupportedFormat { field, .. }) => assert_eq!(field, "num_channels"),
            other => panic!("{other:?}"),
        }
        let mut float = base.clone();
        patch_u16(&mut float, 20, 3);
        match decode_wav(&float) {
            Err(Error::UnsupportedFormat { field, .. }) => assert_eq!(field, "audio_format"),
            other => panic!("{other:?}"),
        }
        let mut eight = base;
        patch_u16(&mut eight, 34, 8);
        match decode_wav(&eight) {
            Err(Error::UnsupportedFormat { field, .. }) => assert_eq!(field, "bits_per_sample"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncation_reports_offset() {
        let bytes = encode_wav(48000, 16, &[1, 2, 3]).unwrap();
        match decode_wav(&bytes[..48]) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 44),
            other => panic!("{other:?}"),
        }
        match decode_wav(&bytes[..30]) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 20),
            other => panic!("{other:?}"),
        }
        assert!(matches!(decode_wav(b"RIFF"), Err(Error::Parse { offset: 4, .. })));
        assert!(matches!(decode_wav(b"RIFXabcdWAVE"), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn skips_unknown_chunks() {
        let plain = encode_wav(16000, 16, &[100, -100]).unwrap();
        let mut bytes = plain[..36].to_vec();
        bytes.extend_from_slice(b"LIST");
        bytes.extend_from_slice(&3u32.to_le_bytes());
        bytes.extend_from_slice(&[1, 2, 3, 0]);
        bytes.extend_from_slice(&plain[36..]);
        assert_eq!(decode_wav(&bytes).unwrap(), decode_wav(&plain).unwrap());
    }
}
