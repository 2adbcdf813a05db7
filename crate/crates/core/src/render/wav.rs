//! 16-bit mono PCM RIFF/WAVE output with the canonical 44-byte header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::render::{AudioBuffer, RenderError};

pub const WAV_HEADER_LEN: usize = 44;

/// `round(v * 32767)`, clamped to the i16 range.
pub fn quantize(v: f64) -> i16 {
    (v * 32767.0).round().clamp(-32768.0, 32767.0) as i16
}

pub fn write_wav_to<W: Write>(buffer: &AudioBuffer, mut w: W) -> std::io::Result<()> {
    let data_len = u32::try_from(buffer.samples.len() * 2)
        .ok()
        .filter(|n| *n <= u32::MAX - 36)
        .ok_or_else(|| std::io::Error::other("sample data exceeds the RIFF size limit"))?;
    let channels: u16 = 1;
    let bits: u16 = 16;
    let block_align = channels * bits / 8;
    let byte_rate = buffer.sample_rate * u32::from(block_align);

    w.write_all(b"RIFF")?;
    w.write_all(&(36 + data_len).to_le_bytes())?;
    w.write_all(b"WAVE")?;
    w.write_all(b"fmt ")?;
    w.write_all(&16u32.to_le_bytes())?;
    w.write_all(&1u16.to_le_bytes())?;
    w.write_all(&channels.to_le_bytes())?;
    w.write_all(&buffer.sample_rate.to_le_bytes())?;
    w.write_all(&byte_rate.to_le_bytes())?;
    w.write_all(&block_align.to_le_bytes())?;
    w.write_all(&bits.to_le_bytes())?;
    w.write_all(b"data")?;
    w.write_all(&data_len.to_le_bytes())?;
    for &s in &buffer.samples {
        w.write_all(&quantize(s).to_le_bytes())?;
    }
    w.flush()
}

pub fn encode_wav(buffer: &AudioBuffer) -> Result<Vec<u8>, RenderError> {
    let mut bytes = Vec::with_capacity(WAV_HEADER_LEN + buffer.samples.len() * 2);
    write_wav_to(buffer, &mut bytes).map_err(|_| RenderError::TooLong(buffer.samples.len()))?;
    Ok(bytes)
}

pub fn write_wav(buffer: &AudioBuffer, path: impl AsRef<Path>) -> Result<(), RenderError> {
    let path = path.as_ref();
    let io = |source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_wav_to(buffer, BufWriter::new(file)).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantization_rule() {
        assert_eq!(quantize(1.0), 32767);
        assert_eq!(quantize(-1.0), -32767);
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(2.0), 32767);
        assert_eq!(quantize(-2.0), -32768);
        assert_eq!(quantize(0.5), 16384);
    }

    #[test]
    fn header_layout() {
        let buffer = AudioBuffer {
            sample_rate: 44_100,
            samples: vec![0.0; 44_100],
        };
        let bytes = encode_wav(&buffer).unwrap();
        assert_eq!(bytes.len(), 44 + 88_200);
        assert_eq!(&bytes[0..4], b"RIFF");
        assert_eq!(&bytes[8..12], b"WAVE");
        assert_eq!(&bytes[12..16], b"fmt ");
        assert_eq!(&bytes[36..40], b"data");
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let u16_at = |i: usize| u16::from_le_bytes(bytes[i..i + 2].try_into().unwrap());
        assert_eq!(u32_at(4), 36 + 88_200);
        assert_eq!(u32_at(16), 16);
        assert_eq!(u16_at(20), 1);
        assert_eq!(u16_at(22), 1);
        assert_eq!(u32_at(24), 44_100);
        assert_eq!(u32_at(28), 88_200);
        assert_eq!(u16_at(32), 2);
        assert_eq!(u16_at(34), 16);
        assert_eq!(u32_at(40), 88_200);
    }

    #[test]
    fn io_errors_carry_the_path() {
        let buffer = AudioBuffer {
            sample_rate: 8_000,
            samples: vec![],
        };
        let err = write_wav(&buffer, "/nonexistent-dir/x.wav").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.wav"));
    }
}
