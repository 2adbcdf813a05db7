//! Audio and text output for resolved events.

mod export;
mod synth;
mod wav;

pub use export::{export_events, format_significant, EVENT_HEADER};
pub use synth::{synthesize, AudioBuffer, RenderSettings, Waveform};
pub use wav::{encode_wav, quantize, write_wav, write_wav_to, WAV_HEADER_LEN};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid render settings: {0}")]
    Settings(String),
    #[error("failed to write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("audio too long for a WAV file ({0} samples)")]
    TooLong(usize),
}
