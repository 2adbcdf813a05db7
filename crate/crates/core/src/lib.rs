//! Sequencing with exact rational transposition.
//!
//! A [`Composition`] fixes a base frequency and stacks harmonic sequences
//! (timelines of rational transposition tones) over instrument scores. The
//! resolver multiplies the active factors of every level at each note onset,
//! exactly, and the renderer turns the resulting events into audio.

pub mod format;
pub mod model;
pub mod ratio;
pub mod render;
pub mod resolve;
pub mod scale;
pub mod validate;

pub use format::{parse, parse_bytes, serialize, ParseError, ParseErrorKind, SourcePosition};
pub use model::{
    normalize_score, tone_at, Composition, HarmonicSequence, Header, Instrument,
    InstrumentScore, ModelError, Note, TimeInterval, TranspositionTone, DEFAULT_VELOCITY,
};
pub use ratio::{Ratio, RatioError};
pub use render::{
    encode_wav, export_events, synthesize, write_wav, AudioBuffer, RenderError, RenderSettings,
    Waveform,
};
pub use resolve::{
    frequency_table, resolve_composition, resolve_note, FrequencyTable, ResolveError,
    ResolvedEvent, TableRow,
};
pub use scale::{builtin_scale, builtin_scales, Scale, ScaleError};
pub use validate::{validate_composition, Location, Severity, ValidationReport, Violation, ViolationKind};
