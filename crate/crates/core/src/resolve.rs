//! Frequency resolution.
//!
//! A note's pitch is the base frequency times the product of its instrument
//! key and the active transposition tone of every bound harmony level:
//!
//! ```text
//! f(t) = f0 * m0(t) * m1(t) * ... * mn(t)
//! ```
//!
//! All levels are sampled at the note onset and held for the whole note.
//! The product is exact; conversion to Hz happens once per event.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Composition, Instrument, Note};
use crate::ratio::{Ratio, RatioError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("instrument `{0}` not found")]
    UnknownInstrument(String),
    #[error("scale `{scale}` not found (level {level})")]
    UnknownScale { level: u32, scale: String },
    #[error("harmony `{harmony}` not found (level {level})")]
    UnknownHarmony { level: u32, harmony: String },
    #[error("harmony `{harmony}` is bound at level {expected} but declares level {declared}")]
    LevelMismatch {
        harmony: String,
        expected: u32,
        declared: u32,
    },
    #[error("key index {index} out of range for scale `{scale}` (level {level})")]
    KeyOutOfRange {
        level: u32,
        scale: String,
        index: usize,
    },
    #[error("tick {tick} is outside the span of harmony `{harmony}` (level {level})")]
    OutsideHarmony {
        level: u32,
        harmony: String,
        tick: u64,
    },
    #[error("pitch factor overflow at level {level}: {source}")]
    Overflow { level: u32, source: RatioError },
    #[error("instrument `{instrument}` note {index}: {source}")]
    Note {
        instrument: String,
        index: usize,
        source: Box<ResolveError>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedEvent {
    pub instrument: String,
    /// Exact product of every level's factor, instrument key included.
    pub factor: Ratio,
    pub frequency_hz: f64,
    pub start_sec: f64,
    pub duration_sec: f64,
    pub velocity: u8,
    pub start_tick: u64,
    pub duration_ticks: u64,
}

pub fn factor_to_hz(base_hz: f64, factor: Ratio) -> f64 {
    base_hz * factor.numer() as f64 / factor.denom() as f64
}

/// Product of the transposition tones of every harmony bound to `inst` at
/// `tick`, levels 1..=n. An instrument without harmonies gets 1/1.
pub fn transposition_factor(
    c: &Composition,
    inst: &Instrument,
    tick: u64,
) -> Result<Ratio, ResolveError> {
    let mut acc = Ratio::ONE;
    for (i, hname) in inst.harmony_names.iter().enumerate() {
        let level = i as u32 + 1;
        let h = c
            .harmony(hname)
            .ok_or_else(|| ResolveError::UnknownHarmony {
                level,
                harmony: hname.clone(),
            })?;
        if h.level != level {
            return Err(ResolveError::LevelMismatch {
                harmony: hname.clone(),
                expected: level,
                declared: h.level,
            });
        }
        let tone = h.tone_at(tick).map_err(|_| ResolveError::OutsideHarmony {
            level,
            harmony: hname.clone(),
            tick,
        })?;
        let key = scale_key(c, &h.scale_name, tone.key_index, level)?;
        acc = acc
            .checked_mul(key)
            .map_err(|source| ResolveError::Overflow { level, source })?;
    }
    Ok(acc)
}

fn scale_key(c: &Composition, scale: &str, index: usize, level: u32) -> Result<Ratio, ResolveError> {
    let s = c.scale(scale).ok_or_else(|| ResolveError::UnknownScale {
        level,
        scale: scale.to_string(),
    })?;
    s.key(index).ok_or_else(|| ResolveError::KeyOutOfRange {
        level,
        scale: scale.to_string(),
        index,
    })
}

pub fn resolve_note(
    c: &Composition,
    inst: &Instrument,
    note: &Note,
) -> Result<ResolvedEvent, ResolveError> {
    let onset = note.interval.start();
    let key = scale_key(c, &inst.scale_name, note.key_index, 0)?;
    let factor = key
        .checked_mul(transposition_factor(c, inst, onset)?)
        .map_err(|source| ResolveError::Overflow { level: 0, source })?;
    let header = &c.header;
    Ok(ResolvedEvent {
        instrument: inst.name().to_string(),
        factor,
        frequency_hz: factor_to_hz(header.base_frequency_hz, factor),
        start_sec: header.ticks_to_seconds(onset),
        duration_sec: header.ticks_to_seconds(note.interval.duration()),
        velocity: note.velocity,
        start_tick: onset,
        duration_ticks: note.interval.duration(),
    })
}

/// Output order: onset, instrument name, frequency, velocity, duration.
pub fn event_order(a: &ResolvedEvent, b: &ResolvedEvent) -> Ordering {
    a.start_sec
        .total_cmp(&b.start_sec)
        .then_with(|| a.instrument.cmp(&b.instrument))
        .then_with(|| a.frequency_hz.total_cmp(&b.frequency_hz))
        .then_with(|| a.velocity.cmp(&b.velocity))
        .then_with(|| a.duration_ticks.cmp(&b.duration_ticks))
        .then_with(|| a.factor.cmp(&b.factor))
}

/// Resolves every note of every instrument into one ordered event list.
pub fn resolve_composition(c: &Composition) -> Result<Vec<ResolvedEvent>, ResolveError> {
    let mut events = Vec::new();
    for inst in c.instruments() {
        for (index, note) in inst.score.notes.iter().enumerate() {
            let ev = resolve_note(c, inst, note).map_err(|e| ResolveError::Note {
                instrument: inst.name().to_string(),
                index,
                source: Box::new(e),
            })?;
            events.push(ev);
        }
    }
    events.sort_by(event_order);
    Ok(events)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub start_tick: u64,
    pub end_tick: u64,
    pub key_index: usize,
    pub key: Ratio,
    pub factor: Ratio,
    pub frequency_hz: f64,
}

/// Every playable key of one instrument, resolved over each harmonic
/// region: a maximal tick range in which no bound level changes tone.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub instrument: String,
    pub regions: Vec<(u64, u64)>,
    pub rows: Vec<TableRow>,
}

pub fn frequency_table(c: &Composition, inst_name: &str) -> Result<FrequencyTable, ResolveError> {
    let inst = c
        .instrument(inst_name)
        .ok_or_else(|| ResolveError::UnknownInstrument(inst_name.to_string()))?;
    let scale = c
        .scale(&inst.scale_name)
        .ok_or_else(|| ResolveError::UnknownScale {
            level: 0,
            scale: inst.scale_name.clone(),
        })?;
    let length = c.length_ticks();

    let mut cuts = BTreeSet::from([0, length]);
    for hname in &inst.harmony_names {
        if let Some(h) = c.harmony(hname) {
            for tone in &h.tones {
                for b in [tone.interval.start(), tone.interval.end()] {
                    if b < length {
                        cuts.insert(b);
                    }
                }
            }
        }
    }
    let cuts: Vec<u64> = cuts.into_iter().collect();
    let regions: Vec<(u64, u64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();

    let mut rows = Vec::with_capacity(regions.len() * scale.len());
    for &(start, end) in &regions {
        let transposition = transposition_factor(c, inst, start)?;
        for (key_index, &key) in scale.keys().iter().enumerate() {
            let factor = key
                .checked_mul(transposition)
                .map_err(|source| ResolveError::Overflow { level: 0, source })?;
            rows.push(TableRow {
                start_tick: start,
                end_tick: end,
                key_index,
                key,
                factor,
                frequency_hz: factor_to_hz(c.base_frequency_hz(), factor),
            });
        }
    }
    Ok(FrequencyTable {
        instrument: inst_name.to_string(),
        regions,
        rows,
    })
}
