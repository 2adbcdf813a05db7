//! Composition data model: the tick grid, instrument scores and the stacked
//! harmonic sequences that transpose them.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::scale::Scale;

pub const DEFAULT_VELOCITY: u8 = 96;
pub const MAX_VELOCITY: u8 = 127;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("interval duration must be at least one tick")]
    ZeroDuration,
    #[error("interval end overflows the tick range")]
    IntervalOverflow,
    #[error("{0} must be a positive finite number")]
    BadHeader(&'static str),
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("tick {tick} lies outside the span of harmony `{harmony}` (level {level})")]
    TickOutOfRange {
        harmony: String,
        level: u32,
        tick: u64,
    },
}

/// Half-open tick range `[start, start + duration)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeInterval {
    start: u64,
    duration: u64,
}

impl TimeInterval {
    pub fn new(start: u64, duration: u64) -> Result<TimeInterval, ModelError> {
        if duration == 0 {
            return Err(ModelError::ZeroDuration);
        }
        start
            .checked_add(duration)
            .ok_or(ModelError::IntervalOverflow)?;
        Ok(TimeInterval { start, duration })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn duration(&self) -> u64 {
        self.duration
    }

    pub fn end(&self) -> u64 {
        self.start + self.duration
    }

    pub fn contains(&self, tick: u64) -> bool {
        self.start <= tick && tick < self.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Note {
    pub key_index: usize,
    pub interval: TimeInterval,
    pub velocity: u8,
}

impl Note {
    pub fn new(key_index: usize, interval: TimeInterval) -> Note {
        Note {
            key_index,
            interval,
            velocity: DEFAULT_VELOCITY,
        }
    }

    pub fn with_velocity(mut self, velocity: u8) -> Note {
        self.velocity = velocity;
        self
    }
}

/// Notes of one instrument. Overlaps are chords and are allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstrumentScore {
    pub notes: Vec<Note>,
}

impl InstrumentScore {
    pub fn new(notes: Vec<Note>) -> InstrumentScore {
        InstrumentScore { notes }
    }

    /// Stable sort by onset then key, collapsing exact duplicates.
    pub fn normalized(&self) -> InstrumentScore {
        let mut notes = self.notes.clone();
        notes.sort_by_key(|n| {
            (
                n.interval.start(),
                n.key_index,
                n.interval.duration(),
                n.velocity,
            )
        });
        notes.dedup();
        InstrumentScore { notes }
    }

    pub fn is_normalized(&self) -> bool {
        *self == self.normalized()
    }
}

pub fn normalize_score(score: &InstrumentScore) -> InstrumentScore {
    score.normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TranspositionTone {
    pub key_index: usize,
    pub interval: TimeInterval,
}

impl TranspositionTone {
    pub fn new(key_index: usize, interval: TimeInterval) -> TranspositionTone {
        TranspositionTone {
            key_index,
            interval,
        }
    }
}

/// A level-n timeline of transposition tones. Valid sequences tile
/// `[0, length)` without gaps or overlaps, so exactly one tone is active at
/// every tick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicSequence {
    name: String,
    pub level: u32,
    pub scale_name: String,
    pub tones: Vec<TranspositionTone>,
}

impl HarmonicSequence {
    pub fn new(
        name: impl Into<String>,
        level: u32,
        scale_name: impl Into<String>,
        tones: Vec<TranspositionTone>,
    ) -> HarmonicSequence {
        HarmonicSequence {
            name: name.into(),
            level,
            scale_name: scale_name.into(),
            tones,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Index of the tone sounding at `tick`.
    pub fn tone_index_at(&self, tick: u64) -> Result<usize, ModelError> {
        let idx = self
            .tones
            .partition_point(|t| t.interval.start() <= tick);
        match idx.checked_sub(1) {
            Some(i) if self.tones[i].interval.contains(tick) => Ok(i),
            _ => Err(ModelError::TickOutOfRange {
                harmony: self.name.clone(),
                level: self.level,
                tick,
            }),
        }
    }

    pub fn tone_at(&self, tick: u64) -> Result<&TranspositionTone, ModelError> {
        self.tone_index_at(tick).map(|i| &self.tones[i])
    }
}

pub fn tone_at(h: &HarmonicSequence, tick: u64) -> Result<&TranspositionTone, ModelError> {
    h.tone_at(tick)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instrument {
    name: String,
    pub scale_name: String,
    /// Harmony names, level 1 first.
    pub harmony_names: Vec<String>,
    pub score: InstrumentScore,
}

impl Instrument {
    pub fn new(
        name: impl Into<String>,
        scale_name: impl Into<String>,
        harmony_names: Vec<String>,
        score: InstrumentScore,
    ) -> Instrument {
        Instrument {
            name: name.into(),
            scale_name: scale_name.into(),
            harmony_names,
            score,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Header {
    pub base_frequency_hz: f64,
    pub ticks_per_beat: u32,
    pub tempo_bpm: f64,
    pub length_ticks: u64,
}

impl Header {
    pub fn new(
        base_frequency_hz: f64,
        ticks_per_beat: u32,
        tempo_bpm: f64,
        length_ticks: u64,
    ) -> Result<Header, ModelError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(base_frequency_hz) {
            return Err(ModelError::BadHeader("base frequency"));
        }
        if ticks_per_beat == 0 {
            return Err(ModelError::BadHeader("ticks per beat"));
        }
        if !positive(tempo_bpm) {
            return Err(ModelError::BadHeader("tempo"));
        }
        if length_ticks == 0 {
            return Err(ModelError::BadHeader("length"));
        }
        Ok(Header {
            base_frequency_hz,
            ticks_per_beat,
            tempo_bpm,
            length_ticks,
        })
    }

    pub fn seconds_per_tick(&self) -> f64 {
        60.0 / (self.tempo_bpm * f64::from(self.ticks_per_beat))
    }

    pub fn ticks_to_seconds(&self, ticks: u64) -> f64 {
        ticks as f64 * 60.0 / (self.tempo_bpm * f64::from(self.ticks_per_beat))
    }
}

/// Root of a piece: header, scales, harmonies and instruments, each keyed
/// by its unique name.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub header: Header,
    scales: BTreeMap<String, Scale>,
    harmonies: BTreeMap<String, HarmonicSequence>,
    instruments: BTreeMap<String, Instrument>,
}

impl Composition {
    pub fn new(header: Header) -> Composition {
        Composition {
            header,
            scales: BTreeMap::new(),
            harmonies: BTreeMap::new(),
            instruments: BTreeMap::new(),
        }
    }

    pub fn base_frequency_hz(&self) -> f64 {
        self.header.base_frequency_hz
    }

    pub fn length_ticks(&self) -> u64 {
        self.header.length_ticks
    }

    pub fn add_scale(&mut self, scale: Scale) -> Result<(), ModelError> {
        insert_unique(&mut self.scales, "scale", scale.name().to_string(), scale)
    }

    /// Inserts or replaces a scale by name.
    pub fn set_scale(&mut self, scale: Scale) {
        self.scales.insert(scale.name().to_string(), scale);
    }

    pub fn add_harmony(&mut self, harmony: HarmonicSequence) -> Result<(), ModelError> {
        insert_unique(
            &mut self.harmonies,
            "harmony",
            harmony.name().to_string(),
            harmony,
        )
    }

    pub fn add_instrument(&mut self, instrument: Instrument) -> Result<(), ModelError> {
        insert_unique(
            &mut self.instruments,
            "instrument",
            instrument.name().to_string(),
            instrument,
        )
    }

    pub fn scale(&self, name: &str) -> Option<&Scale> {
        self.scales.get(name)
    }

    pub fn harmony(&self, name: &str) -> Option<&HarmonicSequence> {
        self.harmonies.get(name)
    }

    pub fn harmony_mut(&mut self, name: &str) -> Option<&mut HarmonicSequence> {
        self.harmonies.get_mut(name)
    }

    pub fn instrument(&self, name: &str) -> Option<&Instrument> {
        self.instruments.get(name)
    }

    pub fn instrument_mut(&mut self, name: &str) -> Option<&mut Instrument> {
        self.instruments.get_mut(name)
    }

    /// Scales in name order.
    pub fn scales(&self) -> impl Iterator<Item = &Scale> {
        self.scales.values()
    }

    pub fn harmonies(&self) -> impl Iterator<Item = &HarmonicSequence> {
        self.harmonies.values()
    }

    pub fn instruments(&self) -> impl Iterator<Item = &Instrument> {
        self.instruments.values()
    }

    pub fn instruments_mut(&mut self) -> impl Iterator<Item = &mut Instrument> {
        self.instruments.values_mut()
    }

    /// Normalizes every instrument score in place.
    pub fn normalize(&mut self) {
        for inst in self.instruments.values_mut() {
            inst.score = inst.score.normalized();
        }
    }
}

fn insert_unique<T>(
    map: &mut BTreeMap<String, T>,
    kind: &'static str,
    name: String,
    value: T,
) -> Result<(), ModelError> {
    if map.contains_key(&name) {
        return Err(ModelError::DuplicateName { kind, name });
    }
    map.insert(name, value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(start: u64, duration: u64) -> TimeInterval {
        TimeInterval::new(start, duration).unwrap()
    }

    fn two_tone() -> HarmonicSequence {
        HarmonicSequence::new(
            "H",
            1,
            "s",
            vec![
                TranspositionTone::new(0, iv(0, 480)),
                TranspositionTone::new(2, iv(480, 480)),
            ],
        )
    }

    #[test]
    fn interval_rules() {
        assert_eq!(TimeInterval::new(5, 0), Err(ModelError::ZeroDuration));
        assert_eq!(
            TimeInterval::new(u64::MAX, 1),
            Err(ModelError::IntervalOverflow)
        );
        let i = iv(10, 5);
        assert_eq!(i.end(), 15);
        assert!(i.contains(10) && i.contains(14) && !i.contains(15));
    }

    #[test]
    fn tone_lookup_uses_half_open_intervals() {
        let h = two_tone();
        assert_eq!(h.tone_index_at(0).unwrap(), 0);
        assert_eq!(h.tone_index_at(479).unwrap(), 0);
        assert_eq!(h.tone_index_at(480).unwrap(), 1);
        assert_eq!(tone_at(&h, 480).unwrap().key_index, 2);
        assert!(matches!(
            h.tone_at(960),
            Err(ModelError::TickOutOfRange { tick: 960, level: 1, .. })
        ));
    }

    #[test]
    fn lookup_outside_a_late_start() {
        let h = HarmonicSequence::new("H", 1, "s", vec![TranspositionTone::new(0, iv(10, 10))]);
        assert!(h.tone_at(3).is_err());
        assert!(h.tone_at(10).is_ok());
    }

    #[test]
    fn normalize_sorts_and_dedups() {
        let score = InstrumentScore::new(vec![Note::new(2, iv(480, 240)), Note::new(0, iv(0, 480))]);
        let n = normalize_score(&score);
        assert_eq!(n.notes[0].key_index, 0);
        assert_eq!(n.notes[1].key_index, 2);

        let dup = InstrumentScore::new(vec![Note::new(1, iv(0, 10)), Note::new(1, iv(0, 10))]);
        assert_eq!(dup.normalized().notes.len(), 1);

        assert_eq!(InstrumentScore::default().normalized(), InstrumentScore::default());
    }

    #[test]
    fn header_rejects_nonpositive() {
        assert!(Header::new(0.0, 480, 120.0, 10).is_err());
        assert!(Header::new(440.0, 0, 120.0, 10).is_err());
        assert!(Header::new(440.0, 480, f64::NAN, 10).is_err());
        assert!(Header::new(440.0, 480, 120.0, 0).is_err());
        let h = Header::new(440.0, 480, 120.0, 1920).unwrap();
        assert_eq!(h.ticks_to_seconds(1920), 2.0);
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut c = Composition::new(Header::new(440.0, 480, 120.0, 960).unwrap());
        c.add_harmony(two_tone()).unwrap();
        assert!(matches!(
            c.add_harmony(two_tone()),
            Err(ModelError::DuplicateName { kind: "harmony", .. })
        ));
    }

    fn arb_score() -> impl Strategy<Value = InstrumentScore> {
        prop::collection::vec((0usize..4, 0u64..20, 1u64..6, 1u8..=3), 0..24).prop_map(|v| {
            InstrumentScore::new(
                v.into_iter()
                    .map(|(k, s, d, vel)| Note::new(k, iv(s, d)).with_velocity(vel))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_and_keeps_distinct_notes(score in arb_score()) {
            let once = score.normalized();
            prop_assert_eq!(once.normalized(), once.clone());
            let distinct = |s: &InstrumentScore| {
                s.notes.iter().copied().collect::<std::collections::HashSet<_>>()
            };
            prop_assert_eq!(distinct(&once), distinct(&score));
            let sorted = once.notes.windows(2).all(|w| {
                (w[0].interval.start(), w[0].key_index) <= (w[1].interval.start(), w[1].key_index)
            });
            prop_assert!(sorted);
        }

        #[test]
        fn lookup_is_piecewise_constant(cuts in prop::collection::btree_set(1u64..200, 0..12)) {
            let mut bounds = vec![0u64];
            bounds.extend(cuts.iter().copied());
            bounds.push(200);
            let tones: Vec<_> = bounds
                .windows(2)
                .enumerate()
                .map(|(i, w)| TranspositionTone::new(i, iv(w[0], w[1] - w[0])))
                .collect();
            let n = tones.len();
            let h = HarmonicSequence::new("H", 1, "s", tones);
            let mut pieces = 0;
            let mut last = None;
            for t in 0..200 {
                let i = h.tone_index_at(t).unwrap();
                prop_assert!(h.tones[i].interval.contains(t));
                if last != Some(i) {
                    pieces += 1;
                    last = Some(i);
                }
            }
            prop_assert_eq!(pieces, n);
            prop_assert!(h.tone_at(200).is_err());
        }
    }
}
