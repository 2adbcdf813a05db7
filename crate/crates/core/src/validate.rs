//! Semantic checks over a parsed or hand-built [`Composition`].
//!
//! Violations are data: a report collects every one found, in a fixed
//! order (harmonies by name, then instruments by name).

use std::fmt;

use crate::model::{Composition, HarmonicSequence, Instrument, MAX_VELOCITY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    /// Legal but probably unintended, e.g. a note held across a transposition.
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Overlap,
    Gap,
    Unsorted,
    SpanStart,
    SpanEnd,
    EmptyHarmony,
    UnknownScale,
    UnknownHarmony,
    LevelOrder,
    KeyRange,
    TickRange,
    VelocityRange,
    BoundaryCrossing,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Overlap => "overlap",
            ViolationKind::Gap => "gap",
            ViolationKind::Unsorted => "unsorted",
            ViolationKind::SpanStart => "span-start",
            ViolationKind::SpanEnd => "span-end",
            ViolationKind::EmptyHarmony => "empty-harmony",
            ViolationKind::UnknownScale => "unknown-scale",
            ViolationKind::UnknownHarmony => "unknown-harmony",
            ViolationKind::LevelOrder => "level-order",
            ViolationKind::KeyRange => "key-range",
            ViolationKind::TickRange => "tick-range",
            ViolationKind::VelocityRange => "velocity-range",
            ViolationKind::BoundaryCrossing => "boundary-crossing",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            ViolationKind::BoundaryCrossing => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where in the composition a violation sits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Location {
    Harmony { name: String, tone: Option<usize> },
    Instrument { name: String, note: Option<usize> },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Harmony { name, tone: None } => write!(f, "harmony {name}"),
            Location::Harmony {
                name,
                tone: Some(i),
            } => write!(f, "harmony {name} tone {i}"),
            Location::Instrument { name, note: None } => write!(f, "instrument {name}"),
            Location::Instrument {
                name,
                note: Some(i),
            } => write!(f, "instrument {name} note {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Violation {
    pub location: Location,
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    pub fn severity(&self) -> Severity {
        self.kind.severity()
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.kind, self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when there are no errors; warnings are allowed.
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity() == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity() == Severity::Warning)
    }

    fn push(&mut self, location: Location, kind: ViolationKind, message: String) {
        self.violations.push(Violation {
            location,
            kind,
            message,
        });
    }
}

pub fn validate_composition(c: &Composition) -> ValidationReport {
    let mut report = ValidationReport::default();
    for h in c.harmonies() {
        check_harmony(c, h, &mut report);
    }
    for inst in c.instruments() {
        check_instrument(c, inst, &mut report);
    }
    report
}

fn check_harmony(c: &Composition, h: &HarmonicSequence, report: &mut ValidationReport) {
    let at = |tone: Option<usize>| Location::Harmony {
        name: h.name().to_string(),
        tone,
    };
    let length = c.length_ticks();

    if h.level == 0 {
        report.push(
            at(None),
            ViolationKind::LevelOrder,
            "harmony levels start at 1; level 0 is the instrument score".into(),
        );
    }
    let scale_len = match c.scale(&h.scale_name) {
        Some(s) => Some(s.len()),
        None => {
            report.push(
                at(None),
                ViolationKind::UnknownScale,
                format!("scale `{}` is not defined", h.scale_name),
            );
            None
        }
    };
    if h.tones.is_empty() {
        report.push(
            at(None),
            ViolationKind::EmptyHarmony,
            format!("no tones; a harmony must span [0, {length})"),
        );
        return;
    }

    for (i, tone) in h.tones.iter().enumerate() {
        if let Some(n) = scale_len {
            if tone.key_index >= n {
                report.push(
                    at(Some(i)),
                    ViolationKind::KeyRange,
                    format!(
                        "key index {} out of range for scale `{}` with {n} keys",
                        tone.key_index, h.scale_name
                    ),
                );
            }
        }
        if tone.interval.end() > length {
            report.push(
                at(Some(i)),
                ViolationKind::TickRange,
                format!(
                    "tone ends at tick {} past composition length {length}",
                    tone.interval.end()
                ),
            );
        }
        if i == 0 {
            continue;
        }
        let prev = h.tones[i - 1].interval;
        let cur = tone.interval;
        if cur.start() < prev.start() {
            report.push(
                at(Some(i)),
                ViolationKind::Unsorted,
                format!(
                    "tone starts at tick {} before tone {} at tick {}",
                    cur.start(),
                    i - 1,
                    prev.start()
                ),
            );
        } else if cur.start() < prev.end() {
            report.push(
                at(Some(i)),
                ViolationKind::Overlap,
                format!(
                    "tone starts at tick {} before tone {} ends at tick {}",
                    cur.start(),
                    i - 1,
                    prev.end()
                ),
            );
        } else if cur.start() > prev.end() {
            report.push(
                at(Some(i)),
                ViolationKind::Gap,
                format!(
                    "gap between tones {} and {i}: ticks [{}, {})",
                    i - 1,
                    prev.end(),
                    cur.start()
                ),
            );
        }
    }

    let first = h.tones[0].interval;
    if first.start() != 0 {
        report.push(
            at(Some(0)),
            ViolationKind::SpanStart,
            format!("first tone starts at tick {}, not 0", first.start()),
        );
    }
    let last_idx = h.tones.len() - 1;
    let last = h.tones[last_idx].interval;
    if last.end() < length {
        report.push(
            at(Some(last_idx)),
            ViolationKind::SpanEnd,
            format!(
                "last tone ends at tick {} before composition length {length}",
                last.end()
            ),
        );
    }
}

fn check_instrument(c: &Composition, inst: &Instrument, report: &mut ValidationReport) {
    let at = |note: Option<usize>| Location::Instrument {
        name: inst.name().to_string(),
        note,
    };
    let length = c.length_ticks();

    let scale_len = match c.scale(&inst.scale_name) {
        Some(s) => Some(s.len()),
        None => {
            report.push(
                at(None),
                ViolationKind::UnknownScale,
                format!("scale `{}` is not defined", inst.scale_name),
            );
            None
        }
    };

    let mut bound = Vec::with_capacity(inst.harmony_names.len());
    for (i, hname) in inst.harmony_names.iter().enumerate() {
        let expected = i as u64 + 1;
        match c.harmony(hname) {
            None => report.push(
                at(None),
                ViolationKind::UnknownHarmony,
                format!("harmony `{hname}` is not defined"),
            ),
            Some(h) if u64::from(h.level) != expected => report.push(
                at(None),
                ViolationKind::LevelOrder,
                format!(
                    "harmony `{hname}` has level {} but is bound in position {expected}",
                    h.level
                ),
            ),
            Some(h) => bound.push(h),
        }
    }

    for (i, note) in inst.score.notes.iter().enumerate() {
        if let Some(n) = scale_len {
            if note.key_index >= n {
                report.push(
                    at(Some(i)),
                    ViolationKind::KeyRange,
                    format!(
                        "key index {} out of range for scale `{}` with {n} keys",
                        note.key_index, inst.scale_name
                    ),
                );
            }
        }
        if note.interval.end() > length {
            report.push(
                at(Some(i)),
                ViolationKind::TickRange,
                format!(
                    "note ends at tick {} past composition length {length}",
                    note.interval.end()
                ),
            );
        }
        if note.velocity == 0 || note.velocity > MAX_VELOCITY {
            report.push(
                at(Some(i)),
                ViolationKind::VelocityRange,
                format!("velocity {} outside 1..={MAX_VELOCITY}", note.velocity),
            );
        }
        for h in &bound {
            let Ok(tone) = h.tone_at(note.interval.start()) else {
                continue;
            };
            if tone.interval.end() < note.interval.end() && tone.interval.end() < length {
                report.push(
                    at(Some(i)),
                    ViolationKind::BoundaryCrossing,
                    format!(
                        "note sounds past the level-{} tone boundary at tick {}; it keeps the onset transposition",
                        h.level,
                        tone.interval.end()
                    ),
                );
            }
        }
    }
}
