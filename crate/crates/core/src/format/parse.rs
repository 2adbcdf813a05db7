//! Line-oriented `.dts` parser.
//!
//! Each line holds one directive. Errors never stop the parse: the offending
//! line is dropped, the error recorded, and parsing resumes on the next line.

use std::collections::{HashMap, HashSet};

use crate::format::error::{ParseError, ParseErrorKind, SourcePosition};
use crate::model::{
    Composition, HarmonicSequence, Header, Instrument, InstrumentScore, Note, TimeInterval,
    TranspositionTone, DEFAULT_VELOCITY, MAX_VELOCITY,
};
use crate::ratio::{Ratio, RatioError};
use crate::scale::{Scale, ScaleError};

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn pos(&self) -> SourcePosition {
        SourcePosition::new(self.line, self.column)
    }
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (column, (byte, ch)) in (1..).zip(code.char_indices()) {
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &code[b..byte],
                    line: line_no,
                    column: c,
                });
            }
        } else if start.is_none() {
            start = Some((byte, column));
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token {
            text: &code[b..],
            line: line_no,
            column: c,
        });
    }
    tokens
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

type LineResult<T> = Result<T, ParseError>;

fn err(pos: SourcePosition, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
    ParseError {
        position: pos,
        kind,
        message: message.into(),
    }
}

/// Cursor over the tokens of one line.
struct Line<'a> {
    tokens: Vec<Token<'a>>,
    next: usize,
    line_no: usize,
}

impl<'a> Line<'a> {
    fn end_pos(&self) -> SourcePosition {
        match self.tokens.last() {
            Some(t) => SourcePosition::new(t.line, t.column + t.text.chars().count()),
            None => SourcePosition::new(self.line_no, 1),
        }
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.next).copied()
    }

    fn bump(&mut self, what: &str) -> LineResult<Token<'a>> {
        match self.tokens.get(self.next) {
            Some(t) => {
                self.next += 1;
                Ok(*t)
            }
            None => Err(err(
                self.end_pos(),
                ParseErrorKind::Syntax,
                format!("expected {what}"),
            )),
        }
    }

    fn keyword(&mut self, kw: &str) -> LineResult<()> {
        let t = self.bump(&format!("`{kw}`"))?;
        if t.text == kw {
            Ok(())
        } else {
            Err(err(
                t.pos(),
                ParseErrorKind::Syntax,
                format!("expected `{kw}`, found `{}`", t.text),
            ))
        }
    }

    fn identifier(&mut self, what: &str) -> LineResult<Token<'a>> {
        let t = self.bump(what)?;
        if is_identifier(t.text) {
            Ok(t)
        } else {
            Err(err(
                t.pos(),
                ParseErrorKind::Syntax,
                format!("invalid {what} `{}`", t.text),
            ))
        }
    }

    fn unsigned(&mut self, what: &str) -> LineResult<(u64, Token<'a>)> {
        let t = self.bump(what)?;
        parse_unsigned(t.text, t.pos(), what).map(|v| (v, t))
    }

    /// A number introduced by `marker`, either as a separate token
    /// (`@ 480`) or attached (`@480`).
    fn marked(&mut self, marker: char, what: &str) -> LineResult<(u64, SourcePosition)> {
        let t = self.bump(&format!("`{marker}` {what}"))?;
        let Some(rest) = t.text.strip_prefix(marker) else {
            return Err(err(
                t.pos(),
                ParseErrorKind::Syntax,
                format!("expected `{marker}` before {what}, found `{}`", t.text),
            ));
        };
        if rest.is_empty() {
            let (v, n) = self.unsigned(what)?;
            Ok((v, n.pos()))
        } else {
            let pos = SourcePosition::new(t.line, t.column + 1);
            parse_unsigned(rest, pos, what).map(|v| (v, pos))
        }
    }

    fn finish(&self) -> LineResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(err(
                t.pos(),
                ParseErrorKind::Syntax,
                format!("unexpected trailing token `{}`", t.text),
            )),
        }
    }
}

fn parse_unsigned(text: &str, pos: SourcePosition, what: &str) -> LineResult<u64> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(
            pos,
            ParseErrorKind::Syntax,
            format!("expected {what} as a non-negative integer, found `{text}`"),
        ));
    }
    text.parse().map_err(|_| {
        err(
            pos,
            ParseErrorKind::Range,
            format!("{what} `{text}` does not fit in 64 bits"),
        )
    })
}

fn parse_positive_real(t: Token<'_>, what: &str) -> LineResult<f64> {
    let looks_numeric = t
        .text
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'));
    let value: f64 = match t.text.parse() {
        Ok(v) if looks_numeric => v,
        _ => {
            return Err(err(
                t.pos(),
                ParseErrorKind::Syntax,
                format!("expected {what} as a number, found `{}`", t.text),
            ))
        }
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(err(
            t.pos(),
            ParseErrorKind::Range,
            format!("{what} must be positive and finite, found `{}`", t.text),
        ))
    }
}

fn parse_ratio(t: Token<'_>) -> LineResult<Ratio> {
    t.text.parse::<Ratio>().map_err(|e| {
        let message = match e {
            RatioError::NonPositive { .. } => format!(
                "ratio `{}` must have positive numerator and denominator",
                t.text
            ),
            RatioError::Overflow => format!("ratio `{}` does not fit in 64 bits", t.text),
            RatioError::Malformed(_) => format!("malformed ratio `{}`, expected `num/den`", t.text),
        };
        err(t.pos(), ParseErrorKind::BadRatio, message)
    })
}

fn interval(start: u64, duration: u64, pos: SourcePosition) -> LineResult<TimeInterval> {
    TimeInterval::new(start, duration)
        .map_err(|e| err(pos, ParseErrorKind::Range, e.to_string()))
}

struct PendingHarmony {
    name: String,
    level: u32,
    scale: String,
    tones: Vec<TranspositionTone>,
    opened_at: SourcePosition,
    keep: bool,
}

struct PendingInstrument {
    name: String,
    scale: String,
    harmonies: Vec<String>,
    notes: Vec<Note>,
    opened_at: SourcePosition,
    keep: bool,
}

enum Block {
    Top,
    Harmony(PendingHarmony),
    Instrument(PendingInstrument),
}

#[derive(Default)]
struct HeaderFields {
    base: Option<f64>,
    ppq: Option<u32>,
    tempo: Option<f64>,
    length: Option<u64>,
    /// Directives seen, valid or not; a rejected value is not also "missing".
    seen: Vec<&'static str>,
}

struct Parser {
    errors: Vec<ParseError>,
    header: HeaderFields,
    scales: Vec<Scale>,
    scale_index: HashMap<String, usize>,
    harmonies: Vec<HarmonicSequence>,
    harmony_names: HashSet<String>,
    instruments: Vec<Instrument>,
    instrument_names: HashSet<String>,
    /// Names whose definition was rejected. References to them are not
    /// reported again.
    poisoned: HashSet<String>,
    block: Block,
}

impl Parser {
    fn new() -> Parser {
        Parser {
            errors: Vec::new(),
            header: HeaderFields::default(),
            scales: Vec::new(),
            scale_index: HashMap::new(),
            harmonies: Vec::new(),
            harmony_names: HashSet::new(),
            instruments: Vec::new(),
            instrument_names: HashSet::new(),
            poisoned: HashSet::new(),
            block: Block::Top,
        }
    }

    fn line(&mut self, text: &str, line_no: usize) {
        let tokens = tokenize(text, line_no);
        if tokens.is_empty() {
            return;
        }
        let mut line = Line {
            tokens,
            next: 0,
            line_no,
        };
        if let Err(e) = self.directive(&mut line) {
            self.errors.push(e);
            // a bad block header still opens its block so the body and
            // `end` are consumed, but the entity is dropped
            match &mut self.block {
                Block::Harmony(h) if h.opened_at.line == line_no => h.keep = false,
                Block::Instrument(i) if i.opened_at.line == line_no => i.keep = false,
                _ => {}
            }
        }
    }

    fn directive(&mut self, line: &mut Line<'_>) -> LineResult<()> {
        let head = line.bump("directive")?;
        match (head.text, &self.block) {
            ("end", Block::Top) => Err(err(
                head.pos(),
                ParseErrorKind::Syntax,
                "`end` without an open harmony or instrument block",
            )),
            ("end", _) => {
                line.finish()?;
                self.close_block();
                Ok(())
            }
            ("tone", Block::Harmony(_)) => self.tone(line),
            ("note", Block::Instrument(_)) => self.note(line),
            ("tone" | "note", _) => Err(err(
                head.pos(),
                ParseErrorKind::Syntax,
                format!(
                    "`{}` is only allowed inside a {} block",
                    head.text,
                    if head.text == "tone" { "harmony" } else { "instrument" }
                ),
            )),
            ("base" | "ppq" | "tempo" | "length" | "scale" | "harmony" | "instrument", Block::Harmony(_) | Block::Instrument(_)) => {
                Err(err(
                    head.pos(),
                    ParseErrorKind::Syntax,
                    format!("`{}` inside an open block; missing `end`?", head.text),
                ))
            }
            ("base" | "ppq" | "tempo" | "length", Block::Top) => self.header_line(head, line),
            ("scale", Block::Top) => self.scale(line),
            ("harmony", Block::Top) => self.harmony(head, line),
            ("instrument", Block::Top) => self.instrument(head, line),
            (other, _) => Err(err(
                head.pos(),
                ParseErrorKind::UnknownDirective,
                format!("unknown directive `{other}`"),
            )),
        }
    }

    fn header_line(&mut self, head: Token<'_>, line: &mut Line<'_>) -> LineResult<()> {
        let key = match head.text {
            "base" => "base",
            "ppq" => "ppq",
            "tempo" => "tempo",
            _ => "length",
        };
        if self.header.seen.contains(&key) {
            return Err(err(
                head.pos(),
                ParseErrorKind::DuplicateName,
                format!("`{}` is already set", head.text),
            ));
        }
        self.header.seen.push(key);
        let value = line.bump("a value")?;
        line.finish()?;
        match head.text {
            "base" => self.header.base = Some(parse_positive_real(value, "base frequency")?),
            "tempo" => self.header.tempo = Some(parse_positive_real(value, "tempo")?),
            "ppq" => {
                let v = parse_unsigned(value.text, value.pos(), "ticks per beat")?;
                let v = u32::try_from(v).ok().filter(|v| *v > 0).ok_or_else(|| {
                    err(
                        value.pos(),
                        ParseErrorKind::Range,
                        "ticks per beat must be in 1..=4294967295",
                    )
                })?;
                self.header.ppq = Some(v);
            }
            _ => {
                let v = parse_unsigned(value.text, value.pos(), "length")?;
                if v == 0 {
                    return Err(err(
                        value.pos(),
                        ParseErrorKind::Range,
                        "length must be at least one tick",
                    ));
                }
                self.header.length = Some(v);
            }
        }
        Ok(())
    }

    fn scale(&mut self, line: &mut Line<'_>) -> LineResult<()> {
        let name = line.identifier("scale name")?;
        let result = self.scale_body(name, line);
        if result.is_err() && !self.scale_index.contains_key(name.text) {
            self.poisoned.insert(name.text.to_string());
        }
        result
    }

    fn scale_body(&mut self, name: Token<'_>, line: &mut Line<'_>) -> LineResult<()> {
        let mut keys = Vec::new();
        let mut first_error = None;
        while let Some(t) = line.peek() {
            line.next += 1;
            match parse_ratio(t) {
                Ok(r) => keys.push((r, t)),
                Err(e) => {
                    // report every bad ratio on the line, not just the first
                    if first_error.is_none() {
                        first_error = Some(e);
                    } else {
                        self.errors.push(e);
                    }
                }
            }
        }
        if let Some(e) = first_error {
            return Err(e);
        }
        if keys.is_empty() {
            return Err(err(
                line.end_pos(),
                ParseErrorKind::Syntax,
                format!("scale `{}` needs at least one ratio", name.text),
            ));
        }
        if self.scale_index.contains_key(name.text) {
            return Err(err(
                name.pos(),
                ParseErrorKind::DuplicateName,
                format!("scale `{}` is already defined", name.text),
            ));
        }
        let scale = Scale::new(name.text, keys.iter().map(|(r, _)| *r).collect()).map_err(
            |e| match e {
                ScaleError::DuplicateKey { index, key, .. } => err(
                    keys[index].1.pos(),
                    ParseErrorKind::BadRatio,
                    format!("key {key} appears twice in scale `{}`", name.text),
                ),
                ScaleError::Empty(_) => unreachable!("checked above"),
            },
        )?;
        self.scale_index
            .insert(name.text.to_string(), self.scales.len());
        self.scales.push(scale);
        Ok(())
    }

    fn scale_ref(&self, t: Token<'_>) -> LineResult<()> {
        if self.scale_index.contains_key(t.text) || self.poisoned.contains(t.text) {
            Ok(())
        } else {
            Err(err(
                t.pos(),
                ParseErrorKind::BadReference,
                format!("scale `{}` is not defined above", t.text),
            ))
        }
    }

    fn harmony(&mut self, head: Token<'_>, line: &mut Line<'_>) -> LineResult<()> {
        // open first so the block body is consumed even if the header is bad
        self.block = Block::Harmony(PendingHarmony {
            name: String::new(),
            level: 0,
            scale: String::new(),
            tones: Vec::new(),
            opened_at: head.pos(),
            keep: true,
        });
        let name = line.identifier("harmony name")?;
        if let Block::Harmony(h) = &mut self.block {
            h.name = name.text.to_string();
        }
        line.keyword("level")?;
        let (level, level_tok) = line.unsigned("level")?;
        let level = u32::try_from(level).ok().filter(|l| *l >= 1).ok_or_else(|| {
            err(
                level_tok.pos(),
                ParseErrorKind::Range,
                format!("harmony level must be at least 1, found `{}`", level_tok.text),
            )
        })?;
        line.keyword("scale")?;
        let scale = line.identifier("scale name")?;
        line.finish()?;
        self.scale_ref(scale)?;
        if self.harmony_names.contains(name.text) {
            return Err(err(
                name.pos(),
                ParseErrorKind::DuplicateName,
                format!("harmony `{}` is already defined", name.text),
            ));
        }
        if let Block::Harmony(h) = &mut self.block {
            h.name = name.text.to_string();
            h.level = level;
            h.scale = scale.text.to_string();
        }
        Ok(())
    }

    fn instrument(&mut self, head: Token<'_>, line: &mut Line<'_>) -> LineResult<()> {
        self.block = Block::Instrument(PendingInstrument {
            name: String::new(),
            scale: String::new(),
            harmonies: Vec::new(),
            notes: Vec::new(),
            opened_at: head.pos(),
            keep: true,
        });
        let name = line.identifier("instrument name")?;
        if let Block::Instrument(i) = &mut self.block {
            i.name = name.text.to_string();
        }
        line.keyword("scale")?;
        let scale = line.identifier("scale name")?;
        let mut harmonies = Vec::new();
        if line.peek().is_some() {
            line.keyword("harmonies")?;
            while line.peek().is_some() {
                let h = line.identifier("harmony name")?;
                if !self.harmony_names.contains(h.text) && !self.poisoned.contains(h.text) {
                    return Err(err(
                        h.pos(),
                        ParseErrorKind::BadReference,
                        format!("harmony `{}` is not defined above", h.text),
                    ));
                }
                harmonies.push(h.text.to_string());
            }
            if harmonies.is_empty() {
                return Err(err(
                    line.end_pos(),
                    ParseErrorKind::Syntax,
                    "expected at least one harmony name after `harmonies`",
                ));
            }
        }
        self.scale_ref(scale)?;
        if self.instrument_names.contains(name.text) {
            return Err(err(
                name.pos(),
                ParseErrorKind::DuplicateName,
                format!("instrument `{}` is already defined", name.text),
            ));
        }
        if let Block::Instrument(i) = &mut self.block {
            i.name = name.text.to_string();
            i.scale = scale.text.to_string();
            i.harmonies = harmonies;
        }
        Ok(())
    }

    /// A key is a 0-based index, or a ratio that must appear in `scale`.
    fn key(&self, line: &mut Line<'_>, scale: &str) -> LineResult<usize> {
        let t = line.bump("key index")?;
        if t.text.contains('/') {
            let r = parse_ratio(t)?;
            if self.poisoned.contains(scale) {
                return Ok(0);
            }
            let found = self
                .scale_index
                .get(scale)
                .and_then(|&i| self.scales[i].index_of(r));
            return found.ok_or_else(|| {
                err(
                    t.pos(),
                    ParseErrorKind::BadReference,
                    format!("key {r} is not in scale `{scale}`"),
                )
            });
        }
        let v = parse_unsigned(t.text, t.pos(), "key index")?;
        usize::try_from(v)
            .map_err(|_| err(t.pos(), ParseErrorKind::Range, "key index too large"))
    }

    fn timing(line: &mut Line<'_>) -> LineResult<TimeInterval> {
        let (start, _) = line.marked('@', "start tick")?;
        let (duration, dpos) = line.marked('+', "duration")?;
        interval(start, duration, dpos)
    }

    fn tone(&mut self, line: &mut Line<'_>) -> LineResult<()> {
        let scale = match &self.block {
            Block::Harmony(h) => h.scale.clone(),
            _ => unreachable!(),
        };
        let key_index = self.key(line, &scale)?;
        let iv = Self::timing(line)?;
        line.finish()?;
        if let Block::Harmony(h) = &mut self.block {
            h.tones.push(TranspositionTone::new(key_index, iv));
        }
        Ok(())
    }

    fn note(&mut self, line: &mut Line<'_>) -> LineResult<()> {
        let scale = match &self.block {
            Block::Instrument(i) => i.scale.clone(),
            _ => unreachable!(),
        };
        let key_index = self.key(line, &scale)?;
        let iv = Self::timing(line)?;
        let mut velocity = DEFAULT_VELOCITY;
        if line.peek().is_some() {
            line.keyword("vel")?;
            let (v, t) = line.unsigned("velocity")?;
            velocity = u8::try_from(v)
                .ok()
                .filter(|v| (1..=MAX_VELOCITY).contains(v))
                .ok_or_else(|| {
                    err(
                        t.pos(),
                        ParseErrorKind::Range,
                        format!("velocity must be in 1..={MAX_VELOCITY}, found {v}"),
                    )
                })?;
        }
        line.finish()?;
        if let Block::Instrument(i) = &mut self.block {
            i.notes.push(Note::new(key_index, iv).with_velocity(velocity));
        }
        Ok(())
    }

    fn close_block(&mut self) {
        match std::mem::replace(&mut self.block, Block::Top) {
            Block::Top => {}
            Block::Harmony(h) => {
                if !h.keep && !self.harmony_names.contains(&h.name) {
                    self.poisoned.insert(h.name);
                } else if h.keep {
                    self.harmony_names.insert(h.name.clone());
                    self.harmonies
                        .push(HarmonicSequence::new(h.name, h.level, h.scale, h.tones));
                }
            }
            Block::Instrument(i) => {
                if i.keep {
                    self.instrument_names.insert(i.name.clone());
                    let score = InstrumentScore::new(i.notes).normalized();
                    self.instruments
                        .push(Instrument::new(i.name, i.scale, i.harmonies, score));
                }
            }
        }
    }

    fn finish(mut self, last_line: usize) -> Result<Composition, Vec<ParseError>> {
        let unclosed = match &self.block {
            Block::Top => None,
            Block::Harmony(h) => Some(("harmony", h.opened_at)),
            Block::Instrument(i) => Some(("instrument", i.opened_at)),
        };
        if let Some((what, pos)) = unclosed {
            self.errors.push(err(
                pos,
                ParseErrorKind::Syntax,
                format!("{what} block is never closed with `end`"),
            ));
        }

        let eof = SourcePosition::new(last_line.max(1), 1);
        let mut missing = |name: &str| {
            self.errors.push(err(
                eof,
                ParseErrorKind::Syntax,
                format!("missing `{name}` directive"),
            ))
        };
        let h = &self.header;
        for name in ["base", "ppq", "tempo", "length"] {
            if !h.seen.contains(&name) {
                missing(name);
            }
        }
        if !self.errors.is_empty() {
            self.errors.sort_by_key(|e| e.position);
            return Err(self.errors);
        }

        let header = Header::new(
            h.base.unwrap(),
            h.ppq.unwrap(),
            h.tempo.unwrap(),
            h.length.unwrap(),
        )
        .expect("header fields checked while parsing");
        let mut c = Composition::new(header);
        // names were checked for uniqueness while parsing
        for s in self.scales {
            c.add_scale(s).expect("unique scale");
        }
        for hs in self.harmonies {
            c.add_harmony(hs).expect("unique harmony");
        }
        for i in self.instruments {
            c.add_instrument(i).expect("unique instrument");
        }
        Ok(c)
    }
}

/// Parses `.dts` text into a structurally well-formed composition, or
/// returns every error found. Semantic checks live in
/// [`crate::validate::validate_composition`].
pub fn parse(text: &str) -> Result<Composition, Vec<ParseError>> {
    let mut parser = Parser::new();
    let mut last = 0;
    for (i, line) in text.lines().enumerate() {
        parser.line(line, i + 1);
        last = i + 1;
    }
    parser.finish(last)
}

/// Like [`parse`], for raw bytes. Invalid UTF-8 is reported as a syntax
/// error at the first bad byte.
pub fn parse_bytes(bytes: &[u8]) -> Result<Composition, Vec<ParseError>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            // the prefix is valid UTF-8 by construction
            let prefix = std::str::from_utf8(valid).unwrap_or_default();
            let line = prefix.matches('\n').count() + 1;
            let line_start = prefix.rfind('\n').map_or(0, |i| i + 1);
            let column = prefix[line_start..].chars().count() + 1;
            Err(vec![err(
                SourcePosition::new(line, column),
                ParseErrorKind::Syntax,
                "input is not valid UTF-8",
            )])
        }
    }
}
