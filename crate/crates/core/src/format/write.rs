//! Canonical `.dts` output.

use std::fmt::Write;

use crate::model::Composition;

/// Writes `c` in canonical form: header, scales, harmonies, instruments;
/// each group sorted by name, notes in normalized order, ratios reduced.
pub fn serialize(c: &Composition) -> String {
    let mut out = String::new();
    let h = &c.header;
    // `{:?}` always keeps a decimal point or exponent, and round-trips
    let _ = writeln!(out, "base {:?}", h.base_frequency_hz);
    let _ = writeln!(out, "ppq {}", h.ticks_per_beat);
    let _ = writeln!(out, "tempo {:?}", h.tempo_bpm);
    let _ = writeln!(out, "length {}", h.length_ticks);

    let mut scales = c.scales().peekable();
    if scales.peek().is_some() {
        out.push('\n');
    }
    for s in scales {
        out.push_str("scale ");
        out.push_str(s.name());
        for k in s.keys() {
            let _ = write!(out, " {k}");
        }
        out.push('\n');
    }

    for hs in c.harmonies() {
        let _ = writeln!(
            out,
            "\nharmony {} level {} scale {}",
            hs.name(),
            hs.level,
            hs.scale_name
        );
        for t in &hs.tones {
            let _ = writeln!(
                out,
                "  tone {} @ {} +{}",
                t.key_index,
                t.interval.start(),
                t.interval.duration()
            );
        }
        out.push_str("end\n");
    }

    for inst in c.instruments() {
        let _ = write!(out, "\ninstrument {} scale {}", inst.name(), inst.scale_name);
        if !inst.harmony_names.is_empty() {
            out.push_str(" harmonies");
            for name in &inst.harmony_names {
                out.push(' ');
                out.push_str(name);
            }
        }
        out.push('\n');
        for n in &inst.score.normalized().notes {
            let _ = writeln!(
                out,
                "  note {} @ {} +{} vel {}",
                n.key_index,
                n.interval.start(),
                n.interval.duration(),
                n.velocity
            );
        }
        out.push_str("end\n");
    }
    out
}
