//! Workload builders shared by the criterion benches.

use dyntrans::{
    Composition, HarmonicSequence, Header, Instrument, InstrumentScore, Note, Ratio, Scale,
    TimeInterval, TranspositionTone,
};

/// A level-3 piece: `instruments` voices, each playing `notes_per_instrument`
/// quarter notes over two stacked harmonies that change every bar.
pub fn layered_composition(instruments: usize, notes_per_instrument: usize) -> Composition {
    let ppq = 480u64;
    let length = notes_per_instrument as u64 * ppq;
    let mut c = Composition::new(Header::new(440.0, ppq as u32, 120.0, length).unwrap());
    let r = |n, d| Ratio::new(n, d).unwrap();
    c.add_scale(
        Scale::new(
            "just-major-7",
            vec![r(1, 1), r(9, 8), r(5, 4), r(4, 3), r(3, 2), r(5, 3), r(15, 8), r(2, 1)],
        )
        .unwrap(),
    )
    .unwrap();
    c.add_scale(Scale::new("changes", vec![r(1, 1), r(4, 3), r(3, 2), r(5, 3)]).unwrap())
        .unwrap();
    c.add_scale(Scale::new("shift", vec![r(1, 1), r(9, 8)]).unwrap())
        .unwrap();

    let tiles = |span: u64, keys: usize| -> Vec<TranspositionTone> {
        (0..length.div_ceil(span))
            .map(|i| {
                let start = i * span;
                let dur = span.min(length - start);
                TranspositionTone::new(i as usize % keys, TimeInterval::new(start, dur).unwrap())
            })
            .collect()
    };
    c.add_harmony(HarmonicSequence::new("H1", 1, "changes", tiles(4 * ppq, 4)))
        .unwrap();
    c.add_harmony(HarmonicSequence::new("H2", 2, "shift", tiles(32 * ppq, 2)))
        .unwrap();

    for i in 0..instruments {
        let notes = (0..notes_per_instrument)
            .map(|n| {
                Note::new((n * 3 + i) % 8, TimeInterval::new(n as u64 * ppq, ppq).unwrap())
            })
            .collect();
        c.add_instrument(Instrument::new(
            format!("voice{i}"),
            "just-major-7",
            vec!["H1".into(), "H2".into()],
            InstrumentScore::new(notes),
        ))
        .unwrap();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workload_is_valid() {
        let c = layered_composition(3, 100);
        assert!(dyntrans::validate_composition(&c).is_empty());
        assert_eq!(dyntrans::resolve_composition(&c).unwrap().len(), 300);
    }
}
