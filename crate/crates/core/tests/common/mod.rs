//! Shared fixtures for the integration tests: a seeded random composition
//! generator and a brute-force per-tick pitch evaluator.
//!
//! The evaluator deliberately avoids the library's resolver, tone lookup
//! and `Ratio` arithmetic: it scans tone lists linearly at every tick and
//! multiplies with `num_rational`.

#![allow(dead_code)]

use dyntrans::{
    Composition, HarmonicSequence, Header, Instrument, InstrumentScore, Note, Ratio, Scale,
    TimeInterval, TranspositionTone,
};
use num_rational::Ratio as Exact;
use rand::seq::SliceRandom;
use rand::Rng;

pub type ExactRatio = Exact<u128>;

pub struct GenLimits {
    pub max_length: u64,
    pub max_instruments: usize,
    /// Highest harmony level; level-n composition uses levels 1..n-1.
    pub max_level: u32,
    pub max_notes: usize,
}

impl Default for GenLimits {
    fn default() -> Self {
        GenLimits {
            max_length: 10_000,
            max_instruments: 4,
            max_level: 2,
            max_notes: 24,
        }
    }
}

fn random_ratio<R: Rng>(rng: &mut R) -> Ratio {
    Ratio::new(rng.gen_range(1..=16), rng.gen_range(1..=16)).unwrap()
}

fn random_scale<R: Rng>(rng: &mut R, name: &str) -> Scale {
    let n = rng.gen_range(1..=8);
    let mut keys: Vec<Ratio> = Vec::new();
    while keys.len() < n {
        let r = random_ratio(rng);
        if !keys.contains(&r) {
            keys.push(r);
        }
    }
    Scale::new(name, keys).unwrap()
}

/// Random strictly increasing cut points tiling `[0, length)`.
pub fn random_partition<R: Rng>(rng: &mut R, length: u64, max_pieces: usize) -> Vec<(u64, u64)> {
    let pieces = rng.gen_range(1..=max_pieces).min(length as usize);
    let mut cuts: Vec<u64> = (1..length).collect::<Vec<_>>();
    if cuts.len() > 4096 {
        cuts = (0..4096).map(|_| rng.gen_range(1..length)).collect();
        cuts.sort_unstable();
        cuts.dedup();
    }
    cuts.shuffle(rng);
    cuts.truncate(pieces - 1);
    cuts.push(0);
    cuts.push(length);
    cuts.sort_unstable();
    cuts.dedup();
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

pub fn random_composition<R: Rng>(rng: &mut R, limits: &GenLimits) -> Composition {
    let length = rng.gen_range(1..=limits.max_length);
    let ppq = *[24u32, 96, 480, 960].choose(rng).unwrap();
    let base = rng.gen_range(50.0..1000.0f64);
    let tempo = rng.gen_range(40.0..240.0f64);
    let mut c = Composition::new(Header::new(base, ppq, tempo, length).unwrap());

    let scale_count = rng.gen_range(1..=4);
    let scale_names: Vec<String> = (0..scale_count).map(|i| format!("s{i}")).collect();
    for name in &scale_names {
        c.add_scale(random_scale(rng, name)).unwrap();
    }

    // one or two alternative harmonies per level
    let mut by_level: Vec<Vec<String>> = Vec::new();
    for level in 1..=limits.max_level {
        let mut names = Vec::new();
        for alt in 0..rng.gen_range(1..=2) {
            let name = format!("L{level}{}", ['a', 'b'][alt]);
            let sname = scale_names.choose(rng).unwrap().clone();
            let keys = c.scale(&sname).unwrap().len();
            let tones = random_partition(rng, length, 12)
                .into_iter()
                .map(|(s, e)| {
                    TranspositionTone::new(
                        rng.gen_range(0..keys),
                        TimeInterval::new(s, e - s).unwrap(),
                    )
                })
                .collect();
            c.add_harmony(HarmonicSequence::new(name.clone(), level, sname, tones))
                .unwrap();
            names.push(name);
        }
        by_level.push(names);
    }

    for i in 0..rng.gen_range(0..=limits.max_instruments) {
        let sname = scale_names.choose(rng).unwrap().clone();
        let keys = c.scale(&sname).unwrap().len();
        let depth = rng.gen_range(0..=by_level.len());
        let harmonies = by_level[..depth]
            .iter()
            .map(|alts| alts.choose(rng).unwrap().clone())
            .collect();
        let notes = (0..rng.gen_range(0..=limits.max_notes))
            .map(|_| {
                let start = rng.gen_range(0..length);
                let dur = rng.gen_range(1..=length - start);
                Note::new(rng.gen_range(0..keys), TimeInterval::new(start, dur).unwrap())
                    .with_velocity(rng.gen_range(1..=127))
            })
            .collect();
        c.add_instrument(Instrument::new(
            format!("inst{i}"),
            sname,
            harmonies,
            InstrumentScore::new(notes).normalized(),
        ))
        .unwrap();
    }
    c
}

fn exact(r: Ratio) -> ExactRatio {
    ExactRatio::new(u128::from(r.numer()), u128::from(r.denom()))
}

pub fn as_exact(r: Ratio) -> ExactRatio {
    exact(r)
}

/// Transposition product for every tick of the composition, for one
/// instrument, found by scanning every tone of every bound level.
pub fn brute_force_transposition(c: &Composition, inst: &Instrument) -> Vec<ExactRatio> {
    let length = c.length_ticks();
    (0..length)
        .map(|t| {
            let mut acc = ExactRatio::from_integer(1);
            for hname in &inst.harmony_names {
                let h = c.harmony(hname).unwrap();
                let scale = c.scale(&h.scale_name).unwrap();
                let active: Vec<_> = h
                    .tones
                    .iter()
                    .filter(|tone| tone.interval.start() <= t && t < tone.interval.end())
                    .collect();
                assert_eq!(active.len(), 1, "tick {t} must hit exactly one tone");
                acc *= exact(scale.keys()[active[0].key_index]);
            }
            acc
        })
        .collect()
}

/// Oracle factor of every note of `inst`, in score order.
pub fn brute_force_note_factors(c: &Composition, inst: &Instrument) -> Vec<ExactRatio> {
    let per_tick = brute_force_transposition(c, inst);
    let scale = c.scale(&inst.scale_name).unwrap();
    inst.score
        .notes
        .iter()
        .map(|n| exact(scale.keys()[n.key_index]) * per_tick[n.interval.start() as usize])
        .collect()
}

/// Multiplies the ratio of one transposition tone by `r`, by pointing the
/// tone at `key * r` in its scale (appended when absent). Other tones and
/// other scale users keep their indices.
pub fn transpose_tone(c: &Composition, harmony: &str, tone: usize, r: Ratio) -> Composition {
    let mut out = c.clone();
    let h = out.harmony(harmony).unwrap().clone();
    let scale = out.scale(&h.scale_name).unwrap().clone();
    let target = scale.keys()[h.tones[tone].key_index].checked_mul(r).unwrap();
    let index = match scale.index_of(target) {
        Some(i) => i,
        None => {
            let mut keys = scale.keys().to_vec();
            keys.push(target);
            out.set_scale(Scale::new(scale.name(), keys).unwrap());
            scale.len()
        }
    };
    out.harmony_mut(harmony).unwrap().tones[tone].key_index = index;
    out
}
