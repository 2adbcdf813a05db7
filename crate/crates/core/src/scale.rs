//! Named, ordered collections of rational keys.

use std::collections::HashSet;

use thiserror::Error;

use crate::ratio::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScaleError {
    #[error("scale `{0}` has no keys")]
    Empty(String),
    #[error("scale `{name}` repeats key {key} at index {index}")]
    DuplicateKey { name: String, key: Ratio, index: usize },
}

/// An ordered set of keys. Order is the index order used by notes and
/// tones; keys need not ascend or stay within one octave.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scale {
    name: String,
    keys: Vec<Ratio>,
}

impl Scale {
    pub fn new(name: impl Into<String>, keys: Vec<Ratio>) -> Result<Scale, ScaleError> {
        let name = name.into();
        if keys.is_empty() {
            return Err(ScaleError::Empty(name));
        }
        let mut seen = HashSet::with_capacity(keys.len());
        for (index, key) in keys.iter().enumerate() {
            if !seen.insert(*key) {
                return Err(ScaleError::DuplicateKey {
                    name,
                    key: *key,
                    index,
                });
            }
        }
        Ok(Scale { name, keys })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn keys(&self) -> &[Ratio] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    // A constructed scale is never empty; provided for clippy's sake.
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, index: usize) -> Option<Ratio> {
        self.keys.get(index).copied()
    }

    pub fn index_of(&self, key: Ratio) -> Option<usize> {
        self.keys.iter().position(|k| *k == key)
    }
}

const BUILTINS: &[(&str, &[(u64, u64)])] = &[
    (
        "just-major-7",
        &[(1, 1), (9, 8), (5, 4), (4, 3), (3, 2), (5, 3), (15, 8), (2, 1)],
    ),
    ("major-triad", &[(1, 1), (5, 4), (3, 2)]),
    ("minor-triad", &[(1, 1), (6, 5), (3, 2)]),
    // Historical listing with 5/6 in sixth place (a minor third below the
    // tonic rather than a major sixth above); `just-major-7` is the
    // ascending just major scale.
    (
        "classic-major",
        &[(1, 1), (9, 8), (5, 4), (4, 3), (3, 2), (5, 6), (15, 8), (2, 1)],
    ),
];

/// The built-in just-intonation scales, in a fixed order.
pub fn builtin_scales() -> Vec<Scale> {
    BUILTINS
        .iter()
        .map(|(name, keys)| {
            let keys = keys
                .iter()
                .map(|&(n, d)| Ratio::from_unsigned(n, d).expect("builtin ratio"))
                .collect();
            Scale::new(*name, keys).expect("builtin scale")
        })
        .collect()
}

pub fn builtin_scale(name: &str) -> Option<Scale> {
    builtin_scales().into_iter().find(|s| s.name() == name)
}
