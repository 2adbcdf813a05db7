use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::model::MAX_VELOCITY;
use crate::render::RenderError;
use crate::resolve::ResolvedEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Waveform {
    #[default]
    Sine,
    /// Fundamental plus partials 2f, 3f, 4f at 1/2, 1/3, 1/4 amplitude.
    Additive4,
}

impl Waveform {
    pub fn as_str(self) -> &'static str {
        match self {
            Waveform::Sine => "sine",
            Waveform::Additive4 => "additive-4",
        }
    }

    fn sample(self, phase: f64, frequency_hz: f64, sample_rate: f64) -> f64 {
        match self {
            Waveform::Sine => phase.sin(),
            Waveform::Additive4 => {
                let nyquist = sample_rate / 2.0;
                let mut acc = 0.0;
                let mut norm = 0.0;
                for k in 1..=4u32 {
                    let k = f64::from(k);
                    let amp = 1.0 / k;
                    norm += amp;
                    if k * frequency_hz < nyquist {
                        acc += amp * (k * phase).sin();
                    }
                }
                acc / norm
            }
        }
    }
}

impl fmt::Display for Waveform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Waveform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sine" => Ok(Waveform::Sine),
            "additive-4" => Ok(Waveform::Additive4),
            other => Err(format!(
                "unknown waveform `{other}` (expected `sine` or `additive-4`)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSettings {
    pub sample_rate: u32,
    pub waveform: Waveform,
    pub attack_sec: f64,
    pub release_sec: f64,
    pub master_gain: f64,
}

impl Default for RenderSettings {
    fn default() -> Self {
        RenderSettings {
            sample_rate: 44_100,
            waveform: Waveform::Sine,
            attack_sec: 0.010,
            release_sec: 0.050,
            master_gain: 0.8,
        }
    }
}

impl RenderSettings {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.sample_rate == 0 {
            return Err(RenderError::Settings("sample rate must be positive".into()));
        }
        let non_negative = |v: f64| v.is_finite() && v >= 0.0;
        if !non_negative(self.attack_sec) || !non_negative(self.release_sec) {
            return Err(RenderError::Settings(
                "attack and release must be finite and non-negative".into(),
            ));
        }
        if !(self.master_gain > 0.0 && self.master_gain <= 1.0) {
            return Err(RenderError::Settings(format!(
                "master gain {} outside (0, 1]",
                self.master_gain
            )));
        }
        Ok(())
    }

    /// Attack and release for a note of `duration_sec`, both shrunk by the
    /// same factor when they would not fit inside the note.
    pub fn envelope_for(&self, duration_sec: f64) -> (f64, f64) {
        let total = self.attack_sec + self.release_sec;
        if total > duration_sec && total > 0.0 {
            let k = duration_sec / total;
            (self.attack_sec * k, self.release_sec * k)
        } else {
            (self.attack_sec, self.release_sec)
        }
    }
}

/// Mono samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl AudioBuffer {
    pub fn duration_sec(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }
}

struct Voice {
    start: usize,
    sustain_len: usize,
    attack_len: usize,
    release_len: usize,
    frequency_hz: f64,
    amplitude: f64,
}

impl Voice {
    fn new(ev: &ResolvedEvent, settings: &RenderSettings) -> Voice {
        let sr = f64::from(settings.sample_rate);
        let to_samples = |sec: f64| (sec * sr).round() as usize;
        let (attack, release) = settings.envelope_for(ev.duration_sec);
        Voice {
            start: to_samples(ev.start_sec),
            sustain_len: to_samples(ev.duration_sec),
            attack_len: to_samples(attack),
            release_len: to_samples(release),
            frequency_hz: ev.frequency_hz,
            amplitude: f64::from(ev.velocity.min(MAX_VELOCITY)) / f64::from(MAX_VELOCITY),
        }
    }

    fn len(&self) -> usize {
        self.sustain_len + self.release_len
    }

    /// Linear rise over the attack, hold, then linear fall after the note
    /// ends. The release starts from wherever the attack got to.
    fn envelope(&self, i: usize) -> f64 {
        let rise = |i: usize| {
            if i < self.attack_len {
                i as f64 / self.attack_len as f64
            } else {
                1.0
            }
        };
        if i < self.sustain_len {
            rise(i)
        } else {
            let from = rise(self.sustain_len);
            // reaches exactly zero on the last release sample
            let t = (i - self.sustain_len + 1) as f64 / self.release_len.max(1) as f64;
            from * (1.0 - t).max(0.0)
        }
    }
}

/// Mixes every event into one mono buffer. The mix is scaled down to
/// `master_gain` only when its peak exceeds it.
pub fn synthesize(
    events: &[ResolvedEvent],
    settings: &RenderSettings,
) -> Result<AudioBuffer, RenderError> {
    settings.validate()?;
    let sr = f64::from(settings.sample_rate);
    let voices: Vec<Voice> = events.iter().map(|e| Voice::new(e, settings)).collect();
    let total = voices.iter().map(|v| v.start + v.len()).max().unwrap_or(0);
    let mut mix = vec![0.0f64; total];

    for v in &voices {
        let step = TAU * v.frequency_hz / sr;
        for i in 0..v.len() {
            let phase = step * i as f64;
            let s = settings.waveform.sample(phase, v.frequency_hz, sr);
            mix[v.start + i] += v.amplitude * v.envelope(i) * s;
        }
    }

    let peak = mix.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > settings.master_gain {
        let k = settings.master_gain / peak;
        for s in &mut mix {
            *s = (*s * k).clamp(-settings.master_gain, settings.master_gain);
        }
    }
    Ok(AudioBuffer {
        sample_rate: settings.sample_rate,
        samples: mix,
    })
}
