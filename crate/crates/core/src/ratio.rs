//! Exact positive rational numbers used for every pitch factor.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatioError {
    #[error("invalid ratio {numer}/{denom}: numerator and denominator must be positive")]
    NonPositive { numer: i128, denom: i128 },
    #[error("ratio product overflows 64-bit terms")]
    Overflow,
    #[error("malformed ratio `{0}`: expected `num/den`")]
    Malformed(String),
}

/// A strictly positive rational number kept in lowest terms.
///
/// Equality, hashing and ordering are exact; two ratios compare equal iff
/// their reduced terms match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    numer: u64,
    denom: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub const ONE: Ratio = Ratio { numer: 1, denom: 1 };
    pub const OCTAVE: Ratio = Ratio { numer: 2, denom: 1 };

    /// Builds a reduced ratio. Accepts signed input so that callers parsing
    /// user data get a proper error instead of a wrap.
    pub fn new(numer: i64, denom: i64) -> Result<Ratio, RatioError> {
        if numer <= 0 || denom <= 0 {
            return Err(RatioError::NonPositive {
                numer: numer.into(),
                denom: denom.into(),
            });
        }
        Ratio::from_unsigned(numer as u64, denom as u64)
    }

    pub fn from_unsigned(numer: u64, denom: u64) -> Result<Ratio, RatioError> {
        if numer == 0 || denom == 0 {
            return Err(RatioError::NonPositive {
                numer: numer.into(),
                denom: denom.into(),
            });
        }
        let g = gcd(numer, denom);
        Ok(Ratio {
            numer: numer / g,
            denom: denom / g,
        })
    }

    pub fn integer(n: u64) -> Result<Ratio, RatioError> {
        Ratio::from_unsigned(n, 1)
    }

    pub fn numer(self) -> u64 {
        self.numer
    }

    pub fn denom(self) -> u64 {
        self.denom
    }

    /// Exact product. Cross-reduces before multiplying, so the only way to
    /// fail is a reduced result that genuinely does not fit in 64 bits.
    pub fn checked_mul(self, other: Ratio) -> Result<Ratio, RatioError> {
        let g1 = gcd(self.numer, other.denom);
        let g2 = gcd(other.numer, self.denom);
        let numer = (self.numer / g1)
            .checked_mul(other.numer / g2)
            .ok_or(RatioError::Overflow)?;
        let denom = (self.denom / g2)
            .checked_mul(other.denom / g1)
            .ok_or(RatioError::Overflow)?;
        Ok(Ratio { numer, denom })
    }

    pub fn recip(self) -> Ratio {
        Ratio {
            numer: self.denom,
            denom: self.numer,
        }
    }

    pub fn checked_div(self, other: Ratio) -> Result<Ratio, RatioError> {
        self.checked_mul(other.recip())
    }

    /// Product of an iterator of ratios; the empty product is 1/1.
    pub fn product<I>(iter: I) -> Result<Ratio, RatioError>
    where
        I: IntoIterator<Item = Ratio>,
    {
        iter.into_iter()
            .try_fold(Ratio::ONE, |acc, r| acc.checked_mul(r))
    }

    /// Moves the ratio by whole octaves into `[1, 2)`.
    pub fn octave_normalize(self) -> Ratio {
        // Divide out a power of two where one exists, multiply the other
        // side otherwise. Only inputs with a term above 2^63 can push the
        // result past 64 bits; those panic.
        let mut numer = u128::from(self.numer);
        let mut denom = u128::from(self.denom);
        while numer < denom {
            if denom % 2 == 0 {
                denom /= 2;
            } else {
                numer *= 2;
            }
        }
        while numer >= 2 * denom {
            if numer % 2 == 0 {
                numer /= 2;
            } else {
                denom *= 2;
            }
        }
        let numer = u64::try_from(numer).expect("octave-normalized numerator exceeds 64 bits");
        let denom = u64::try_from(denom).expect("octave-normalized denominator exceeds 64 bits");
        Ratio::from_unsigned(numer, denom).expect("non-zero terms")
    }

    pub fn to_f64(self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// Interval size in cents: `1200 * log2(numer / denom)`.
    pub fn cents(self) -> f64 {
        1200.0 * ((self.numer as f64).log2() - (self.denom as f64).log2())
    }

    /// Signed distance in cents to the nearest 12-tone equal tempered step.
    pub fn et12_deviation(self) -> f64 {
        let c = self.cents();
        c - 100.0 * (c / 100.0).round()
    }
}

impl Default for Ratio {
    fn default() -> Self {
        Ratio::ONE
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = u128::from(self.numer) * u128::from(other.denom);
        let rhs = u128::from(other.numer) * u128::from(self.denom);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

impl FromStr for Ratio {
    type Err = RatioError;

    /// Parses the strict `num/den` form. Signs are rejected as malformed
    /// rather than as non-positive, since they are never valid tokens.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || RatioError::Malformed(s.to_string());
        let (n, d) = s.split_once('/').ok_or_else(malformed)?;
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !digits(n) || !digits(d) {
            return Err(malformed());
        }
        let numer: u64 = n.parse().map_err(|_| RatioError::Overflow)?;
        let denom: u64 = d.parse().map_err(|_| RatioError::Overflow)?;
        Ratio::from_unsigned(numer, denom)
    }
}
