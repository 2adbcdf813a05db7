//! The `.dts` text format.
//!
//! ```text
//! base      440.0            # f0 in Hz
//! ppq       480              # ticks per beat
//! tempo     120              # beats per minute
//! length    1920             # composition length in ticks
//!
//! scale fifths  1/1 3/2
//!
//! harmony H1 level 1 scale fifths
//!   tone 0 @ 0    +960
//!   tone 1 @ 960  +960
//! end
//!
//! instrument lead scale fifths harmonies H1
//!   note 0 @ 0  +480  vel 96
//! end
//! ```
//!
//! Keys in `tone` and `note` lines are 0-based indices into the bound scale;
//! a `num/den` literal is also accepted and replaced by its index. `#`
//! starts a comment. `vel` is optional and defaults to 96.

mod error;
mod parse;
mod write;

pub use error::{ParseError, ParseErrorKind, SourcePosition};
pub use parse::{parse, parse_bytes};
pub use write::serialize;

/// A small level-2 piece used as the golden fixture throughout the tests.
pub const REFERENCE_EXAMPLE: &str = "\
# header
base      440.0            # f0 in Hz
ppq       480              # ticks per beat
tempo     120              # beats per minute
length    1920             # composition length in ticks

scale just-major-7  1/1 9/8 5/4 4/3 3/2 5/3 15/8 2/1
scale fifths        1/1 3/2

harmony H1 level 1 scale fifths
  tone 0 @ 0    +960
  tone 1 @ 960  +960
end

instrument lead scale just-major-7 harmonies H1
  note 0 @ 0    +480  vel 96
  note 2 @ 480  +480  vel 96
  note 4 @ 960  +960  vel 112
end
";
