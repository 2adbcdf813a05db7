use std::fmt::Write;

use crate::resolve::ResolvedEvent;

pub const EVENT_HEADER: &str = "instrument\tfactor\tfrequency_hz\tstart_sec\tduration_sec\tvelocity";

/// Fixed-point rendering of `x` with `digits` significant digits.
pub fn format_significant(x: f64, digits: u32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1) as usize, x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = |mag: i32| (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals(magnitude), x);
    // rounding can carry into a new leading digit, e.g. 999.9996 -> 1000.000
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded.abs() >= 10f64.powi(magnitude + 1) {
        format!("{:.*}", decimals(magnitude + 1), x)
    } else {
        s
    }
}

/// Tab-separated listing, header first, one line per event in the given order.
pub fn export_events(events: &[ResolvedEvent]) -> String {
    let mut out = String::from(EVENT_HEADER);
    out.push('\n');
    for e in events {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{:.6}\t{}",
            e.instrument,
            e.factor,
            format_significant(e.frequency_hz, 6),
            e.start_sec,
            e.duration_sec,
            e.velocity
        );
    }
    out
}
