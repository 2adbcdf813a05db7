//! `dts`: validate, resolve and render `.dts` compositions.
//!
//! Exit codes: 0 success (warnings allowed), 1 parse or validation errors,
//! 2 usage errors, 3 I/O failures.

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use dyntrans::{
    builtin_scales, export_events, frequency_table, parse_bytes, resolve_composition, synthesize,
    validate_composition, write_wav, Composition, RenderSettings, Severity, Waveform,
};

#[derive(Parser)]
#[command(name = "dts", version, about = "Exact rational transposition sequencer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a composition; prints nothing when it is clean.
    Validate { path: PathBuf },
    /// Print the resolved event list, or per-instrument frequency tables.
    Resolve {
        path: PathBuf,
        /// Print every playable key over each harmonic region instead.
        #[arg(long)]
        table: bool,
    },
    /// Render a composition to a 16-bit mono WAV file.
    Render {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 44_100)]
        rate: u32,
        #[arg(long, default_value_t = Waveform::Sine)]
        waveform: Waveform,
    },
    /// List the built-in scales with cents and 12-TET deviation per key.
    Scales,
}

/// A failure that decides the process exit code.
enum Failure {
    /// Diagnostics were already printed.
    Invalid,
    Io(anyhow::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.into())
    }
}

struct Diagnostics {
    color: bool,
}

impl Diagnostics {
    fn new() -> Diagnostics {
        let disabled = std::env::var("DTS_COLOR").is_ok_and(|v| v == "0");
        Diagnostics {
            color: !disabled && std::io::stderr().is_terminal(),
        }
    }

    fn emit(&self, severity: Severity, location: &str, body: &str) {
        let (label, code) = match severity {
            Severity::Error => ("error", "31"),
            Severity::Warning => ("warning", "33"),
        };
        if self.color {
            eprintln!("{location}: \x1b[1;{code}m{label}\x1b[0m: {body}");
        } else {
            eprintln!("{location}: {label}: {body}");
        }
    }
}

fn load(path: &Path, diag: &Diagnostics) -> Result<Composition, Failure> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Io)?;
    let composition = parse_bytes(&bytes).map_err(|errors| {
        for e in &errors {
            let at = format!("{}:{}:{}", path.display(), e.position.line, e.position.column);
            diag.emit(Severity::Error, &at, &format!("{}: {}", e.kind, e.message));
        }
        Failure::Invalid
    })?;
    let report = validate_composition(&composition);
    let at = format!("{}:0:0", path.display());
    for v in &report.violations {
        diag.emit(v.severity(), &at, &v.to_string());
    }
    if report.is_valid() {
        Ok(composition)
    } else {
        Err(Failure::Invalid)
    }
}

fn resolve_or_report(
    c: &Composition,
    path: &Path,
    diag: &Diagnostics,
) -> Result<Vec<dyntrans::ResolvedEvent>, Failure> {
    resolve_composition(c).map_err(|e| {
        diag.emit(Severity::Error, &format!("{}:0:0", path.display()), &e.to_string());
        Failure::Invalid
    })
}

fn run(command: Command, diag: &Diagnostics) -> Result<(), Failure> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Validate { path } => {
            load(&path, diag)?;
        }
        Command::Resolve { path, table: false } => {
            let c = load(&path, diag)?;
            let events = resolve_or_report(&c, &path, diag)?;
            out.write_all(export_events(&events).as_bytes())?;
        }
        Command::Resolve { path, table: true } => {
            let c = load(&path, diag)?;
            for inst in c.instruments() {
                let table = frequency_table(&c, inst.name()).map_err(|e| {
                    diag.emit(Severity::Error, &format!("{}:0:0", path.display()), &e.to_string());
                    Failure::Invalid
                })?;
                writeln!(out, "instrument {}", table.instrument)?;
                writeln!(out, "start_tick\tend_tick\tkey\tratio\tfactor\tfrequency_hz")?;
                for row in &table.rows {
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}\t{}",
                        row.start_tick,
                        row.end_tick,
                        row.key_index,
                        row.key,
                        row.factor,
                        dyntrans::render::format_significant(row.frequency_hz, 6)
                    )?;
                }
            }
        }
        Command::Render {
            path,
            out: wav_path,
            rate,
            waveform,
        } => {
            let c = load(&path, diag)?;
            let events = resolve_or_report(&c, &path, diag)?;
            let settings = RenderSettings {
                sample_rate: rate,
                waveform,
                ..RenderSettings::default()
            };
            let buffer = synthesize(&events, &settings).map_err(|e| {
                diag.emit(Severity::Error, "dts", &e.to_string());
                Failure::Invalid
            })?;
            write_wav(&buffer, &wav_path).map_err(|e| Failure::Io(e.into()))?;
            writeln!(
                out,
                "rendered {} events, {} samples",
                events.len(),
                buffer.samples.len()
            )?;
        }
        Command::Scales => {
            for scale in builtin_scales() {
                let keys: Vec<String> = scale.keys().iter().map(|k| k.to_string()).collect();
                writeln!(out, "{}: {}", scale.name(), keys.join(" "))?;
                for key in scale.keys() {
                    writeln!(
                        out,
                        "  {key:>6}  {:>8.2} cents  {:>+7.2} from 12-TET",
                        key.cents(),
                        key.et12_deviation()
                    )?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let diag = Diagnostics::new();
    match run(cli.command, &diag) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid) => ExitCode::from(1),
        Err(Failure::Io(e)) => {
            diag.emit(Severity::Error, "dts", &format!("{e:#}"));
            ExitCode::from(3)
        }
    }
}
