use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dyntrans::format::REFERENCE_EXAMPLE;
use tempfile::TempDir;

fn dts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dts"))
        .args(args)
        .env("DTS_COLOR", "0")
        .output()
        .expect("run dts")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_clean_file_is_silent() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ref.dts", REFERENCE_EXAMPLE);
    let o = dts(&["validate", s(&f)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
}

#[test]
fn validate_reports_overlap_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let text = REFERENCE_EXAMPLE.replace("tone 1 @ 960  +960", "tone 1 @ 900  +1020");
    let f = write(&dir, "overlap.dts", &text);
    let o = dts(&["validate", s(&f)]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("overlap") && err.contains("harmony H1"), "{err}");
    assert!(err.starts_with(&format!("{}:0:0: error: ", s(&f))), "{err}");
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = TempDir::new().unwrap();
    let text = REFERENCE_EXAMPLE.replace("vel 112", "vel 300");
    let f = write(&dir, "range.dts", &text);
    let o = dts(&["resolve", s(&f)]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("{}:18:27: error: range: ", s(&f))), "{err}");
}

#[test]
fn boundary_crossing_is_a_warning_only() {
    let dir = TempDir::new().unwrap();
    let text = REFERENCE_EXAMPLE.replace("note 2 @ 480  +480", "note 2 @ 480  +960");
    let f = write(&dir, "cross.dts", &text);
    let o = dts(&["validate", s(&f)]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning: boundary-crossing"), "{}", stderr(&o));
}

#[test]
fn missing_file_is_an_io_failure() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.dts");
    for cmd in ["validate", "resolve"] {
        assert_eq!(code(&dts(&[cmd, s(&missing)])), 3);
    }
    let out = dir.path().join("o.wav");
    assert_eq!(code(&dts(&["render", s(&missing), "--out", s(&out)])), 3);
}

#[test]
fn unwritable_output_is_an_io_failure() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ref.dts", REFERENCE_EXAMPLE);
    let out = dir.path().join("no-such-dir").join("o.wav");
    assert_eq!(code(&dts(&["render", s(&f), "--out", s(&out)])), 3);
}

#[test]
fn usage_errors_exit_two_and_help_exits_zero() {
    assert_eq!(code(&dts(&[])), 2);
    assert_eq!(code(&dts(&["bogus"])), 2);
    assert_eq!(code(&dts(&["render", "x.dts"])), 2);
    assert_eq!(code(&dts(&["render", "x.dts", "--out", "o.wav", "--waveform", "saw"])), 2);
    assert_eq!(code(&dts(&["--help"])), 0);
    assert_eq!(code(&dts(&["--version"])), 0);
}

#[test]
fn resolve_prints_one_line_per_note() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ref.dts", REFERENCE_EXAMPLE);
    let o = dts(&["resolve", s(&f)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[0].starts_with("instrument\tfactor"));
    assert!(lines[3].contains("9/4") && lines[3].contains("990"), "{text}");
}

#[test]
fn resolve_table_lists_every_key_per_region() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ref.dts", REFERENCE_EXAMPLE);
    let o = dts(&["resolve", "--table", s(&f)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
        .collect();
    assert_eq!(rows.len(), 16, "{text}");
    assert!(rows[8].starts_with("960\t1920\t0\t1/1\t3/2\t660"), "{}", rows[8]);
}

fn wav_samples(path: &Path) -> usize {
    let bytes = std::fs::read(path).unwrap();
    assert_eq!(&bytes[..4], b"RIFF");
    let data_len = u32::from_le_bytes(bytes[40..44].try_into().unwrap()) as usize;
    assert_eq!(bytes.len(), 44 + data_len);
    data_len / 2
}

#[test]
fn render_writes_two_seconds_plus_release() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ref.dts", REFERENCE_EXAMPLE);
    let out = dir.path().join("o.wav");
    let o = dts(&["render", s(&f), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // 2.0 s of notes plus the 50 ms release of the final note
    assert_eq!(wav_samples(&out), 88_200 + 2_205);
    assert_eq!(stdout(&o).trim(), "rendered 3 events, 90405 samples");

    let half = dir.path().join("half.wav");
    assert_eq!(code(&dts(&["render", s(&f), "--out", s(&half), "--rate", "22050"])), 0);
    let n = wav_samples(&half);
    assert!(n.abs_diff(90_405 / 2) <= 1, "{n}");
}

#[test]
fn additive_waveform_changes_audio_not_events() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ref.dts", REFERENCE_EXAMPLE);
    let sine = dir.path().join("sine.wav");
    let add = dir.path().join("add.wav");
    let a = dts(&["render", s(&f), "--out", s(&sine)]);
    let b = dts(&["render", s(&f), "--out", s(&add), "--waveform", "additive-4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(std::fs::read(&sine).unwrap(), std::fs::read(&add).unwrap());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ref.dts", REFERENCE_EXAMPLE);
    let first = dir.path().join("1.wav");
    let second = dir.path().join("2.wav");
    dts(&["render", s(&f), "--out", s(&first)]);
    dts(&["render", s(&f), "--out", s(&second)]);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(dts(&["resolve", s(&f)]).stdout, dts(&["resolve", s(&f)]).stdout);
    assert_eq!(
        dts(&["resolve", "--table", s(&f)]).stdout,
        dts(&["resolve", "--table", s(&f)]).stdout
    );
}

#[test]
fn scales_lists_builtins_with_cents() {
    let o = dts(&["scales"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "major-triad: 1/1 5/4 3/2"), "{text}");
    assert!(text.contains("701.96"), "{text}");
    assert!(text.contains("+1.96"), "{text}");
}
