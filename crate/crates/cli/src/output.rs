//! Deterministic number rendering and atomic file output.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::NamedTempFile;

/// Significant digits kept in every emitted number.
pub const SIG_DIGITS: usize = 12;

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Shortest text that reads back as `round_sig(x)`; exponent notation only
/// for very small or very large magnitudes.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 {
        "0".to_string()
    } else if (1e-4..1e12).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Applies [`round_sig`] to every float in a JSON tree.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(v)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Where a command's result goes. A file target is opened as a temporary
/// sibling before any computation so path problems surface first, and is
/// renamed into place only once the whole content is written.
pub enum Sink {
    Stdout,
    File { temp: NamedTempFile, target: PathBuf },
}

impl Sink {
    pub fn open(out: Option<&Path>) -> io::Result<Self> {
        let Some(target) = out else {
            return Ok(Sink::Stdout);
        };
        let dir = match target.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        if target.is_dir() {
            return Err(io::Error::new(io::ErrorKind::IsADirectory, format!("{} is a directory", target.display())));
        }
        let temp = NamedTempFile::new_in(dir)?;
        Ok(Sink::File { temp, target: target.to_path_buf() })
    }

    pub fn finish(self, content: &str) -> io::Result<()> {
        match self {
            Sink::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(content.as_bytes())?;
                out.flush()
            }
            Sink::File { mut temp, target } => {
                temp.write_all(content.as_bytes())?;
                temp.as_file().sync_all()?;
                temp.persist(&target).map_err(|e| e.error)?;
                Ok(())
            }
        }
    }
}
