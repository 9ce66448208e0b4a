//! Plain-text label files: one `+1` or `-1` per line.

use std::path::Path;

use sturm_core::Label;

use crate::error::{IoError, Result};
use crate::write_atomic;

/// Parses label text strictly. A final newline is optional; blank lines,
/// surrounding spaces and other spellings (`1`, `+1.0`) are rejected.
pub fn parse_labels(text: &str, path: &Path) -> Result<Vec<Label>> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split('\n')
        .enumerate()
        .map(|(i, raw)| {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            match line {
                "+1" => Ok(Label::Positive),
                "-1" => Ok(Label::Negative),
                other => Err(IoError::Labels {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected \"+1\" or \"-1\", found {other:?}"),
                }),
            }
        })
        .collect()
}

pub fn format_labels(labels: &[Label]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        out.push_str(if *l == Label::Positive { "+1\n" } else { "-1\n" });
    }
    out
}

pub fn read_labels(path: &Path) -> Result<Vec<Label>> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_labels(&text, path)
}

pub fn write_labels(path: &Path, labels: &[Label]) -> Result<()> {
    write_atomic(path, format_labels(labels).as_bytes())
}
