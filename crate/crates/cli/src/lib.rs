//! File formats, reports and command plumbing for `sturm-core`.
//!
//! * [`strm`]: binary tensor container.
//! * [`labels`]: `+1`/`-1` label files.
//! * [`dataset`]: tensor and label files addressed by a shared prefix.
//! * [`report`]: convergence traces and cross-validation reports.
//! * [`bench`]: per-iteration timing.
//!
//! Every writer goes through [`write_atomic`], so readers never observe a
//! partially written file.

pub mod bench;
pub mod dataset;
mod error;
pub mod labels;
pub mod report;
pub mod strm;

use std::io::Write;
use std::path::Path;

pub use error::{IoError, Result};

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| IoError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| IoError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}

/// Parses `AxBxC` into dimensions.
pub fn parse_dims(text: &str) -> Result<sturm_core::Dims> {
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    let bad = || IoError::Argument(format!("dims {text:?} must look like 10x10x10"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let n: Vec<usize> = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    sturm_core::Dims::new(n[0], n[1], n[2]).map_err(|_| bad())
}
