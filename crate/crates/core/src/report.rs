//! Line-delimited JSON records.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// One compact JSON object, no trailing newline. Struct fields keep their
/// declaration order and maps are sorted, so equal inputs give equal bytes.
pub fn to_line<R: Serialize>(record: &R) -> Result<String> {
    serde_json::to_string(record).map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))
}

/// Writes each record on its own line.
pub fn write_lines<R: Serialize>(out: &mut impl Write, records: &[R]) -> std::io::Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(std::io::Error::other)?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes `lines` (already serialized) to `path`, one per line.
pub fn write_file(path: &Path, lines: &[String]) -> Result<()> {
    let mut body = String::new();
    for l in lines {
        body.push_str(l);
        body.push('\n');
    }
    std::fs::write(path, body).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
