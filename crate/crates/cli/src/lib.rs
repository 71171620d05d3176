//! File formats, figures, and reporting around the core attack engine.

use std::io;
use std::path::Path;

pub mod capture_io;
pub mod report;
pub mod svg;

/// Writes through a sibling temp file and renames, so readers never observe
/// a half-written artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let directory = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = match directory {
        Some(dir) => dir.join(&tmp_name),
        None => tmp_name.into(),
    };
    std::fs::write(&tmp, bytes)?;
    match std::fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = std::fs::remove_file(&tmp);
            Err(e)
        }
    }
}
