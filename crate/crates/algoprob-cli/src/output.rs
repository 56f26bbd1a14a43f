//! Atomic file output: write to a temporary sibling, then rename into
//! place, so interrupted runs never leave half-written artifacts.

use std::fs;
use std::path::Path;

use crate::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let parent = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(parent)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", parent.display())))?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, bytes)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(tmp, path)
        .map_err(|e| CliError::Runtime(format!("renaming to {}: {e}", path.display())))?;
    Ok(())
}
